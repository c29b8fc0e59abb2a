//! Point configurations: the integer grid, the two-distances-per-axis row
//! construction and seeded random rational sets.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Scalar};
use crate::geometry::{Point, PointSet};

/// Axis-parallel rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    #[serde(with = "exact::serde_scalar")]
    pub x0: Scalar,
    #[serde(with = "exact::serde_scalar")]
    pub x1: Scalar,
    #[serde(with = "exact::serde_scalar")]
    pub y0: Scalar,
    #[serde(with = "exact::serde_scalar")]
    pub y1: Scalar,
}

impl Rect {
    pub fn new(x0: Scalar, x1: Scalar, y0: Scalar, y1: Scalar) -> Result<Rect> {
        if x0 > x1 || y0 > y1 {
            return Err(Error::InvalidParameter(
                "rectangle corners are out of order".into(),
            ));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    /// `[0, side]²`.
    pub fn square(side: i64) -> Rect {
        Rect {
            x0: exact::int(0),
            x1: exact::int(side),
            y0: exact::int(0),
            y1: exact::int(side),
        }
    }
}

/// Serializable description of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Grid {
        k: u32,
    },
    Rows {
        k: u32,
    },
    Random {
        n: usize,
        seed: u64,
        rect: Rect,
        denom_bound: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<PointSet> {
        match self {
            GeneratorSpec::Grid { k } => grid(*k),
            GeneratorSpec::Rows { k } => row_construction(*k),
            GeneratorSpec::Random {
                n,
                seed,
                rect,
                denom_bound,
            } => random_rational(*n, *seed, rect, *denom_bound),
        }
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    Ok(())
}

/// `{1, …, k}²`, row by row.
pub fn grid(k: u32) -> Result<PointSet> {
    check_k(k)?;
    let k = k as i64;
    let pts = (1..=k)
        .flat_map(|y| (1..=k).map(move |x| Point::int(x, y)))
        .collect();
    PointSet::new(pts)
}

/// `k` rows `y = a`; row `a` holds `x = (b_a + a′)/(10n)` for `a′ = 1..k`, with
/// `n = k²` and offsets `b_a = a/(100n²)`.
///
/// Two rows never share an abscissa: equality would need
/// `(a − a″)/(100n²) = a‴ − a′` with the left side nonzero and below 1 in size.
/// Hence within a row distances are `j/(10n)`, across rows they are `|a − a″|`,
/// and the ℓ_∞ census has `2k − 2` values.
pub fn row_construction(k: u32) -> Result<PointSet> {
    check_k(k)?;
    let k = k as i64;
    let n = k * k;
    let mut pts = Vec::with_capacity(n as usize);
    for a in 1..=k {
        let b = exact::ratio(a, 100 * n * n);
        for ap in 1..=k {
            let x = (&b + exact::int(ap)) / exact::int(10 * n);
            pts.push(Point::new(x, exact::int(a)));
        }
    }
    PointSet::new(pts)
}

/// Integer range `[ceil(lo·d), floor(hi·d)]` of lattice indices along one axis.
fn lattice_range(lo: &Scalar, hi: &Scalar, d: &Scalar) -> Result<(i64, i64)> {
    let a = (lo * d).ceil().to_integer();
    let b = (hi * d).floor().to_integer();
    match (a.to_i64(), b.to_i64()) {
        (Some(a), Some(b)) if b.checked_sub(a).is_some() => Ok((a, b)),
        _ => Err(Error::InvalidParameter(
            "rectangle too large for the lattice sampler".into(),
        )),
    }
}

/// `n` distinct points drawn uniformly from the lattice `(1/D)ℤ²` inside `rect`,
/// with `D = denom_bound`. Every coordinate therefore has denominator at most
/// `D`. Deterministic in `seed`.
pub fn random_rational(n: usize, seed: u64, rect: &Rect, denom_bound: u64) -> Result<PointSet> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "n must be at least 2, got {n}"
        )));
    }
    if denom_bound == 0 {
        return Err(Error::InvalidParameter(
            "denom_bound must be at least 1".into(),
        ));
    }
    let d = Scalar::from_integer(BigInt::from(denom_bound));
    let (xa, xb) = lattice_range(&rect.x0, &rect.x1, &d)?;
    let (ya, yb) = lattice_range(&rect.y0, &rect.y1, &d)?;
    let cols = (xb - xa + 1).max(0) as u128;
    let rows = (yb - ya + 1).max(0) as u128;
    let capacity = cols * rows;
    if capacity < n as u128 {
        return Err(Error::CapacityExceeded(format!(
            "rectangle holds {capacity} lattice points at denominator {denom_bound}, {n} requested"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = FxHashSet::default();
    let mut pts = Vec::with_capacity(n);
    if capacity <= 4 * n as u128 {
        // Dense request: a partial shuffle of all cells avoids long rejection runs.
        let mut cells: Vec<u64> = (0..capacity as u64).collect();
        for i in 0..n {
            let j = rng.gen_range(i..cells.len());
            cells.swap(i, j);
        }
        for &c in &cells[..n] {
            let (i, j) = ((c as u128 % cols) as i64, (c as u128 / cols) as i64);
            pts.push((xa + i, ya + j));
        }
    } else {
        while pts.len() < n {
            let c = (rng.gen_range(xa..=xb), rng.gen_range(ya..=yb));
            if seen.insert(c) {
                pts.push(c);
            }
        }
    }
    let scale = |i: i64| Scalar::new(BigInt::from(i), BigInt::from(denom_bound));
    PointSet::new(
        pts.into_iter()
            .map(|(i, j)| Point::new(scale(i), scale(j)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn grid_shape() {
        assert_eq!(grid(3).unwrap().len(), 9);
        assert!(matches!(grid(1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn rows_have_distinct_abscissae() {
        let p = row_construction(5).unwrap();
        let xs: std::collections::BTreeSet<_> = p.iter().map(|q| q.x.clone()).collect();
        assert_eq!(xs.len(), 25);
        assert!(p.iter().all(|q| q.x.is_positive() && q.x < exact::int(1)));
    }

    #[test]
    fn random_is_deterministic_and_bounded() {
        let r = Rect::square(10);
        let a = random_rational(50, 1, &r, 7).unwrap();
        let b = random_rational(50, 1, &r, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_rational(50, 2, &r, 7).unwrap());
        for q in &a {
            assert!(q.x.denom() <= &BigInt::from(7) && q.y.denom() <= &BigInt::from(7));
            assert!(q.x >= r.x0 && q.x <= r.x1 && q.y >= r.y0 && q.y <= r.y1);
        }
    }

    #[test]
    fn capacity() {
        let unit = Rect::square(1);
        assert_eq!(random_rational(4, 3, &unit, 1).unwrap().len(), 4);
        assert!(matches!(
            random_rational(5, 3, &unit, 1),
            Err(Error::CapacityExceeded(_))
        ));
    }
}
