//! Distinct-distance censuses, ℓ_∞ pair classification and incidence counts.
//!
//! Coordinates are first scaled by their common denominator `L`, so every key
//! becomes an integer (`L^p` or `L` times the true key). When those integers
//! provably fit in 128 bits the pair loop runs on machine words; otherwise it
//! falls back to big integers. Either way no rational is normalized per pair.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::hash::Hash;

use crate::bisector::Bisector;
use crate::error::{Error, Result};
use crate::exact::Scalar;
use crate::geometry::{DistanceKey, PNorm, Point, PointSet};
use crate::poly::Poly2;

/// Points scaled to integers by the common denominator `l` of all coordinates.
#[derive(Clone, Debug)]
pub struct IntegerFrame {
    pub l: BigInt,
    pub coords: Vec<(BigInt, BigInt)>,
}

impl IntegerFrame {
    pub fn new(p: &PointSet) -> IntegerFrame {
        let l = p.iter().fold(BigInt::one(), |acc, q| {
            acc.lcm(q.x.denom()).lcm(q.y.denom())
        });
        let lq = Scalar::from_integer(l.clone());
        let coords = p
            .iter()
            .map(|q| ((&q.x * &lq).to_integer(), (&q.y * &lq).to_integer()))
            .collect();
        IntegerFrame { l, coords }
    }

    /// Bits needed for the largest coordinate magnitude.
    fn max_bits(&self) -> u64 {
        self.coords
            .iter()
            .map(|(x, y)| x.bits().max(y.bits()))
            .max()
            .unwrap_or(0)
    }

    /// The coordinates as `i128` when every pairwise key under `m` fits in a `u128`.
    fn small(&self, m: PNorm) -> Option<Vec<(i128, i128)>> {
        let diff_bits = self.max_bits() + 1;
        let fits = match m {
            PNorm::Infinity => diff_bits <= 126,
            PNorm::Finite(p) => diff_bits * u64::from(p) < 127,
        };
        if !fits {
            return None;
        }
        self.coords
            .iter()
            .map(|(x, y)| Some((x.to_i128()?, y.to_i128()?)))
            .collect()
    }

    /// True key from a key computed in scaled coordinates.
    fn unscale_key(&self, k: BigInt, m: PNorm) -> Scalar {
        let den = match m {
            PNorm::Infinity => self.l.clone(),
            PNorm::Finite(p) => num_traits::pow(self.l.clone(), p as usize),
        };
        Scalar::new(k, den)
    }
}

fn small_key(a: (i128, i128), b: (i128, i128), m: PNorm) -> u128 {
    let dx = a.0.abs_diff(b.0);
    let dy = a.1.abs_diff(b.1);
    match m {
        PNorm::Infinity => dx.max(dy),
        PNorm::Finite(p) => dx.pow(p) + dy.pow(p),
    }
}

pub(crate) fn big_key(a: &(BigInt, BigInt), b: &(BigInt, BigInt), m: PNorm) -> BigInt {
    let dx = (&a.0 - &b.0).abs();
    let dy = (&a.1 - &b.1).abs();
    match m {
        PNorm::Infinity => dx.max(dy),
        PNorm::Finite(p) => num_traits::pow(dx, p as usize) + num_traits::pow(dy, p as usize),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceCensus {
    pub metric: PNorm,
    pub n: usize,
    pub distinct_count: usize,
    /// Multiplicity of each distance key over unordered pairs.
    pub histogram: BTreeMap<Scalar, u64>,
    /// `D(u, P)` for every point, by index.
    pub per_point: Vec<usize>,
    pub t_max: usize,
}

impl DistanceCensus {
    pub fn keys(&self) -> impl Iterator<Item = DistanceKey> + '_ {
        self.histogram.keys().map(|k| DistanceKey {
            metric: self.metric,
            key: k.clone(),
        })
    }

    pub fn pair_count(&self) -> u64 {
        self.histogram.values().sum()
    }
}

type Tally<K> = (FxHashMap<K, u64>, Vec<(usize, usize)>);

/// Histogram over unordered pairs plus per-point distinct counts.
fn tally<K, F>(n: usize, key: F) -> Tally<K>
where
    K: Eq + Hash + Ord + Clone + Send,
    F: Fn(usize, usize) -> K + Sync,
{
    (0..n)
        .into_par_iter()
        .fold(
            || (FxHashMap::default(), Vec::new()),
            |(mut hist, mut per): Tally<K>, i| {
                let mut row: Vec<K> = Vec::with_capacity(n.saturating_sub(1));
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let k = key(i, j);
                    if j > i {
                        *hist.entry(k.clone()).or_insert(0) += 1;
                    }
                    row.push(k);
                }
                row.sort_unstable();
                row.dedup();
                per.push((i, row.len()));
                (hist, per)
            },
        )
        .reduce(
            || (FxHashMap::default(), Vec::new()),
            |(h1, p1), (h2, p2)| {
                // Fold the smaller map into the larger one.
                let ((mut big, mut pb), (small, ps)) = if h1.len() >= h2.len() {
                    ((h1, p1), (h2, p2))
                } else {
                    ((h2, p2), (h1, p1))
                };
                for (k, c) in small {
                    *big.entry(k).or_insert(0) += c;
                }
                pb.extend(ps);
                (big, pb)
            },
        )
}

/// Exact census of all pairwise distances of `p` under `m`.
pub fn distance_census(p: &PointSet, m: PNorm) -> Result<DistanceCensus> {
    let m = m.validate()?;
    let n = p.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "a census needs at least two points".into(),
        ));
    }
    let frame = IntegerFrame::new(p);
    let (histogram, per): (BTreeMap<Scalar, u64>, _) = match frame.small(m) {
        Some(c) => {
            let (h, per) = tally(n, |i, j| small_key(c[i], c[j], m));
            let hist = h
                .into_iter()
                .map(|(k, v)| (frame.unscale_key(BigInt::from(k), m), v))
                .collect();
            (hist, per)
        }
        None => {
            let c = &frame.coords;
            let (h, per) = tally(n, |i, j| big_key(&c[i], &c[j], m));
            let hist = h
                .into_iter()
                .map(|(k, v)| (frame.unscale_key(k, m), v))
                .collect();
            (hist, per)
        }
    };
    let mut per_point = vec![0; n];
    for (i, c) in per {
        per_point[i] = c;
    }
    Ok(DistanceCensus {
        metric: m,
        n,
        distinct_count: histogram.len(),
        t_max: per_point.iter().copied().max().unwrap_or(0),
        histogram,
        per_point,
    })
}

/// Horizontal/vertical split of all pairs under ℓ_∞. Ties count as both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairClassification {
    pub total: u64,
    pub horizontal: u64,
    pub vertical: u64,
    pub both: u64,
    pub horizontal_degree: Vec<usize>,
    pub vertical_degree: Vec<usize>,
}

/// `cmp(i, j)` orders `|dx|` against `|dy|` for the pair.
fn classify_with<F>(n: usize, cmp: F) -> PairClassification
where
    F: Fn(usize, usize) -> std::cmp::Ordering + Sync,
{
    let rows: Vec<(usize, usize, u64, u64, u64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut hd, mut vd, mut h, mut v, mut b) = (0, 0, 0, 0, 0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let o = cmp(i, j);
                let (is_h, is_v) = (o.is_ge(), o.is_le());
                hd += is_h as usize;
                vd += is_v as usize;
                if j > i {
                    h += is_h as u64;
                    v += is_v as u64;
                    b += (is_h && is_v) as u64;
                }
            }
            (hd, vd, h, v, b)
        })
        .collect();
    let mut out = PairClassification {
        total: (n as u64) * (n as u64).saturating_sub(1) / 2,
        horizontal: 0,
        vertical: 0,
        both: 0,
        horizontal_degree: Vec::with_capacity(n),
        vertical_degree: Vec::with_capacity(n),
    };
    for (hd, vd, h, v, b) in rows {
        out.horizontal_degree.push(hd);
        out.vertical_degree.push(vd);
        out.horizontal += h;
        out.vertical += v;
        out.both += b;
    }
    out
}

/// A pair is horizontal when `|dx| ≥ |dy|` and vertical when `|dy| ≥ |dx|`.
pub fn classify_pairs_linf(p: &PointSet) -> Result<PairClassification> {
    if p.len() < 2 {
        return Err(Error::InvalidInput(
            "classification needs at least two points".into(),
        ));
    }
    let frame = IntegerFrame::new(p);
    let n = p.len();
    Ok(match frame.small(PNorm::Infinity) {
        Some(c) => classify_with(n, |i, j| {
            c[i].0.abs_diff(c[j].0).cmp(&c[i].1.abs_diff(c[j].1))
        }),
        None => {
            let c = &frame.coords;
            classify_with(n, |i, j| {
                (&c[i].0 - &c[j].0).abs().cmp(&(&c[i].1 - &c[j].1).abs())
            })
        }
    })
}

/// A curve given by exact data whose membership is decidable at rational points.
#[derive(Clone, Debug)]
pub enum ImplicitCurve {
    Poly(Poly2),
    Bisector(Box<Bisector>),
}

impl ImplicitCurve {
    pub fn contains(&self, q: &Point) -> bool {
        match self {
            ImplicitCurve::Poly(f) => f.eval_point(q).is_zero(),
            ImplicitCurve::Bisector(b) => b.contains(q),
        }
    }
}

/// Number of pairs `(q, γ)` with `q` on `γ`, by brute force.
pub fn incidences(p: &PointSet, curves: &[ImplicitCurve]) -> usize {
    curves
        .par_iter()
        .map(|g| p.iter().filter(|q| g.contains(q)).count())
        .sum()
}

/// Reference census straight from rational keys; used to cross-check the fast path.
pub fn naive_distinct_count(p: &PointSet, m: PNorm) -> usize {
    let mut keys: Vec<Scalar> = Vec::new();
    for (i, a) in p.iter().enumerate() {
        for b in &p.points()[i + 1..] {
            keys.push(crate::geometry::lp_distance_key(a, b, m).key);
        }
    }
    keys.sort();
    keys.dedup();
    keys.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{self, int, ratio};
    use crate::generators::{grid, random_rational, row_construction, Rect};

    #[test]
    fn grid_and_rows() {
        let c = distance_census(&grid(3).unwrap(), PNorm::Infinity).unwrap();
        assert_eq!(c.distinct_count, 2);
        assert_eq!(c.pair_count(), 36);
        let r = distance_census(&row_construction(3).unwrap(), PNorm::Infinity).unwrap();
        assert_eq!(r.distinct_count, 4);
        let keys: Vec<_> = r.histogram.keys().cloned().collect();
        assert_eq!(keys, vec![ratio(1, 90), ratio(2, 90), int(1), int(2)]);
    }

    #[test]
    fn collinear_progression() {
        let p = PointSet::new((1..=5).map(|i| Point::int(i, 0)).collect()).unwrap();
        let c = distance_census(&p, PNorm::Finite(2)).unwrap();
        assert_eq!((c.distinct_count, c.t_max), (4, 4));
        assert_eq!(c.per_point, vec![4, 3, 2, 3, 4]);
    }

    #[test]
    fn fast_path_matches_naive() {
        let p = random_rational(40, 9, &Rect::square(5), 6).unwrap();
        for m in [PNorm::Finite(1), PNorm::Finite(3), PNorm::Infinity] {
            assert_eq!(
                distance_census(&p, m).unwrap().distinct_count,
                naive_distinct_count(&p, m)
            );
        }
    }

    #[test]
    fn big_path_matches_naive() {
        // Huge coordinates force the big-integer path.
        let big = exact::pow(&int(10), 30);
        let pts = (0..12)
            .map(|i| Point::new(&big * int(i * i), &big * int(3 * i)))
            .collect();
        let p = PointSet::new(pts).unwrap();
        let m = PNorm::Finite(5);
        assert!(IntegerFrame::new(&p).small(m).is_none());
        assert_eq!(
            distance_census(&p, m).unwrap().distinct_count,
            naive_distinct_count(&p, m)
        );
    }

    #[test]
    fn classification() {
        let two = |a, b| PointSet::new(vec![Point::int(0, 0), Point::int(a, b)]).unwrap();
        let c = classify_pairs_linf(&two(2, 1)).unwrap();
        assert_eq!((c.horizontal, c.vertical, c.both), (1, 0, 0));
        let c = classify_pairs_linf(&two(1, 1)).unwrap();
        assert_eq!((c.horizontal, c.vertical, c.both), (1, 1, 1));
        let g = classify_pairs_linf(&grid(3).unwrap()).unwrap();
        assert_eq!(g.both, 10);
        assert_eq!(g.horizontal + g.vertical - g.both, g.total);
    }

    #[test]
    fn incidence_counts() {
        let g = grid(3).unwrap();
        let line =
            |a: i64, b: i64, c: i64| ImplicitCurve::Poly(Poly2::linear(int(a), int(b), int(c)));
        assert_eq!(incidences(&g, &[line(1, 0, -1), line(1, 0, -2)]), 6);
        assert_eq!(incidences(&g, &[]), 0);
        assert_eq!(incidences(&g, &[line(1, 1, -4)]), 3);
    }
}
