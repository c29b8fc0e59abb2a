//! Difference sets, additive energy, generalized arithmetic progressions and
//! translation matching on exact rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Scalar};

fn distinct(a: &[Scalar]) -> Result<Vec<Scalar>> {
    if a.is_empty() {
        return Err(Error::InvalidInput("empty set".into()));
    }
    let mut v = a.to_vec();
    v.sort();
    v.dedup();
    Ok(v)
}

/// `A − A` as a set of signed differences (it always holds 0).
pub fn difference_set(a: &[Scalar]) -> Result<BTreeSet<Scalar>> {
    let a = distinct(a)?;
    Ok(a.iter()
        .flat_map(|x| a.iter().map(move |y| x - y))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub size: usize,
    /// `r(d) = |{(a, a′) : a − a′ = d}|` for every signed difference `d`, keyed by its string form.
    #[serde(with = "multiplicity_serde")]
    pub multiplicity: BTreeMap<Scalar, u64>,
    pub energy: u64,
    /// `E / |A|³`.
    #[serde(with = "exact::serde_scalar")]
    pub delta: Scalar,
}

mod multiplicity_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<Scalar, u64>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(String, u64)> = m.iter().map(|(k, c)| (exact::fmt_scalar(k), *c)).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<Scalar, u64>, D::Error> {
        let v: Vec<(String, u64)> = Vec::deserialize(d)?;
        v.into_iter()
            .map(|(k, c)| {
                exact::parse_scalar(&k)
                    .map(|k| (k, c))
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

/// Additive energy `E(A) = Σ_d r(d)²`.
pub fn difference_energy(a: &[Scalar]) -> Result<EnergyReport> {
    let a = distinct(a)?;
    let mut r: FxHashMap<Scalar, u64> = FxHashMap::default();
    for x in &a {
        for y in &a {
            *r.entry(x - y).or_insert(0) += 1;
        }
    }
    let energy = r.values().map(|c| c * c).sum();
    let n = a.len() as i64;
    Ok(EnergyReport {
        size: a.len(),
        multiplicity: r.into_iter().collect(),
        energy,
        delta: Scalar::new(BigInt::from(energy), BigInt::from(n * n * n)),
    })
}

/// Quadruple count straight from the definition, for cross-checks. `O(|A|⁴)`.
pub fn energy_bruteforce(a: &[Scalar]) -> u64 {
    let mut e = 0;
    for a1 in a {
        for a2 in a {
            let d = a1 - a2;
            for a3 in a {
                for a4 in a {
                    if a3 - a4 == d {
                        e += 1;
                    }
                }
            }
        }
    }
    e
}

/// `{base + Σ k_j·generators[j] : 0 ≤ k_j < sizes[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    #[serde(with = "exact::serde_scalar")]
    pub base: Scalar,
    #[serde(with = "exact::serde_scalar_vec")]
    pub generators: Vec<Scalar>,
    pub sizes: Vec<u64>,
}

impl Gap {
    pub fn new(base: Scalar, generators: Vec<Scalar>, sizes: Vec<u64>) -> Result<Gap> {
        if generators.len() != sizes.len() {
            return Err(Error::InvalidParameter("one size per generator".into()));
        }
        if sizes.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter(
                "every size must be at least 2".into(),
            ));
        }
        if generators.iter().any(|b| b.is_zero()) {
            return Err(Error::InvalidParameter("generators must be nonzero".into()));
        }
        Ok(Gap {
            base,
            generators,
            sizes,
        })
    }

    /// One-dimensional progression `a, a + b, …, a + (n − 1)b`.
    pub fn progression(a: Scalar, b: Scalar, n: u64) -> Result<Gap> {
        Gap::new(a, vec![b], vec![n])
    }

    pub fn dimension(&self) -> usize {
        self.generators.len()
    }

    /// `Π n_j`, an upper bound on the element count.
    pub fn size(&self) -> u64 {
        self.sizes
            .iter()
            .fold(1u64, |acc, &n| acc.saturating_mul(n))
    }

    pub fn elements(&self) -> BTreeSet<Scalar> {
        let mut out = vec![self.base.clone()];
        for (b, &n) in self.generators.iter().zip(&self.sizes) {
            out = out
                .iter()
                .flat_map(|x| (0..n).map(move |k| x + b * Scalar::from_integer(k.into())))
                .collect();
        }
        out.into_iter().collect()
    }

    /// Exact membership: every coefficient but the last is enumerated and the
    /// last one solved for.
    pub fn contains(&self, x: &Scalar) -> bool {
        let Some((last, rest)) = self.generators.split_last() else {
            return x == &self.base;
        };
        let n_last = *self.sizes.last().unwrap();
        let mut partial = vec![x - &self.base];
        for (b, &n) in rest.iter().zip(&self.sizes) {
            partial = partial
                .iter()
                .flat_map(|y| (0..n).map(move |k| y - b * Scalar::from_integer(k.into())))
                .collect();
        }
        partial.iter().any(|y| {
            let k = y / last;
            k.is_integer() && !k.is_negative() && k.to_integer() < BigInt::from(n_last)
        })
    }

    pub fn contains_all(&self, a: &[Scalar]) -> bool {
        a.iter().all(|x| self.contains(x))
    }

    /// Drops generators of size 1 so the invariant `n_j ≥ 2` holds.
    fn normalized(base: Scalar, gens: Vec<(Scalar, u64)>) -> Gap {
        let (generators, sizes) = gens.into_iter().filter(|(_, n)| *n >= 2).unzip();
        Gap {
            base,
            generators,
            sizes,
        }
    }
}

/// Arithmetic progression fit: base `min A`, step the gcd of `A − min A`.
fn fit_1d(a: &[Scalar]) -> Gap {
    let m = &a[0];
    let g = a
        .iter()
        .fold(Scalar::zero(), |g, x| exact::gcd_rational(&g, &(x - m)));
    if g.is_zero() {
        return Gap::normalized(m.clone(), vec![]);
    }
    let n: BigInt = ((&a[a.len() - 1] - m) / &g).to_integer() + 1;
    Gap::normalized(m.clone(), vec![(g, n.to_u64().unwrap_or(u64::MAX))])
}

/// Fit with the two given positive generators, placing every element on the
/// lattice `x₀ + ℤ·gcd(b1, b2)` and picking the tightest cyclic window for the
/// `b1` coefficient.
fn fit_2d(a: &[Scalar], b1: &Scalar, b2: &Scalar) -> Option<Gap> {
    let g = exact::gcd_rational(b1, b2);
    let p = (b1 / &g).to_integer();
    let q = (b2 / &g).to_integer();
    if p.is_one() && q.is_one() {
        return None;
    }
    let x0 = &a[0];
    let mut ms = Vec::with_capacity(a.len());
    for x in a {
        let m = (x - x0) / &g;
        if !m.is_integer() {
            return None;
        }
        ms.push(m.to_integer());
    }
    // k1 ≡ m·p⁻¹ (mod q).
    let inv = mod_inverse(&p, &q)?;
    let k1: Vec<BigInt> = ms.iter().map(|m| (m * &inv).mod_floor(&q)).collect();
    let mut res: Vec<BigInt> = k1.clone();
    res.sort();
    res.dedup();
    // Start the window right after the widest cyclic gap.
    let mut start = res[0].clone();
    let mut widest = &res[0] + &q - &res[res.len() - 1];
    for w in res.windows(2) {
        let gap = &w[1] - &w[0];
        if gap > widest {
            widest = gap;
            start = w[1].clone();
        }
    }
    let shifted: Vec<BigInt> = k1.iter().map(|k| (k - &start).mod_floor(&q)).collect();
    let k2: Vec<BigInt> = ms
        .iter()
        .zip(&shifted)
        .map(|(m, k)| (m - (k + &start) * &p) / &q)
        .collect();
    let n1: BigInt = shifted.iter().max()? + 1;
    let k2min = k2.iter().min()?.clone();
    let n2: BigInt = k2.iter().max()? - &k2min + 1;
    let base = x0 + b1 * Scalar::from_integer(start) + b2 * Scalar::from_integer(k2min);
    Some(Gap::normalized(
        base,
        vec![(b1.clone(), n1.to_u64()?), (b2.clone(), n2.to_u64()?)],
    ))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

/// Splits off `b3` by floor division from `min A`, fitting the residues in two dimensions.
fn fit_3d(a: &[Scalar], b1: &Scalar, b2: &Scalar, b3: &Scalar) -> Option<Gap> {
    let m = &a[0];
    let mut qs = Vec::with_capacity(a.len());
    let mut residues = Vec::with_capacity(a.len());
    for x in a {
        let q = ((x - m) / b3).floor();
        residues.push(x - b3 * &q);
        qs.push(q.to_integer());
    }
    residues.sort();
    residues.dedup();
    let inner = if residues.len() == 1 {
        Gap::normalized(residues[0].clone(), vec![])
    } else {
        fit_2d(&residues, b1, b2)?
    };
    let qmin = qs.iter().min()?.clone();
    let n3 = (qs.iter().max()? - &qmin + 1u32).to_u64()?;
    let mut gens: Vec<(Scalar, u64)> = inner.generators.into_iter().zip(inner.sizes).collect();
    gens.push((b3.clone(), n3));
    Some(Gap::normalized(
        inner.base + b3 * Scalar::from_integer(qmin),
        gens,
    ))
}

/// Generator candidates: the `k` most frequent positive differences (ties to
/// the smaller value), followed by the `k` most frequent ones that are not
/// integer multiples of a difference already taken. The second list rescues
/// rare generators that a long progression would otherwise bury under
/// multiples of its own step.
fn frequent_differences(a: &[Scalar], k: usize) -> Vec<Scalar> {
    let mut r: FxHashMap<Scalar, u64> = FxHashMap::default();
    for (i, x) in a.iter().enumerate() {
        for y in &a[i + 1..] {
            *r.entry(y - x).or_insert(0) += 1;
        }
    }
    let mut v: Vec<(Scalar, u64)> = r.into_iter().collect();
    v.sort_by(|(d1, c1), (d2, c2)| c2.cmp(c1).then_with(|| d1.cmp(d2)));
    let mut out: Vec<Scalar> = v.iter().take(k).map(|(d, _)| d.clone()).collect();
    let mut sparse: Vec<&Scalar> = Vec::with_capacity(k);
    for (d, _) in &v {
        if sparse.len() == k {
            break;
        }
        if !sparse.iter().any(|c| (d / *c).is_integer()) {
            sparse.push(d);
            if !out.contains(d) {
                out.push(d.clone());
            }
        }
    }
    out
}

const CANDIDATES_2D: usize = 10;
const CANDIDATES_3D: usize = 6;

/// A verified progression of dimension at most `d_max` and size at most
/// `size_budget` containing `A`, or `None` if the search finds none.
///
/// Lower dimensions are preferred; within a dimension the smallest size wins.
pub fn gap_fit(a: &[Scalar], d_max: usize, size_budget: u64) -> Result<Option<Gap>> {
    if !(1..=3).contains(&d_max) {
        return Err(Error::InvalidParameter(format!(
            "d_max must be 1, 2 or 3, got {d_max}"
        )));
    }
    let a = distinct(a)?;
    if size_budget < a.len() as u64 {
        return Err(Error::InvalidParameter(
            "size_budget must be at least |A|".into(),
        ));
    }
    let accept = |g: &Gap| g.size() <= size_budget && g.contains_all(&a);
    let fit = fit_1d(&a);
    if accept(&fit) {
        return Ok(Some(fit));
    }
    let mut best: Option<Gap> = None;
    let consider = |g: Option<Gap>, best: &mut Option<Gap>| {
        if let Some(g) = g {
            if best.as_ref().map_or(true, |b| {
                (g.dimension(), g.size()) < (b.dimension(), b.size())
            }) && accept(&g)
            {
                *best = Some(g);
            }
        }
    };
    if d_max >= 2 {
        let cands = frequent_differences(&a, CANDIDATES_2D);
        for b1 in &cands {
            for b2 in &cands {
                if b1 != b2 {
                    consider(fit_2d(&a, b1, b2), &mut best);
                }
            }
        }
    }
    if best.is_none() && d_max >= 3 {
        let cands = frequent_differences(&a, CANDIDATES_3D);
        for b3 in &cands {
            for b1 in &cands {
                for b2 in &cands {
                    if b1 != b2 && b1 != b3 && b2 != b3 {
                        consider(fit_3d(&a, b1, b2, b3), &mut best);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// The translation `r` maximizing `|(r + A) ∩ C|`, smallest `r` on ties.
pub fn best_translation(a: &Gap, c: &[Scalar]) -> Result<(Scalar, usize)> {
    let c = distinct(c)?;
    let elems = a.elements();
    let mut counts: BTreeMap<Scalar, usize> = BTreeMap::new();
    for y in &c {
        for x in &elems {
            *counts.entry(y - x).or_insert(0) += 1;
        }
    }
    let mut best: Option<(Scalar, usize)> = None;
    for (r, k) in counts {
        if best.as_ref().map_or(true, |(_, bk)| k > *bk) {
            best = Some((r, k));
        }
    }
    Ok(best.expect("both sets are nonempty"))
}

/// Exhaustive overlap for one translation, for cross-checks.
pub fn overlap(a: &Gap, c: &[Scalar], r: &Scalar) -> usize {
    c.iter().filter(|y| a.contains(&(*y - r))).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use exact::{int, ratio};

    fn ints(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn difference_sets() {
        assert_eq!(
            difference_set(&ints(&[1, 2, 3])).unwrap(),
            ints(&[-2, -1, 0, 1, 2]).into_iter().collect()
        );
        assert_eq!(difference_set(&ints(&[0])).unwrap().len(), 1);
        assert_eq!(difference_set(&ints(&[1, 2, 4])).unwrap().len(), 7);
        assert!(difference_set(&[]).is_err());
    }

    #[test]
    fn energies() {
        let e = difference_energy(&ints(&[1, 2, 3])).unwrap();
        assert_eq!(e.energy, 19);
        assert_eq!(e.multiplicity[&int(0)], 3);
        assert_eq!(e.multiplicity[&int(-2)], 1);
        assert_eq!(difference_energy(&ints(&[1, 2, 4])).unwrap().energy, 15);
        assert_eq!(difference_energy(&ints(&[7])).unwrap().energy, 1);
        assert_eq!(energy_bruteforce(&ints(&[1, 2, 3])), 19);
    }

    #[test]
    fn gap_membership() {
        let g = Gap::new(int(0), ints(&[1, 10]), vec![2, 3]).unwrap();
        assert_eq!(
            g.elements(),
            ints(&[0, 1, 10, 11, 20, 21]).into_iter().collect()
        );
        assert!(g.contains(&int(21)) && !g.contains(&int(2)) && !g.contains(&int(30)));
        assert!(Gap::new(int(0), ints(&[1]), vec![1]).is_err());
    }

    #[test]
    fn fits_progression() {
        let g = gap_fit(&ints(&[1, 3, 5, 7]), 3, 4).unwrap().unwrap();
        assert_eq!(g, Gap::progression(int(1), int(2), 4).unwrap());
    }

    #[test]
    fn fits_two_dimensions() {
        let a = ints(&[0, 1, 10, 11, 20, 21]);
        let g = gap_fit(&a, 2, 6).unwrap().unwrap();
        assert_eq!(g, Gap::new(int(0), ints(&[1, 10]), vec![2, 3]).unwrap());
        assert!(gap_fit(&a, 1, 6).unwrap().is_none());
    }

    #[test]
    fn short_and_long_directions() {
        // Every difference is a multiple of 1, yet 37 must stay a candidate.
        let a = ints(&[-4, -3, -2, -1, 33, 34, 35, 36]);
        let g = gap_fit(&a, 2, 16).unwrap().unwrap();
        assert_eq!(g.size(), 8);
        // A rare short step against a long run of the other generator.
        let b: Vec<Scalar> = (0..22)
            .flat_map(|k| [ratio(161 * k, 2), ratio(161 * k, 2) + int(102)])
            .collect();
        let g = gap_fit(&b, 2, 88).unwrap().unwrap();
        assert!(g.contains_all(&b) && g.size() <= 88);
    }

    #[test]
    fn fits_rational_progressions() {
        let a: Vec<Scalar> = (0..5).map(|k| ratio(1, 3) + ratio(2, 7) * int(k)).collect();
        let g = gap_fit(&a, 1, 5).unwrap().unwrap();
        assert_eq!(
            (g.base.clone(), g.generators[0].clone(), g.sizes[0]),
            (ratio(1, 3), ratio(2, 7), 5)
        );
    }

    #[test]
    fn wrapped_window() {
        // b1 = 3, b2 = 5 with k1 ∈ {0, 1}: residues of k1 mod 5 wrap without the cyclic window.
        let g = Gap::new(int(4), ints(&[3, 5]), vec![2, 4]).unwrap();
        let a: Vec<Scalar> = g.elements().into_iter().collect();
        let fit = gap_fit(&a, 2, 8).unwrap().unwrap();
        assert!(fit.contains_all(&a) && fit.size() <= 8);
    }

    #[test]
    fn singleton_is_dimension_zero() {
        let g = gap_fit(&ints(&[5]), 1, 1).unwrap().unwrap();
        assert_eq!((g.dimension(), g.base.clone()), (0, int(5)));
    }

    #[test]
    fn sidon_set_has_no_cover() {
        let a = ints(&[0, 1, 3, 7, 12, 20, 30, 44, 65, 80]);
        assert!(gap_fit(&a, 3, 20).unwrap().is_none());
    }

    #[test]
    fn translations() {
        let a = Gap::progression(int(0), int(1), 3).unwrap();
        assert_eq!(
            best_translation(&a, &ints(&[5, 6, 9])).unwrap(),
            (int(4), 2)
        );
        assert_eq!(
            best_translation(&a, &ints(&[10, 11, 12])).unwrap(),
            (int(10), 3)
        );
        assert_eq!(best_translation(&a, &ints(&[0, 100, 1000])).unwrap().1, 1);
        assert_eq!(overlap(&a, &ints(&[5, 6, 9]), &int(5)), 2);
    }
}
