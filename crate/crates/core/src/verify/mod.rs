//! Self-checks against independent oracles.
//!
//! Each suite is a list of named invariants evaluated on small deterministic
//! inputs. [`Faults`] plants known bugs so the harness itself can be tested.

pub mod circles;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::additive::{difference_energy, energy_bruteforce, gap_fit, Gap};
use crate::bisector::{
    build_bisector, central_symmetry_certified, inflection_points, monotonicity_probe,
};
use crate::census::{distance_census, naive_distinct_count};
use crate::circle_graph::{
    bisector_point_count, build_multigraph, crossing_count, crossing_edge_pairs,
    multiplicity_histogram,
};
use crate::error::{Error, Result};
use crate::exact::{self, Scalar};
use crate::generators::{grid, random_rational, row_construction, Rect};
use crate::geometry::{l1_to_linf_transform, lp_distance_key, PNorm, Point, PointSet};
use crate::structure::{corollary_pipeline, Thresholds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Census,
    Bisector,
    Circles,
    Structure,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "all" => Ok(Suite::All),
            "census" => Ok(Suite::Census),
            "bisector" => Ok(Suite::Bisector),
            "circles" => Ok(Suite::Circles),
            "structure" => Ok(Suite::Structure),
            _ => Err(Error::InvalidParameter(format!("unknown suite {s:?}"))),
        }
    }
}

/// Bugs that can be planted to confirm the checks catch them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Faults {
    /// The census pair loop skips each point's nearest-index partner.
    pub census_off_by_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub invariant: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyOutcome {
    pub checks: Vec<Check>,
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One row per check.
    pub fn table(&self) -> String {
        let w = self
            .checks
            .iter()
            .map(|c| c.suite.len() + c.invariant.len() + 1)
            .max()
            .unwrap_or(0);
        let mut s = String::new();
        for c in &self.checks {
            let name = format!("{}/{}", c.suite, c.invariant);
            let mark = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{mark}  {name:<w$}  {}", c.detail);
        }
        s
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: &'static str) -> Recorder {
        Recorder {
            suite,
            checks: Vec::new(),
        }
    }

    /// Records the first failure of `invariant` over the cases, or a pass.
    fn check(
        &mut self,
        invariant: &'static str,
        cases: usize,
        f: impl FnMut(usize) -> Result<Option<String>>,
    ) {
        let mut f = f;
        let mut failure = None;
        for i in 0..cases {
            match f(i) {
                Ok(None) => {}
                Ok(Some(why)) => {
                    failure = Some(why);
                    break;
                }
                Err(e) => {
                    failure = Some(format!("error: {e}"));
                    break;
                }
            }
        }
        self.checks.push(Check {
            suite: self.suite,
            invariant,
            passed: failure.is_none(),
            detail: failure.unwrap_or_else(|| format!("{cases} cases")),
        });
    }
}

fn random_set(n: usize, seed: u64, side: i64, den: u64) -> Result<PointSet> {
    random_rational(n, seed, &Rect::square(side), den)
}

/// Histogram of a census, optionally through the planted faulty pair loop.
fn census_histogram(p: &PointSet, m: PNorm, faults: &Faults) -> Result<BTreeMap<Scalar, u64>> {
    if !faults.census_off_by_one {
        return Ok(distance_census(p, m)?.histogram);
    }
    let mut h = BTreeMap::new();
    let n = p.len();
    for i in 0..n {
        for j in i + 2..n {
            *h.entry(lp_distance_key(p.get(i), p.get(j), m).key)
                .or_insert(0) += 1;
        }
    }
    Ok(h)
}

fn census_suite(faults: &Faults) -> Vec<Check> {
    let mut r = Recorder::new("census");
    let metrics = [
        PNorm::Finite(1),
        PNorm::Finite(2),
        PNorm::Finite(3),
        PNorm::Infinity,
    ];
    r.check("multiset-sum", 12, |i| {
        let p = random_set(20 + i, i as u64, 12, 2)?;
        let m = metrics[i % 4];
        let total: u64 = census_histogram(&p, m, faults)?.values().sum();
        let n = p.len() as u64;
        Ok((total != n * (n - 1) / 2).then(|| {
            format!(
                "{m}, n = {n}: histogram sums to {total}, expected {}",
                n * (n - 1) / 2
            )
        }))
    });
    r.check("naive-agreement", 8, |i| {
        let p = random_set(25, 100 + i as u64, 10, 1)?;
        let m = metrics[i % 4];
        let fast = census_histogram(&p, m, faults)?.len();
        let slow = naive_distinct_count(&p, m);
        Ok((fast != slow).then(|| format!("{m}: {fast} distinct keys, naive count {slow}")))
    });
    r.check("grid-law", 19, |i| {
        let k = i as u32 + 2;
        let d = census_histogram(&grid(k)?, PNorm::Infinity, faults)?.len();
        Ok((d != k as usize - 1).then(|| format!("grid({k}) has {d} distances")))
    });
    r.check("row-construction", 14, |i| {
        let k = i as u32 + 2;
        let d = census_histogram(&row_construction(k)?, PNorm::Infinity, faults)?.len();
        Ok((d != 2 * k as usize - 2).then(|| format!("rows({k}) has {d} distances")))
    });
    r.check("l1-linf-rotation", 10, |i| {
        let p = random_set(30, 200 + i as u64, 10, 3)?;
        let a = census_histogram(&p, PNorm::Finite(1), faults)?;
        let b = census_histogram(&l1_to_linf_transform(&p), PNorm::Infinity, faults)?;
        Ok((a != b).then(|| "l1 and rotated l-inf key multisets differ".to_string()))
    });
    r.checks
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Point, Point) {
    loop {
        let mut c = || exact::ratio(rng.gen_range(-40..=40), rng.gen_range(1..=4));
        let (u, v) = (Point::new(c(), c()), Point::new(c(), c()));
        if u != v {
            return (u, v);
        }
    }
}

fn special_slope(u: &Point, v: &Point) -> bool {
    let dx = &v.x - &u.x;
    let dy = &v.y - &u.y;
    dx.is_zero() || dy.is_zero() || dx.abs() == dy.abs()
}

fn bisector_suite() -> Vec<Check> {
    let mut r = Recorder::new("bisector");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs: Vec<(Point, Point, u32)> = (0..12)
        .map(|i| {
            let (u, v) = random_pair(&mut rng);
            (u, v, 3 + (i % 3) as u32)
        })
        .collect();
    pairs.push((Point::int(0, 0), Point::int(3, 3), 3));
    pairs.push((Point::int(0, 0), Point::int(0, 5), 4));
    r.check("line-iff-special-slope", pairs.len(), |i| {
        let (u, v, p) = &pairs[i];
        let b = build_bisector(u, v, *p)?;
        Ok((b.is_line() != special_slope(u, v)).then(|| format!("{u:?} {v:?} p = {p}")))
    });
    r.check("midpoint-membership", pairs.len(), |i| {
        let (u, v, p) = &pairs[i];
        let b = build_bisector(u, v, *p)?;
        Ok((!b.contains(&u.midpoint(v))).then(|| format!("{u:?} {v:?}")))
    });
    let curves: Vec<_> = pairs
        .iter()
        .filter(|(u, v, _)| !special_slope(u, v))
        .cloned()
        .collect();
    r.check("monotone", curves.len(), |i| {
        let (u, v, p) = &curves[i];
        let rep = monotonicity_probe(&build_bisector(u, v, *p)?, 20)?;
        Ok((!rep.monotone).then(|| format!("{u:?} {v:?} p = {p}")))
    });
    r.check("central-symmetry", curves.len(), |i| {
        let (u, v, p) = &curves[i];
        let b = build_bisector(u, v, *p)?;
        let prec = b.default_precision();
        for k in -4..=4 {
            let x = &b.midpoint.x + b.diam() * exact::ratio(k, 3);
            if !central_symmetry_certified(&b, &x, &prec)? {
                return Ok(Some(format!("{u:?} {v:?} p = {p} at offset {k}/3")));
            }
        }
        Ok(None)
    });
    r.check("five-regions-two-unbounded", curves.len(), |i| {
        let (u, v, p) = &curves[i];
        let rc = build_bisector(u, v, *p)?.region_counts();
        Ok((rc != (5, 2)).then(|| format!("{u:?} {v:?}: {rc:?}")))
    });
    r.check("three-inflections", curves.len().min(6), |i| {
        let (u, v, p) = &curves[i];
        let b = build_bisector(u, v, *p)?;
        let rep = inflection_points(&b, &b.default_precision())?;
        Ok((rep.count != 3 || !rep.midpoint_included).then(|| {
            format!(
                "{u:?} {v:?} p = {p}: {} inflections, midpoint {}",
                rep.count, rep.midpoint_included
            )
        }))
    });
    r.checks
}

fn circles_suite() -> Vec<Check> {
    let mut r = Recorder::new("circles");
    let sets: Vec<(PointSet, u32)> = (0..6)
        .filter_map(|i| Some((random_set(20, i, 10, 1).ok()?, 2 + (i % 2) as u32)))
        .collect();
    r.check("edge-sum", sets.len(), |i| {
        let (p, pn) = &sets[i];
        let g = build_multigraph(p, *pn)?;
        let sum: usize = g.circles.iter().map(|c| c.incident.len()).sum();
        Ok((sum != g.edge_count())
            .then(|| format!("{} edges, circle sizes sum to {sum}", g.edge_count())))
    });
    r.check("crossing-bound", sets.len(), |i| {
        let (p, pn) = &sets[i];
        let rep = crossing_count(&build_multigraph(p, *pn)?, 8)?;
        Ok((rep.cr > rep.upper_bound).then(|| format!("cr {} above {}", rep.cr, rep.upper_bound)))
    });
    r.check("oracle-agreement", sets.len(), |i| {
        let (p, pn) = &sets[i];
        let g = build_multigraph(p, *pn)?;
        let ours = crossing_edge_pairs(&g);
        let theirs = circles::crossing_pairs(p, *pn);
        Ok(match (ours, theirs) {
            (Err(Error::DegeneratePosition(_)), circles::OracleOutcome::Degenerate(_)) => None,
            (Ok(pairs), circles::OracleOutcome::Crossings(want)) => {
                let got: std::collections::BTreeSet<_> = pairs
                    .iter()
                    .map(|&(a, b)| {
                        let (ka, kb) = (g.edge_key(a), g.edge_key(b));
                        if ka <= kb {
                            (ka, kb)
                        } else {
                            (kb, ka)
                        }
                    })
                    .collect();
                (got != want).then(|| format!("{} crossings, oracle {}", got.len(), want.len()))
            }
            (ours, theirs) => Some(format!(
                "outcomes differ: {:?} vs {theirs:?}",
                ours.map(|v| v.len())
            )),
        })
    });
    r.check("multiplicity-bound", sets.len(), |i| {
        let (p, pn) = &sets[i];
        let g = build_multigraph(p, *pn)?;
        multiplicity_histogram(&g)?;
        for (&(a, b), &m) in g.multiplicity.iter().take(20) {
            let cap = bisector_point_count(p, a, b, *pn);
            if m > cap {
                return Ok(Some(format!(
                    "pair ({a},{b}) has {m} edges, bisector holds {cap}"
                )));
            }
        }
        Ok(None)
    });
    r.checks
}

fn structure_suite() -> Vec<Check> {
    let mut r = Recorder::new("structure");
    let t = Thresholds::default();
    r.check("pipeline-grid", 7, |i| {
        let k = i as u32 + 4;
        let rep = corollary_pipeline(&grid(k)?, &t)?;
        let ok = rep.cover.line_count() == k as usize
            && rep.survivors.len() == (k * k) as usize
            && rep.progressions.count() == 1
            && rep.part().intercepts.sizes == vec![k as u64];
        Ok((!ok).then(|| format!("grid({k})")))
    });
    r.check("pipeline-rows", 7, |i| {
        let k = i as u32 + 4;
        let rep = corollary_pipeline(&row_construction(k)?, &t)?;
        let ok = rep.cover.line_count() == k as usize && rep.survivors.len() == (k * k) as usize;
        Ok((!ok).then(|| format!("rows({k})")))
    });
    r.check("point-accounting", 6, |i| {
        let p = random_set(30, 300 + i as u64, 6, 1)?;
        match corollary_pipeline(&p, &t) {
            Ok(rep) => Ok((rep.survivors.len() + rep.ledger.len() != p.len())
                .then(|| "ledger does not add up".into())),
            // Generic sets may legitimately stall or miss a progression.
            Err(Error::StallDetected(_) | Error::NoCover(_) | Error::EmptyAfterPruning(_)) => {
                Ok(None)
            }
            Err(e) => Err(e),
        }
    });
    r.check("energy-bruteforce", 10, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + i as u64);
        let mut a: Vec<Scalar> = (0..15).map(|_| exact::int(rng.gen_range(0..40))).collect();
        a.sort();
        a.dedup();
        let e = difference_energy(&a)?;
        let b = energy_bruteforce(&a);
        Ok((e.energy != b || e.energy < e.size as u64 * e.size as u64)
            .then(|| format!("E = {}, brute force {b}", e.energy)))
    });
    r.check("gap-soundness", 10, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + i as u64);
        let g = Gap::new(
            exact::int(rng.gen_range(-9..9)),
            vec![
                exact::int(rng.gen_range(1..5)),
                exact::int(rng.gen_range(20..40)),
            ],
            vec![rng.gen_range(2..6), rng.gen_range(2..6)],
        )?;
        let a: Vec<Scalar> = g.elements().into_iter().collect();
        let fit = gap_fit(&a, 2, 2 * g.size())?;
        Ok(match fit {
            Some(f) if f.contains_all(&a) && f.size() <= 2 * g.size() => None,
            other => Some(format!("planted {g:?}, fitted {other:?}")),
        })
    });
    r.checks
}

/// Runs `suite` and collects every check.
pub fn run_suite(suite: Suite, faults: &Faults) -> VerifyOutcome {
    let mut checks = Vec::new();
    if matches!(suite, Suite::All | Suite::Census) {
        checks.extend(census_suite(faults));
    }
    if matches!(suite, Suite::All | Suite::Bisector) {
        checks.extend(bisector_suite());
    }
    if matches!(suite, Suite::All | Suite::Circles) {
        checks.extend(circles_suite());
    }
    if matches!(suite, Suite::All | Suite::Structure) {
        checks.extend(structure_suite());
    }
    VerifyOutcome { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_suite_passes() {
        let out = run_suite(Suite::Census, &Faults::default());
        assert!(out.passed(), "{}", out.table());
    }

    #[test]
    fn planted_fault_is_named() {
        let out = run_suite(
            Suite::Census,
            &Faults {
                census_off_by_one: true,
            },
        );
        assert!(!out.passed());
        let failed: Vec<&str> = out.failures().map(|c| c.invariant).collect();
        assert!(failed.contains(&"multiset-sum"), "{failed:?}");
        assert!(out.table().contains("FAIL  census/multiset-sum"));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("circles".parse::<Suite>().unwrap(), Suite::Circles);
        assert!("nope".parse::<Suite>().is_err());
    }
}
