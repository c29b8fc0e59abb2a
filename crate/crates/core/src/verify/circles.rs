//! Brute-force crossing counter kept independent of the main circle-graph code:
//! circles are rebuilt from scratch, intersections come from plain quadtree
//! subdivision of the circle pair's bounding box, and arcs are classified with
//! floating-point angles.

use std::collections::{BTreeMap, BTreeSet};

use crate::exact::{self, Scalar, Sign};
use crate::geometry::{lp_distance_key, PNorm, Point, PointSet};
use crate::interval::Interval;

/// Edge identity that does not depend on any indexing: centre index, radius
/// key, and the arc's start and end point indices.
pub type EdgeKey = (usize, Scalar, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Crossings(BTreeSet<(EdgeKey, EdgeKey)>),
    /// Tangency or three circles through one point, at the oracle's resolution.
    Degenerate(String),
}

struct RawCircle {
    center: usize,
    key: Scalar,
    incident: Vec<usize>,
}

fn angle(c: &Point, q: &Point) -> f64 {
    let a = exact::to_f64(&(&q.y - &c.y)).atan2(exact::to_f64(&(&q.x - &c.x)));
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

fn raw_circles(pts: &PointSet, p: u32) -> Vec<RawCircle> {
    let mut out = Vec::new();
    for (i, c) in pts.iter().enumerate() {
        let mut by: BTreeMap<Scalar, Vec<usize>> = BTreeMap::new();
        for (j, q) in pts.iter().enumerate() {
            if i != j {
                by.entry(lp_distance_key(c, q, PNorm::Finite(p)).key)
                    .or_default()
                    .push(j);
            }
        }
        for (key, mut inc) in by {
            if inc.len() >= 3 {
                inc.sort_by(|&a, &b| angle(c, pts.get(a)).total_cmp(&angle(c, pts.get(b))));
                out.push(RawCircle {
                    center: i,
                    key,
                    incident: inc,
                });
            }
        }
    }
    out
}

fn f_iv(c: &Point, key: &Scalar, p: u32, bx: &Interval, by: &Interval) -> Interval {
    let neg = |v: &Scalar| -v;
    bx.shift(&neg(&c.x))
        .signed_abs_pow(false, p)
        .add(&by.shift(&neg(&c.y)).signed_abs_pow(false, p))
        .shift(&-key)
}

fn grad_iv(c: &Point, p: u32, bx: &Interval, by: &Interval) -> (Interval, Interval) {
    let gx = bx.shift(&-&c.x).signed_abs_pow(true, p - 1);
    let gy = by.shift(&-&c.y).signed_abs_pow(true, p - 1);
    (gx, gy)
}

/// A power of two `R` with `R^p ≥ key`, bounding the radius.
fn radius_bound(key: &Scalar, p: u32) -> Scalar {
    let mut r = Scalar::from_integer(1.into());
    while &exact::pow(&r, p) < key {
        r *= Scalar::from_integer(2.into());
    }
    r
}

type Cell = (Interval, Interval);

/// Clusters of the smallest surviving cells, merging cells within `gap` of each
/// other: near a crossing the surviving strip may break into nearby pieces.
fn clusters(cells: Vec<Cell>, gap: &Scalar) -> Vec<Cell> {
    let mut groups: Vec<Cell> = Vec::new();
    for (x, y) in cells {
        let grow = |iv: &Interval| Interval::new(&iv.lo - gap, &iv.hi + gap);
        let mut merged = (grow(&x), grow(&y));
        loop {
            let hit = groups
                .iter()
                .position(|(gx, gy)| gx.overlaps(&merged.0) && gy.overlaps(&merged.1));
            match hit {
                Some(k) => {
                    let (gx, gy) = groups.swap_remove(k);
                    merged = (merged.0.hull(&gx), merged.1.hull(&gy));
                }
                None => break,
            }
        }
        groups.push(merged);
    }
    groups
}

/// Enclosures of the common points of two circles, each with a flag telling
/// whether the crossing is certified transversal.
fn meet(pts: &PointSet, p: u32, a: &RawCircle, b: &RawCircle, depth: u32) -> Vec<(Cell, bool)> {
    let (ca, cb) = (pts.get(a.center), pts.get(b.center));
    let (ra, rb) = (radius_bound(&a.key, p), radius_bound(&b.key, p));
    let lo_x = std::cmp::max(&ca.x - &ra, &cb.x - &rb);
    let hi_x = std::cmp::min(&ca.x + &ra, &cb.x + &rb);
    let lo_y = std::cmp::max(&ca.y - &ra, &cb.y - &rb);
    let hi_y = std::cmp::min(&ca.y + &ra, &cb.y + &rb);
    if lo_x > hi_x || lo_y > hi_y {
        return vec![];
    }
    let mut cells = vec![(Interval::new(lo_x, hi_x), Interval::new(lo_y, hi_y))];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (x, y) in cells {
            let (xl, xr) = x.split();
            let (yl, yr) = y.split();
            for (sx, sy) in [(&xl, &yl), (&xl, &yr), (&xr, &yl), (&xr, &yr)] {
                if f_iv(ca, &a.key, p, sx, sy)
                    .sign()
                    .is_some_and(|s| s != Sign::Zero)
                {
                    continue;
                }
                if f_iv(cb, &b.key, p, sx, sy)
                    .sign()
                    .is_some_and(|s| s != Sign::Zero)
                {
                    continue;
                }
                next.push((sx.clone(), sy.clone()));
            }
        }
        cells = next;
    }
    let gap = cells
        .first()
        .map(|(x, _)| x.width() * Scalar::from_integer(1024.into()));
    clusters(cells, &gap.unwrap_or_default())
        .into_iter()
        .map(|(x, y)| {
            let (ax, ay) = grad_iv(ca, p, &x, &y);
            let (bx, by) = grad_iv(cb, p, &x, &y);
            let det = ax.mul(&by).sub(&ay.mul(&bx));
            let transversal = det.excludes_zero();
            ((x, y), transversal)
        })
        .collect()
}

fn arc_index(pts: &PointSet, c: &RawCircle, q: (f64, f64)) -> Option<usize> {
    let cc = pts.get(c.center);
    let a = {
        let t = (q.1 - exact::to_f64(&cc.y)).atan2(q.0 - exact::to_f64(&cc.x));
        if t < 0.0 {
            t + std::f64::consts::TAU
        } else {
            t
        }
    };
    let angs: Vec<f64> = c.incident.iter().map(|&v| angle(cc, pts.get(v))).collect();
    let j = angs.len();
    (0..j).find(|&k| {
        let (s, e) = (angs[k], angs[(k + 1) % j]);
        if s < e {
            s < a && a < e
        } else {
            a > s || a < e
        }
    })
}

/// Crossing edge pairs of the circle-arc drawing, by brute force over circle pairs.
pub fn crossing_pairs(pts: &PointSet, p: u32) -> OracleOutcome {
    let circles = raw_circles(pts, p);
    let mut out = BTreeSet::new();
    let mut seen: Vec<(Cell, usize, usize)> = Vec::new();
    let key_of = |c: &RawCircle, k: usize| -> EdgeKey {
        (
            c.center,
            c.key.clone(),
            c.incident[k],
            c.incident[(k + 1) % c.incident.len()],
        )
    };
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let (a, b) = (&circles[i], &circles[j]);
            if a.center == b.center {
                continue;
            }
            for ((x, y), transversal) in meet(pts, p, a, b, 28) {
                let is_vertex = a
                    .incident
                    .iter()
                    .filter(|v| b.incident.contains(v))
                    .any(|&v| x.contains(&pts.get(v).x) && y.contains(&pts.get(v).y));
                if is_vertex {
                    continue;
                }
                if !transversal {
                    return OracleOutcome::Degenerate(format!("circles {i} and {j} touch"));
                }
                if let Some((_, k1, k2)) = seen.iter().find(|((sx, sy), k1, k2)| {
                    sx.overlaps(&x) && sy.overlaps(&y) && !(*k1 == i && *k2 == j)
                }) {
                    return OracleOutcome::Degenerate(format!(
                        "circles {k1}, {k2}, {i}, {j} share a point"
                    ));
                }
                seen.push(((x.clone(), y.clone()), i, j));
                let q = (exact::to_f64(&x.mid()), exact::to_f64(&y.mid()));
                match (arc_index(pts, a, q), arc_index(pts, b, q)) {
                    (Some(ka), Some(kb)) => {
                        let (ea, eb) = (key_of(a, ka), key_of(b, kb));
                        out.insert(if ea <= eb { (ea, eb) } else { (eb, ea) });
                    }
                    _ => {
                        return OracleOutcome::Degenerate(format!(
                            "crossing of circles {i} and {j} sits on a vertex ray"
                        ))
                    }
                }
            }
        }
    }
    OracleOutcome::Crossings(out)
}
