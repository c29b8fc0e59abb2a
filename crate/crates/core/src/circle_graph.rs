//! The distance-circle multigraph and the crossings of its circle-arc drawing.
//!
//! Vertices are the points; every ℓ_p circle centred at a point and holding at
//! least three points contributes one edge per pair of cyclically consecutive
//! points, drawn as the arc between them. All coordinates are scaled to
//! integers first, so circle equations have integer data and intersection
//! search runs on dyadic numbers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::bisector::bisector_value;
use crate::census::{big_key, IntegerFrame};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exact::{Num, Scalar, Sign};
use crate::geometry::{PNorm, Point, PointSet};
use crate::interval::Interval;
use crate::separable::{
    AbsPowerSum, Budget, GraphCurve, IsolationFailure, Isolator, SeparableTarget,
};

type IPoint = (BigInt, BigInt);

/// An ℓ_p circle through at least three points, with its points in
/// counterclockwise order starting from the positive x direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub center: usize,
    /// `p`-th power of the radius.
    pub radius_key: Scalar,
    pub incident: Vec<usize>,
}

/// Arc of `circle` from `from` counterclockwise to `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub circle: usize,
}

#[derive(Clone, Debug)]
pub struct CircleGraph {
    pub p: u32,
    pub points: PointSet,
    pub circles: Vec<Circle>,
    pub edges: Vec<Edge>,
    /// Parallel-edge count per unordered vertex pair `(i, j)`, `i < j`.
    pub multiplicity: BTreeMap<(usize, usize), usize>,
    frame: IntegerFrame,
    /// Circle radius keys in the integer frame.
    scaled_keys: Vec<BigInt>,
}

fn sub(a: &IPoint, c: &IPoint) -> IPoint {
    (&a.0 - &c.0, &a.1 - &c.1)
}

fn cross(a: &IPoint, b: &IPoint) -> BigInt {
    &a.0 * &b.1 - &a.1 * &b.0
}

/// 0 for directions in `[0, π)`, 1 for `[π, 2π)`.
fn half(d: &IPoint) -> u8 {
    if d.1.is_positive() || (d.1.is_zero() && d.0.is_positive()) {
        0
    } else {
        1
    }
}

/// Counterclockwise angular order of nonzero direction vectors.
fn angle_cmp(a: &IPoint, b: &IPoint) -> Ordering {
    half(a)
        .cmp(&half(b))
        .then_with(|| match cross(a, b).sign() {
            num_bigint::Sign::Plus => Ordering::Less,
            num_bigint::Sign::Minus => Ordering::Greater,
            num_bigint::Sign::NoSign => Ordering::Equal,
        })
}

fn check_p(p: u32, n: usize) -> Result<()> {
    if p < 2 {
        return Err(Error::Unsupported(format!(
            "circle graphs need p ≥ 2, got {p}"
        )));
    }
    if n < 3 {
        return Err(Error::InvalidInput(
            "circle graphs need at least three points".into(),
        ));
    }
    Ok(())
}

fn circles_in_frame(frame: &IntegerFrame, p: u32) -> Vec<(Circle, BigInt)> {
    let c = &frame.coords;
    let lp = num_traits::pow(Scalar::from_integer(frame.l.clone()), p as usize);
    let mut out = Vec::new();
    for (i, ci) in c.iter().enumerate() {
        let mut by_key: BTreeMap<BigInt, Vec<usize>> = BTreeMap::new();
        for (j, cj) in c.iter().enumerate() {
            if i != j {
                by_key
                    .entry(big_key(ci, cj, PNorm::Finite(p)))
                    .or_default()
                    .push(j);
            }
        }
        for (k, mut pts) in by_key {
            if pts.len() < 3 {
                continue;
            }
            // Star-shaped about the centre, so angular order is the order along the circle.
            pts.sort_by(|&a, &b| angle_cmp(&sub(&c[a], ci), &sub(&c[b], ci)));
            let radius_key = Scalar::from_integer(k.clone()) / &lp;
            out.push((
                Circle {
                    center: i,
                    radius_key,
                    incident: pts,
                },
                k,
            ));
        }
    }
    out
}

/// All circles centred at a point of `p` and holding at least three points of `p`.
pub fn build_circles(p: &PointSet, pn: u32) -> Result<Vec<Circle>> {
    check_p(pn, p.len())?;
    Ok(circles_in_frame(&IntegerFrame::new(p), pn)
        .into_iter()
        .map(|(c, _)| c)
        .collect())
}

pub fn build_multigraph(points: &PointSet, p: u32) -> Result<CircleGraph> {
    check_p(p, points.len())?;
    let frame = IntegerFrame::new(points);
    let (circles, scaled_keys): (Vec<_>, Vec<_>) = circles_in_frame(&frame, p).into_iter().unzip();
    let mut edges = Vec::new();
    let mut multiplicity = BTreeMap::new();
    for (ci, c) in circles.iter().enumerate() {
        let j = c.incident.len();
        for k in 0..j {
            let (a, b) = (c.incident[k], c.incident[(k + 1) % j]);
            edges.push(Edge {
                from: a,
                to: b,
                circle: ci,
            });
            *multiplicity.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    Ok(CircleGraph {
        p,
        points: points.clone(),
        circles,
        edges,
        multiplicity,
        frame,
        scaled_keys,
    })
}

impl CircleGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiplicity.values().copied().max().unwrap_or(0)
    }

    /// Index of the edge of circle `ci` that starts at position `k` of its incident list.
    fn edge_index(&self, ci: usize, k: usize) -> usize {
        let before: usize = self.circles[..ci].iter().map(|c| c.incident.len()).sum();
        before + k
    }

    fn center(&self, ci: usize) -> &IPoint {
        &self.frame.coords[self.circles[ci].center]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossingReport {
    /// Unordered edge pairs on distinct circles whose arc interiors cross.
    pub cr: u64,
    /// Interior crossing points; a pair of arcs meeting twice counts twice here.
    pub crossing_points: u64,
    pub upper_bound: u64,
    pub e: u64,
    pub n: u64,
    pub m: u64,
    pub circles: u64,
    pub lemma_applicable: bool,
    /// `e³ / (m·n²·max(cr, 1))`, reported when `e > 5mn`.
    pub ratio: Option<Scalar>,
}

/// An intersection point of two circles in the integer frame.
#[derive(Clone, Debug)]
enum Meet {
    /// A point of the input set: both circles pass through it as a vertex.
    Vertex,
    /// A rational point that is not an input point.
    Exact(IPoint),
    /// An irrational point known through a box of dyadic intervals.
    Boxed(Interval<Dyadic>, Interval<Dyadic>),
}

/// One circle's equation split as `A(x) + B(y)`: `|x − cx|^p − r` and `|y − cy|^p`.
fn circle_sums(c: &IPoint, r: &BigInt, p: u32) -> (AbsPowerSum<Dyadic>, AbsPowerSum<Dyadic>) {
    let one = Dyadic::of_int(1);
    let a = AbsPowerSum {
        p,
        terms: vec![(one.clone(), Dyadic::from_bigint(c.0.clone()))],
        constant: Dyadic::from_bigint(-r),
    };
    let b = AbsPowerSum {
        p,
        terms: vec![(one, Dyadic::from_bigint(c.1.clone()))],
        constant: Dyadic::nil(),
    };
    (a, b)
}

/// Smallest integer `R` with `R^p ≥ r`.
fn radius_ceiling(r: &BigInt, p: u32) -> BigInt {
    let s = r.nth_root(p);
    if num_traits::pow(s.clone(), p as usize) == *r {
        s
    } else {
        s + 1
    }
}

struct PairInput<'a> {
    c1: &'a IPoint,
    r1: &'a BigInt,
    c2: &'a IPoint,
    r2: &'a BigInt,
    p: u32,
    /// Input points on both circles.
    common: Vec<&'a IPoint>,
}

/// Intersection points of two distinct circles, at most two.
///
/// Walks the difference curve `A1 − A2 + B1 − B2 = 0` (a graph over whichever
/// axis separates the centres) and isolates the zeros of circle 1 along it.
fn meet_boxes(
    inp: &PairInput<'_>,
    precision: &Dyadic,
) -> Result<Vec<(Interval<Dyadic>, Interval<Dyadic>)>> {
    let (a1, b1) = circle_sums(inp.c1, inp.r1, inp.p);
    let (cx1, cy1) = (dy(&inp.c1.0), dy(&inp.c1.1));
    let (cx2, cy2) = (dy(&inp.c2.0), dy(&inp.c2.1));
    let mut diff_x = AbsPowerSum::difference(inp.p, &cx1, &cx2);
    diff_x.constant = dy(&(inp.r2 - inp.r1));
    let diff_y = AbsPowerSum::difference(inp.p, &cy1, &cy2);
    // The curve is a graph over the axis on which the centres differ in the other coordinate.
    let transposed = inp.c1.1 == inp.c2.1;
    let known: Vec<(Dyadic, Dyadic)> = inp
        .common
        .iter()
        .map(|q| {
            let (x, y) = (
                Dyadic::from_bigint(q.0.clone()),
                Dyadic::from_bigint(q.1.clone()),
            );
            if transposed {
                (y, x)
            } else {
                (x, y)
            }
        })
        .collect();
    let (curve, ta, tb, centre) = if transposed {
        (
            GraphCurve::new(diff_y, diff_x, known),
            &b1,
            &a1,
            (&inp.c1.1, &inp.c2.1),
        )
    } else {
        (
            GraphCurve::new(diff_x, diff_y, known),
            &a1,
            &b1,
            (&inp.c1.0, &inp.c2.0),
        )
    };
    // Bounded by both circles' extents along the walking axis.
    let (rr1, rr2) = (radius_ceiling(inp.r1, inp.p), radius_ceiling(inp.r2, inp.p));
    let lo = (centre.0 - &rr1).max(centre.1 - &rr2) - 1;
    let hi = (centre.0 + &rr1).min(centre.1 + &rr2) + 1;
    if lo > hi {
        return Ok(vec![]);
    }
    // In transposed form the walking variable is y, so the target's roles swap too.
    let target = SeparableTarget { a: ta, b: tb };
    let min_width = precision.times(&Dyadic::pow2(-24));
    let mut iso = Isolator::new(&curve, &target, Budget::new(Budget::DEFAULT), min_width);
    let window = Interval::new(Dyadic::from_bigint(lo), Dyadic::from_bigint(hi));
    let roots = iso.isolate(&window, precision).map_err(|f| match f {
        IsolationFailure::Budget => {
            Error::NumericalBudgetExceeded("circle intersection budget exhausted".into())
        }
        IsolationFailure::Unresolved(_) => Error::DegeneratePosition("tangency".into()),
    })?;
    Ok(roots
        .into_iter()
        .map(|r| if transposed { (r.y, r.x) } else { (r.x, r.y) })
        .collect())
}

fn on_circle(q: &IPoint, c: &IPoint, r: &BigInt, p: u32) -> bool {
    big_key(c, q, PNorm::Finite(p)) == *r
}

/// Classifies a root box: an input point, a rational reflection `2c − v` of a
/// vertex through either centre, or a genuinely boxed point.
fn snap(
    g: &CircleGraph,
    (c1i, c2i): (usize, usize),
    common: &[&IPoint],
    bx: &Interval<Dyadic>,
    by: &Interval<Dyadic>,
) -> Meet {
    let inside = |q: &IPoint| {
        bx.contains(&Dyadic::from_bigint(q.0.clone()))
            && by.contains(&Dyadic::from_bigint(q.1.clone()))
    };
    if common.iter().any(|q| inside(q)) {
        return Meet::Vertex;
    }
    let (c1, c2) = (g.center(c1i), g.center(c2i));
    let (r1, r2) = (&g.scaled_keys[c1i], &g.scaled_keys[c2i]);
    let two = BigInt::from(2);
    for (ci, c, other_c, other_r) in [(c1i, c1, c2, r2), (c2i, c2, c1, r1)] {
        for &v in &g.circles[ci].incident {
            let q = &g.frame.coords[v];
            let refl = (&two * &c.0 - &q.0, &two * &c.1 - &q.1);
            if inside(&refl) && on_circle(&refl, other_c, other_r, g.p) {
                return Meet::Exact(refl);
            }
        }
    }
    Meet::Boxed(bx.clone(), by.clone())
}

fn dy(v: &BigInt) -> Dyadic {
    Dyadic::from_bigint(v.clone())
}

/// Sign of `cross(a, x)` where `a` is exact and `x` a box, or `None` if undecided.
fn cross_sign(a: &IPoint, x: &(Interval<Dyadic>, Interval<Dyadic>)) -> Option<Sign> {
    let v = x.1.scale(&dy(&a.0)).sub(&x.0.scale(&dy(&a.1)));
    v.sign()
}

/// Position in the incident list of the arc whose interior holds `x` (relative
/// to the centre), or `None` when the box is too coarse to tell.
fn arc_of(
    g: &CircleGraph,
    ci: usize,
    x: &(Interval<Dyadic>, Interval<Dyadic>),
) -> Result<Option<usize>> {
    let c = g.center(ci);
    let inc = &g.circles[ci].incident;
    let dirs: Vec<IPoint> = inc.iter().map(|&v| sub(&g.frame.coords[v], c)).collect();
    let neg = |s: Option<Sign>| s.map(Sign::flip);
    let mut found = None;
    for k in 0..inc.len() {
        let (a, b) = (&dirs[k], &dirs[(k + 1) % inc.len()]);
        let ax = cross_sign(a, x);
        let xb = neg(cross_sign(b, x));
        let inside = match cross(a, b).sign() {
            num_bigint::Sign::Plus => match (ax, xb) {
                (Some(Sign::Pos), Some(Sign::Pos)) => Some(true),
                (Some(_), Some(_)) => Some(false),
                (Some(s), None) | (None, Some(s)) if s != Sign::Pos => Some(false),
                _ => None,
            },
            // Reflex arc: inside unless in the closed cone from b to a.
            num_bigint::Sign::Minus => {
                let bx = cross_sign(b, x);
                let xa = neg(cross_sign(a, x));
                match (bx, xa) {
                    (Some(s), Some(t)) => Some(!(s != Sign::Neg && t != Sign::Neg)),
                    (Some(Sign::Neg), None) | (None, Some(Sign::Neg)) => Some(true),
                    _ => None,
                }
            }
            num_bigint::Sign::NoSign => ax.map(|s| s == Sign::Pos),
        };
        match inside {
            None => return Ok(None),
            Some(true) if found.is_some() => {
                return Err(Error::ContractViolation(format!(
                    "point lies inside two arcs of circle {ci}"
                )))
            }
            Some(true) => found = Some(k),
            Some(false) => {}
        }
    }
    match found {
        Some(k) => Ok(Some(k)),
        None => Err(Error::ContractViolation(format!(
            "point on circle {ci} lies inside no arc"
        ))),
    }
}

/// Gradient of `|x − cx|^p + |y − cy|^p` at `q`, up to the common factor `p`.
fn grad(q: &IPoint, c: &IPoint, p: u32) -> IPoint {
    let g = |d: BigInt| {
        let m = num_traits::pow(d.abs(), (p - 1) as usize);
        if d.is_negative() {
            -m
        } else {
            m
        }
    };
    (g(&q.0 - &c.0), g(&q.1 - &c.1))
}

/// Whether two circles through `q` share their tangent line there.
fn tangent_at(q: &IPoint, c1: &IPoint, c2: &IPoint, p: u32) -> bool {
    cross(&grad(q, c1, p), &grad(q, c2, p)).is_zero()
}

/// Non-vertex intersection points of circles `i` and `j` with the arcs holding
/// them: `(arc on i, arc on j)` per point, positions in the incident lists.
fn pair_crossings(
    g: &CircleGraph,
    i: usize,
    j: usize,
    bits: u32,
) -> Result<Vec<(usize, usize, Interval<Dyadic>, Interval<Dyadic>)>> {
    let (ci, cj) = (&g.circles[i], &g.circles[j]);
    if ci.center == cj.center {
        return Ok(vec![]);
    }
    let coords = &g.frame.coords;
    let common: Vec<&IPoint> = ci
        .incident
        .iter()
        .filter(|v| cj.incident.contains(v))
        .map(|&v| &coords[v])
        .collect();
    if common.len() > 2 {
        return Err(Error::ContractViolation(format!(
            "circles {i} and {j} share {} points",
            common.len()
        )));
    }
    if common.len() == 2 {
        // Both intersection points are vertices.
        return Ok(vec![]);
    }
    if common.len() == 1 && tangent_at(common[0], g.center(i), g.center(j), g.p) {
        // Touching without crossing; any further meeting point would make the
        // crossings odd in number.
        return Ok(vec![]);
    }
    let inp = PairInput {
        c1: g.center(i),
        r1: &g.scaled_keys[i],
        c2: g.center(j),
        r2: &g.scaled_keys[j],
        p: g.p,
        common: common.clone(),
    };
    let mut precision = Dyadic::pow2(-(bits as i64));
    for _ in 0..6 {
        let boxes = meet_boxes(&inp, &precision).map_err(|e| match e {
            Error::DegeneratePosition(_) => Error::DegeneratePosition(format!(
                "circles {i} and {j} are tangent or nearly tangent"
            )),
            e => e,
        })?;
        if boxes.len() > 2 {
            return Err(Error::ContractViolation(format!(
                "circles {i} and {j} meet in more than two points"
            )));
        }
        let mut out = Vec::new();
        let mut undecided = false;
        for (bx, by) in boxes {
            let pt = match snap(g, (i, j), &common, &bx, &by) {
                Meet::Vertex => continue,
                Meet::Exact(q) => (Interval::point(dy(&q.0)), Interval::point(dy(&q.1))),
                Meet::Boxed(x, y) => (x, y),
            };
            let rel = |c: &IPoint| (pt.0.shift(&dy(&-&c.0)), pt.1.shift(&dy(&-&c.1)));
            match (
                arc_of(g, i, &rel(g.center(i)))?,
                arc_of(g, j, &rel(g.center(j)))?,
            ) {
                (Some(a), Some(b)) => out.push((a, b, pt.0, pt.1)),
                _ => undecided = true,
            }
        }
        if !undecided {
            return Ok(out);
        }
        precision = precision.times(&Dyadic::pow2(-32));
    }
    Err(Error::NumericalBudgetExceeded(format!(
        "could not place the crossings of circles {i} and {j} on arcs"
    )))
}

type Census = (std::collections::BTreeSet<(usize, usize)>, u64);

/// Crossing edge pairs and point count, or a description of an apparent triple point.
fn census_at(
    g: &CircleGraph,
    pairs: &[(usize, usize)],
    bits: u32,
) -> Result<std::result::Result<Census, String>> {
    let nc = g.circles.len();
    let found: Vec<Result<(usize, usize, Vec<_>)>> = pairs
        .par_iter()
        .map(|&(i, j)| pair_crossings(g, i, j, bits).map(|v| (i, j, v)))
        .collect();
    let mut edge_pairs = std::collections::BTreeSet::new();
    let mut points = 0u64;
    let mut per_circle: Vec<Vec<(usize, Interval<Dyadic>, Interval<Dyadic>)>> =
        vec![Vec::new(); nc];
    for r in found {
        let (i, j, v) = r?;
        for (a, b, x, y) in v {
            points += 1;
            edge_pairs.insert((g.edge_index(i, a), g.edge_index(j, b)));
            per_circle[i].push((j, x.clone(), y.clone()));
            per_circle[j].push((i, x, y));
        }
    }
    // A crossing point shared by two partner circles means three concurrent circles.
    for (ci, v) in per_circle.iter().enumerate() {
        for (s, (j1, x1, y1)) in v.iter().enumerate() {
            for (j2, x2, y2) in &v[s + 1..] {
                if j1 != j2 && x1.overlaps(x2) && y1.overlaps(y2) {
                    return Ok(Err(format!(
                        "circles {ci}, {j1} and {j2} appear to pass through one common non-vertex point"
                    )));
                }
            }
        }
    }
    Ok(Ok((edge_pairs, points)))
}

/// Whether the extents `[c − R, c + R]²` of two circles overlap at all.
fn extents_overlap(g: &CircleGraph, i: usize, j: usize) -> bool {
    let (a, b) = (g.center(i), g.center(j));
    let ra = radius_ceiling(&g.scaled_keys[i], g.p);
    let rb = radius_ceiling(&g.scaled_keys[j], g.p);
    let reach = ra + rb;
    (&a.0 - &b.0).abs() <= reach && (&a.1 - &b.1).abs() <= reach
}

/// Crossing census of the circle-arc drawing.
///
/// Rejects drawings that are not in general position: tangent circles, and
/// three circles through one point that is not an input point.
pub fn crossing_count(g: &CircleGraph, precision_bits: u32) -> Result<CrossingReport> {
    let nc = g.circles.len();
    let pairs: Vec<(usize, usize)> = (0..nc)
        .flat_map(|i| (i + 1..nc).map(move |j| (i, j)))
        .filter(|&(i, j)| extents_overlap(g, i, j))
        .collect();
    // Boxes that overlap at a coarse precision may still separate at a finer one.
    let mut bits = precision_bits.max(1);
    let (edge_pairs, points) = loop {
        match census_at(g, &pairs, bits)? {
            Ok(found) => break found,
            Err(msg) if bits >= 120 => return Err(Error::DegeneratePosition(msg)),
            Err(_) => bits = (bits * 4).clamp(40, 120),
        }
    };
    let e = g.edges.len() as u64;
    let n = g.points.len() as u64;
    let m = g.max_multiplicity() as u64;
    let cr = edge_pairs.len() as u64;
    let lemma_applicable = m > 0 && e > 5 * m * n;
    let ratio = lemma_applicable.then(|| {
        let num = BigInt::from(e).pow(3);
        let den = BigInt::from(m) * BigInt::from(n).pow(2) * BigInt::from(cr.max(1));
        BigRational::new(num, den)
    });
    let nc = nc as u64;
    Ok(CrossingReport {
        cr,
        crossing_points: points,
        upper_bound: nc * nc.saturating_sub(1),
        e,
        n,
        m,
        circles: nc,
        lemma_applicable,
        ratio,
    })
}

/// Number of vertex pairs per multiplicity, after checking every multiplicity
/// against the number of input points on the pair's bisector.
pub fn multiplicity_histogram(g: &CircleGraph) -> Result<BTreeMap<usize, usize>> {
    let mut hist = BTreeMap::new();
    for (&(a, b), &m) in &g.multiplicity {
        let bound = bisector_point_count(&g.points, a, b, g.p);
        if m > bound {
            return Err(Error::ContractViolation(format!(
                "pair ({a}, {b}) has {m} parallel edges but only {bound} points on its bisector"
            )));
        }
        *hist.entry(m).or_insert(0) += 1;
    }
    Ok(hist)
}

/// `|{w ∈ P : w on B(P[a], P[b])}|`, decided exactly.
pub fn bisector_point_count(points: &PointSet, a: usize, b: usize, p: u32) -> usize {
    let (u, v) = (points.get(a), points.get(b));
    points
        .iter()
        .filter(|w| bisector_value(u, v, p, w).is_zero())
        .count()
}

/// Every unordered pair of edges on distinct circles whose arcs cross, by arc
/// index. Exposed for cross-checks against independent counters.
pub fn crossing_edge_pairs(g: &CircleGraph) -> Result<Vec<(usize, usize)>> {
    let nc = g.circles.len();
    let mut out = Vec::new();
    for i in 0..nc {
        for j in i + 1..nc {
            if !extents_overlap(g, i, j) {
                continue;
            }
            for (a, b, _, _) in pair_crossings(g, i, j, 8)? {
                out.push((g.edge_index(i, a), g.edge_index(j, b)));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Exact point of the input on a circle, for tests and plots.
pub fn circle_contains(g: &CircleGraph, ci: usize, q: &Point) -> bool {
    let c = g.points.get(g.circles[ci].center);
    crate::geometry::lp_distance_key(c, q, PNorm::Finite(g.p)).key == g.circles[ci].radius_key
}

impl CircleGraph {
    /// Edge identity independent of circle and edge numbering.
    pub fn edge_key(&self, idx: usize) -> crate::verify::circles::EdgeKey {
        let e = &self.edges[idx];
        let c = &self.circles[e.circle];
        (c.center, c.radius_key.clone(), e.from, e.to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::generators::grid;

    fn set(v: &[(i64, i64)]) -> PointSet {
        PointSet::new(v.iter().map(|&(x, y)| Point::int(x, y)).collect()).unwrap()
    }

    #[test]
    fn grid2_has_no_circles() {
        let g = build_multigraph(&grid(2).unwrap(), 2).unwrap();
        assert!(g.circles.is_empty());
        let r = crossing_count(&g, 8).unwrap();
        assert_eq!((r.cr, r.upper_bound), (0, 0));
    }

    #[test]
    fn grid3_corner_circle() {
        let p = grid(3).unwrap();
        let cs = build_circles(&p, 2).unwrap();
        let c = cs
            .iter()
            .find(|c| c.center == 4 && c.radius_key == exact::int(2))
            .unwrap();
        // Counterclockwise from the first quadrant: (3,3), (1,3), (1,1), (3,1).
        assert_eq!(c.incident, vec![8, 6, 0, 2]);
        let g = build_multigraph(&p, 2).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert!(g
            .edges
            .iter()
            .any(|e| (e.from, e.to) == (0, 2) && g.circles[e.circle].center == 4));
    }

    #[test]
    fn collinear_points_have_no_circles() {
        let p = set(&[(0, 0), (1, 0), (2, 0), (3, 0), (4, 0)]);
        for pn in [2, 3, 5] {
            assert!(build_circles(&p, pn).unwrap().is_empty());
        }
    }

    #[test]
    fn three_points_make_a_triangle() {
        let p = set(&[(0, 0), (5, 0), (0, 5), (-5, 0)]);
        let g = build_multigraph(&p, 2).unwrap();
        assert_eq!(g.circles.len(), 1);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(crossing_count(&g, 8).unwrap().cr, 0);
    }

    #[test]
    fn grid3_crossings() {
        for pn in [2, 3] {
            let g = build_multigraph(&grid(3).unwrap(), pn).unwrap();
            let r = crossing_count(&g, 8).unwrap();
            assert_eq!((r.cr, r.crossing_points, r.circles), (8, 8, 6));
            assert!(r.cr <= r.upper_bound);
        }
    }

    #[test]
    fn tangency_away_from_points_is_rejected() {
        // Radius-5 circle about the origin and radius-2 circle about (0,3) touch at (0,5).
        let p = set(&[
            (0, 0),
            (0, 3),
            (2, 3),
            (-2, 3),
            (0, 1),
            (3, 4),
            (-3, 4),
            (0, -5),
        ]);
        let g = build_multigraph(&p, 2).unwrap();
        assert_eq!(g.circles.len(), 2);
        assert!(matches!(
            crossing_count(&g, 8),
            Err(Error::DegeneratePosition(_))
        ));
    }

    #[test]
    fn multiplicities_within_bisector_counts() {
        let g = build_multigraph(&grid(3).unwrap(), 2).unwrap();
        let h = multiplicity_histogram(&g).unwrap();
        assert_eq!(h.values().sum::<usize>(), g.multiplicity.len());
        assert_eq!(h.iter().map(|(m, c)| m * c).sum::<usize>(), g.edge_count());
    }

    #[test]
    fn sub_lattice_input_scales() {
        // Same shape as grid(3) shrunk by 1/3; crossings are scale invariant.
        let p = PointSet::new(
            grid(3)
                .unwrap()
                .iter()
                .map(|q| Point::new(&q.x / exact::int(3), &q.y / exact::int(3)))
                .collect(),
        )
        .unwrap();
        let r = crossing_count(&build_multigraph(&p, 2).unwrap(), 8).unwrap();
        assert_eq!(r.cr, 8);
    }
}
