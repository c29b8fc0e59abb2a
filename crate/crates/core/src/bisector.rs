//! ℓ_p bisectors for finite integer p ≥ 2.
//!
//! `B(u,v) = {w : |w_x−u_x|^p + |w_y−u_y|^p = |w_x−v_x|^p + |w_y−v_y|^p}`.
//! It is a straight line when `uv` has slope 0, ±1 or ∞ (and always for p = 2);
//! otherwise it is the graph of a strictly monotone function `y = φ(x)` cut into
//! polynomial pieces by the lines `x = u_x`, `x = v_x`, `y = u_y`, `y = v_y`.

use num_traits::{Signed, Zero};
use std::fmt;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exact::{self, Num, Scalar, Sign};
use crate::geometry::Point;
use crate::interval::Interval;
use crate::poly::Poly2;
use crate::separable::{
    map_failure, AbsPowerSum, Budget, CurveTarget, GraphCurve, Isolator, RootBox, SeparableTarget,
};

/// `a·x + b·y + c = 0`, scaled so the first nonzero of `(a, b)` is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineEq {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl LineEq {
    pub fn new(a: Scalar, b: Scalar, c: Scalar) -> LineEq {
        let k = if !a.is_zero() { a.clone() } else { b.clone() };
        assert!(!k.is_zero(), "degenerate line");
        LineEq {
            a: a / &k,
            b: b / &k,
            c: c / &k,
        }
    }

    pub fn value(&self, p: &Point) -> Scalar {
        &self.a * &p.x + &self.b * &p.y + &self.c
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.value(p).is_zero()
    }

    pub fn poly(&self) -> Poly2 {
        Poly2::linear(self.a.clone(), self.b.clone(), self.c.clone())
    }

    /// Exact intersection point, or `None` for parallel lines.
    pub fn intersect(&self, o: &LineEq) -> Option<Point> {
        let det = &self.a * &o.b - &o.a * &self.b;
        if det.is_zero() {
            return None;
        }
        let x = (&self.b * &o.c - &o.b * &self.c) / &det;
        let y = (&o.a * &self.c - &self.a * &o.c) / &det;
        Some(Point::new(x, y))
    }

    /// A rational point on the line with parameter `t`.
    pub fn point_at(&self, t: &Scalar) -> Point {
        if self.b.is_zero() {
            Point::new(-&self.c / &self.a, t.clone())
        } else {
            let y = -(&self.a * t + &self.c) / &self.b;
            Point::new(t.clone(), y)
        }
    }
}

/// One cell of the 3×3 partition by `x ∈ {x_lo, x_hi}` and `y ∈ {y_lo, y_hi}`.
///
/// Column 0 is `x ≤ x_lo`, column 1 is `x_lo < x ≤ x_hi`, column 2 is `x > x_hi`;
/// rows likewise. A point on a partition line therefore belongs to the
/// smallest adjacent cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    pub col: u8,
    pub row: u8,
}

impl Region {
    pub fn is_bounded(&self) -> bool {
        self.col == 1 && self.row == 1
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

/// The part of a curve bisector inside one region, with its polynomial.
#[derive(Clone, Debug)]
pub struct BisectorPiece {
    pub region: Region,
    /// Signs of `x−u_x, y−u_y, x−v_x, y−v_y` throughout the region.
    pub signs: [i8; 4],
    pub poly: Poly2,
    /// Whether the curve's segment in this region is bounded.
    pub bounded: bool,
}

#[derive(Clone, Debug)]
pub enum BisectorKind {
    Line(LineEq),
    Curve(Vec<BisectorPiece>),
}

#[derive(Clone, Debug)]
pub struct Bisector {
    pub u: Point,
    pub v: Point,
    pub p: u32,
    pub kind: BisectorKind,
    pub midpoint: Point,
    curve: Option<GraphCurve>,
}

fn col_of(t: &Scalar, lo: &Scalar, hi: &Scalar) -> u8 {
    if t <= lo {
        0
    } else if t <= hi {
        1
    } else {
        2
    }
}

pub fn build_bisector(u: &Point, v: &Point, p: u32) -> Result<Bisector> {
    if u == v {
        return Err(Error::DegenerateInput(format!(
            "bisector of a point with itself: {u:?}"
        )));
    }
    if p < 2 {
        return Err(Error::Unsupported(format!("bisectors need p ≥ 2, got {p}")));
    }
    let midpoint = u.midpoint(v);
    let dx = &v.x - &u.x;
    let dy = &v.y - &u.y;
    let line = if p == 2 {
        // Perpendicular bisector: dx·x + dy·y − dx·m_x − dy·m_y = 0.
        Some(LineEq::new(
            dx.clone(),
            dy.clone(),
            -(&dx * &midpoint.x + &dy * &midpoint.y),
        ))
    } else if dy.is_zero() {
        Some(LineEq::new(
            exact::int(1),
            Scalar::zero(),
            -midpoint.x.clone(),
        ))
    } else if dx.is_zero() {
        Some(LineEq::new(
            Scalar::zero(),
            exact::int(1),
            -midpoint.y.clone(),
        ))
    } else if dx == dy {
        Some(LineEq::new(
            exact::int(1),
            exact::int(1),
            -(&midpoint.x + &midpoint.y),
        ))
    } else if dx == -dy.clone() {
        Some(LineEq::new(
            exact::int(1),
            exact::int(-1),
            &midpoint.y - &midpoint.x,
        ))
    } else {
        None
    };
    if let Some(l) = line {
        return Ok(Bisector {
            u: u.clone(),
            v: v.clone(),
            p,
            kind: BisectorKind::Line(l),
            midpoint,
            curve: None,
        });
    }
    let a = AbsPowerSum::difference(p, &u.x, &v.x);
    let b = AbsPowerSum::difference(p, &u.y, &v.y);
    let curve = GraphCurve::new(
        a,
        b,
        exact_witnesses(u, v)
            .into_iter()
            .map(|q| (q.x, q.y))
            .collect(),
    );
    let mut bis = Bisector {
        u: u.clone(),
        v: v.clone(),
        p,
        kind: BisectorKind::Curve(Vec::new()),
        midpoint,
        curve: Some(curve),
    };
    let pieces = bis
        .regions_hit()
        .into_iter()
        .map(|(region, bounded)| {
            let signs = bis.region_signs(region);
            let poly = piece_poly(u, v, p, signs);
            BisectorPiece {
                region,
                signs,
                poly,
                bounded,
            }
        })
        .collect();
    bis.kind = BisectorKind::Curve(pieces);
    Ok(bis)
}

/// The defining equation with the absolute values resolved by `signs`.
fn piece_poly(u: &Point, v: &Point, p: u32, signs: [i8; 4]) -> Poly2 {
    let w = |s: i8, neg: bool| {
        let mut k = if p % 2 == 1 {
            exact::int(s as i64)
        } else {
            exact::int(1)
        };
        if neg {
            k = -k;
        }
        k
    };
    Poly2::shifted_power(false, &u.x, p, &w(signs[0], false))
        .add(&Poly2::shifted_power(true, &u.y, p, &w(signs[1], false)))
        .add(&Poly2::shifted_power(false, &v.x, p, &w(signs[2], true)))
        .add(&Poly2::shifted_power(true, &v.y, p, &w(signs[3], true)))
}

/// Rational points on a non-line bisector found in closed form: the midpoint and
/// the solutions of `|w_x−u_x| = |w_y−v_y|`, `|w_y−u_y| = |w_x−v_x|`.
pub fn exact_witnesses(u: &Point, v: &Point) -> Vec<Point> {
    let mut out = vec![u.midpoint(v)];
    for (e1, e2) in [(1i64, -1i64), (-1, 1)] {
        let (e1, e2) = (exact::int(e1), exact::int(e2));
        let r1 = &u.x - &e1 * &v.y;
        let r2 = &u.y - &e2 * &v.x;
        let wx = (&r1 + &e1 * &r2) / exact::two();
        let wy = (&r2 + &e2 * &r1) / exact::two();
        let w = Point::new(wx, wy);
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// The defining difference evaluated exactly: `d_p(w,u)^p − d_p(w,v)^p`.
pub fn bisector_value(u: &Point, v: &Point, p: u32, w: &Point) -> Scalar {
    exact::abs_pow(&(&w.x - &u.x), p) + exact::abs_pow(&(&w.y - &u.y), p)
        - exact::abs_pow(&(&w.x - &v.x), p)
        - exact::abs_pow(&(&w.y - &v.y), p)
}

impl Bisector {
    pub fn is_line(&self) -> bool {
        matches!(self.kind, BisectorKind::Line(_))
    }

    pub fn line(&self) -> Option<&LineEq> {
        match &self.kind {
            BisectorKind::Line(l) => Some(l),
            BisectorKind::Curve(_) => None,
        }
    }

    pub fn pieces(&self) -> &[BisectorPiece] {
        match &self.kind {
            BisectorKind::Line(_) => &[],
            BisectorKind::Curve(p) => p,
        }
    }

    /// ℓ_∞ length of `uv`, the scale used for default precisions.
    pub fn diam(&self) -> Scalar {
        exact::max_s(
            &(&self.v.x - &self.u.x).abs(),
            &(&self.v.y - &self.u.y).abs(),
        )
    }

    /// `2^-40 · diam`.
    pub fn default_precision(&self) -> Scalar {
        self.diam() * exact::pow2(-40)
    }

    pub fn value(&self, w: &Point) -> Scalar {
        bisector_value(&self.u, &self.v, self.p, w)
    }

    /// `(x_lo, x_hi, y_lo, y_hi)` of the region partition.
    pub fn partition(&self) -> [Scalar; 4] {
        [
            exact::min_s(&self.u.x, &self.v.x),
            exact::max_s(&self.u.x, &self.v.x),
            exact::min_s(&self.u.y, &self.v.y),
            exact::max_s(&self.u.y, &self.v.y),
        ]
    }

    pub fn region_of(&self, w: &Point) -> Region {
        let [xl, xh, yl, yh] = self.partition();
        Region {
            col: col_of(&w.x, &xl, &xh),
            row: col_of(&w.y, &yl, &yh),
        }
    }

    /// The region containing a whole box, if it is not split by a partition line.
    pub fn region_of_box(&self, xs: &Interval, ys: &Interval) -> Option<Region> {
        let a = self.region_of(&Point::new(xs.lo.clone(), ys.lo.clone()));
        let b = self.region_of(&Point::new(xs.hi.clone(), ys.hi.clone()));
        (a == b).then_some(a)
    }

    fn region_signs(&self, r: Region) -> [i8; 4] {
        let [xl, _, yl, _] = self.partition();
        let s = |cell: u8, c: &Scalar, lo: &Scalar| -> i8 {
            match cell {
                0 => -1,
                2 => 1,
                _ => {
                    if c == lo {
                        1
                    } else {
                        -1
                    }
                }
            }
        };
        [
            s(r.col, &self.u.x, &xl),
            s(r.row, &self.u.y, &yl),
            s(r.col, &self.v.x, &xl),
            s(r.row, &self.v.y, &yl),
        ]
    }

    /// Regions the curve passes through, left to right, with a boundedness flag
    /// for the curve segment in each. Decided exactly from the row of φ at the
    /// two vertical partition lines and the direction of monotonicity.
    fn regions_hit(&self) -> Vec<(Region, bool)> {
        let g = self.curve.as_ref().expect("curve bisector");
        let [xl, xh, yl, yh] = self.partition();
        let dec = !g.phi_increasing();
        // Row of φ(x) and of values just above φ(x), decided exactly.
        let row = |x: &Scalar| -> (u8, u8) {
            let c_lo = g.phi_cmp(x, &yl);
            let c_hi = g.phi_cmp(x, &yh);
            let at = if c_lo != Sign::Pos {
                0
            } else if c_hi != Sign::Pos {
                1
            } else {
                2
            };
            let above = if c_lo == Sign::Neg {
                0
            } else if c_hi == Sign::Neg {
                1
            } else {
                2
            };
            (at, above)
        };
        let (r_lo, r_lo_above) = row(&xl);
        let (r_hi, r_hi_above) = row(&xh);
        let mut out = Vec::new();
        let mut push_col = |col: u8, from: u8, to: u8, unbounded_row: Option<u8>| {
            let rows: Vec<u8> = if dec {
                (from..=to).rev().collect()
            } else {
                (from..=to).collect()
            };
            for r in rows {
                out.push((Region { col, row: r }, unbounded_row != Some(r)));
            }
        };
        if dec {
            push_col(0, r_lo, 2, Some(2));
            push_col(1, r_hi, r_lo, None);
            push_col(2, 0, r_hi, Some(0));
        } else {
            push_col(0, 0, r_lo, Some(0));
            push_col(1, r_lo_above, r_hi, None);
            push_col(2, r_hi_above, 2, Some(2));
        }
        out
    }

    /// Whether `w` lies on the bisector, decided exactly.
    pub fn contains(&self, w: &Point) -> bool {
        self.value(w).is_zero()
    }

    /// Number of regions the bisector meets and how many of its pieces are unbounded.
    pub fn region_counts(&self) -> (usize, usize) {
        let pieces = self.pieces();
        (pieces.len(), pieces.iter().filter(|p| !p.bounded).count())
    }

    /// Known rational points on the bisector.
    pub fn witnesses(&self) -> Vec<Point> {
        match &self.kind {
            BisectorKind::Line(l) => (-2..=2)
                .map(|t| l.point_at(&(&self.midpoint.x + exact::int(t))))
                .collect(),
            BisectorKind::Curve(_) => exact_witnesses(&self.u, &self.v),
        }
    }
}

pub fn point_on_bisector(b: &Bisector, w: &Point) -> bool {
    b.contains(w)
}

/// Enclosure of the `y` with `(x, y)` on the bisector.
pub fn bisector_eval(b: &Bisector, x: &Scalar, precision: &Scalar) -> Result<Interval> {
    if !precision.is_positive() {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    match &b.kind {
        BisectorKind::Line(l) => {
            if l.b.is_zero() {
                return Err(Error::PreconditionViolated(format!(
                    "vertical bisector x = {} is not a graph over x",
                    exact::fmt_scalar(&-&l.c)
                )));
            }
            Ok(Interval::point(-(&l.a * x + &l.c) / &l.b))
        }
        BisectorKind::Curve(_) => {
            let g = b.curve.as_ref().expect("curve");
            g.enclose_y(x, precision, None, &mut Budget::new(Budget::DEFAULT))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Increasing,
    Decreasing,
    Horizontal,
    Vertical,
}

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub monotone: bool,
    pub orientation: Orientation,
    pub samples: usize,
    pub refinements: u64,
}

/// Samples φ at `samples` increasing abscissae spanning `m_x ± 2·diam` and checks
/// that refined enclosures come out strictly ordered.
pub fn monotonicity_probe(b: &Bisector, samples: usize) -> Result<MonotonicityReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter(
            "monotonicity probe needs at least 2 samples".into(),
        ));
    }
    let g = match (&b.kind, &b.curve) {
        (BisectorKind::Line(l), _) => {
            let orientation = if l.a.is_zero() {
                Orientation::Horizontal
            } else if l.b.is_zero() {
                Orientation::Vertical
            } else if (-&l.a / &l.b).is_positive() {
                Orientation::Increasing
            } else {
                Orientation::Decreasing
            };
            return Ok(MonotonicityReport {
                monotone: true,
                orientation,
                samples,
                refinements: 0,
            });
        }
        (_, Some(g)) => g,
        _ => unreachable!("curve bisector without graph"),
    };
    let diam = b.diam();
    let step = &diam * exact::int(4) / exact::int(samples as i64 - 1);
    let start = &b.midpoint.x - &diam * exact::two();
    let xs: Vec<Scalar> = (0..samples)
        .map(|i| &start + &step * exact::int(i as i64))
        .collect();
    let mut budget = Budget::new(Budget::DEFAULT);
    let mut tol = &diam * exact::pow2(-12);
    let mut encl: Vec<Interval> = Vec::with_capacity(samples);
    for x in &xs {
        encl.push(g.enclose_y(x, &tol, None, &mut budget)?);
    }
    let mut refinements = 0;
    let mut direction: Option<bool> = None;
    for i in 0..samples - 1 {
        loop {
            let (a, c) = (&encl[i], &encl[i + 1]);
            let inc = if a.hi < c.lo {
                Some(true)
            } else if a.lo > c.hi {
                Some(false)
            } else {
                None
            };
            if let Some(inc) = inc {
                match direction {
                    None => direction = Some(inc),
                    Some(d) if d != inc => {
                        let orientation = if d {
                            Orientation::Increasing
                        } else {
                            Orientation::Decreasing
                        };
                        return Ok(MonotonicityReport {
                            monotone: false,
                            orientation,
                            samples,
                            refinements,
                        });
                    }
                    _ => {}
                }
                break;
            }
            refinements += 1;
            if refinements > 10_000 {
                return Err(Error::NumericalBudgetExceeded(
                    "could not separate consecutive enclosures".into(),
                ));
            }
            tol = exact::min_s(&tol, &(a.width() / exact::int(4)));
            let t = tol.clone();
            let h0 = encl[i].clone();
            let h1 = encl[i + 1].clone();
            encl[i] = g.enclose_y(&xs[i], &t, Some(&h0), &mut budget)?;
            encl[i + 1] = g.enclose_y(&xs[i + 1], &t, Some(&h1), &mut budget)?;
        }
    }
    let orientation = if direction == Some(true) {
        Orientation::Increasing
    } else {
        Orientation::Decreasing
    };
    Ok(MonotonicityReport {
        monotone: true,
        orientation,
        samples,
        refinements,
    })
}

/// Central symmetry on an exact witness: `w ∈ B ⟹ 2m − w ∈ B`.
pub fn central_symmetry_check(b: &Bisector, w: &Point) -> Result<bool> {
    if !b.contains(w) {
        return Err(Error::PreconditionViolated(format!(
            "{w:?} is not on the bisector"
        )));
    }
    Ok(b.contains(&w.reflect_through(&b.midpoint)))
}

/// Central symmetry at an abscissa with no rational witness: encloses φ(x),
/// reflects the enclosure through the midpoint and certifies that the curve
/// crosses the reflected interval over `2m_x − x`. Decisive for any precision.
pub fn central_symmetry_certified(b: &Bisector, x: &Scalar, precision: &Scalar) -> Result<bool> {
    let ys = bisector_eval(b, x, precision)?;
    let xr = &b.midpoint.x * exact::two() - x;
    let two_my = &b.midpoint.y * exact::two();
    let reflected = Interval::new(&two_my - &ys.hi, &two_my - &ys.lo);
    let f_lo = b.value(&Point::new(xr.clone(), reflected.lo.clone()));
    let f_hi = b.value(&Point::new(xr, reflected.hi.clone()));
    Ok(f_lo.is_zero() || f_hi.is_zero() || Sign::of(&f_lo) != Sign::of(&f_hi))
}

/// Curvature numerator `A''·B'² + B''·A'²` of `A(x) + B(y) = 0`.
struct InflectionTarget<'a, N> {
    a: &'a AbsPowerSum<N>,
    b: &'a AbsPowerSum<N>,
}

impl<N: Num> CurveTarget<N> for InflectionTarget<'_, N> {
    fn eval_exact(&self, x: &N, y: &N) -> N {
        let (a1, a2) = (self.a.deriv(1, x), self.a.deriv(2, x));
        let (b1, b2) = (self.b.deriv(1, y), self.b.deriv(2, y));
        a2.times(&b1.times(&b1)).plus(&b2.times(&a1.times(&a1)))
    }

    fn eval(&self, x: &Interval<N>, y: &Interval<N>) -> Interval<N> {
        let (a1, a2) = (self.a.deriv_iv(1, x), self.a.deriv_iv(2, x));
        let (b1, b2) = (self.b.deriv_iv(1, y), self.b.deriv_iv(2, y));
        a2.mul(&b1.sqr()).add(&b2.mul(&a1.sqr()))
    }

    fn grad(&self, x: &Interval<N>, y: &Interval<N>) -> (Interval<N>, Interval<N>) {
        let (a1, a2, a3) = (
            self.a.deriv_iv(1, x),
            self.a.deriv_iv(2, x),
            self.a.deriv_iv(3, x),
        );
        let (b1, b2, b3) = (
            self.b.deriv_iv(1, y),
            self.b.deriv_iv(2, y),
            self.b.deriv_iv(3, y),
        );
        let two = N::of_int(2);
        let hx = a3.mul(&b1.sqr()).add(&a1.mul(&a2).mul(&b2).scale(&two));
        let hy = a2.mul(&b1).mul(&b2).scale(&two).add(&a1.sqr().mul(&b3));
        (hx, hy)
    }
}

/// Isolation runs in coordinates multiplied by the common denominator `l` of
/// the input, where every centre is an integer and every subdivision point is
/// dyadic. Results are scaled back by `1/l`.
struct ScaledFrame {
    l: Scalar,
}

impl ScaledFrame {
    fn new<'a>(points: impl IntoIterator<Item = &'a Point>) -> ScaledFrame {
        let coords: Vec<&Scalar> = points.into_iter().flat_map(|q| [&q.x, &q.y]).collect();
        ScaledFrame {
            l: exact::common_denominator(coords),
        }
    }

    fn curve(&self, g: &GraphCurve) -> GraphCurve<Dyadic> {
        g.rescaled_dyadic(&self.l)
            .expect("integer centres are dyadic")
    }

    fn sum(&self, s: &AbsPowerSum) -> AbsPowerSum<Dyadic> {
        s.rescaled_dyadic(&self.l)
            .expect("integer centres are dyadic")
    }

    /// Outward-rounded integer window.
    fn window(&self, lo: &Scalar, hi: &Scalar) -> Interval<Dyadic> {
        Interval::new(
            Dyadic::floor_of(&(lo * &self.l)),
            Dyadic::ceil_of(&(hi * &self.l)),
        )
    }

    /// A dyadic precision no coarser than `precision` once scaled back.
    fn precision(&self, precision: &Scalar) -> Dyadic {
        Dyadic::pow2_below(&(precision * &self.l))
    }

    fn unscale(&self, boxes: Vec<RootBox<Dyadic>>) -> Vec<RootBox> {
        let k = self.l.recip();
        boxes.iter().map(|r| r.to_rational_scaled(&k)).collect()
    }

    fn unscale_interval(&self, iv: &Interval) -> Interval {
        Interval::new(&iv.lo / &self.l, &iv.hi / &self.l)
    }
}

#[derive(Clone, Debug)]
pub struct InflectionReport {
    pub points: Vec<RootBox>,
    pub count: usize,
    pub midpoint_included: bool,
    /// Region of each enclosure, when the box does not straddle a partition line.
    pub regions: Vec<Option<Region>>,
}

/// Isolates the zeros of the curvature numerator along the bisector.
///
/// The search covers the abscissae where the curve crosses the partition lines,
/// widened by `diam` on both sides; past that the curve runs through the two
/// unbounded pieces, which carry no inflection.
pub fn inflection_points(b: &Bisector, precision: &Scalar) -> Result<InflectionReport> {
    if b.p == 2 {
        return Err(Error::Unsupported(
            "ℓ_2 bisectors are lines and have no inflection points".into(),
        ));
    }
    let g = match &b.curve {
        None => {
            return Ok(InflectionReport {
                points: vec![],
                count: 0,
                midpoint_included: false,
                regions: vec![],
            })
        }
        Some(g) => g,
    };
    if !precision.is_positive() {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    let [xl, xh, yl, yh] = b.partition();
    let diam = b.diam();
    let mut budget = Budget::new(Budget::DEFAULT);
    let t = g.transposed();
    let one = exact::int(1);
    let c1 = t.enclose_y(&yl, &one, None, &mut budget)?;
    let c2 = t.enclose_y(&yh, &one, None, &mut budget)?;
    let lo = [&xl, &c1.lo, &c2.lo].into_iter().min().unwrap() - &diam;
    let hi = [&xh, &c1.hi, &c2.hi].into_iter().max().unwrap() + &diam;
    let frame = ScaledFrame::new([&b.u, &b.v]);
    let gd = frame.curve(g);
    let target = InflectionTarget { a: &gd.a, b: &gd.b };
    let prec = frame.precision(precision);
    let min_width = prec.times(&Dyadic::pow2(-24));
    let mut iso = Isolator::new(&gd, &target, budget, min_width);
    let points = iso.isolate(&frame.window(&lo, &hi), &prec).map_err(|f| {
        map_failure(f, |iv| {
            let iv = frame.unscale_interval(iv);
            Error::NumericalBudgetExceeded(format!("inflection near x ∈ {iv:?} not separated"))
        })
    })?;
    let points = frame.unscale(points);
    let midpoint_included = points.iter().any(|r| r.contains(&b.midpoint));
    let regions = points.iter().map(|r| b.region_of_box(&r.x, &r.y)).collect();
    Ok(InflectionReport {
        count: points.len(),
        points,
        midpoint_included,
        regions,
    })
}

#[derive(Clone, Debug)]
pub struct IntersectionReport {
    pub points: Vec<RootBox>,
    /// False when the search window is heuristic rather than a proven bound.
    pub certified_bound: bool,
    /// Half-width `M` of the searched abscissa window `[−M, M]`.
    pub window: Scalar,
}

impl IntersectionReport {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

fn same_point_set(b1: &Bisector, b2: &Bisector) -> bool {
    match (&b1.kind, &b2.kind) {
        (BisectorKind::Line(l1), BisectorKind::Line(l2)) => l1 == l2,
        (BisectorKind::Curve(_), BisectorKind::Curve(_)) => {
            b1.p == b2.p && ((b1.u == b2.u && b1.v == b2.v) || (b1.u == b2.v && b1.v == b2.u))
        }
        _ => false,
    }
}

/// A proven bound `M` with every intersection inside `max(|x|, |y|) ≤ M`.
///
/// Write `F_i = A_i(x) + B_i(y)` with `A_i(x) = p·a_i·sgn(x)|x|^{p−1} + R`, where
/// `a_i = v_x − u_x` and `|R| ≤ K·max(|x|, T)^{p−2}`. Solving the two leading
/// terms as a linear system in `(sgn(x)|x|^{p−1}, sgn(y)|y|^{p−1})` gives
/// `m ≤ 2KS / (p|Δ|)` whenever `m ≥ T`. Returns `None` when `Δ = 0`.
fn intersection_bound(b1: &Bisector, b2: &Bisector) -> Option<Scalar> {
    let p = b1.p;
    let coords = [&b1.u, &b1.v, &b2.u, &b2.v]
        .into_iter()
        .flat_map(|q| [q.x.abs(), q.y.abs()]);
    let t = coords.fold(exact::int(1), |m, c| exact::max_s(&m, &c));
    let tail = |c: &Scalar, d: &Scalar| -> Scalar {
        (2..=p)
            .map(|k| {
                Scalar::from_integer(exact::binomial(p, k))
                    * (exact::abs_pow(c, k) + exact::abs_pow(d, k))
            })
            .fold(Scalar::zero(), |a, b| a + b)
    };
    let crude = (exact::pow2(p as i32 + 1) + exact::int(2 * p as i64)) * &t * &t;
    let mut k = crude;
    for b in [b1, b2] {
        k = exact::max_s(&k, &tail(&b.u.x, &b.v.x));
        k = exact::max_s(&k, &tail(&b.u.y, &b.v.y));
    }
    let (a1, c1) = (&b1.v.x - &b1.u.x, &b1.v.y - &b1.u.y);
    let (a2, c2) = (&b2.v.x - &b2.u.x, &b2.v.y - &b2.u.y);
    let delta = &a1 * &c2 - &a2 * &c1;
    if delta.is_zero() {
        return None;
    }
    let s = exact::max_s(&(a1.abs() + a2.abs()), &(c1.abs() + c2.abs()));
    let q = exact::two() * &k * &s / (exact::int(p as i64) * delta.abs());
    Some(exact::max_s(&t, &q))
}

/// All intersection points of two distinct bisectors with the same `p`.
pub fn bisector_intersections(
    b1: &Bisector,
    b2: &Bisector,
    precision: &Scalar,
) -> Result<IntersectionReport> {
    if b1.p != b2.p {
        return Err(Error::Unsupported(
            "intersections need bisectors with the same p".into(),
        ));
    }
    if !precision.is_positive() {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    if same_point_set(b1, b2) {
        return Err(Error::IdenticalCurves);
    }
    if let (Some(l1), Some(l2)) = (b1.line(), b2.line()) {
        let points = l1
            .intersect(l2)
            .map(|q| {
                vec![RootBox {
                    x: Interval::point(q.x),
                    y: Interval::point(q.y),
                }]
            })
            .unwrap_or_default();
        return Ok(IntersectionReport {
            points,
            certified_bound: true,
            window: Scalar::zero(),
        });
    }
    // Walk along a curve bisector and look for zeros of the other one's defining difference.
    let (walk, other) = if b1.curve.is_some() {
        (b1, b2)
    } else {
        (b2, b1)
    };
    let g = walk.curve.as_ref().expect("curve");
    let (window, certified_bound) = match intersection_bound(b1, b2) {
        Some(m) => (m, true),
        None => {
            let span = [&b1.u, &b1.v, &b2.u, &b2.v]
                .into_iter()
                .flat_map(|q| [q.x.abs(), q.y.abs()])
                .fold(exact::int(1), |m, c| exact::max_s(&m, &c));
            (span * exact::int(64), false)
        }
    };
    let frame = ScaledFrame::new([&b1.u, &b1.v, &b2.u, &b2.v]);
    let gd = frame.curve(g);
    let ta = frame.sum(&AbsPowerSum::difference(other.p, &other.u.x, &other.v.x));
    let tb = frame.sum(&AbsPowerSum::difference(other.p, &other.u.y, &other.v.y));
    let target = SeparableTarget { a: &ta, b: &tb };
    let prec = frame.precision(precision);
    let min_width = prec.times(&Dyadic::pow2(-24));
    let mut iso = Isolator::new(&gd, &target, Budget::new(Budget::DEFAULT), min_width);
    let points = iso
        .isolate(&frame.window(&-window.clone(), &window), &prec)
        .map_err(|f| {
            map_failure(f, |iv| {
                let iv = frame.unscale_interval(iv);
                Error::DegeneratePosition(format!("bisectors possibly tangent near x ∈ {iv:?}"))
            })
        })?;
    let points = frame.unscale(points);
    Ok(IntersectionReport {
        points,
        certified_bound,
        window,
    })
}

/// The Zariski-closure polynomial of every piece of `B(u, v)` for odd `p`, one per
/// realized sign pattern. Pieces are compared as exact polynomials, so the two
/// tails (whose sign vectors are negatives of each other) stay separate.
pub fn containing_curves_odd(u: &Point, v: &Point, p: u32) -> Result<Vec<Poly2>> {
    if p % 2 == 0 || p < 3 {
        return Err(Error::Unsupported(format!(
            "containing curves are defined per piece for odd p ≥ 3; p = {p} has a single global polynomial"
        )));
    }
    let b = build_bisector(u, v, p)?;
    let mut out: Vec<Poly2> = Vec::new();
    match &b.kind {
        BisectorKind::Line(l) => out.push(l.poly().normalized()),
        BisectorKind::Curve(pieces) => {
            for piece in pieces {
                if !out.contains(&piece.poly) {
                    out.push(piece.poly.clone());
                }
            }
        }
    }
    Ok(out)
}

/// The single polynomial of an even-p bisector: the defining equation without absolute values.
pub fn global_polynomial_even(u: &Point, v: &Point, p: u32) -> Result<Poly2> {
    if p % 2 == 1 {
        return Err(Error::Unsupported("odd p bisectors are piecewise".into()));
    }
    Ok(piece_poly(u, v, p, [1, 1, 1, 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn b(u: (i64, i64), v: (i64, i64), p: u32) -> Bisector {
        build_bisector(&Point::int(u.0, u.1), &Point::int(v.0, v.1), p).unwrap()
    }

    #[test]
    fn line_cases() {
        let l = b((0, 0), (0, 2), 3);
        assert_eq!(l.line().unwrap(), &LineEq::new(int(0), int(1), int(-1)));
        let l = b((0, 0), (2, 2), 4);
        assert_eq!(l.line().unwrap(), &LineEq::new(int(1), int(1), int(-2)));
        assert!(b((0, 0), (2, -2), 5).is_line());
        assert!(b((0, 0), (2, 0), 5).is_line());
        assert!(b((0, 0), (3, 1), 2).is_line());
        assert!(!b((0, 0), (3, 1), 3).is_line());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            build_bisector(&Point::int(1, 1), &Point::int(1, 1), 3),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            build_bisector(&Point::int(0, 0), &Point::int(1, 1), 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn membership() {
        assert!(point_on_bisector(&b((0, 0), (4, 2), 3), &Point::int(2, 1)));
        assert!(point_on_bisector(&b((0, 0), (0, 2), 5), &Point::int(7, 1)));
        assert!(!point_on_bisector(&b((0, 0), (3, 1), 3), &Point::int(0, 0)));
    }

    #[test]
    fn five_regions_two_unbounded() {
        let bis = b((0, 0), (3, 1), 3);
        assert_eq!(bis.region_counts(), (5, 2));
        for piece in bis.pieces() {
            assert!(piece.poly.degree() <= 3);
        }
    }

    #[test]
    fn witnesses_are_exact() {
        let w = exact_witnesses(&Point::int(0, 0), &Point::int(3, 1));
        assert_eq!(
            w,
            vec![
                Point::new(ratio(3, 2), ratio(1, 2)),
                Point::int(1, 2),
                Point::int(2, -1)
            ]
        );
        let bis = b((0, 0), (3, 1), 3);
        for q in &w {
            assert!(bis.contains(q));
            assert!(central_symmetry_check(&bis, q).unwrap());
        }
        assert!(matches!(
            central_symmetry_check(&bis, &Point::int(0, 0)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn evaluation() {
        let bis = b((0, 0), (3, 1), 3);
        let prec = exact::pow2(-30);
        let m = bisector_eval(&bis, &ratio(3, 2), &prec).unwrap();
        assert!(m.contains(&ratio(1, 2)));
        let iv = bisector_eval(&bis, &int(10), &prec).unwrap();
        assert!(iv.width() <= prec);
        let lo = bis.value(&Point::new(int(10), iv.lo.clone()));
        let hi = bis.value(&Point::new(int(10), iv.hi.clone()));
        assert!(lo.is_zero() || hi.is_zero() || Sign::of(&lo) != Sign::of(&hi));
        let line = b((0, 0), (0, 2), 3);
        assert_eq!(
            bisector_eval(&line, &int(5), &prec).unwrap(),
            Interval::point(int(1))
        );
    }

    #[test]
    fn monotone_and_symmetric() {
        let bis = b((0, 0), (3, 1), 3);
        let r = monotonicity_probe(&bis, 50).unwrap();
        assert!(r.monotone);
        assert_eq!(r.orientation, Orientation::Decreasing);
        let r = monotonicity_probe(&b((0, 0), (1, 5), 4), 50).unwrap();
        assert!(r.monotone);
        let prec = bis.default_precision();
        for x in [int(-7), ratio(1, 3), int(10)] {
            assert!(central_symmetry_certified(&bis, &x, &prec).unwrap());
        }
    }

    #[test]
    fn inflections_of_the_standard_example() {
        let bis = b((0, 0), (3, 1), 3);
        let r = inflection_points(&bis, &bis.default_precision()).unwrap();
        assert_eq!(r.count, 3);
        assert!(r.midpoint_included);
        assert!(r
            .points
            .iter()
            .all(|q| q.x.width() <= bis.default_precision()));
        assert_eq!(
            inflection_points(&b((0, 0), (2, 0), 3), &int(1))
                .unwrap()
                .count,
            0
        );
        assert!(matches!(
            inflection_points(&b((0, 0), (3, 1), 2), &int(1)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn line_intersections() {
        let l1 = b((0, 0), (2, 0), 3);
        let l2 = b((0, 1), (0, 3), 3);
        let r = bisector_intersections(&l1, &l2, &ratio(1, 1000)).unwrap();
        assert_eq!(r.count(), 1);
        assert!(r.points[0].contains(&Point::int(1, 2)));
        let c = b((0, 0), (3, 1), 3);
        assert!(matches!(
            bisector_intersections(&c, &b((3, 1), (0, 0), 3), &int(1)),
            Err(Error::IdenticalCurves)
        ));
    }

    #[test]
    fn curve_intersections_are_on_both() {
        let c1 = b((0, 0), (3, 1), 3);
        let c2 = b((1, -2), (2, 4), 3);
        let prec = exact::pow2(-30);
        let r = bisector_intersections(&c1, &c2, &prec).unwrap();
        assert!(r.certified_bound);
        assert!(r.count() >= 1 && r.count() <= 18);
        for q in &r.points {
            // Each box straddles a sign change of both defining functions.
            let corners = [
                (&q.x.lo, &q.y.lo),
                (&q.x.lo, &q.y.hi),
                (&q.x.hi, &q.y.lo),
                (&q.x.hi, &q.y.hi),
            ];
            for bis in [&c1, &c2] {
                let signs: Vec<Sign> = corners
                    .iter()
                    .map(|(x, y)| Sign::of(&bis.value(&Point::new((*x).clone(), (*y).clone()))))
                    .collect();
                assert!(
                    signs.iter().any(|s| *s != Sign::Pos) && signs.iter().any(|s| *s != Sign::Neg)
                );
            }
        }
    }

    #[test]
    fn odd_containing_curves() {
        let polys = containing_curves_odd(&Point::int(0, 0), &Point::int(3, 1), 3).unwrap();
        assert_eq!(polys.len(), 5);
        assert!(polys.iter().all(|p| p.degree() <= 3));
        assert!(matches!(
            containing_curves_odd(&Point::int(0, 0), &Point::int(3, 1), 4),
            Err(Error::Unsupported(_))
        ));
        let even = global_polynomial_even(&Point::int(0, 0), &Point::int(3, 1), 4).unwrap();
        assert!(even.degree() <= 3);
    }
}
