//! Curves of the form `A(x) + B(y) = 0` where `A` and `B` are weighted sums of
//! `|t − c|^p`, and exact root isolation along them.
//!
//! Both ℓ_p bisectors and the difference curve of two ℓ_p circles have this
//! shape. When `B` is strictly monotone with range ℝ the curve is the graph of a
//! function `y = φ(x)`, and `sgn(φ(x) − t)` is decided by one exact evaluation of
//! `A(x) + B(t)`. That single fact drives everything below.
//!
//! Everything is generic over the exact number type. Callers with integer
//! centres use dyadic numbers, which skip the gcd work of general rationals.

use std::collections::BTreeMap;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exact::{Num, Scalar, Sign};
use crate::interval::Interval;

/// `Σ w_k · |t − c_k|^p + constant`.
#[derive(Clone, Debug)]
pub struct AbsPowerSum<N = Scalar> {
    pub p: u32,
    pub terms: Vec<(N, N)>,
    pub constant: N,
}

fn falling<N: Num>(p: u32, k: u32) -> N {
    N::of_int((0..k).map(|i| (p - i) as i64).product())
}

fn binomial_i64(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

fn max_n<N: Num>(a: N, b: N) -> N {
    if a >= b {
        a
    } else {
        b
    }
}

fn min_n<N: Num>(a: N, b: N) -> N {
    if a <= b {
        a
    } else {
        b
    }
}

impl<N: Num> AbsPowerSum<N> {
    /// `|t − c1|^p − |t − c2|^p`.
    pub fn difference(p: u32, c1: &N, c2: &N) -> Self {
        AbsPowerSum {
            p,
            terms: vec![(N::of_int(1), c1.clone()), (N::of_int(-1), c2.clone())],
            constant: N::nil(),
        }
    }

    /// Same sum with every number passed through `f`.
    pub fn map<M: Num>(&self, f: impl Fn(&N) -> M) -> AbsPowerSum<M> {
        AbsPowerSum {
            p: self.p,
            terms: self.terms.iter().map(|(w, c)| (f(w), f(c))).collect(),
            constant: f(&self.constant),
        }
    }

    pub fn eval(&self, t: &N) -> N {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (w, c)| {
                acc.plus(&w.times(&t.minus(c).magnitude().powu(self.p)))
            })
    }

    /// Exact k-th derivative (k ≥ 1). At a kink the one-sided limits are averaged away:
    /// the odd sign factor there is taken as 0, which only matters for k ≥ p.
    pub fn deriv(&self, k: u32, t: &N) -> N {
        if k == 0 {
            return self.eval(t);
        }
        if k > self.p {
            return N::nil();
        }
        let mut acc = N::nil();
        for (w, c) in &self.terms {
            let d = t.minus(c);
            let mut v = d.magnitude().powu(self.p - k);
            if k % 2 == 1 {
                match d.sgn() {
                    Sign::Neg => v = v.negated(),
                    Sign::Zero => v = N::nil(),
                    Sign::Pos => {}
                }
            }
            acc = acc.plus(&w.times(&v));
        }
        acc.times(&falling(self.p, k))
    }

    /// Interval extension of the k-th derivative (k = 0 gives the function itself).
    pub fn deriv_iv(&self, k: u32, t: &Interval<N>) -> Interval<N> {
        let naive = self.deriv_iv_termwise(k, t);
        match self.deriv_iv_expanded(k, t) {
            Some(e) => Interval::new(max_n(naive.lo, e.lo), min_n(naive.hi, e.hi)),
            None => naive,
        }
    }

    /// With no centre in `t` every term is `±(x − c)^p`, so the derivative is one
    /// polynomial in `h = x − t.lo`. Expanding it first lets the large leading
    /// powers cancel exactly instead of inflating the enclosure term by term.
    fn deriv_iv_expanded(&self, k: u32, t: &Interval<N>) -> Option<Interval<N>> {
        if t.is_point() || k > self.p {
            return None;
        }
        if self.terms.iter().any(|(_, c)| c >= &t.lo && c <= &t.hi) {
            return None;
        }
        let deg = self.p - k;
        let f: N = falling(self.p, k);
        let mut coef = vec![N::nil(); deg as usize + 1];
        for (w, c) in &self.terms {
            let d = t.lo.minus(c);
            let w = if self.p % 2 == 1 && d.sgn() == Sign::Neg {
                w.negated()
            } else {
                w.clone()
            };
            for j in 0..=deg {
                let b = N::of_int(binomial_i64(deg, j));
                let term = w.times(&b).times(&d.powu(deg - j));
                coef[j as usize] = coef[j as usize].plus(&term);
            }
        }
        if k == 0 {
            coef[0] = coef[0].plus(&self.constant);
        }
        let width = t.hi.minus(&t.lo);
        let mut acc = Interval::point(coef[0].times(&f));
        for (j, cj) in coef.iter().enumerate().skip(1) {
            let span = cj.times(&f).times(&width.powu(j as u32));
            let piece = if span.sgn() == Sign::Neg {
                Interval::new(span, N::nil())
            } else {
                Interval::new(N::nil(), span)
            };
            acc = acc.add(&piece);
        }
        Some(acc)
    }

    fn deriv_iv_termwise(&self, k: u32, t: &Interval<N>) -> Interval<N> {
        let mut acc = Interval::point(if k == 0 {
            self.constant.clone()
        } else {
            N::nil()
        });
        if k > self.p {
            return acc;
        }
        let f: N = falling(self.p, k);
        for (w, c) in &self.terms {
            let shifted = t.shift(&c.negated());
            let term = shifted
                .signed_abs_pow(k % 2 == 1, self.p - k)
                .scale(&w.times(&f));
            acc = acc.add(&term);
        }
        acc
    }

    fn max_abs_center(&self) -> N {
        self.terms
            .iter()
            .fold(N::nil(), |m, (_, c)| max_n(m, c.magnitude()))
    }

    /// Direction of a function known to be strictly monotone.
    fn monotone_increasing(&self) -> bool {
        let r = self.max_abs_center().plus(&N::of_int(1));
        self.eval(&r) > self.eval(&r.negated())
    }
}

impl AbsPowerSum<Scalar> {
    /// The sum in coordinates multiplied by `l`: `t ↦ l^p · S(t / l)`, in dyadic
    /// form. `None` unless every centre times `l` (and every weight) is dyadic.
    pub fn rescaled_dyadic(&self, l: &Scalar) -> Option<AbsPowerSum<Dyadic>> {
        let terms = self
            .terms
            .iter()
            .map(|(w, c)| Some((Dyadic::from_scalar(w)?, Dyadic::from_scalar(&(c * l))?)))
            .collect::<Option<Vec<_>>>()?;
        let constant = Dyadic::from_scalar(&(&self.constant * crate::exact::pow(l, self.p)))?;
        Some(AbsPowerSum {
            p: self.p,
            terms,
            constant,
        })
    }
}

/// Subdivision budget shared by one query.
#[derive(Debug, Clone)]
pub struct Budget {
    left: u64,
}

impl Budget {
    pub const DEFAULT: u64 = 1_000_000;

    pub fn new(steps: u64) -> Budget {
        Budget { left: steps }
    }

    pub fn spend(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(Error::NumericalBudgetExceeded(
                "subdivision budget exhausted".into(),
            ));
        }
        self.left -= 1;
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.left
    }
}

/// The zero set of `A(x) + B(y)` with `B` strictly monotone onto ℝ: a graph `y = φ(x)`.
#[derive(Clone, Debug)]
pub struct GraphCurve<N = Scalar> {
    pub a: AbsPowerSum<N>,
    pub b: AbsPowerSum<N>,
    b_increasing: bool,
    /// Exact points `(x, y)` known to lie on the curve.
    pub known: Vec<(N, N)>,
}

impl<N: Num> GraphCurve<N> {
    pub fn new(a: AbsPowerSum<N>, b: AbsPowerSum<N>, known: Vec<(N, N)>) -> Self {
        let b_increasing = b.monotone_increasing();
        GraphCurve {
            a,
            b,
            b_increasing,
            known,
        }
    }

    /// Same curve read as `x = ψ(y)`; valid only when `A` is strictly monotone onto ℝ too.
    pub fn transposed(&self) -> Self {
        GraphCurve::new(
            self.b.clone(),
            self.a.clone(),
            self.known
                .iter()
                .map(|(x, y)| (y.clone(), x.clone()))
                .collect(),
        )
    }

    pub fn value(&self, x: &N, y: &N) -> N {
        self.a.eval(x).plus(&self.b.eval(y))
    }

    /// `sgn(φ(x) − t)` given `ax = A(x)`.
    fn cmp_phi(&self, ax: &N, t: &N) -> Sign {
        let s = ax.plus(&self.b.eval(t)).sgn();
        if self.b_increasing {
            s.flip()
        } else {
            s
        }
    }

    /// `sgn(φ(x) − t)`, exactly.
    pub fn phi_cmp(&self, x: &N, t: &N) -> Sign {
        self.cmp_phi(&self.a.eval(x), t)
    }

    fn known_y(&self, x: &N) -> Option<&N> {
        self.known.iter().find(|(kx, _)| kx == x).map(|(_, y)| y)
    }

    /// Enclosure of `φ(x)` of width at most `tol`, optionally starting from a bracket
    /// believed to contain it (the bracket is checked, never trusted).
    pub fn enclose_y(
        &self,
        x: &N,
        tol: &N,
        hint: Option<&Interval<N>>,
        budget: &mut Budget,
    ) -> Result<Interval<N>> {
        if let Some(y) = self.known_y(x) {
            return Ok(Interval::point(y.clone()));
        }
        let ax = self.a.eval(x);
        let mut iv = match hint {
            Some(h) => h.clone(),
            None => {
                let r = self.b.max_abs_center().plus(&N::of_int(1));
                Interval::new(r.negated(), r)
            }
        };
        // Grow until the bracket provably contains φ(x).
        loop {
            let s_lo = self.cmp_phi(&ax, &iv.lo);
            if s_lo == Sign::Zero {
                return Ok(Interval::point(iv.lo));
            }
            let s_hi = self.cmp_phi(&ax, &iv.hi);
            if s_hi == Sign::Zero {
                return Ok(Interval::point(iv.hi));
            }
            if s_lo == Sign::Pos && s_hi == Sign::Neg {
                break;
            }
            budget.spend()?;
            let w = max_n(iv.width(), N::of_int(1)).times(&N::of_int(2));
            if s_lo == Sign::Neg {
                iv.lo = iv.lo.minus(&w);
            }
            if s_hi == Sign::Pos {
                iv.hi = iv.hi.plus(&w);
            }
        }
        while &iv.width() > tol {
            budget.spend()?;
            let m = iv.mid();
            match self.cmp_phi(&ax, &m) {
                Sign::Zero => return Ok(Interval::point(m)),
                Sign::Pos => iv.lo = m,
                Sign::Neg => iv.hi = m,
            }
        }
        Ok(iv)
    }

    /// Whether φ is increasing (it is strictly monotone when `A` is).
    pub fn phi_increasing(&self) -> bool {
        // φ' = −A'/B'; for our two-term sums A' keeps one sign.
        self.a.monotone_increasing() != self.b_increasing
    }
}

impl GraphCurve<Scalar> {
    /// The curve scaled by `l` in dyadic form; see [`AbsPowerSum::rescaled_dyadic`].
    /// Known points that do not scale to dyadic values are dropped.
    pub fn rescaled_dyadic(&self, l: &Scalar) -> Option<GraphCurve<Dyadic>> {
        let known = self
            .known
            .iter()
            .filter_map(|(x, y)| {
                Some((
                    Dyadic::from_scalar(&(x * l))?,
                    Dyadic::from_scalar(&(y * l))?,
                ))
            })
            .collect();
        Some(GraphCurve::new(
            self.a.rescaled_dyadic(l)?,
            self.b.rescaled_dyadic(l)?,
            known,
        ))
    }
}

/// A function `H(x, y)` whose zeros along a [`GraphCurve`] are sought.
pub trait CurveTarget<N: Num = Scalar> {
    fn eval_exact(&self, x: &N, y: &N) -> N;
    fn eval(&self, x: &Interval<N>, y: &Interval<N>) -> Interval<N>;
    /// Partial derivatives over a box.
    fn grad(&self, x: &Interval<N>, y: &Interval<N>) -> (Interval<N>, Interval<N>);
}

/// `H = A2(x) + B2(y)`: another separable function.
pub struct SeparableTarget<'a, N = Scalar> {
    pub a: &'a AbsPowerSum<N>,
    pub b: &'a AbsPowerSum<N>,
}

impl<N: Num> CurveTarget<N> for SeparableTarget<'_, N> {
    fn eval_exact(&self, x: &N, y: &N) -> N {
        self.a.eval(x).plus(&self.b.eval(y))
    }

    fn eval(&self, x: &Interval<N>, y: &Interval<N>) -> Interval<N> {
        self.a.deriv_iv(0, x).add(&self.b.deriv_iv(0, y))
    }

    fn grad(&self, x: &Interval<N>, y: &Interval<N>) -> (Interval<N>, Interval<N>) {
        (self.a.deriv_iv(1, x), self.b.deriv_iv(1, y))
    }
}

/// An isolated zero: a box containing exactly one zero of the target on the curve.
#[derive(Clone, Debug)]
pub struct RootBox<N = Scalar> {
    pub x: Interval<N>,
    pub y: Interval<N>,
}

impl RootBox<Scalar> {
    pub fn contains(&self, p: &crate::geometry::Point) -> bool {
        self.x.contains(&p.x) && self.y.contains(&p.y)
    }
}

impl<N: Num> RootBox<N> {
    /// The box with both sides mapped by `t ↦ t · k` for a positive rational `k`.
    pub fn to_rational_scaled(&self, k: &Scalar) -> RootBox<Scalar> {
        let f = |iv: &Interval<N>| Interval::new(iv.lo.to_rational() * k, iv.hi.to_rational() * k);
        RootBox {
            x: f(&self.x),
            y: f(&self.y),
        }
    }
}

/// Why isolation stopped short.
#[derive(Debug, Clone)]
pub enum IsolationFailure {
    Budget,
    /// A box this narrow still could not be decided: a zero of even multiplicity
    /// (tangency) or two zeros closer than the resolution.
    Unresolved(Interval),
}

impl From<Error> for IsolationFailure {
    fn from(_: Error) -> Self {
        IsolationFailure::Budget
    }
}

type IsoResult<T> = std::result::Result<T, IsolationFailure>;

fn unresolved<N: Num>(iv: &Interval<N>) -> IsolationFailure {
    IsolationFailure::Unresolved(Interval::new(iv.lo.to_rational(), iv.hi.to_rational()))
}

/// Finds every zero of `target` along `curve` with x in `window`.
pub struct Isolator<'a, N: Num, T: CurveTarget<N>> {
    curve: &'a GraphCurve<N>,
    target: &'a T,
    pub budget: Budget,
    /// φ enclosures by abscissa; φ is monotone, so neighbours bracket new points.
    cache: BTreeMap<N, Interval<N>>,
    /// Boxes narrower than this that stay undecided are reported as unresolved.
    min_width: N,
}

impl<'a, N: Num, T: CurveTarget<N>> Isolator<'a, N, T> {
    pub fn new(curve: &'a GraphCurve<N>, target: &'a T, budget: Budget, min_width: N) -> Self {
        Isolator {
            curve,
            target,
            budget,
            cache: BTreeMap::new(),
            min_width,
        }
    }

    fn y_at(&mut self, x: &N, tol: &N) -> IsoResult<Interval<N>> {
        let hint = match self.cache.get(x) {
            Some(c) if &c.width() <= tol => return Ok(c.clone()),
            Some(c) => Some(c.clone()),
            None => {
                let left = self.cache.range(..x.clone()).next_back().map(|(_, v)| v);
                let right = self.cache.range(x.clone()..).next().map(|(_, v)| v);
                match (left, right) {
                    (Some(l), Some(r)) => Some(l.hull(r)),
                    _ => None,
                }
            }
        };
        let iv = self
            .curve
            .enclose_y(x, tol, hint.as_ref(), &mut self.budget)?;
        self.cache.insert(x.clone(), iv.clone());
        Ok(iv)
    }

    /// Enclosure of φ over `xs` (φ is monotone, so the endpoint enclosures suffice).
    pub fn y_hull(&mut self, xs: &Interval<N>, tol: &N) -> IsoResult<Interval<N>> {
        let a = self.y_at(&xs.lo, tol)?;
        let b = self.y_at(&xs.hi, tol)?;
        Ok(a.hull(&b))
    }

    /// Exact sign of the target at `(x, φ(x))`, or `None` if it stays undecided
    /// after refining φ(x) far below the working resolution.
    fn sign_at(&mut self, x: &N) -> IsoResult<Option<Sign>> {
        if let Some(y) = self.curve.known_y(x) {
            return Ok(Some(self.target.eval_exact(x, y).sgn()));
        }
        let floor = self.min_width.times(&N::two_pow(-40));
        let mut tol = self
            .cache
            .get(x)
            .map(Interval::width)
            .unwrap_or_else(|| N::of_int(1));
        loop {
            let ys = self.y_at(x, &tol)?;
            if ys.is_point() {
                return Ok(Some(self.target.eval_exact(x, &ys.lo).sgn()));
            }
            if let Some(s) = self.target.eval(&Interval::point(x.clone()), &ys).sign() {
                if s != Sign::Zero {
                    return Ok(Some(s));
                }
            }
            // The target may vanish exactly at a simple φ(x) that bisection never lands on.
            let cand = N::simplest_in(&ys.lo, &ys.hi);
            if self.curve.phi_cmp(x, &cand) == Sign::Zero {
                self.cache.insert(x.clone(), Interval::point(cand.clone()));
                return Ok(Some(self.target.eval_exact(x, &cand).sgn()));
            }
            if ys.width() < floor {
                return Ok(None);
            }
            tol = ys.width().times(&N::two_pow(-4));
        }
    }

    /// Whether `h(x) = H(x, φ(x))` is strictly monotone over a box.
    ///
    /// `h' = H_x + H_y · (−A'/B') = (H_x·B' − H_y·A') / B'`, so it suffices that
    /// `B'` and the numerator both exclude zero. No division needed.
    fn along_monotone(&self, xs: &Interval<N>, ys: &Interval<N>) -> bool {
        let bp = self.curve.b.deriv_iv(1, ys);
        if !bp.excludes_zero() {
            return false;
        }
        let (hx, hy) = self.target.grad(xs, ys);
        let ap = self.curve.a.deriv_iv(1, xs);
        hx.mul(&bp).sub(&hy.mul(&ap)).excludes_zero()
    }

    /// Dyadic split point slightly off the midpoint, so rational zeros at
    /// midpoints (common with lattice input) rarely land on a box boundary.
    fn split_point(xs: &Interval<N>, attempt: u32) -> N {
        let off = N::of_int(33 + 2 * attempt as i64).times(&N::two_pow(-6));
        xs.lo.plus(&xs.width().times(&off))
    }

    /// Zeros of the target along the curve over `window`, left to right, each
    /// enclosed in a box of width ≤ `precision` in both coordinates.
    pub fn isolate(&mut self, window: &Interval<N>, precision: &N) -> IsoResult<Vec<RootBox<N>>> {
        let mut roots: Vec<RootBox<N>> = Vec::new();
        let mut stack = vec![window.clone()];
        while let Some(xs) = stack.pop() {
            self.budget.spend()?;
            let tol = max_n(min_n(xs.width(), N::of_int(1)), self.min_width.clone());
            let ys = self.y_hull(&xs, &tol)?;
            let val = self.target.eval(&xs, &ys);
            if val.excludes_zero() {
                continue;
            }
            if self.along_monotone(&xs, &ys) {
                let s_lo = self.endpoint_sign(&xs.lo)?;
                let s_hi = self.endpoint_sign(&xs.hi)?;
                match (s_lo, s_hi) {
                    (Sign::Zero, _) => self.push_exact(&mut roots, &xs.lo)?,
                    (_, Sign::Zero) => self.push_exact(&mut roots, &xs.hi)?,
                    (a, b) if a != b => {
                        let r = self.refine(xs, a, precision)?;
                        roots.push(r);
                    }
                    _ => {}
                }
                continue;
            }
            if xs.width() < self.min_width {
                return Err(unresolved(&xs));
            }
            let m = xs.mid();
            stack.push(Interval::new(m.clone(), xs.hi.clone()));
            stack.push(Interval::new(xs.lo.clone(), m));
        }
        Ok(roots)
    }

    fn endpoint_sign(&mut self, x: &N) -> IsoResult<Sign> {
        self.sign_at(x)?
            .ok_or_else(|| unresolved(&Interval::point(x.clone())))
    }

    fn push_exact(&mut self, roots: &mut Vec<RootBox<N>>, x: &N) -> IsoResult<()> {
        if roots.last().is_some_and(|r| r.x.is_point() && &r.x.lo == x) {
            return Ok(());
        }
        let y = self.y_at(x, &N::nil())?;
        roots.push(RootBox {
            x: Interval::point(x.clone()),
            y,
        });
        Ok(())
    }

    /// Shrink a sign-change bracket until both box sides are within `precision`.
    fn refine(&mut self, mut xs: Interval<N>, s_lo: Sign, precision: &N) -> IsoResult<RootBox<N>> {
        loop {
            if &xs.width() <= precision {
                let ys = self.y_hull(&xs, precision)?;
                if &ys.width() <= precision {
                    return Ok(RootBox { x: xs, y: ys });
                }
            }
            self.budget.spend()?;
            let mut attempt = 0;
            let (m, s) = loop {
                let m = if attempt == 0 {
                    xs.mid()
                } else {
                    Self::split_point(&xs, attempt)
                };
                if let Some(s) = self.sign_at(&m)? {
                    break (m, s);
                }
                attempt += 1;
                if attempt > 8 {
                    return Err(unresolved(&xs));
                }
            };
            if s == Sign::Zero {
                let y = self.y_at(&m, &N::nil())?;
                if y.is_point() {
                    return Ok(RootBox {
                        x: Interval::point(m),
                        y,
                    });
                }
                // Irrational φ(m) with an exactly vanishing target cannot be
                // reported as a point; keep a thin box around it instead.
                let ys = self.y_at(&m, precision)?;
                return Ok(RootBox {
                    x: Interval::point(m),
                    y: ys,
                });
            }
            if s == s_lo {
                xs.lo = m;
            } else {
                xs.hi = m;
            }
        }
    }
}

/// Maps isolation failures to a domain error with a caller-supplied description.
pub fn map_failure(f: IsolationFailure, unresolved: impl FnOnce(&Interval) -> Error) -> Error {
    match f {
        IsolationFailure::Budget => {
            Error::NumericalBudgetExceeded("subdivision budget exhausted".into())
        }
        IsolationFailure::Unresolved(iv) => unresolved(&iv),
    }
}
