//! Closed intervals with exact rational endpoints.
//!
//! Endpoints are exact, so there is no outward rounding to worry about; the
//! only looseness comes from the usual dependency problem of interval
//! extensions.

use num_traits::{Signed, Zero};
use std::fmt;

use crate::exact::{self, max_s, Num, Scalar, Sign};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval<T = Scalar> {
    pub lo: T,
    pub hi: T,
}

impl<T: fmt::Debug> fmt::Debug for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

fn min_n<T: Num>(a: &T, b: &T) -> T {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

fn max_n<T: Num>(a: &T, b: &T) -> T {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

impl<T: Num> Interval<T> {
    pub fn new(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    /// Interval spanning two values in either order.
    pub fn spanning(a: T, b: T) -> Self {
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn point(x: T) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> T {
        self.hi.minus(&self.lo)
    }

    pub fn mid(&self) -> T {
        self.lo.plus(&self.hi).halved()
    }

    pub fn contains(&self, x: &T) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, o: &Self) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }

    /// Sign shared by every member, or `None` if the interval straddles zero.
    pub fn sign(&self) -> Option<Sign> {
        if self.lo.is_pos() {
            Some(Sign::Pos)
        } else if self.hi.is_neg() {
            Some(Sign::Neg)
        } else if self.lo.is_nil() && self.hi.is_nil() {
            Some(Sign::Zero)
        } else {
            None
        }
    }

    pub fn excludes_zero(&self) -> bool {
        self.lo.is_pos() || self.hi.is_neg()
    }

    pub fn hull(&self, o: &Self) -> Self {
        Interval {
            lo: min_n(&self.lo, &o.lo),
            hi: max_n(&self.hi, &o.hi),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Interval {
            lo: self.lo.plus(&o.lo),
            hi: self.hi.plus(&o.hi),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Interval {
            lo: self.lo.minus(&o.hi),
            hi: self.hi.minus(&o.lo),
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: self.hi.negated(),
            hi: self.lo.negated(),
        }
    }

    pub fn shift(&self, c: &T) -> Self {
        Interval {
            lo: self.lo.plus(c),
            hi: self.hi.plus(c),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_neg() {
            Interval {
                lo: self.hi.times(c),
                hi: self.lo.times(c),
            }
        } else {
            Interval {
                lo: self.lo.times(c),
                hi: self.hi.times(c),
            }
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_point() {
            return o.scale(&self.lo);
        }
        if o.is_point() {
            return self.scale(&o.lo);
        }
        // Sign-case shortcuts avoid two of the four products.
        if !self.lo.is_neg() && !o.lo.is_neg() {
            return Interval {
                lo: self.lo.times(&o.lo),
                hi: self.hi.times(&o.hi),
            };
        }
        if !self.hi.is_pos() && !o.hi.is_pos() {
            return Interval {
                lo: self.hi.times(&o.hi),
                hi: self.lo.times(&o.lo),
            };
        }
        let c = [
            self.lo.times(&o.lo),
            self.lo.times(&o.hi),
            self.hi.times(&o.lo),
            self.hi.times(&o.hi),
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for v in &c[1..] {
            if v < &lo {
                lo = v.clone();
            }
            if v > &hi {
                hi = v.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn sqr(&self) -> Self {
        let a = self.lo.magnitude();
        let b = self.hi.magnitude();
        let m = max_n(&a, &b);
        if self.lo.is_neg() && self.hi.is_pos() {
            Interval {
                lo: T::nil(),
                hi: m.times(&m),
            }
        } else {
            let n = min_n(&a, &b);
            Interval {
                lo: n.times(&n),
                hi: m.times(&m),
            }
        }
    }

    /// Image of `t ↦ sgn(t)^k · |t|^m` where `odd` says whether `k` is odd.
    pub fn signed_abs_pow(&self, odd: bool, m: u32) -> Self {
        let abs_pow = |t: &T| t.magnitude().powu(m);
        if odd {
            if m == 0 {
                // sgn(t): undefined at the kink, so widen conservatively.
                let lo = if self.lo.is_pos() { 1 } else { -1 };
                let hi = if self.hi.is_neg() { -1 } else { 1 };
                return Interval {
                    lo: T::of_int(lo),
                    hi: T::of_int(hi),
                };
            }
            let f = |t: &T| {
                let v = abs_pow(t);
                if t.is_neg() {
                    v.negated()
                } else {
                    v
                }
            };
            Interval {
                lo: f(&self.lo),
                hi: f(&self.hi),
            }
        } else {
            if m == 0 {
                return Interval::point(T::of_int(1));
            }
            let a = abs_pow(&self.lo);
            let b = abs_pow(&self.hi);
            if self.lo.is_neg() && self.hi.is_pos() {
                Interval {
                    lo: T::nil(),
                    hi: max_n(&a, &b),
                }
            } else {
                Interval::spanning(a, b)
            }
        }
    }

    pub fn split(&self) -> (Self, Self) {
        let m = self.mid();
        (
            Interval {
                lo: self.lo.clone(),
                hi: m.clone(),
            },
            Interval {
                lo: m,
                hi: self.hi.clone(),
            },
        )
    }
}

impl Interval<Scalar> {
    /// Quotient, defined only when the divisor excludes zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if !o.excludes_zero() {
            return None;
        }
        let inv = Interval::spanning(o.lo.recip(), o.hi.recip());
        Some(self.mul(&inv))
    }
}

/// Enclosure of `r^{1/p}` (r ≥ 0) of width at most `tol`.
pub fn nth_root_enclosure(r: &Scalar, p: u32, tol: &Scalar) -> Interval {
    assert!(!r.is_negative(), "root of a negative number");
    if r.is_zero() || p == 1 {
        return Interval::point(r.clone());
    }
    if let Some(root) = exact_root(r, p) {
        return Interval::point(root);
    }
    let above = |t: &Scalar| &exact::pow(t, p) >= r;
    // A float guess gives a tight starting bracket for free; it is checked exactly.
    let guess = exact::to_f64(r).powf(1.0 / p as f64);
    let mut iv = None;
    if guess.is_finite() && guess > 0.0 {
        let lo = exact::from_f64(guess * (1.0 - 1e-9));
        let hi = exact::from_f64(guess * (1.0 + 1e-9));
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if !above(&lo) && above(&hi) {
                iv = Some(Interval { lo, hi });
            }
        }
    }
    let mut iv = iv.unwrap_or_else(|| Interval {
        lo: Scalar::zero(),
        hi: max_s(r, &exact::int(1)),
    });
    while &iv.width() > tol {
        let m = iv.mid();
        let p_m = exact::pow(&m, p);
        match p_m.cmp(r) {
            std::cmp::Ordering::Equal => return Interval::point(m),
            std::cmp::Ordering::Less => iv.lo = m,
            std::cmp::Ordering::Greater => iv.hi = m,
        }
    }
    iv
}

/// `r^{1/p}` when it is rational.
pub fn exact_root(r: &Scalar, p: u32) -> Option<Scalar> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().nth_root(p);
    let d = r.denom().nth_root(p);
    let cand = Scalar::new(n, d);
    (&exact::pow(&cand, p) == r).then_some(cand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(int(a), int(b))
    }

    #[test]
    fn arithmetic() {
        assert_eq!(iv(1, 2).add(&iv(-3, 1)), iv(-2, 3));
        assert_eq!(iv(1, 2).sub(&iv(-3, 1)), iv(0, 5));
        assert_eq!(iv(-1, 2).mul(&iv(-3, 1)), iv(-6, 3));
        assert_eq!(iv(-1, 2).sqr(), iv(0, 4));
        assert_eq!(iv(-3, -2).sqr(), iv(4, 9));
        assert!(iv(1, 2).div(&iv(-1, 1)).is_none());
        assert_eq!(
            iv(1, 2).div(&iv(2, 4)).unwrap(),
            Interval::new(ratio(1, 4), int(1))
        );
    }

    #[test]
    fn signs() {
        assert_eq!(iv(1, 2).sign(), Some(Sign::Pos));
        assert_eq!(iv(-2, -1).sign(), Some(Sign::Neg));
        assert_eq!(iv(0, 0).sign(), Some(Sign::Zero));
        assert_eq!(iv(0, 1).sign(), None);
    }

    #[test]
    fn signed_powers() {
        assert_eq!(iv(-2, 1).signed_abs_pow(true, 3), iv(-8, 1));
        assert_eq!(iv(-2, 1).signed_abs_pow(false, 2), iv(0, 4));
        assert_eq!(iv(2, 3).signed_abs_pow(false, 0), iv(1, 1));
        assert_eq!(iv(0, 3).signed_abs_pow(true, 0), iv(-1, 1));
    }

    #[test]
    fn roots() {
        let tol = exact::pow2(-50);
        let r = nth_root_enclosure(&int(2), 2, &tol);
        assert!(r.width() <= tol);
        assert!(exact::pow(&r.lo, 2) <= int(2) && exact::pow(&r.hi, 2) >= int(2));
        assert_eq!(
            nth_root_enclosure(&int(27), 3, &tol),
            Interval::point(int(3))
        );
        let big = exact::pow(&int(10), 400);
        let r = nth_root_enclosure(&big, 4, &int(1));
        assert!(r.contains(&exact::pow(&int(10), 100)));
    }
}
