//! Dyadic rationals `m · 2^e`.
//!
//! Subdivision only ever halves intervals, so once coordinates are scaled to
//! integers every quantity it touches is dyadic. Ring operations on this form
//! are exact and never need a gcd, which is where general rationals spend
//! most of their time.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::exact::{self, Num, Scalar};

/// Canonical form, so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    /// Odd, or zero (then `e == 0`).
    m: BigInt,
    e: i64,
}

impl Dyadic {
    fn normalized(m: BigInt, e: i64) -> Dyadic {
        if m.is_zero() {
            return Dyadic { m, e: 0 };
        }
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { m, e }
        } else {
            Dyadic {
                m: m >> tz,
                e: e + tz as i64,
            }
        }
    }

    pub fn from_bigint(m: BigInt) -> Dyadic {
        Dyadic::normalized(m, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Dyadic {
        Dyadic {
            m: BigInt::one(),
            e,
        }
    }

    /// Exact conversion, if the denominator is a power of two.
    pub fn from_scalar(x: &Scalar) -> Option<Dyadic> {
        let d = x.denom();
        let tz = d.trailing_zeros().unwrap_or(0);
        if (d >> tz) != BigInt::one() {
            return None;
        }
        Some(Dyadic::normalized(x.numer().clone(), -(tz as i64)))
    }

    /// Largest power of two not exceeding a positive scalar.
    pub fn pow2_below(x: &Scalar) -> Dyadic {
        assert!(x.is_positive());
        let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
        // 2^e is within a factor 2 of x either way; step down until below.
        while Dyadic::pow2(e).to_scalar() > *x {
            e -= 1;
        }
        Dyadic::pow2(e)
    }

    pub fn floor_of(x: &Scalar) -> Dyadic {
        Dyadic::from_bigint(x.floor().to_integer())
    }

    pub fn ceil_of(x: &Scalar) -> Dyadic {
        Dyadic::from_bigint(x.ceil().to_integer())
    }

    pub fn to_scalar(&self) -> Scalar {
        exact::pow2_big(self.e) * Scalar::from_integer(self.m.clone())
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.e.min(b.e);
        (&a.m << (a.e - e) as usize, &b.m << (b.e - e) as usize, e)
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", exact::fmt_scalar(&self.to_scalar()))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, o: &Self) -> Ordering {
        let (s1, s2) = (self.m.sign(), o.m.sign());
        if s1 != s2 {
            return s1.cmp(&s2);
        }
        let (a, b, _) = Dyadic::aligned(self, o);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Num for Dyadic {
    fn simplest_in(lo: &Self, hi: &Self) -> Self {
        if !lo.is_pos() && !hi.is_neg() {
            return Dyadic::nil();
        }
        if hi.is_neg() {
            return Dyadic::simplest_in(&hi.negated(), &lo.negated()).negated();
        }
        let (a, b, f) = Dyadic::aligned(lo, hi);
        // Coarsest grid 2^(f+k) with a point in [a, b]·2^f.
        for k in (0..=b.bits()).rev() {
            let step = BigInt::one() << k as usize;
            let c = (&a + &step - 1u32) >> k as usize;
            if (&c << k as usize) <= b {
                return Dyadic::from_bigint(c).times(&Dyadic::pow2(f + k as i64));
            }
        }
        lo.clone()
    }

    fn nil() -> Self {
        Dyadic {
            m: BigInt::zero(),
            e: 0,
        }
    }

    fn of_int(v: i64) -> Self {
        Dyadic::from_bigint(BigInt::from(v))
    }

    fn plus(&self, o: &Self) -> Self {
        if self.m.is_zero() {
            return o.clone();
        }
        if o.m.is_zero() {
            return self.clone();
        }
        let (a, b, e) = Dyadic::aligned(self, o);
        Dyadic::normalized(a + b, e)
    }

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negated())
    }

    fn times(&self, o: &Self) -> Self {
        if self.m.is_zero() || o.m.is_zero() {
            return Dyadic::nil();
        }
        // Product of odd mantissas is odd: already normalized.
        Dyadic {
            m: &self.m * &o.m,
            e: self.e + o.e,
        }
    }

    fn negated(&self) -> Self {
        Dyadic {
            m: -&self.m,
            e: self.e,
        }
    }

    fn halved(&self) -> Self {
        if self.m.is_zero() {
            return self.clone();
        }
        Dyadic {
            m: self.m.clone(),
            e: self.e - 1,
        }
    }

    fn is_nil(&self) -> bool {
        self.m.is_zero()
    }

    fn is_neg(&self) -> bool {
        self.m.is_negative()
    }

    fn is_pos(&self) -> bool {
        self.m.is_positive()
    }

    fn powu(&self, k: u32) -> Self {
        if k == 0 {
            return Dyadic::of_int(1);
        }
        Dyadic {
            m: num_traits::pow(self.m.clone(), k as usize),
            e: self.e * k as i64,
        }
    }

    fn two_pow(e: i64) -> Self {
        Dyadic::pow2(e)
    }

    fn to_rational(&self) -> Scalar {
        self.to_scalar()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    fn d(n: i64, den: i64) -> Dyadic {
        Dyadic::from_scalar(&ratio(n, den)).unwrap()
    }

    #[test]
    fn ring_operations_match_rationals() {
        let xs = [d(3, 4), d(-5, 8), d(12, 1), d(0, 1), d(1, 1024)];
        for a in &xs {
            for b in &xs {
                assert_eq!(a.plus(b).to_scalar(), a.to_scalar() + b.to_scalar());
                assert_eq!(a.minus(b).to_scalar(), a.to_scalar() - b.to_scalar());
                assert_eq!(a.times(b).to_scalar(), a.to_scalar() * b.to_scalar());
                assert_eq!(a.cmp(b), a.to_scalar().cmp(&b.to_scalar()));
                assert_eq!(a == b, a.to_scalar() == b.to_scalar());
            }
            assert_eq!(a.powu(3).to_scalar(), exact::pow(&a.to_scalar(), 3));
            assert_eq!(a.halved().to_scalar(), a.to_scalar() / int(2));
        }
    }

    #[test]
    fn conversions() {
        assert!(Dyadic::from_scalar(&ratio(1, 3)).is_none());
        assert_eq!(Dyadic::pow2_below(&ratio(1, 3)).to_scalar(), ratio(1, 4));
        assert_eq!(Dyadic::pow2_below(&int(4)).to_scalar(), int(4));
        assert_eq!(Dyadic::floor_of(&ratio(-7, 2)).to_scalar(), int(-4));
        assert_eq!(Dyadic::ceil_of(&ratio(7, 2)).to_scalar(), int(4));
    }

    #[test]
    fn simplest_in_range() {
        let d = |a: i64, e: i64| Dyadic::of_int(a).times(&Dyadic::pow2(e));
        assert_eq!(
            Dyadic::simplest_in(&d(23, -3), &d(49, -3)),
            Dyadic::of_int(4)
        );
        assert_eq!(Dyadic::simplest_in(&d(-3, -1), &d(5, 0)), Dyadic::nil());
        assert_eq!(
            Dyadic::simplest_in(&d(9, -4), &d(19, -4)),
            Dyadic::of_int(1)
        );
        assert_eq!(Dyadic::simplest_in(&d(9, -4), &d(11, -4)), d(5, -3));
        assert_eq!(Dyadic::simplest_in(&d(-11, -4), &d(-9, -4)), d(-5, -3));
    }
}
