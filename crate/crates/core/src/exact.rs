//! Exact rational scalars and the handful of helpers every other module leans on.

use num_bigint::{BigInt, Sign as BigSign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical reduced form.
pub type Scalar = BigRational;

/// Three-valued sign of an exact quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(x: &Scalar) -> Sign {
        match x.numer().sign() {
            BigSign::Minus => Sign::Neg,
            BigSign::NoSign => Sign::Zero,
            BigSign::Plus => Sign::Pos,
        }
    }

    pub fn of_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Neg,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Pos,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }
}

/// The ordered-ring operations the interval and isolation code needs.
/// Implemented by [`Scalar`] and by the dyadic fast path.
pub trait Num: Clone + Ord + std::fmt::Debug {
    fn nil() -> Self;
    fn of_int(v: i64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn halved(&self) -> Self;
    fn is_nil(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn powu(&self, k: u32) -> Self;
    /// `2^e`.
    fn two_pow(e: i64) -> Self;
    fn to_rational(&self) -> Scalar;
    /// The number of least complexity in `[lo, hi]`: an exact value, if one of
    /// simple form lies in a narrow enclosure, is recovered by this.
    fn simplest_in(lo: &Self, hi: &Self) -> Self;

    fn magnitude(&self) -> Self {
        if self.is_neg() {
            self.negated()
        } else {
            self.clone()
        }
    }

    fn sgn(&self) -> Sign {
        if self.is_neg() {
            Sign::Neg
        } else if self.is_nil() {
            Sign::Zero
        } else {
            Sign::Pos
        }
    }
}

impl Num for Scalar {
    fn simplest_in(lo: &Self, hi: &Self) -> Self {
        simplest_rational(lo, hi)
    }

    fn nil() -> Self {
        Zero::zero()
    }

    fn of_int(v: i64) -> Self {
        int(v)
    }

    fn plus(&self, o: &Self) -> Self {
        self + o
    }

    fn minus(&self, o: &Self) -> Self {
        self - o
    }

    fn times(&self, o: &Self) -> Self {
        self * o
    }

    fn negated(&self) -> Self {
        -self
    }

    fn halved(&self) -> Self {
        half(self)
    }

    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }

    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }

    fn powu(&self, k: u32) -> Self {
        pow(self, k)
    }

    fn two_pow(e: i64) -> Self {
        pow2_big(e)
    }

    fn to_rational(&self) -> Scalar {
        self.clone()
    }
}

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

/// `n/d`; panics on a zero denominator, so only use with literals.
pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn two() -> Scalar {
    int(2)
}

pub fn half(x: &Scalar) -> Scalar {
    x / two()
}

pub fn mid(a: &Scalar, b: &Scalar) -> Scalar {
    (a + b) / two()
}

pub fn pow(x: &Scalar, e: u32) -> Scalar {
    num_traits::pow(x.clone(), e as usize)
}

/// `|x|^e`.
pub fn abs_pow(x: &Scalar, e: u32) -> Scalar {
    pow(&x.abs(), e)
}

/// `2^e` for any signed exponent.
pub fn pow2(e: i32) -> Scalar {
    let m = num_traits::pow(BigInt::from(2), e.unsigned_abs() as usize);
    if e >= 0 {
        Scalar::from_integer(m)
    } else {
        Scalar::new(BigInt::one(), m)
    }
}

/// `2^e` for a 64-bit exponent.
pub fn pow2_big(e: i64) -> Scalar {
    let m = BigInt::one() << e.unsigned_abs() as usize;
    if e >= 0 {
        Scalar::from_integer(m)
    } else {
        Scalar::new(BigInt::one(), m)
    }
}

/// Least common multiple of the denominators: the smallest positive integer
/// turning every value into an integer.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
    Scalar::from_integer(
        xs.into_iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom())),
    )
}

pub fn min_s(a: &Scalar, b: &Scalar) -> Scalar {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max_s(a: &Scalar, b: &Scalar) -> Scalar {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Greatest common divisor of two rationals: the largest `g` with `a/g`, `b/g` integral.
pub fn gcd_rational(a: &Scalar, b: &Scalar) -> Scalar {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Scalar::new(n, d)
}

/// Parse `"3"`, `"-7/4"`, `"0.125"` or `"-2.5e-3"` into an exact rational.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {t:?}")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {t:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {t:?}")));
        }
        return Ok(Scalar::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (ip, fp) = body.split_once('.').unwrap_or((body, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(Error::Parse(format!("not a number: {t:?}")));
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: {t:?}")));
    }
    let digits: BigInt = format!("{ip}{fp}")
        .parse()
        .unwrap_or_else(|_| BigInt::zero());
    let scale = exp - fp.len() as i32;
    let ten = BigInt::from(10);
    let mut v = Scalar::from_integer(digits);
    let f = Scalar::from_integer(num_traits::pow(ten, scale.unsigned_abs() as usize));
    if scale >= 0 {
        v *= f;
    } else {
        v /= f;
    }
    Ok(if neg { -v } else { v })
}

/// Canonical text: `"p"` for integers, `"p/q"` otherwise.
pub fn fmt_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Display-only float conversion; never used to decide anything.
pub fn to_f64(x: &Scalar) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: shift both down first.
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                f64::INFINITY.copysign(n)
            } else {
                n / d
            }
        }
    }
}

/// Exact conversion of a finite float.
pub fn from_f64(v: f64) -> Option<Scalar> {
    Scalar::from_float(v)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents plus the final semiconvergent).
/// Simplest rational (least denominator, then least magnitude) in `[lo, hi]`.
pub fn simplest_rational(lo: &Scalar, hi: &Scalar) -> Scalar {
    if !lo.is_positive() && !hi.is_negative() {
        return Scalar::zero();
    }
    if hi.is_negative() {
        return -simplest_rational(&-hi, &-lo);
    }
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    let fl = lo.floor();
    fl.clone() + simplest_rational(&(hi - &fl).recip(), &(lo - &fl).recip()).recip()
}

pub fn best_approximation(x: &Scalar, max_den: &BigInt) -> Scalar {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            let k = (max_den - &q0) / &q1;
            let cand_p = &p0 + &k * &p1;
            let cand_q = &q0 + &k * &q1;
            let c1 = Scalar::new(p1.clone(), q1.clone());
            if cand_q.is_zero() {
                return c1;
            }
            let c2 = Scalar::new(cand_p, cand_q);
            return if (&c2 - x).abs() < (&c1 - x).abs() {
                c2
            } else {
                c1
            };
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        if r.is_zero() {
            return Scalar::new(p1, q1);
        }
        n = std::mem::replace(&mut d, r);
    }
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Serde adapter storing a scalar as its canonical string.
pub mod serde_scalar {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Scalar>`.
pub mod serde_scalar_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(fmt_scalar))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Scalar>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_scalar(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
