//! Sparse bivariate polynomials with exact rational coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{self, fmt_scalar, Scalar};
use crate::geometry::Point;

/// `Σ c_{ij} x^i y^j`, keyed by `(i, j)`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Scalar>,
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((i, j), c)| format!("{}·x^{i}·y^{j}", fmt_scalar(c)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly2 {
    pub fn zero() -> Poly2 {
        Poly2::default()
    }

    pub fn constant(c: Scalar) -> Poly2 {
        let mut p = Poly2::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, Scalar)>) -> Poly2 {
        let mut p = Poly2::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// `a·x + b·y + c`.
    pub fn linear(a: Scalar, b: Scalar, c: Scalar) -> Poly2 {
        Poly2::from_terms([(1, 0, a), (0, 1, b), (0, 0, c)])
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn add(&self, o: &Poly2) -> Poly2 {
        let mut r = self.clone();
        for (&(i, j), c) in &o.terms {
            r.add_term(i, j, c.clone());
        }
        r
    }

    pub fn scale(&self, k: &Scalar) -> Poly2 {
        Poly2::from_terms(self.terms.iter().map(|(&(i, j), c)| (i, j, c * k)))
    }

    /// `w · (x − c)^p`, or the same in `y`, expanded binomially.
    pub fn shifted_power(in_y: bool, c: &Scalar, p: u32, w: &Scalar) -> Poly2 {
        let mut r = Poly2::zero();
        for k in 0..=p {
            // (t − c)^p = Σ C(p,k) t^k (−c)^{p−k}
            let coef = Scalar::from_integer(exact::binomial(p, k)) * exact::pow(&-c, p - k) * w;
            if in_y {
                r.add_term(0, k, coef);
            } else {
                r.add_term(k, 0, coef);
            }
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &Scalar)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn eval(&self, x: &Scalar, y: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * exact::pow(x, i) * exact::pow(y, j);
        }
        acc
    }

    pub fn eval_point(&self, p: &Point) -> Scalar {
        self.eval(&p.x, &p.y)
    }

    /// Scalar multiple with coprime integer coefficients whose leading term
    /// (largest key) is positive. Two polynomials have the same zero set
    /// representation iff their normal forms agree.
    pub fn normalized(&self) -> Poly2 {
        if self.is_zero() {
            return self.clone();
        }
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * Scalar::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let lead_neg = self
            .terms
            .values()
            .next_back()
            .is_some_and(|c| c.is_negative());
        let k = Scalar::new(if lead_neg { -den } else { den }, g);
        self.scale(&k)
    }

    /// Integer coefficient triples `(i, j, c)` of the normal form.
    pub fn integer_terms(&self) -> Vec<(u32, u32, BigInt)> {
        self.normalized()
            .terms
            .iter()
            .map(|(&(i, j), c)| (i, j, c.to_integer()))
            .collect()
    }
}

/// Serialized form: `{"terms": [[i, j, "c"], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    pub terms: Vec<(u32, u32, String)>,
}

impl From<&Poly2> for PolyJson {
    fn from(p: &Poly2) -> Self {
        PolyJson {
            terms: p.terms().map(|(i, j, c)| (i, j, fmt_scalar(c))).collect(),
        }
    }
}

impl TryFrom<&PolyJson> for Poly2 {
    type Error = Error;

    fn try_from(p: &PolyJson) -> Result<Poly2> {
        let mut out = Poly2::zero();
        for (i, j, c) in &p.terms {
            out.add_term(*i, *j, exact::parse_scalar(c)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};

    #[test]
    fn expansion_matches_evaluation() {
        let p = Poly2::shifted_power(false, &int(2), 3, &int(1)).add(&Poly2::shifted_power(
            true,
            &ratio(1, 2),
            3,
            &int(-1),
        ));
        for (x, y) in [(0, 0), (3, -1), (-2, 5)] {
            let (x, y) = (int(x), int(y));
            let want = exact::pow(&(&x - int(2)), 3) - exact::pow(&(&y - ratio(1, 2)), 3);
            assert_eq!(p.eval(&x, &y), want);
        }
        assert_eq!(p.degree(), 3);
    }

    #[test]
    fn normal_form_is_scale_invariant() {
        let p = Poly2::linear(ratio(1, 2), ratio(-3, 4), int(1));
        assert_eq!(p.normalized(), p.scale(&int(-6)).normalized());
        assert_eq!(p.integer_terms().len(), 3);
        let lead = p
            .normalized()
            .terms()
            .last()
            .map(|(_, _, c)| c.clone())
            .unwrap();
        assert!(lead.is_positive());
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = Poly2::linear(int(1), int(0), int(0)).add(&Poly2::linear(int(-1), int(0), int(0)));
        assert!(p.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let p = Poly2::linear(ratio(1, 3), int(-2), int(7));
        let j = PolyJson::from(&p);
        assert_eq!(Poly2::try_from(&j).unwrap(), p);
    }
}
