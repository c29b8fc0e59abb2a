//! Points, point sets, ℓ_p metrics and exact distance keys.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{self, fmt_scalar, Scalar};
use crate::interval::nth_root_enclosure;

/// A point with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: Scalar,
    pub y: Scalar,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_scalar(&self.x), fmt_scalar(&self.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", fmt_scalar(&self.x), fmt_scalar(&self.y))
    }
}

impl Point {
    pub fn new(x: Scalar, y: Scalar) -> Point {
        Point { x, y }
    }

    pub fn int(x: i64, y: i64) -> Point {
        Point {
            x: exact::int(x),
            y: exact::int(y),
        }
    }

    /// Coordinates swapped: `(y, x)`.
    pub fn transpose(&self) -> Point {
        Point {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    pub fn translate(&self, dx: &Scalar, dy: &Scalar) -> Point {
        Point {
            x: &self.x + dx,
            y: &self.y + dy,
        }
    }

    pub fn midpoint(&self, o: &Point) -> Point {
        Point {
            x: exact::mid(&self.x, &o.x),
            y: exact::mid(&self.y, &o.y),
        }
    }

    /// Reflection through `c`: `2c − self`.
    pub fn reflect_through(&self, c: &Point) -> Point {
        Point {
            x: &c.x * exact::two() - &self.x,
            y: &c.y * exact::two() - &self.y,
        }
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses `"x,y"` where each coordinate is anything [`exact::parse_scalar`] accepts.
    fn from_str(s: &str) -> Result<Point> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected \"x,y\", got {s:?}")))?;
        Ok(Point {
            x: exact::parse_scalar(a)?,
            y: exact::parse_scalar(b)?,
        })
    }
}

/// Serialized as `[nx, dx, ny, dy]`, each a decimal string, so no precision is lost.
impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let parts = [
            self.x.numer().to_string(),
            self.x.denom().to_string(),
            self.y.numer().to_string(),
            self.y.denom().to_string(),
        ];
        parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Point, D::Error> {
        use serde::de::Error as _;
        let [nx, dx, ny, dy] = <[String; 4]>::deserialize(d)?;
        let coord = |n: &str, den: &str| -> std::result::Result<Scalar, D::Error> {
            let n: num_bigint::BigInt = n.trim().parse().map_err(D::Error::custom)?;
            let den: num_bigint::BigInt = den.trim().parse().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            Ok(Scalar::new(n, den))
        };
        Ok(Point {
            x: coord(&nx, &dx)?,
            y: coord(&ny, &dy)?,
        })
    }
}

/// A nonempty list of distinct points. Order is preserved; indices are stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<PointSet> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point set is empty".into()));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::InvalidInput(format!(
                    "duplicate point {p:?} at index {i}"
                )));
            }
        }
        Ok(PointSet { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    /// Apply a bijection of the plane. The caller guarantees injectivity.
    pub fn map(&self, f: impl Fn(&Point) -> Point) -> PointSet {
        PointSet {
            points: self.points.iter().map(f).collect(),
        }
    }

    pub fn translate(&self, dx: &Scalar, dy: &Scalar) -> PointSet {
        self.map(|p| p.translate(dx, dy))
    }

    pub fn transpose(&self) -> PointSet {
        self.map(Point::transpose)
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Metric selector: ℓ_p for an integer `p ≥ 1`, or ℓ_∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PNorm {
    Finite(u32),
    Infinity,
}

impl PNorm {
    pub fn validate(self) -> Result<PNorm> {
        match self {
            PNorm::Finite(0) => Err(Error::InvalidParameter("p must be at least 1".into())),
            m => Ok(m),
        }
    }

    pub fn finite_p(self) -> Option<u32> {
        match self {
            PNorm::Finite(p) => Some(p),
            PNorm::Infinity => None,
        }
    }
}

impl fmt::Display for PNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "p:{p}"),
            PNorm::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for PNorm {
    type Err = Error;

    /// Accepts `inf`, `p:3` or a bare `3`.
    fn from_str(s: &str) -> Result<PNorm> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(PNorm::Infinity);
        }
        let num = t.strip_prefix("p:").unwrap_or(t);
        let p: u32 = num
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad metric {s:?}")))?;
        PNorm::Finite(p).validate()
    }
}

/// Exact surrogate of a distance: its p-th power, or the distance itself under ℓ_∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistanceKey {
    pub metric: PNorm,
    pub key: Scalar,
}

impl PartialOrd for DistanceKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.metric == other.metric).then(|| self.key.cmp(&other.key))
    }
}

pub fn lp_distance_key(u: &Point, v: &Point, m: PNorm) -> DistanceKey {
    let dx = (&u.x - &v.x).abs();
    let dy = (&u.y - &v.y).abs();
    let key = match m {
        PNorm::Finite(p) => exact::pow(&dx, p) + exact::pow(&dy, p),
        PNorm::Infinity => exact::max_s(&dx, &dy),
    };
    DistanceKey { metric: m, key }
}

/// Order of the true distances `d(a.0, a.1)` and `d(b.0, b.1)`.
pub fn compare_distances(a: (&Point, &Point), b: (&Point, &Point), m: PNorm) -> Ordering {
    lp_distance_key(a.0, a.1, m)
        .key
        .cmp(&lp_distance_key(b.0, b.1, m).key)
}

/// `(x, y) ↦ (x − y, x + y)`: rotation by π/4 composed with scaling by √2.
/// Carries ℓ_1 distances to equal ℓ_∞ distances.
pub fn l1_to_linf_transform(p: &PointSet) -> PointSet {
    p.map(|q| Point {
        x: &q.x - &q.y,
        y: &q.x + &q.y,
    })
}

/// Whether `d(u,w) ≤ d(u,v) + d(v,w)`, decided exactly.
///
/// Keys for p = 1 and ℓ_∞ are distances already. For 1 < p < ∞ the unit ball is
/// strictly convex, so equality happens only when `v` lies on segment `uw`;
/// every other case separates under refinement of the root enclosures.
pub fn triangle_inequality_holds(u: &Point, v: &Point, w: &Point, m: PNorm) -> bool {
    let p = match m {
        PNorm::Infinity | PNorm::Finite(1) => {
            let d = |a: &Point, b: &Point| lp_distance_key(a, b, m).key;
            return d(u, w) <= d(u, v) + d(v, w);
        }
        PNorm::Finite(p) => p,
    };
    if on_closed_segment(v, u, w) {
        return true;
    }
    let keys = [
        lp_distance_key(u, w, m).key,
        lp_distance_key(u, v, m).key,
        lp_distance_key(v, w, m).key,
    ];
    let mut tol = exact::pow2(-20) * exact::max_s(&keys[0], &exact::int(1));
    for _ in 0..64 {
        let r: Vec<_> = keys
            .iter()
            .map(|k| nth_root_enclosure(k, p, &tol))
            .collect();
        let rhs_lo = &r[1].lo + &r[2].lo;
        let rhs_hi = &r[1].hi + &r[2].hi;
        if r[0].hi <= rhs_lo {
            return true;
        }
        if r[0].lo > rhs_hi {
            return false;
        }
        tol = exact::half(&exact::half(&tol));
    }
    // Not reachable for valid input: a strict inequality separates eventually.
    false
}

/// Whether `v` lies on the closed segment from `a` to `b`.
pub fn on_closed_segment(v: &Point, a: &Point, b: &Point) -> bool {
    let cross = (&b.x - &a.x) * (&v.y - &a.y) - (&b.y - &a.y) * (&v.x - &a.x);
    if !cross.is_zero() {
        return false;
    }
    let in_range =
        |t: &Scalar, s: &Scalar, e: &Scalar| exact::min_s(s, e) <= *t && *t <= exact::max_s(s, e);
    in_range(&v.x, &a.x, &b.x) && in_range(&v.y, &a.y, &b.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    #[test]
    fn keys() {
        let o = Point::int(0, 0);
        assert_eq!(
            lp_distance_key(&o, &Point::int(3, 4), PNorm::Finite(2)).key,
            int(25)
        );
        assert_eq!(
            lp_distance_key(&o, &Point::int(1, 1), PNorm::Finite(3)).key,
            int(2)
        );
        assert_eq!(
            lp_distance_key(&o, &Point::int(3, 4), PNorm::Infinity).key,
            int(4)
        );
    }

    #[test]
    fn comparisons() {
        let o = Point::int(0, 0);
        let (e1, e2) = (Point::int(1, 0), Point::int(0, 1));
        assert_eq!(
            compare_distances((&o, &e1), (&o, &e2), PNorm::Finite(3)),
            Ordering::Equal
        );
        assert_eq!(
            compare_distances((&o, &Point::int(1, 1)), (&o, &e1), PNorm::Finite(4)),
            Ordering::Greater
        );
        assert_eq!(
            compare_distances(
                (&o, &Point::int(3, 4)),
                (&o, &Point::int(5, 0)),
                PNorm::Finite(2)
            ),
            Ordering::Equal
        );
    }

    #[test]
    fn transform_examples() {
        let s = PointSet::new(vec![Point::int(0, 0), Point::int(1, 2)]).unwrap();
        let t = l1_to_linf_transform(&s);
        assert_eq!(t.points(), &[Point::int(0, 0), Point::int(-1, 3)]);
        let k1 = lp_distance_key(s.get(0), s.get(1), PNorm::Finite(1)).key;
        let ki = lp_distance_key(t.get(0), t.get(1), PNorm::Infinity).key;
        assert_eq!(k1, int(3));
        assert_eq!(ki, int(3));
    }

    #[test]
    fn metric_parsing() {
        assert_eq!("inf".parse::<PNorm>().unwrap(), PNorm::Infinity);
        assert_eq!("p:3".parse::<PNorm>().unwrap(), PNorm::Finite(3));
        assert_eq!("2".parse::<PNorm>().unwrap(), PNorm::Finite(2));
        assert!("p:0".parse::<PNorm>().is_err());
        assert!("p:x".parse::<PNorm>().is_err());
    }

    #[test]
    fn point_sets_reject_duplicates() {
        assert!(PointSet::new(vec![]).is_err());
        assert!(PointSet::new(vec![Point::int(1, 1), Point::int(1, 1)]).is_err());
        assert_eq!(
            "1/2,-3".parse::<Point>().unwrap(),
            Point::new(exact::ratio(1, 2), int(-3))
        );
    }

    #[test]
    fn triangle_cases() {
        let (a, b, c) = (Point::int(0, 0), Point::int(1, 0), Point::int(2, 0));
        for m in [
            PNorm::Finite(1),
            PNorm::Finite(2),
            PNorm::Finite(3),
            PNorm::Infinity,
        ] {
            assert!(triangle_inequality_holds(&a, &b, &c, m));
            assert!(triangle_inequality_holds(&a, &Point::int(1, 5), &c, m));
        }
        // Vertex order does not matter for a valid metric.
        assert!(triangle_inequality_holds(
            &a,
            &c,
            &Point::int(1, 5),
            PNorm::Finite(3)
        ));
    }
}
