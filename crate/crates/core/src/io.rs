//! Point files, report payloads and the report envelope.
//!
//! Persisted numbers are always exact: rationals travel as decimal strings,
//! either `"p/q"` or as separate numerator and denominator strings.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::bisector::{Bisector, BisectorKind, InflectionReport, IntersectionReport};
use crate::census::DistanceCensus;
use crate::circle_graph::CrossingReport;
use crate::error::{Error, Result};
use crate::exact::{self, fmt_scalar, Scalar};
use crate::geometry::{Point, PointSet};
use crate::separable::RootBox;

/// Point set as JSON: an array of `[nx, dx, ny, dy]` string quadruples.
pub fn points_to_json(p: &PointSet) -> String {
    serde_json::to_string(p.points()).expect("points always serialize")
}

pub fn points_from_json(s: &str) -> Result<PointSet> {
    let pts: Vec<Point> = serde_json::from_str(s)?;
    PointSet::new(pts)
}

pub fn read_points(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    points_from_json(&text)
}

pub fn write_points(path: &Path, p: &PointSet) -> Result<()> {
    write_text(path, &points_to_json(p))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}

/// Reads `x,y` rows of decimals, rounding each coordinate to the nearest
/// rational with denominator at most `denom_bound`.
///
/// Blank lines and lines starting with `#` are skipped, and so is a first row
/// that does not parse (a header). Rounding can merge distinct rows, which is
/// reported as a duplicate point.
pub fn points_from_csv(text: &str, denom_bound: u64) -> Result<PointSet> {
    if denom_bound == 0 {
        return Err(Error::InvalidParameter(
            "denominator bound must be positive".into(),
        ));
    }
    let bound = BigInt::from(denom_bound);
    let mut pts = Vec::new();
    let mut first = true;
    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let parsed = t
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected \"x,y\"", lineno + 1)))
            .and_then(|(a, b)| Ok((exact::parse_scalar(a)?, exact::parse_scalar(b)?)));
        match parsed {
            Ok((x, y)) => pts.push(Point::new(
                exact::best_approximation(&x, &bound),
                exact::best_approximation(&y, &bound),
            )),
            Err(_) if first => {}
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", lineno + 1))),
        }
        first = false;
    }
    PointSet::new(pts)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusJson {
    pub metric: String,
    pub n: usize,
    pub distinct_count: usize,
    /// Distance key (the distance under ℓ_∞, its `p`-th power otherwise) to
    /// number of unordered pairs.
    pub histogram: BTreeMap<String, u64>,
    pub per_point: Vec<usize>,
    pub t_max: usize,
}

impl From<&DistanceCensus> for CensusJson {
    fn from(c: &DistanceCensus) -> Self {
        CensusJson {
            metric: c.metric.to_string(),
            n: c.n,
            distinct_count: c.distinct_count,
            histogram: c
                .histogram
                .iter()
                .map(|(k, v)| (fmt_scalar(k), *v))
                .collect(),
            per_point: c.per_point.clone(),
            t_max: c.t_max,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub p: u32,
    pub e: u64,
    pub n: u64,
    pub m: u64,
    pub circles: u64,
    pub cr: u64,
    pub crossing_points: u64,
    pub upper_bound: u64,
    /// Edge multiplicity to number of vertex pairs joined that many times.
    pub histogram: BTreeMap<usize, usize>,
    pub lemma_applicable: bool,
    pub ratio: Option<String>,
}

impl GraphJson {
    pub fn new(p: u32, r: &CrossingReport, histogram: BTreeMap<usize, usize>) -> GraphJson {
        GraphJson {
            p,
            e: r.e,
            n: r.n,
            m: r.m,
            circles: r.circles,
            cr: r.cr,
            crossing_points: r.crossing_points,
            upper_bound: r.upper_bound,
            histogram,
            lemma_applicable: r.lemma_applicable,
            ratio: r.ratio.as_ref().map(fmt_scalar),
        }
    }
}

/// An enclosure `[x_lo, x_hi] × [y_lo, y_hi]` with exact endpoints.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxJson {
    pub x: [String; 2],
    pub y: [String; 2],
}

impl From<&RootBox> for BoxJson {
    fn from(b: &RootBox) -> Self {
        BoxJson {
            x: [fmt_scalar(&b.x.lo), fmt_scalar(&b.x.hi)],
            y: [fmt_scalar(&b.y.lo), fmt_scalar(&b.y.hi)],
        }
    }
}

/// Polynomial as integer coefficient triples `(i, j, c)` for `c·xⁱ·yʲ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceJson {
    pub region: [u8; 2],
    pub bounded: bool,
    pub coefficients: Vec<(u32, u32, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BisectorJson {
    pub u: Point,
    pub v: Point,
    pub p: u32,
    pub midpoint: Point,
    /// `[a, b, c]` of `a·x + b·y + c = 0` when the bisector is a line.
    pub line: Option<[String; 3]>,
    pub pieces: Vec<PieceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval: Option<EvalJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inflections: Option<InflectionsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersections: Option<IntersectionsJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalJson {
    pub x: String,
    pub y: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InflectionsJson {
    pub count: usize,
    pub midpoint_included: bool,
    pub boxes: Vec<BoxJson>,
}

impl From<&InflectionReport> for InflectionsJson {
    fn from(r: &InflectionReport) -> Self {
        InflectionsJson {
            count: r.count,
            midpoint_included: r.midpoint_included,
            boxes: r.points.iter().map(BoxJson::from).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionsJson {
    pub count: usize,
    pub certified_bound: bool,
    pub window: String,
    pub boxes: Vec<BoxJson>,
}

impl From<&IntersectionReport> for IntersectionsJson {
    fn from(r: &IntersectionReport) -> Self {
        IntersectionsJson {
            count: r.count(),
            certified_bound: r.certified_bound,
            window: fmt_scalar(&r.window),
            boxes: r.points.iter().map(BoxJson::from).collect(),
        }
    }
}

impl From<&Bisector> for BisectorJson {
    fn from(b: &Bisector) -> Self {
        let (line, pieces) = match &b.kind {
            BisectorKind::Line(l) => (
                Some([fmt_scalar(&l.a), fmt_scalar(&l.b), fmt_scalar(&l.c)]),
                Vec::new(),
            ),
            BisectorKind::Curve(ps) => (
                None,
                ps.iter()
                    .map(|pc| PieceJson {
                        region: [pc.region.col, pc.region.row],
                        bounded: pc.bounded,
                        coefficients: pc
                            .poly
                            .integer_terms()
                            .into_iter()
                            .map(|(i, j, c)| (i, j, c.to_string()))
                            .collect(),
                    })
                    .collect(),
            ),
        };
        BisectorJson {
            u: b.u.clone(),
            v: b.v.clone(),
            p: b.p,
            midpoint: b.midpoint.clone(),
            line,
            pieces,
            eval: None,
            inflections: None,
            intersections: None,
        }
    }
}

/// Envelope written by every command: the configuration that produced the
/// payload, the library version, and wall-clock time.
///
/// Everything except `timing_ms` is a deterministic function of the
/// configuration and the input files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub version: String,
    pub config: serde_json::Value,
    pub payload: T,
    pub timing_ms: u64,
}

impl<T: Serialize> Report<T> {
    pub fn new(config: serde_json::Value, payload: T, timing_ms: u64) -> Report<T> {
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            payload,
            timing_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// `p/q` strings for a list of scalars.
pub fn scalar_strings(xs: &[Scalar]) -> Vec<String> {
    xs.iter().map(fmt_scalar).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::Gap;
    use crate::census::distance_census;
    use crate::exact::{int, ratio};
    use crate::generators::{grid, row_construction};
    use crate::geometry::PNorm;

    #[test]
    fn point_json_round_trip() {
        let p = row_construction(4).unwrap();
        let s = points_to_json(&p);
        assert!(s.starts_with("[[\""));
        assert_eq!(points_from_json(&s).unwrap(), p);
        let one = points_from_json(r#"[["-3","4","5","1"]]"#).unwrap();
        assert_eq!(one.get(0), &Point::new(ratio(-3, 4), int(5)));
    }

    #[test]
    fn bad_point_json() {
        assert!(matches!(
            points_from_json(r#"[["1","0","1","1"]]"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            points_from_json(r#"[[1,1,1,1]]"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            points_from_json(r#"[["1","1","1","1"],["2","2","1","1"]]"#),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn csv_rounds_to_the_bound() {
        let p = points_from_csv("x,y\n0.333333,1\n# note\n\n2.5,-0.1429\n", 7).unwrap();
        assert_eq!(p.get(0), &Point::new(ratio(1, 3), int(1)));
        assert_eq!(p.get(1), &Point::new(ratio(5, 2), ratio(-1, 7)));
        assert!(matches!(
            points_from_csv("1,1\nfoo,2\n", 4),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            points_from_csv("0.5,0\n0.51,0\n", 2),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn census_payload() {
        let c = distance_census(&grid(3).unwrap(), PNorm::Infinity).unwrap();
        let j = CensusJson::from(&c);
        assert_eq!(j.distinct_count, 2);
        assert_eq!(j.histogram.get("1"), Some(&20));
        assert_eq!(j.histogram.get("2"), Some(&16));
        let back: CensusJson = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back, j);
    }

    #[test]
    fn gap_round_trip() {
        let g = Gap::new(ratio(1, 3), vec![int(1), ratio(7, 5)], vec![3, 4]).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<Gap>(&s).unwrap(), g);
    }

    #[test]
    fn envelope_carries_version() {
        let r = Report::new(serde_json::json!({"command": "x"}), 5u32, 0);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
        assert_eq!(v["payload"], 5);
    }
}
