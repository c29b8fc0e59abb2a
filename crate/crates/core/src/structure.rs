//! Line structure of ℓ_∞ point sets with few distinct distances.
//!
//! The pipeline runs in stages: extreme-point frame, single-orientation line
//! cover, rich-line pruning, shared progressions along the lines, and a
//! partition of the line intercepts into progressions. Every asymptotic
//! threshold is an explicit rational parameter ([`Thresholds`]), and every
//! point removed along the way is recorded in a ledger.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

use crate::additive::{best_translation, difference_set, gap_fit, Gap};
use crate::census::IntegerFrame;
use crate::error::{Error, Result};
use crate::exact::{self, fmt_scalar, Scalar};
use crate::geometry::{Point, PointSet};

/// Which side of an axis-parallel square a point sits on, seen from its centre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    V,
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseTag {
    Case1,
    Case2,
}

use Side::{H, V};

/// Quadruples for the first case, rectangles in row-major order.
pub const CASE1_QUADRUPLES: [[Side; 4]; 9] = [
    [V, H, V, H],
    [V, H, H, H],
    [V, H, H, V],
    [V, V, V, H],
    [V, V, H, H],
    [V, V, H, V],
    [H, V, V, H],
    [H, V, H, H],
    [H, V, H, V],
];

/// Quadruples for the second case. Only `R₅` differs in kind: it is all `V`.
pub const CASE2_QUADRUPLES: [[Side; 4]; 9] = [
    [V, H, V, H],
    [V, H, V, V],
    [V, H, H, V],
    [V, V, V, H],
    [V, V, V, V],
    [V, V, H, V],
    [H, V, V, H],
    [H, V, V, V],
    [H, V, H, V],
];

/// One of the nine pieces. Row `i` is the `i`-th band of `t = y − x`, column
/// `j` the `j`-th band of `s = x + y`; the index is `3i + j + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rectangle {
    pub index: usize,
    pub quadruple: [Side; 4],
    /// Indices of the input points inside, extreme points included.
    pub points: Vec<usize>,
}

/// Extreme points, the band endpoints `I₁..I₄` in both diagonal directions, and
/// the nine rectangles.
///
/// Everything is expressed in working coordinates: the input coordinates, or
/// their transpose when `swapped` is set. The swap happens when the point of
/// least `x + y` sits strictly below (in `y − x`) the point of greatest `x + y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    /// Input indices of the four extreme points, not necessarily distinct.
    pub extreme: [usize; 4],
    pub extreme_points: Vec<Point>,
    #[serde(with = "exact::serde_scalar_vec")]
    pub plus: Vec<Scalar>,
    #[serde(with = "exact::serde_scalar_vec")]
    pub minus: Vec<Scalar>,
    pub case_tag: CaseTag,
    pub swapped: bool,
    pub rectangles: Vec<Rectangle>,
}

fn diag(p: &Point) -> (Scalar, Scalar) {
    (&p.x + &p.y, &p.y - &p.x)
}

/// Band of `v` among `I₁ ≤ I₂ ≤ I₃ ≤ I₄`: closed below, open above, except
/// the last band which is closed.
fn band(v: &Scalar, ends: &[Scalar]) -> usize {
    if v < &ends[1] {
        0
    } else if v < &ends[2] {
        1
    } else {
        2
    }
}

fn arg_by<K: Ord>(n: usize, key: impl Fn(usize) -> K, max: bool) -> usize {
    let it = 0..n;
    if max {
        it.max_by_key(|&i| key(i)).expect("nonempty")
    } else {
        it.min_by_key(|&i| key(i)).expect("nonempty")
    }
}

impl Frame {
    /// Rectangle index (1-based) holding the point with working coordinates `q`.
    pub fn rectangle_of(&self, q: &Point) -> usize {
        let (s, t) = diag(q);
        3 * band(&t, &self.minus) + band(&s, &self.plus) + 1
    }

    pub fn quadruple(&self, index: usize) -> [Side; 4] {
        match self.case_tag {
            CaseTag::Case1 => CASE1_QUADRUPLES[index - 1],
            CaseTag::Case2 => CASE2_QUADRUPLES[index - 1],
        }
    }

    /// Working coordinates of an input point.
    pub fn working(&self, q: &Point) -> Point {
        if self.swapped {
            q.transpose()
        } else {
            q.clone()
        }
    }
}

/// Sides of the squares around `c` that pass through `u`: vertical when
/// `|dx| ≥ |dy|`, horizontal when `|dy| ≥ |dx|`.
pub fn sides_seen_from(c: &Point, u: &Point) -> Vec<Side> {
    let dx = (&u.x - &c.x).abs();
    let dy = (&u.y - &c.y).abs();
    let mut out = Vec::with_capacity(2);
    if dx >= dy {
        out.push(V);
    }
    if dy >= dx {
        out.push(H);
    }
    out
}

pub fn extreme_frame(p: &PointSet) -> Result<Frame> {
    let n = p.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "the frame needs at least 2 points".into(),
        ));
    }
    let d: Vec<(Scalar, Scalar)> = p.iter().map(diag).collect();
    // Least x+y, ties to least y−x; greatest x+y, ties to greatest y−x.
    let i1 = arg_by(n, |i| (d[i].0.clone(), d[i].1.clone()), false);
    let i2 = arg_by(n, |i| (d[i].0.clone(), d[i].1.clone()), true);
    let swapped = d[i1].1 < d[i2].1;
    let w: Vec<Point> = if swapped {
        p.iter().map(Point::transpose).collect()
    } else {
        p.points().to_vec()
    };
    let d: Vec<(Scalar, Scalar)> = w.iter().map(diag).collect();
    // Least y−x, ties to least x+y; greatest y−x, ties to greatest x+y.
    let i3 = arg_by(n, |i| (d[i].1.clone(), d[i].0.clone()), false);
    let i4 = arg_by(n, |i| (d[i].1.clone(), d[i].0.clone()), true);
    let minus = vec![
        d[i3].1.clone(),
        d[i2].1.clone(),
        d[i1].1.clone(),
        d[i4].1.clone(),
    ];
    let (case_tag, s2, s3) = if d[i3].0 <= d[i4].0 {
        (CaseTag::Case1, d[i3].0.clone(), d[i4].0.clone())
    } else {
        (CaseTag::Case2, d[i4].0.clone(), d[i3].0.clone())
    };
    let plus = vec![d[i1].0.clone(), s2, s3, d[i2].0.clone()];
    let extreme = [i1, i2, i3, i4];
    let mut frame = Frame {
        extreme,
        extreme_points: extreme.iter().map(|&i| w[i].clone()).collect(),
        plus,
        minus,
        case_tag,
        swapped,
        rectangles: Vec::new(),
    };
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); 9];
    for (i, q) in w.iter().enumerate() {
        members[frame.rectangle_of(q) - 1].push(i);
    }
    frame.rectangles = members
        .into_iter()
        .enumerate()
        .map(|(k, points)| Rectangle {
            index: k + 1,
            quadruple: frame.quadruple(k + 1),
            points,
        })
        .collect();
    Ok(frame)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    /// `(along, across)`: the coordinate along the lines and the intercept.
    pub fn split(self, q: &Point) -> (&Scalar, &Scalar) {
        match self {
            Orientation::Horizontal => (&q.x, &q.y),
            Orientation::Vertical => (&q.y, &q.x),
        }
    }
}

/// Parallel lines, given by their intercepts, and the line each point sits on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineCover {
    pub orientation: Orientation,
    /// Sorted intercepts: `y` values for horizontal lines, `x` for vertical.
    #[serde(with = "exact::serde_scalar_vec")]
    pub lines: Vec<Scalar>,
    /// Line of each input point; `None` once the point has been discarded.
    pub assignment: Vec<Option<usize>>,
    pub rich: Vec<bool>,
    pub horizontal_family: usize,
    pub vertical_family: usize,
}

impl LineCover {
    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    /// Point indices on each line.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.lines.len()];
        for (i, a) in self.assignment.iter().enumerate() {
            if let Some(l) = a {
                out[*l].push(i);
            }
        }
        out
    }

    pub fn covered(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_some()).count()
    }
}

/// Side lines of the squares centred at `centres` through every input point,
/// keeping those that pass through some point. Returns `(horizontal, vertical)`.
fn square_sides(p: &PointSet, centres: &[Point]) -> (BTreeSet<Scalar>, BTreeSet<Scalar>) {
    let ys: BTreeSet<&Scalar> = p.iter().map(|q| &q.y).collect();
    let xs: BTreeSet<&Scalar> = p.iter().map(|q| &q.x).collect();
    let mut h = BTreeSet::new();
    let mut v = BTreeSet::new();
    for c in centres {
        for q in p {
            if q == c {
                continue;
            }
            let r = exact::max_s(&(&q.x - &c.x).abs(), &(&q.y - &c.y).abs());
            for y in [&c.y - &r, &c.y + &r] {
                if ys.contains(&y) {
                    h.insert(y);
                }
            }
            for x in [&c.x - &r, &c.x + &r] {
                if xs.contains(&x) {
                    v.insert(x);
                }
            }
        }
    }
    (h, v)
}

/// Lines of one orientation through every point.
///
/// With two or more points this always succeeds: the side lines of squares
/// around the extreme points reach every other point in both orientations,
/// except in the middle rectangle of the second case, which only vertical
/// sides (in working coordinates) reach. When that rectangle holds a point
/// other than the extreme ones the orientation is fixed; otherwise the smaller
/// family is taken, horizontal on a tie. Extreme points get lines of their own
/// when no square side passes through them, and count towards the family size.
pub fn line_cover(p: &PointSet) -> Result<LineCover> {
    let frame = extreme_frame(p)?;
    line_cover_in(p, &frame)
}

pub fn line_cover_in(p: &PointSet, frame: &Frame) -> Result<LineCover> {
    let mut centres: Vec<Point> = frame.extreme.iter().map(|&i| p.get(i).clone()).collect();
    centres.sort();
    centres.dedup();
    let (mut h, mut v) = square_sides(p, &centres);
    for c in &centres {
        h.insert(c.y.clone());
        v.insert(c.x.clone());
    }
    let middle = &frame.rectangles[4].points;
    let forced =
        frame.case_tag == CaseTag::Case2 && middle.iter().any(|i| !frame.extreme.contains(i));
    let orientation = match (forced, frame.swapped) {
        (true, true) => Orientation::Horizontal,
        (true, false) => Orientation::Vertical,
        (false, _) if v.len() < h.len() => Orientation::Vertical,
        (false, _) => Orientation::Horizontal,
    };
    let (horizontal_family, vertical_family) = (h.len(), v.len());
    let family = match orientation {
        Orientation::Horizontal => h,
        Orientation::Vertical => v,
    };
    let lines: Vec<Scalar> = family.into_iter().collect();
    let mut assignment = Vec::with_capacity(p.len());
    for (i, q) in p.iter().enumerate() {
        let across = orientation.split(q).1;
        match lines.binary_search(across) {
            Ok(l) => assignment.push(Some(l)),
            Err(_) => {
                return Err(Error::ContractViolation(format!(
                    "point {i} {q:?} is on no {orientation:?} line of the cover"
                )))
            }
        }
    }
    Ok(LineCover {
        orientation,
        rich: vec![true; lines.len()],
        lines,
        assignment,
        horizontal_family,
        vertical_family,
    })
}

/// Explicit stand-ins for the asymptotic thresholds. All default to `1/4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// A line is rich when it holds at least `ρ√n` points.
    #[serde(with = "exact::serde_scalar")]
    pub rho: Scalar,
    /// Difference-set slack for attaching a line to a saved progression, and
    /// the line count below which partitioning stops, both as multiples of `√n`.
    #[serde(with = "exact::serde_scalar")]
    pub theta: Scalar,
    /// Horizontal partners needed for the single-point rule, as a fraction of `n`.
    #[serde(with = "exact::serde_scalar")]
    pub gamma: Scalar,
    /// Minimum part size and popularity, as multiples of `√n`.
    #[serde(with = "exact::serde_scalar")]
    pub beta: Scalar,
}

impl Default for Thresholds {
    fn default() -> Self {
        let q = exact::ratio(1, 4);
        Thresholds {
            rho: q.clone(),
            theta: q.clone(),
            gamma: q.clone(),
            beta: q,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        let one = Scalar::one();
        let open = |name: &str, v: &Scalar| {
            if v.is_positive() && v < &one {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must lie in (0, 1), got {}",
                    fmt_scalar(v)
                )))
            }
        };
        if !(self.rho.is_positive() && self.rho <= one) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in (0, 1], got {}",
                fmt_scalar(&self.rho)
            )));
        }
        open("theta", &self.theta)?;
        open("gamma", &self.gamma)?;
        open("beta", &self.beta)
    }
}

/// `count ≥ c·√n`, decided exactly by squaring.
fn reaches_sqrt(count: usize, c: &Scalar, n: usize) -> bool {
    let lhs = Scalar::from_integer(BigInt::from(count) * BigInt::from(count));
    lhs >= c * c * Scalar::from_integer(BigInt::from(n))
}

/// `count ≤ c·√n`.
fn within_sqrt(count: usize, c: &Scalar, n: usize) -> bool {
    let lhs = Scalar::from_integer(BigInt::from(count) * BigInt::from(count));
    lhs <= c * c * Scalar::from_integer(BigInt::from(n))
}

/// Keeps lines with at least `ρ√n` points, `n` being the number of input
/// points. Points on other lines lose their assignment.
pub fn rich_lines(cover: &LineCover, rho: &Scalar) -> Result<LineCover> {
    if !(rho.is_positive() && rho <= &Scalar::one()) {
        return Err(Error::InvalidParameter(format!(
            "rho must lie in (0, 1], got {}",
            fmt_scalar(rho)
        )));
    }
    let n = cover.assignment.len();
    let members = cover.members();
    let rich: Vec<bool> = members
        .iter()
        .zip(&cover.rich)
        .map(|(m, &was)| was && !m.is_empty() && reaches_sqrt(m.len(), rho, n))
        .collect();
    if !rich.iter().any(|&r| r) {
        let top = members.iter().map(Vec::len).max().unwrap_or(0);
        return Err(Error::EmptyAfterPruning(format!(
            "no line holds rho*sqrt(n) points (rho = {}, n = {n}, fullest line has {top})",
            fmt_scalar(rho)
        )));
    }
    let assignment = cover
        .assignment
        .iter()
        .map(|a| a.filter(|&l| rich[l]))
        .collect();
    Ok(LineCover {
        rich,
        assignment,
        ..cover.clone()
    })
}

/// Positions along each line of the points assigned to it.
fn positions(p: &PointSet, cover: &LineCover) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = vec![Vec::new(); cover.lines.len()];
    for (i, a) in cover.assignment.iter().enumerate() {
        if let Some(l) = a {
            out[*l].push(cover.orientation.split(p.get(i)).0.clone());
        }
    }
    for c in &mut out {
        c.sort();
    }
    out
}

/// How a line relates to its progression: `(ℓ ∩ P) − r` meets `A_j` in `overlap` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineProgression {
    pub line: usize,
    pub progression: usize,
    #[serde(with = "exact::serde_scalar")]
    pub translation: Scalar,
    pub overlap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavedProgressions {
    pub progressions: Vec<Gap>,
    /// The line each progression was fitted to.
    pub saved_lines: Vec<usize>,
    pub lines: Vec<LineProgression>,
}

impl SavedProgressions {
    pub fn count(&self) -> usize {
        self.progressions.len()
    }

    /// Lines per progression.
    pub fn popularity(&self) -> Vec<usize> {
        let mut out = vec![0; self.progressions.len()];
        for l in &self.lines {
            out[l.progression] += 1;
        }
        out
    }
}

/// Size budget for fitting a progression to `len` points.
fn budget(len: usize) -> u64 {
    4 * len as u64
}

/// Walks the occupied lines in intercept order. A line whose difference set
/// has at most `θ√n` elements outside that of some saved line joins the first
/// such saved line's progression at the best translation; any other line gets
/// a fitted progression of its own and becomes saved.
pub fn saved_line_progressions(
    p: &PointSet,
    cover: &LineCover,
    theta: &Scalar,
) -> Result<SavedProgressions> {
    if !(theta.is_positive() && theta < &Scalar::one()) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in (0, 1), got {}",
            fmt_scalar(theta)
        )));
    }
    let n = cover.assignment.len();
    let pos = positions(p, cover);
    let mut saved: Vec<(usize, BTreeSet<Scalar>)> = Vec::new();
    let mut out = SavedProgressions {
        progressions: Vec::new(),
        saved_lines: Vec::new(),
        lines: Vec::new(),
    };
    for (l, c) in pos.iter().enumerate() {
        if c.is_empty() {
            continue;
        }
        let diffs = difference_set(c)?;
        let host = saved
            .iter()
            .position(|(_, d)| within_sqrt(diffs.difference(d).count(), theta, n));
        let entry = match host {
            Some(j) => {
                let (translation, overlap) = best_translation(&out.progressions[j], c)?;
                LineProgression {
                    line: l,
                    progression: j,
                    translation,
                    overlap,
                }
            }
            None => {
                let gap = gap_fit(c, 3, budget(c.len()))?.ok_or_else(|| {
                    Error::NoCover(format!(
                        "line {l} (intercept {}) has {} points with no progression of size <= {}",
                        fmt_scalar(&cover.lines[l]),
                        c.len(),
                        budget(c.len())
                    ))
                })?;
                let translation = &c[0] - &gap.base;
                out.progressions.push(gap);
                out.saved_lines.push(l);
                saved.push((l, diffs));
                LineProgression {
                    line: l,
                    progression: saved.len() - 1,
                    translation,
                    overlap: c.len(),
                }
            }
        };
        out.lines.push(entry);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartRule {
    /// Lines met by one column of horizontal partners of a single point.
    SharedAbscissa,
    /// Largest component of lines joined by popular intercept differences.
    PopularDifferences,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub lines: Vec<usize>,
    pub rule: PartRule,
    pub intercepts: Gap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterceptPartition {
    pub parts: Vec<Part>,
    /// Lines left over when fewer than `θ√n` remained.
    pub residual_lines: Vec<usize>,
}

/// Integer coordinates rotated so the cover's lines are horizontal.
fn aligned(p: &PointSet, o: Orientation) -> Vec<(BigInt, BigInt)> {
    let f = IntegerFrame::new(p);
    f.coords
        .into_iter()
        .map(|(x, y)| match o {
            Orientation::Horizontal => (x, y),
            Orientation::Vertical => (y, x),
        })
        .collect()
}

/// A column of horizontal partners of one point, hitting the most lines.
fn shared_abscissa(
    pts: &[usize],
    xy: &[(BigInt, BigInt)],
    line_of: &[Option<usize>],
    min_partners: &Scalar,
) -> Option<BTreeSet<usize>> {
    let mut best: Option<BTreeSet<usize>> = None;
    for &u in pts {
        let mut columns: BTreeMap<&BigInt, BTreeSet<usize>> = BTreeMap::new();
        let mut partners = 0usize;
        for &v in pts {
            if u == v {
                continue;
            }
            let dx = (&xy[u].0 - &xy[v].0).abs();
            let dy = (&xy[u].1 - &xy[v].1).abs();
            if dx >= dy {
                partners += 1;
                columns
                    .entry(&xy[v].0)
                    .or_default()
                    .insert(line_of[v].expect("assigned"));
            }
        }
        if Scalar::from_integer(BigInt::from(partners)) < *min_partners {
            continue;
        }
        for lines in columns.into_values() {
            if best.as_ref().map_or(true, |b| lines.len() > b.len()) {
                best = Some(lines);
            }
        }
    }
    best
}

/// Largest component of the graph joining two lines when some vertical pair
/// connects them and their intercept difference is shared by at least
/// `β√n` connected line pairs.
fn popular_component(
    pts: &[usize],
    xy: &[(BigInt, BigInt)],
    line_of: &[Option<usize>],
    intercepts: &[Scalar],
    beta: &Scalar,
    n: usize,
) -> BTreeSet<usize> {
    let mut connected: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (a, &u) in pts.iter().enumerate() {
        for &v in &pts[a + 1..] {
            let (lu, lv) = (line_of[u].expect("assigned"), line_of[v].expect("assigned"));
            if lu == lv {
                continue;
            }
            let dx = (&xy[u].0 - &xy[v].0).abs();
            let dy = (&xy[u].1 - &xy[v].1).abs();
            if dy >= dx {
                connected.insert((lu.min(lv), lu.max(lv)));
            }
        }
    }
    let mut mult: BTreeMap<Scalar, usize> = BTreeMap::new();
    for &(a, b) in &connected {
        *mult.entry(&intercepts[b] - &intercepts[a]).or_insert(0) += 1;
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &connected {
        if reaches_sqrt(mult[&(&intercepts[b] - &intercepts[a])], beta, n) {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
    }
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    let mut best = BTreeSet::new();
    for &start in adj.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(a) = stack.pop() {
            for &b in &adj[&a] {
                if comp.insert(b) {
                    stack.push(b);
                }
            }
        }
        seen.extend(comp.iter().copied());
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best
}

/// Splits the occupied lines into parts whose intercepts lie in a fitted
/// progression, until fewer than `θ√n` lines remain.
///
/// Each round first looks for a point with at least `γn` horizontal partners
/// (pairs whose ℓ_∞ distance is their gap along the lines) and takes the column
/// of those partners meeting the most lines. If there is none, or the column
/// meets fewer than `β√n` lines, it falls back to the largest component of
/// lines linked by popular intercept differences.
pub fn intercept_partition(
    p: &PointSet,
    cover: &LineCover,
    t: &Thresholds,
) -> Result<InterceptPartition> {
    t.validate()?;
    let n = cover.assignment.len();
    let xy = aligned(p, cover.orientation);
    let min_partners = &t.gamma * Scalar::from_integer(BigInt::from(n));
    let mut remaining: BTreeSet<usize> = cover.assignment.iter().flatten().copied().collect();
    let mut parts = Vec::new();
    while !remaining.is_empty() && reaches_sqrt(remaining.len(), &t.theta, n) {
        let pts: Vec<usize> = (0..n)
            .filter(|&i| cover.assignment[i].is_some_and(|l| remaining.contains(&l)))
            .collect();
        let by_column = shared_abscissa(&pts, &xy, &cover.assignment, &min_partners)
            .filter(|s| reaches_sqrt(s.len(), &t.beta, n));
        let (lines, rule) = match by_column {
            Some(s) => (s, PartRule::SharedAbscissa),
            None => {
                let s = popular_component(&pts, &xy, &cover.assignment, &cover.lines, &t.beta, n);
                if s.is_empty() || !reaches_sqrt(s.len(), &t.beta, n) {
                    return Err(Error::StallDetected(format!(
                        "{} lines remain but no part reaches beta*sqrt(n) = {}*sqrt({n}) lines \
                         (largest found: {})",
                        remaining.len(),
                        fmt_scalar(&t.beta),
                        s.len()
                    )));
                }
                (s, PartRule::PopularDifferences)
            }
        };
        let ys: Vec<Scalar> = lines.iter().map(|&l| cover.lines[l].clone()).collect();
        let gap = gap_fit(&ys, 3, budget(ys.len()))?.ok_or_else(|| {
            Error::NoCover(format!(
                "intercepts of a {}-line part fit no progression of size <= {}",
                ys.len(),
                budget(ys.len())
            ))
        })?;
        for l in &lines {
            remaining.remove(l);
        }
        parts.push(Part {
            lines: lines.into_iter().collect(),
            rule,
            intercepts: gap,
        });
    }
    Ok(InterceptPartition {
        parts,
        residual_lines: remaining.into_iter().collect(),
    })
}

/// Why a point was dropped by the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    /// Its line holds fewer than `ρ√n` points.
    NonRichLine,
    /// Its line follows a progression other than the most popular one.
    OtherProgression,
    /// It lies outside the chosen translate of the progression.
    OutsideTranslate,
    /// Its line is not in the selected intercept part.
    OutsidePart,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub point: usize,
    pub stage: Stage,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub n: usize,
    pub thresholds: Thresholds,
    pub frame: Frame,
    pub cover: LineCover,
    pub rich: LineCover,
    /// Fitted progression for each line of `rich`, `None` off the rich lines or
    /// when no fit exists.
    pub line_gaps: Vec<Option<Gap>>,
    pub progressions: SavedProgressions,
    /// Most popular progression; ties go to the smaller index.
    pub selected_progression: usize,
    pub partition: InterceptPartition,
    /// Largest part, ties to the earlier one.
    pub selected_part: usize,
    pub survivors: Vec<usize>,
    pub ledger: Vec<LedgerEntry>,
    #[serde(with = "exact::serde_scalar")]
    pub survivor_fraction: Scalar,
}

impl StructureReport {
    pub fn part(&self) -> &Part {
        &self.partition.parts[self.selected_part]
    }
}

/// The whole pipeline: a subset of the input covered by parallel lines, all
/// following translates of one progression, whose intercepts form another.
pub fn corollary_pipeline(p: &PointSet, t: &Thresholds) -> Result<StructureReport> {
    t.validate()?;
    let n = p.len();
    let frame = extreme_frame(p)?;
    let cover = line_cover_in(p, &frame)?;
    let rich = rich_lines(&cover, &t.rho)?;
    let mut ledger: Vec<LedgerEntry> = (0..n)
        .filter(|&i| rich.assignment[i].is_none())
        .map(|point| LedgerEntry {
            point,
            stage: Stage::NonRichLine,
        })
        .collect();

    let pos = positions(p, &rich);
    let line_gaps = pos
        .iter()
        .map(|c| {
            if c.is_empty() {
                Ok(None)
            } else {
                gap_fit(c, 3, budget(c.len()))
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let progressions = saved_line_progressions(p, &rich, &t.theta)?;
    let pop = progressions.popularity();
    let selected_progression = (0..pop.len())
        .max_by_key(|&j| (pop[j], std::cmp::Reverse(j)))
        .ok_or_else(|| Error::ContractViolation("no progression was saved".into()))?;
    let gap = &progressions.progressions[selected_progression];
    let mut plan: BTreeMap<usize, &Scalar> = BTreeMap::new();
    for lp in &progressions.lines {
        if lp.progression == selected_progression {
            plan.insert(lp.line, &lp.translation);
        }
    }
    let mut restricted = rich.clone();
    for i in 0..n {
        let Some(l) = rich.assignment[i] else {
            continue;
        };
        let stage = match plan.get(&l) {
            None => Some(Stage::OtherProgression),
            Some(r) => {
                let along = rich.orientation.split(p.get(i)).0;
                (!gap.contains(&(along - *r))).then_some(Stage::OutsideTranslate)
            }
        };
        if let Some(stage) = stage {
            restricted.assignment[i] = None;
            ledger.push(LedgerEntry { point: i, stage });
        }
    }

    let partition = intercept_partition(p, &restricted, t)?;
    let selected_part = (0..partition.parts.len())
        .max_by_key(|&k| (partition.parts[k].lines.len(), std::cmp::Reverse(k)))
        .ok_or_else(|| {
            Error::StallDetected(format!(
                "{} lines survive the progression step, fewer than theta*sqrt(n)",
                plan.len()
            ))
        })?;
    let keep: BTreeSet<usize> = partition.parts[selected_part]
        .lines
        .iter()
        .copied()
        .collect();
    let mut survivors = Vec::new();
    for i in 0..n {
        let Some(l) = restricted.assignment[i] else {
            continue;
        };
        if keep.contains(&l) {
            survivors.push(i);
        } else {
            ledger.push(LedgerEntry {
                point: i,
                stage: Stage::OutsidePart,
            });
        }
    }
    ledger.sort_by_key(|e| e.point);
    if survivors.len() + ledger.len() != n {
        return Err(Error::ContractViolation(format!(
            "{} survivors and {} discarded points do not add up to {n}",
            survivors.len(),
            ledger.len()
        )));
    }
    let survivor_fraction = Scalar::new(BigInt::from(survivors.len()), BigInt::from(n));
    Ok(StructureReport {
        n,
        thresholds: t.clone(),
        frame,
        cover,
        rich,
        line_gaps,
        progressions,
        selected_progression,
        partition,
        selected_part,
        survivors,
        ledger,
        survivor_fraction,
    })
}
