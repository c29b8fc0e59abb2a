//! Static SVG drawings. The only place floats appear, and only for display.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exact::{to_f64, Scalar};
use crate::geometry::Point;

/// `a·x + b·y + c = 0`, clipped to the drawing.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneLine {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

impl SceneLine {
    pub fn horizontal(y: &Scalar) -> SceneLine {
        SceneLine {
            a: Scalar::from_integer(0.into()),
            b: Scalar::from_integer(1.into()),
            c: -y,
        }
    }

    pub fn vertical(x: &Scalar) -> SceneLine {
        SceneLine {
            a: Scalar::from_integer(1.into()),
            b: Scalar::from_integer(0.into()),
            c: -x,
        }
    }
}

/// Counterclockwise arc of the ℓ_p circle centred at `center` through `from`,
/// ending at `to`.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneArc {
    pub center: Point,
    pub from: Point,
    pub to: Point,
    pub p: u32,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scene {
    pub points: Vec<Point>,
    pub lines: Vec<SceneLine>,
    pub polylines: Vec<Vec<Point>>,
    pub arcs: Vec<SceneArc>,
}

/// At most 12 significant digits, shortest form.
fn num(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return "0".into();
    }
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{r}")
}

fn xy(p: &Point) -> (f64, f64) {
    (to_f64(&p.x), to_f64(&p.y))
}

/// Points on an ℓ_p circle between two directions, counterclockwise.
fn arc_samples(a: &SceneArc, steps: usize) -> Vec<(f64, f64)> {
    let (cx, cy) = xy(&a.center);
    let (fx, fy) = xy(&a.from);
    let (tx, ty) = xy(&a.to);
    let r = {
        let (dx, dy) = (fx - cx, fy - cy);
        (dx.abs().powi(a.p as i32) + dy.abs().powi(a.p as i32)).powf(1.0 / a.p as f64)
    };
    let t0 = (fy - cy).atan2(fx - cx);
    let mut t1 = (ty - cy).atan2(tx - cx);
    while t1 <= t0 {
        t1 += std::f64::consts::TAU;
    }
    (0..=steps)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / steps as f64;
            let (c, s) = (t.cos(), t.sin());
            let norm = (c.abs().powi(a.p as i32) + s.abs().powi(a.p as i32)).powf(1.0 / a.p as f64);
            (cx + r * c / norm, cy + r * s / norm)
        })
        .collect()
}

struct View {
    x0: f64,
    y1: f64,
    w: f64,
    h: f64,
}

impl View {
    /// SVG y grows downwards; flip so the drawing reads like the plane.
    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (x - self.x0, self.y1 - y)
    }
}

fn bounds(scene: &Scene, arcs: &[Vec<(f64, f64)>]) -> View {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let pts = scene.points.iter().chain(scene.polylines.iter().flatten());
    for p in pts {
        let (x, y) = xy(p);
        xs.push(x);
        ys.push(y);
    }
    for &(x, y) in arcs.iter().flatten() {
        xs.push(x);
        ys.push(y);
    }
    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut x0, mut x1, mut y0, mut y1) = (lo(&xs), hi(&xs), lo(&ys), hi(&ys));
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let (mx, my) = (
        (x1 - x0).max(span * 0.1) * 0.05,
        (y1 - y0).max(span * 0.1) * 0.05,
    );
    View {
        x0: x0 - mx,
        y1: y1 + my,
        w: (x1 - x0) + 2.0 * mx,
        h: (y1 - y0) + 2.0 * my,
    }
}

/// Clips `a·x + b·y + c = 0` to the view rectangle.
fn clip(l: &SceneLine, v: &View) -> Option<((f64, f64), (f64, f64))> {
    let (a, b, c) = (to_f64(&l.a), to_f64(&l.b), to_f64(&l.c));
    let (x0, x1, y1) = (v.x0, v.x0 + v.w, v.y1);
    let y0 = y1 - v.h;
    let mut hits: Vec<(f64, f64)> = Vec::new();
    if b != 0.0 {
        for x in [x0, x1] {
            let y = -(a * x + c) / b;
            if y >= y0 && y <= y1 {
                hits.push((x, y));
            }
        }
    }
    if a != 0.0 {
        for y in [y0, y1] {
            let x = -(b * y + c) / a;
            if x >= x0 && x <= x1 {
                hits.push((x, y));
            }
        }
    }
    hits.sort_by(|p, q| p.partial_cmp(q).expect("finite"));
    hits.dedup();
    match hits.as_slice() {
        [p, .., q] => Some((*p, *q)),
        _ => None,
    }
}

/// Renders `scene` as an SVG document. Equal scenes give identical bytes.
pub fn render_svg(scene: &Scene) -> Result<String> {
    if scene.points.is_empty() && scene.polylines.is_empty() && scene.arcs.is_empty() {
        return Err(Error::InvalidInput("nothing to draw".into()));
    }
    let arcs: Vec<Vec<(f64, f64)>> = scene.arcs.iter().map(|a| arc_samples(a, 48)).collect();
    let v = bounds(scene, &arcs);
    let stroke = v.w.max(v.h) / 400.0;
    let dot = v.w.max(v.h) / 120.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}">"#,
        num(v.w),
        num(v.h)
    );
    let path = |pts: &[(f64, f64)]| -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = v.map(p);
                format!("{},{}", num(x), num(y))
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    for l in &scene.lines {
        if let Some((p, q)) = clip(l, &v) {
            let (p, q) = (v.map(p), v.map(q));
            let _ = writeln!(
                out,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888" stroke-width="{}"/>"##,
                num(p.0),
                num(p.1),
                num(q.0),
                num(q.1),
                num(stroke)
            );
        }
    }
    for a in &arcs {
        let _ = writeln!(
            out,
            r##"<polyline class="arc" points="{}" fill="none" stroke="#36c" stroke-width="{}"/>"##,
            path(a),
            num(stroke)
        );
    }
    for pl in &scene.polylines {
        let pts: Vec<(f64, f64)> = pl.iter().map(xy).collect();
        let _ = writeln!(
            out,
            r##"<polyline points="{}" fill="none" stroke="#c33" stroke-width="{}"/>"##,
            path(&pts),
            num(stroke)
        );
    }
    for p in &scene.points {
        let (x, y) = v.map(xy(p));
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}"/>"#,
            num(x),
            num(y),
            num(dot)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_svg(scene: &Scene, path: &Path) -> Result<()> {
    let s = render_svg(scene)?;
    std::fs::write(path, s).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))
}
