//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on a domain error (a JSON object with `error`
//! and `message` goes to stderr), 2 on a usage error.

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lplab::additive::{difference_energy, gap_fit};
use lplab::bisector::{
    bisector_eval, bisector_intersections, build_bisector, inflection_points, Bisector,
};
use lplab::census::distance_census;
use lplab::circle_graph::{build_multigraph, crossing_count, multiplicity_histogram};
use lplab::exact::{self, serde_scalar, Scalar};
use lplab::generators::{GeneratorSpec, Rect};
use lplab::geometry::{l1_to_linf_transform, PNorm, Point, PointSet};
use lplab::io::{self, BisectorJson, CensusJson, EvalJson, GraphJson, Report};
use lplab::structure::{corollary_pipeline, Orientation, Thresholds};
use lplab::svg::{write_svg, Scene, SceneArc, SceneLine};
use lplab::verify::{run_suite, Faults, Suite};
use lplab::{Error, Result};

/// Exact experiments on distinct distances under ℓ_p metrics.
#[derive(Parser, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[command(name = "lplab", version)]
pub struct ExperimentConfig {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "LPLAB_THREADS", default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write a point set.
    Generate(GenerateArgs),
    /// Histogram of pairwise distances.
    Census {
        #[arg(long, value_parser = parse_metric)]
        metric: PNorm,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisector of two points under ℓ_p.
    Bisector(BisectorArgs),
    /// Circle multigraph and its crossings.
    CircleGraph {
        #[arg(long)]
        p: u32,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Initial precision of crossing enclosures, in bits.
        #[arg(long, default_value_t = 8)]
        precision_bits: u32,
    },
    /// Line cover, progressions and intercept partition under ℓ_∞.
    Structure {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_parser = parse_scalar_arg, default_value = "1/4")]
        #[serde(with = "serde_scalar")]
        rho: Scalar,
        #[arg(long, value_parser = parse_scalar_arg, default_value = "1/4")]
        #[serde(with = "serde_scalar")]
        theta: Scalar,
        #[arg(long, value_parser = parse_scalar_arg, default_value = "1/4")]
        #[serde(with = "serde_scalar")]
        gamma: Scalar,
        #[arg(long, value_parser = parse_scalar_arg, default_value = "1/4")]
        #[serde(with = "serde_scalar")]
        beta: Scalar,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Fit a generalized arithmetic progression to a list of numbers.
    GapFit {
        #[command(flatten)]
        values: ValuesArgs,
        #[arg(long, default_value_t = 3)]
        d_max: usize,
        /// Largest allowed progression size; defaults to twice the input size.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Difference multiplicities and additive energy.
    Energy {
        #[command(flatten)]
        values: ValuesArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a point set, optionally with its line cover or circle arcs.
    Plot {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
        /// Overlay the ℓ_∞ line cover.
        #[arg(long)]
        cover: bool,
        /// Overlay the circle-graph arcs under this ℓ_p.
        #[arg(long)]
        circles: Option<u32>,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: Suite,
        /// Plant a known bug to check the harness: `census-off-by-one`.
        #[arg(long)]
        inject_fault: Option<String>,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputArgs {
    /// Point file: JSON quadruples, or `x,y` CSV rows when the name ends in `.csv`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Denominator bound for rounding CSV decimals.
    #[arg(long)]
    pub denom_bound: Option<u64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuesArgs {
    /// Comma-separated exact numbers, e.g. `1,3/2,0.25`.
    #[arg(long, value_delimiter = ',', value_parser = parse_scalar_arg)]
    #[serde(with = "lplab::exact::serde_scalar_vec")]
    pub values: Vec<Scalar>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long, value_parser = ["grid", "rows", "random"])]
    pub kind: String,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Side of the square `[0, side]²` for random sets.
    #[arg(long, default_value_t = 100)]
    pub side: i64,
    #[arg(long, default_value_t = 1)]
    pub denom_bound: u64,
    /// Translate every point by `dx,dy`.
    #[arg(long, value_parser = parse_point_arg)]
    pub translate: Option<Point>,
    /// Apply `(x, y) ↦ (x − y, x + y)`, which turns ℓ_1 distances into ℓ_∞ ones.
    #[arg(long)]
    pub l1_to_linf: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectorArgs {
    #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
    pub u: Point,
    #[arg(long, value_parser = parse_point_arg, allow_hyphen_values = true)]
    pub v: Point,
    #[arg(long)]
    pub p: u32,
    /// Enclose the bisector's `y` over this abscissa.
    #[arg(long, value_parser = parse_scalar_arg, allow_hyphen_values = true)]
    #[serde(with = "opt_scalar")]
    pub eval: Option<Scalar>,
    #[arg(long)]
    pub inflections: bool,
    /// Second bisector as `x1,y1;x2,y2`.
    #[arg(long, value_parser = parse_pair_arg, allow_hyphen_values = true)]
    pub intersect_with: Option<(Point, Point)>,
    /// Enclosure width as a power of two relative to the ℓ_∞ length of `uv`.
    #[arg(long, default_value_t = 40)]
    pub precision_bits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

mod opt_scalar {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        x: &Option<Scalar>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        x.as_ref().map(exact::fmt_scalar).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Scalar>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| exact::parse_scalar(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

fn parse_metric(s: &str) -> std::result::Result<PNorm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_scalar_arg(s: &str) -> std::result::Result<Scalar, String> {
    exact::parse_scalar(s).map_err(|e| e.to_string())
}

fn parse_point_arg(s: &str) -> std::result::Result<Point, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_pair_arg(s: &str) -> std::result::Result<(Point, Point), String> {
    let (a, b) = s.split_once(';').ok_or("expected \"x1,y1;x2,y2\"")?;
    Ok((parse_point_arg(a)?, parse_point_arg(b)?))
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// What a command hands back: a report to print or write, and lines for stdout.
struct Outcome {
    payload: serde_json::Value,
    out: Option<PathBuf>,
    text: Option<String>,
    ok: bool,
}

impl Outcome {
    fn report<T: Serialize>(payload: &T, out: &Option<PathBuf>) -> Result<Outcome> {
        Ok(Outcome {
            payload: serde_json::to_value(payload)?,
            out: out.clone(),
            text: None,
            ok: true,
        })
    }
}

fn read_input(a: &InputArgs) -> Result<PointSet> {
    let is_csv = a
        .input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let bound = a
            .denom_bound
            .ok_or_else(|| Error::InvalidParameter("CSV input needs --denom-bound".into()))?;
        let text = std::fs::read_to_string(&a.input)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", a.input.display())))?;
        io::points_from_csv(&text, bound)
    } else {
        io::read_points(&a.input)
    }
}

fn generate(a: &GenerateArgs) -> Result<PointSet> {
    let need_k = || {
        a.k.ok_or_else(|| Error::InvalidParameter(format!("--kind {} needs --k", a.kind)))
    };
    let spec = match a.kind.as_str() {
        "grid" => GeneratorSpec::Grid { k: need_k()? },
        "rows" => GeneratorSpec::Rows { k: need_k()? },
        _ => GeneratorSpec::Random {
            n: a.n
                .ok_or_else(|| Error::InvalidParameter("--kind random needs --n".into()))?,
            seed: a.seed,
            rect: Rect::square(a.side),
            denom_bound: a.denom_bound,
        },
    };
    let mut p = spec.generate()?;
    if let Some(t) = &a.translate {
        p = p.translate(&t.x, &t.y);
    }
    if a.l1_to_linf {
        p = l1_to_linf_transform(&p);
    }
    Ok(p)
}

/// Points along a bisector for drawing, from enclosure midpoints.
fn bisector_scene(b: &Bisector) -> Result<Scene> {
    let mut scene = Scene {
        points: vec![b.u.clone(), b.v.clone()],
        ..Scene::default()
    };
    if let Some(l) = b.line() {
        scene.lines.push(SceneLine {
            a: l.a.clone(),
            b: l.b.clone(),
            c: l.c.clone(),
        });
        let half = b.diam() * exact::int(2);
        scene.points.push(l.point_at(&(&b.midpoint.x - &half)));
        scene.points.push(l.point_at(&(&b.midpoint.x + &half)));
        scene.points.truncate(2);
        return Ok(scene);
    }
    let prec = b.diam() * exact::pow2(-20);
    let steps = 64;
    let mut pts = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = exact::ratio(4 * k as i64 - 2 * steps as i64, steps as i64);
        let x = &b.midpoint.x + b.diam() * t;
        let ys = bisector_eval(b, &x, &prec)?;
        pts.push(Point::new(x, ys.mid()));
    }
    scene.polylines.push(pts);
    Ok(scene)
}

fn cover_scene(p: &PointSet) -> Result<Scene> {
    let c = lplab::structure::line_cover(p)?;
    let lines = c
        .lines
        .iter()
        .map(|v| match c.orientation {
            Orientation::Horizontal => SceneLine::horizontal(v),
            Orientation::Vertical => SceneLine::vertical(v),
        })
        .collect();
    Ok(Scene {
        points: p.points().to_vec(),
        lines,
        ..Scene::default()
    })
}

fn circles_scene(p: &PointSet, pn: u32) -> Result<Scene> {
    let g = build_multigraph(p, pn)?;
    let arcs = g
        .edges
        .iter()
        .map(|e| SceneArc {
            center: p.get(g.circles[e.circle].center).clone(),
            from: p.get(e.from).clone(),
            to: p.get(e.to).clone(),
            p: pn,
        })
        .collect();
    Ok(Scene {
        points: p.points().to_vec(),
        arcs,
        ..Scene::default()
    })
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Generate(a) => {
            let p = generate(a)?;
            let json = io::points_to_json(&p);
            match &a.out {
                Some(path) => {
                    io::write_text(path, &json)?;
                    Ok(Outcome {
                        payload: serde_json::json!({ "n": p.len(), "out": path }),
                        out: None,
                        text: None,
                        ok: true,
                    })
                }
                None => Ok(Outcome {
                    payload: serde_json::Value::Null,
                    out: None,
                    text: Some(json),
                    ok: true,
                }),
            }
        }
        Command::Census { metric, input, out } => {
            let c = distance_census(&read_input(input)?, *metric)?;
            Outcome::report(&CensusJson::from(&c), out)
        }
        Command::Bisector(a) => {
            let b = build_bisector(&a.u, &a.v, a.p)?;
            let prec = b.diam() * exact::pow2(-(a.precision_bits as i32));
            let mut j = BisectorJson::from(&b);
            if let Some(x) = &a.eval {
                let ys = bisector_eval(&b, x, &prec)?;
                j.eval = Some(EvalJson {
                    x: exact::fmt_scalar(x),
                    y: [exact::fmt_scalar(&ys.lo), exact::fmt_scalar(&ys.hi)],
                });
            }
            if a.inflections {
                j.inflections = Some((&inflection_points(&b, &prec)?).into());
            }
            if let Some((u2, v2)) = &a.intersect_with {
                let b2 = build_bisector(u2, v2, a.p)?;
                j.intersections = Some((&bisector_intersections(&b, &b2, &prec)?).into());
            }
            if let Some(svg) = &a.svg {
                write_svg(&bisector_scene(&b)?, svg)?;
            }
            Outcome::report(&j, &a.out)
        }
        Command::CircleGraph {
            p,
            input,
            out,
            svg,
            precision_bits,
        } => {
            let pts = read_input(input)?;
            let g = build_multigraph(&pts, *p)?;
            let hist = multiplicity_histogram(&g)?;
            let rep = crossing_count(&g, *precision_bits)?;
            if let Some(svg) = svg {
                write_svg(&circles_scene(&pts, *p)?, svg)?;
            }
            Outcome::report(&GraphJson::new(*p, &rep, hist), out)
        }
        Command::Structure {
            input,
            rho,
            theta,
            gamma,
            beta,
            out,
            svg,
        } => {
            let pts = read_input(input)?;
            let t = Thresholds {
                rho: rho.clone(),
                theta: theta.clone(),
                gamma: gamma.clone(),
                beta: beta.clone(),
            };
            let rep = corollary_pipeline(&pts, &t)?;
            if let Some(svg) = svg {
                write_svg(&cover_scene(&pts)?, svg)?;
            }
            Outcome::report(&rep, out)
        }
        Command::GapFit {
            values,
            d_max,
            budget,
            out,
        } => {
            let a = &values.values;
            let budget = budget.unwrap_or(2 * a.len() as u64);
            let fit = gap_fit(a, *d_max, budget)?;
            let payload = match fit {
                Some(g) => {
                    serde_json::json!({ "cover": g, "size": g.size(), "dimension": g.dimension() })
                }
                None => serde_json::json!({ "cover": null, "no_cover": true, "budget": budget }),
            };
            Outcome::report(&payload, out)
        }
        Command::Energy { values, out } => {
            Outcome::report(&difference_energy(&values.values)?, out)
        }
        Command::Plot {
            input,
            out,
            cover,
            circles,
        } => {
            let pts = read_input(input)?;
            let mut scene = match circles {
                Some(pn) => circles_scene(&pts, *pn)?,
                None => Scene {
                    points: pts.points().to_vec(),
                    ..Scene::default()
                },
            };
            if *cover {
                scene.lines = cover_scene(&pts)?.lines;
            }
            write_svg(&scene, out)?;
            Ok(Outcome {
                payload: serde_json::json!({ "out": out }),
                out: None,
                text: None,
                ok: true,
            })
        }
        Command::Verify {
            suite,
            inject_fault,
        } => {
            let faults = match inject_fault.as_deref() {
                None => Faults::default(),
                Some("census-off-by-one") => Faults {
                    census_off_by_one: true,
                },
                Some(other) => {
                    return Err(Error::InvalidParameter(format!("unknown fault {other:?}")))
                }
            };
            let outcome = run_suite(*suite, &faults);
            let mut text = outcome.table();
            for f in outcome.failures() {
                text.push_str(&format!("failed invariant: {}/{}\n", f.suite, f.invariant));
            }
            Ok(Outcome {
                payload: serde_json::to_value(&outcome)?,
                out: None,
                text: Some(text),
                ok: outcome.passed(),
            })
        }
    }
}

fn error_json(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

fn run(config: &ExperimentConfig, stdout: &mut dyn Write) -> Result<bool> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| execute(&config.command))?;
    let ms = start.elapsed().as_millis() as u64;
    if let Some(text) = &outcome.text {
        writeln!(stdout, "{}", text.trim_end())?;
    }
    if !outcome.payload.is_null() && outcome.text.is_none() {
        let report = Report::new(serde_json::to_value(config)?, &outcome.payload, ms);
        match &outcome.out {
            Some(path) => io::write_text(path, &report.to_json())?,
            None => writeln!(stdout, "{}", report.to_json())?,
        }
    }
    Ok(outcome.ok)
}

/// Parses `argv` (program name first) and runs it, writing to the given streams.
pub fn run_cli_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match ExperimentConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match run(&config, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(&e));
            1
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_cli_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Reads a report file back, for tests and scripting.
pub fn read_report(path: &Path) -> Result<Report<serde_json::Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}
