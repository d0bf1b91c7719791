//! Argument handling and command implementations behind the `worldfn`
//! binary. Everything here is deterministic for a fixed command line: no
//! timings, no unordered maps, and no dependence on the worker count.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use worldfn::fmt::sig9;
use worldfn::{
    audit_metric_axioms, audit_world_function_axioms, default_search_region, full_report, hausdorff_distance,
    sample_object, section_of_segment, solve_equivalence, AxiomReport, EquivalenceOptions, EuclideanConfig,
    GeometrySpec, ImplicitObject, Point, PointCloud, PointPairVector, Region, SamplingOptions, Shape,
    DEFAULT_NODE_BUDGET,
};

pub const EXIT_OK: u8 = 0;
/// The command ran and the answer is "no" (an axiom or Euclideaness check failed).
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "worldfn", version, about = "Geometry from a world function alone")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Geometry: euclid<N>, mink, dmink, inline JSON, or a path to a JSON file.
    #[arg(long, global = true, default_value = "euclid3")]
    pub geom: String,
    /// Speed of light for mink and dmink.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub c: f64,
    /// Deformation parameter for dmink.
    #[arg(long, global = true, default_value_t = 0.1, allow_hyphen_values = true)]
    pub d: f64,
    /// Label dimension for mink, dmink and a bare `euclid` (defaults 4, 4, 3).
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Search box as lo:hi per axis, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_region)]
    pub region: Option<Region>,
    /// Grid step.
    #[arg(long, global = true)]
    pub resolution: Option<f64>,
    /// Acceptance tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Maximum number of grid nodes a scan may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    pub node_budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result to this file and print the text summary instead.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxiomSet {
    /// Distance axioms: nonnegativity, identity, triangle.
    Metric,
    /// Zero diagonal, symmetry and the reversed triangle inequality.
    WorldFunction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectArg {
    Segment,
    Sphere,
    Ellipsoid,
    Cylinder,
    Section,
}

/// A point given as comma-separated coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Coords(pub Vec<f64>);

impl From<Coords> for Point {
    fn from(c: Coords) -> Point {
        Point::new(c.0)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate σ(P,Q) and classify the interval.
    Sigma {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        p: Coords,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        q: Coords,
    },
    /// Check axioms over a point sample.
    Audit {
        #[arg(long, value_enum, default_value_t = AxiomSet::Metric)]
        axioms: AxiomSet,
        /// Explicit sample, points separated by ';'.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point_list)]
        points: Option<Vec<Point>>,
        /// Random sample size drawn from --region when --points is absent.
        #[arg(long, default_value_t = 30)]
        count: usize,
    },
    /// Sample an implicit object on a grid.
    Sample {
        #[arg(long, value_enum)]
        object: ObjectArg,
        #[command(flatten)]
        roles: Roles,
    },
    /// Sample the section of segment [start,end] at --point and measure it.
    Section {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        start: Coords,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        end: Coords,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        point: Coords,
    },
    /// Find every Q1 with Q0Q1 equivalent to the vector origin->end.
    Equiv {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        origin: Coords,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        end: Coords,
        /// Q0, where the equivalent vectors start.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        at: Coords,
        /// Evaluate the equations in the alternative order.
        #[arg(long)]
        swap: bool,
    },
    /// Compare the cylinders through P with axes [f1,f2] and [f1,f3].
    CylinderCompare {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        point: Coords,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        f1: Coords,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        f2: Coords,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
        f3: Coords,
    },
    /// Run the four Euclideaness conditions. Exit 0 when all hold, 1 otherwise.
    Euclidean {
        /// Candidate points separated by ';'.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point_list)]
        candidates: Option<Vec<Point>>,
        /// Random candidates drawn from [-1,1]^n when --candidates is absent.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = worldfn::euclidean::DEFAULT_TUPLE_SAMPLES)]
        tuple_samples: usize,
        #[arg(long, default_value_t = worldfn::euclidean::DEFAULT_MAX_DIM)]
        max_dim: usize,
        #[arg(long, default_value_t = 200)]
        pair_samples: usize,
        #[arg(long, default_value_t = 4)]
        continuity_samples: usize,
    },
}

/// Defining points of an object, by role. Which ones are needed depends on
/// the object kind.
#[derive(Debug, Args)]
pub struct Roles {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub start: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub end: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub center: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub surface: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub focus1: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub focus2: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub axis1: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub axis2: Option<Coords>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_coords)]
    pub point: Option<Coords>,
}

pub fn parse_coords(s: &str) -> Result<Coords, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let x: f64 = part
            .trim()
            .parse()
            .map_err(|_| format!("`{part}` is not a number in point `{s}`"))?;
        if !x.is_finite() {
            return Err(format!("point `{s}` has a non-finite coordinate"));
        }
        out.push(x);
    }
    Ok(Coords(out))
}

pub fn parse_point_list(s: &str) -> Result<Vec<Point>, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| parse_coords(p).map(Point::from))
        .collect()
}

pub fn parse_region(s: &str) -> Result<Region, String> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for axis in s.split(',') {
        let (l, h) = axis
            .split_once(':')
            .ok_or_else(|| format!("axis `{axis}` is not of the form lo:hi"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        lo.push(parse(l)?);
        hi.push(parse(h)?);
    }
    Region::new(lo, hi).map_err(|e| e.to_string())
}

/// What a command produced, before it is rendered in the requested format.
struct Report {
    summary: String,
    json: Value,
    csv: String,
    code: u8,
}

/// Rendered result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: msg.into(),
            code: EXIT_USAGE,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome::usage(text)
            } else {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: EXIT_OK,
                }
            };
        }
    };
    match cli.common.workers {
        Some(0) => Outcome::usage("error: --workers must be at least 1\n"),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => Outcome::usage(format!("error: cannot start {n} workers: {e}\n")),
        },
        None => execute(&cli),
    }
}

fn execute(cli: &Cli) -> Outcome {
    let report = match resolve_geometry(&cli.common).and_then(|g| dispatch(cli, &g)) {
        Ok(r) => r,
        Err(msg) => return Outcome::usage(format!("error: {msg}\n")),
    };
    let rendered = match cli.common.format {
        Format::Text => report.summary.clone(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("json value serializes");
            s.push('\n');
            s
        }
        Format::Csv => report.csv.clone(),
    };
    match &cli.common.out {
        None => Outcome {
            stdout: rendered,
            stderr: String::new(),
            code: report.code,
        },
        Some(path) => match std::fs::write(path, rendered) {
            Ok(()) => Outcome {
                stdout: report.summary,
                stderr: String::new(),
                code: report.code,
            },
            Err(e) => Outcome::usage(format!("error: cannot write {}: {e}\n", path.display())),
        },
    }
}

type CmdResult<T> = Result<T, String>;

fn err(e: worldfn::Error) -> String {
    e.to_string()
}

fn resolve_geometry(common: &Common) -> CmdResult<GeometrySpec> {
    let g = common.geom.trim();
    let spec = if let Some(rest) = g.strip_prefix("euclid") {
        let dim = if rest.is_empty() {
            common.dim.unwrap_or(3)
        } else {
            rest.parse::<usize>().map_err(|_| format!("unknown geometry `{g}`"))?
        };
        GeometrySpec::euclidean(dim)
    } else if g == "mink" {
        GeometrySpec::minkowski(common.dim.unwrap_or(4), common.c)
    } else if g == "dmink" {
        GeometrySpec::deformed_minkowski(common.dim.unwrap_or(4), common.c, common.d)
    } else if g.starts_with('{') {
        GeometrySpec::from_json(g)
    } else if Path::new(g).is_file() {
        let text = std::fs::read_to_string(g).map_err(|e| format!("cannot read {g}: {e}"))?;
        GeometrySpec::from_json(&text)
    } else {
        return Err(format!(
            "unknown geometry `{g}`: expected euclid<N>, mink, dmink, inline JSON or a JSON file"
        ));
    };
    spec.map_err(err)
}

fn dispatch(cli: &Cli, geom: &GeometrySpec) -> CmdResult<Report> {
    let common = &cli.common;
    if let Some(h) = common.resolution {
        if !(h.is_finite() && h > 0.0) {
            return Err(format!("--resolution must be positive, got {h}"));
        }
    }
    if let Some(t) = common.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(format!("--tol must be positive, got {t}"));
        }
    }
    if let Some(r) = &common.region {
        if r.dim() != geom.dim() {
            return Err(format!("region has {} axes but the geometry has {}", r.dim(), geom.dim()));
        }
    }
    let mut report = match &cli.command {
        Command::Sigma { p, q } => cmd_sigma(geom, p, q),
        Command::Audit { axioms, points, count } => cmd_audit(common, geom, *axioms, points.as_deref(), *count),
        Command::Sample { object, roles } => cmd_sample(common, geom, *object, roles),
        Command::Section { start, end, point } => cmd_section(common, geom, start, end, point),
        Command::Equiv { origin, end, at, swap } => cmd_equiv(common, geom, origin, end, at, *swap),
        Command::CylinderCompare { point, f1, f2, f3 } => cmd_cylinders(common, geom, point, f1, f2, f3),
        Command::Euclidean {
            candidates,
            count,
            tuple_samples,
            max_dim,
            pair_samples,
            continuity_samples,
        } => {
            let config = EuclideanConfig {
                seed: common.seed,
                tol: common.tol,
                tuple_samples: *tuple_samples,
                max_dim: *max_dim,
                pair_samples: *pair_samples,
                continuity_samples: *continuity_samples,
                region: common.region.clone(),
                resolution: common.resolution,
                node_budget: common.node_budget,
            };
            cmd_euclidean(common, geom, candidates.as_deref(), *count, &config)
        }
    }?;
    let geometry = serde_json::to_value(geom).expect("geometry serializes");
    let _ = writeln!(report.summary, "geometry={}", geom.to_json());
    if let Value::Object(map) = &mut report.json {
        map.insert("geometry".into(), geometry);
    }
    Ok(report)
}

/// `(x0, x1, ..)` with 9 significant digits, for text summaries.
fn show(p: &Point) -> String {
    let parts: Vec<String> = p.coords().iter().map(|x| sig9(*x)).collect();
    format!("({})", parts.join(", "))
}

fn point(geom: &GeometrySpec, c: &Coords) -> CmdResult<Point> {
    let p = Point::from(c.clone());
    geom.check_point(&p).map_err(err)?;
    Ok(p)
}

fn cmd_sigma(geom: &GeometrySpec, p: &Coords, q: &Coords) -> CmdResult<Report> {
    let (p, q) = (point(geom, p)?, point(geom, q)?);
    let sigma = geom.sigma(&p, &q).map_err(err)?;
    let class = geom.classify_interval(&p, &q).map_err(err)?;
    let label = geom.interval_label(&class);
    Ok(Report {
        summary: format!("sigma={} class={label} two_sigma={}\n", sig9(sigma), sig9(2.0 * sigma)),
        json: json!({ "p": p, "q": q, "sigma": sigma, "two_sigma": 2.0 * sigma, "class": label }),
        csv: format!("sigma,two_sigma,class\n{sigma},{},{label}\n", 2.0 * sigma),
        code: EXIT_OK,
    })
}

/// Uniform random points in `region`, or every table index for tabulated kernels.
fn random_points(geom: &GeometrySpec, region: &Region, count: usize, seed: u64) -> Vec<Point> {
    if let Some(n) = geom.table_len() {
        return (0..n.min(count.max(1))).map(Point::index).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Point::new(
                region
                    .lo
                    .iter()
                    .zip(&region.hi)
                    .map(|(l, h)| if l < h { rng.random_range(*l..*h) } else { *l })
                    .collect(),
            )
        })
        .collect()
}

fn unit_box(dim: usize) -> Region {
    Region::new(vec![-1.0; dim], vec![1.0; dim]).expect("unit box is valid")
}

fn axiom_name(report: &AxiomReport, i: usize) -> String {
    serde_json::to_value(report.checks[i].axiom)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn cmd_audit(
    common: &Common,
    geom: &GeometrySpec,
    axioms: AxiomSet,
    points: Option<&[Point]>,
    count: usize,
) -> CmdResult<Report> {
    let sample = match points {
        Some(p) => p.to_vec(),
        None => {
            let region = common.region.clone().unwrap_or_else(|| unit_box(geom.dim()));
            random_points(geom, &region, count, common.seed)
        }
    };
    let tol = common.tol.unwrap_or(1e-9);
    let report = match axioms {
        AxiomSet::Metric => audit_metric_axioms(geom, &sample, tol),
        AxiomSet::WorldFunction => audit_world_function_axioms(geom, &sample, tol),
    }
    .map_err(err)?;
    let mut summary = String::new();
    let mut csv = String::from("axiom,passed,checked,inapplicable,worst_residual\n");
    for (i, c) in report.checks.iter().enumerate() {
        let name = axiom_name(&report, i);
        let worst = c.witness.as_ref().map_or(0.0, |w| w.residual);
        let _ = write!(
            summary,
            "axiom={name} passed={} checked={} inapplicable={}",
            c.passed, c.checked, c.inapplicable
        );
        if let Some(w) = &c.witness {
            let pts: Vec<String> = w.points.iter().map(show).collect();
            let _ = write!(summary, " witness={} residual={}", pts.join(";"), sig9(w.residual));
        }
        summary.push('\n');
        let _ = writeln!(csv, "{name},{},{},{},{worst}", c.passed, c.checked, c.inapplicable);
    }
    let _ = writeln!(summary, "all_passed={} sample={}", report.all_passed(), sample.len());
    Ok(Report {
        summary,
        json: json!({ "sample": sample, "tol": tol, "report": report, "all_passed": report.all_passed() }),
        csv,
        code: if report.all_passed() { EXIT_OK } else { EXIT_FALSE },
    })
}

fn need(role: &Option<Coords>, name: &str, object: &str) -> CmdResult<Coords> {
    role.clone().ok_or_else(|| format!("{object} needs --{name}"))
}

/// Bounding box of the defining points, padded by half its widest side
/// (at least 1 on every axis).
fn default_region(points: &[&Point]) -> CmdResult<Region> {
    let dim = points[0].dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in points {
        for (a, x) in p.coords().iter().enumerate() {
            lo[a] = lo[a].min(*x);
            hi[a] = hi[a].max(*x);
        }
    }
    let widest = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max);
    let pad = (0.5 * widest).max(1.0);
    Region::new(lo.iter().map(|l| l - pad).collect(), hi.iter().map(|h| h + pad).collect()).map_err(err)
}

fn sampling(common: &Common, region: &Region) -> SamplingOptions {
    let widest = region.lo.iter().zip(&region.hi).map(|(l, h)| h - l).fold(0.0, f64::max);
    let h = common.resolution.unwrap_or(if widest > 0.0 { widest / 100.0 } else { 0.01 });
    SamplingOptions::new(h, common.tol.unwrap_or(1e-3)).with_budget(common.node_budget)
}

fn cloud_summary(cloud: &PointCloud) -> String {
    format!(
        "{} points residual_max={} nodes_scanned={} inapplicable={}",
        cloud.len(),
        sig9(cloud.max_abs_residual()),
        cloud.nodes_scanned,
        cloud.inapplicable
    )
}

/// Label diameter of the slab of points within one grid step of the
/// hyperplane through the segment midpoint, orthogonal in labels to it.
fn midpoint_slab_diameter(cloud: &PointCloud, start: &Point, end: &Point) -> f64 {
    let dir: Vec<f64> = end.coords().iter().zip(start.coords()).map(|(e, s)| e - s).collect();
    let len = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len == 0.0 {
        return 0.0;
    }
    let mid: Vec<f64> = end.coords().iter().zip(start.coords()).map(|(e, s)| 0.5 * (e + s)).collect();
    let slab: Vec<&Point> = cloud
        .points
        .iter()
        .filter(|p| {
            let along: f64 = p.coords().iter().zip(&mid).zip(&dir).map(|((x, m), d)| (x - m) * d).sum();
            (along / len).abs() <= cloud.resolution
        })
        .collect();
    let mut best: f64 = 0.0;
    for (i, p) in slab.iter().enumerate() {
        for q in &slab[i + 1..] {
            best = best.max(p.label_distance(q));
        }
    }
    best
}

fn cmd_sample(common: &Common, geom: &GeometrySpec, object: ObjectArg, roles: &Roles) -> CmdResult<Report> {
    let (shape, axis) = match object {
        ObjectArg::Segment => {
            let (s, e) = (need(&roles.start, "start", "segment")?, need(&roles.end, "end", "segment")?);
            (Shape::Segment { start: s.into(), end: e.into() }, true)
        }
        ObjectArg::Sphere => (
            Shape::Sphere {
                center: need(&roles.center, "center", "sphere")?.into(),
                surface: need(&roles.surface, "surface", "sphere")?.into(),
            },
            false,
        ),
        ObjectArg::Ellipsoid => (
            Shape::Ellipsoid {
                focus1: need(&roles.focus1, "focus1", "ellipsoid")?.into(),
                focus2: need(&roles.focus2, "focus2", "ellipsoid")?.into(),
                surface: need(&roles.surface, "surface", "ellipsoid")?.into(),
            },
            true,
        ),
        ObjectArg::Cylinder => (
            Shape::Cylinder {
                surface: need(&roles.surface, "surface", "cylinder")?.into(),
                axis1: need(&roles.axis1, "axis1", "cylinder")?.into(),
                axis2: need(&roles.axis2, "axis2", "cylinder")?.into(),
            },
            true,
        ),
        ObjectArg::Section => (
            Shape::Section {
                point: need(&roles.point, "point", "section")?.into(),
                start: need(&roles.start, "start", "section")?.into(),
                end: need(&roles.end, "end", "section")?.into(),
            },
            true,
        ),
    };
    let obj = ImplicitObject::new(geom, shape).map_err(err)?;
    let defining = obj.shape().defining_points();
    let region = match &common.region {
        Some(r) => r.clone(),
        None => default_region(&defining)?,
    };
    let opts = sampling(common, &region);
    let cloud = sample_object(&obj, &region, &opts).map_err(err)?;

    let mut summary = cloud_summary(&cloud);
    let mut json = json!({ "object": obj.shape(), "cloud": cloud });
    // The line of the object: segment endpoints, foci, axis, or the
    // segment a section belongs to.
    let line = match obj.shape() {
        Shape::Segment { start, end } | Shape::Section { start, end, .. } => Some((start, end)),
        Shape::Ellipsoid { focus1, focus2, .. } => Some((focus1, focus2)),
        Shape::Cylinder { axis1, axis2, .. } => Some((axis1, axis2)),
        Shape::Sphere { .. } => None,
    };
    if let (true, Some((a, b))) = (axis, line) {
        let extent = cloud.max_distance_from_line(a, b);
        let _ = write!(summary, " transverse_extent={}", sig9(extent));
        json["transverse_extent"] = json!(extent);
        if let Shape::Segment { start, end } = obj.shape() {
            let est = midpoint_slab_diameter(&cloud, start, end);
            let _ = write!(summary, " section_diameter_estimate={}", sig9(est));
            json["section_diameter_estimate"] = json!(est);
        }
    }
    summary.push('\n');
    Ok(Report {
        summary,
        csv: cloud.to_csv(),
        json,
        code: EXIT_OK,
    })
}

fn cmd_section(common: &Common, geom: &GeometrySpec, start: &Coords, end: &Coords, p: &Coords) -> CmdResult<Report> {
    let (start, end, p) = (point(geom, start)?, point(geom, end)?, point(geom, p)?);
    let region = match &common.region {
        Some(r) => r.clone(),
        None => default_region(&[&start, &end, &p])?,
    };
    let opts = sampling(common, &region);
    let m = section_of_segment(geom, &start, &end, &p, &region, &opts).map_err(err)?;
    let metric = serde_json::to_value(m.metric).expect("metric serializes");
    let summary = format!(
        "{} section_diameter={} metric={}\n",
        cloud_summary(&m.cloud),
        sig9(m.diameter),
        metric.as_str().unwrap_or_default()
    );
    Ok(Report {
        summary,
        csv: m.cloud.to_csv(),
        json: json!({ "start": start, "end": end, "point": p, "section": m }),
        code: EXIT_OK,
    })
}

fn cmd_equiv(
    common: &Common,
    geom: &GeometrySpec,
    origin: &Coords,
    end: &Coords,
    at: &Coords,
    swap: bool,
) -> CmdResult<Report> {
    let v = PointPairVector::new(point(geom, origin)?, point(geom, end)?);
    let q0 = point(geom, at)?;
    let region = match &common.region {
        Some(r) => r.clone(),
        None => default_search_region(geom, &v, &q0).map_err(err)?,
    };
    let mut opts = EquivalenceOptions::new(common.resolution.unwrap_or(0.05), common.tol.unwrap_or(1e-4));
    opts.node_budget = common.node_budget;
    opts.swap_order = swap;
    let set = solve_equivalence(geom, &v, &q0, &region, &opts).map_err(err)?;

    let mut summary = format!(
        "cardinality={} clusters={} solutions={}",
        set.cardinality_class.name(),
        set.cluster_count,
        set.solutions.len()
    );
    if let Some(k) = set.growth_exponent {
        let _ = write!(summary, " growth_exponent={}", sig9(k));
    }
    summary.push('\n');
    for c in &set.clusters {
        let _ = writeln!(summary, "cluster center={} size={} diameter={}", show(&c.center), c.size, sig9(c.diameter));
    }
    if let Some(d) = &set.diagnostic {
        let _ = writeln!(summary, "note: {d}");
    }
    Ok(Report {
        summary,
        csv: set.solutions.to_csv(),
        json: json!({ "region": region, "resolution": opts.resolution, "tol": opts.tol, "solution_set": set }),
        code: EXIT_OK,
    })
}

fn cmd_cylinders(
    common: &Common,
    geom: &GeometrySpec,
    p: &Coords,
    f1: &Coords,
    f2: &Coords,
    f3: &Coords,
) -> CmdResult<Report> {
    let (p, f1, f2, f3) = (point(geom, p)?, point(geom, f1)?, point(geom, f2)?, point(geom, f3)?);
    let a = ImplicitObject::cylinder(geom, p.clone(), f1.clone(), f2.clone()).map_err(err)?;
    let b = ImplicitObject::cylinder(geom, p.clone(), f1.clone(), f3.clone()).map_err(err)?;
    let region = match &common.region {
        Some(r) => r.clone(),
        None => default_region(&[&p, &f1, &f2, &f3])?,
    };
    let opts = sampling(common, &region);
    let ca = sample_object(&a, &region, &opts).map_err(err)?;
    let cb = sample_object(&b, &region, &opts).map_err(err)?;
    let hausdorff = if ca.is_empty() || cb.is_empty() {
        None
    } else {
        Some(hausdorff_distance(&ca, &cb).map_err(err)?)
    };
    let summary = format!(
        "hausdorff={} grid_steps={} points_a={} points_b={} inapplicable_a={} inapplicable_b={}\n",
        hausdorff.map_or("undefined".to_string(), sig9),
        hausdorff.map_or("undefined".to_string(), |d| sig9(d / opts.resolution)),
        ca.len(),
        cb.len(),
        ca.inapplicable,
        cb.inapplicable
    );
    let mut csv = String::from("cylinder,");
    let table = |tag: &str, cloud: &PointCloud, out: &mut String| {
        for line in cloud.to_csv().lines().skip(1) {
            let _ = writeln!(out, "{tag},{line}");
        }
    };
    csv.push_str(ca.to_csv().lines().next().unwrap_or("residual"));
    csv.push('\n');
    table("a", &ca, &mut csv);
    table("b", &cb, &mut csv);
    Ok(Report {
        summary,
        csv,
        json: json!({ "point": p, "f1": f1, "f2": f2, "f3": f3, "hausdorff": hausdorff, "a": ca, "b": cb }),
        code: EXIT_OK,
    })
}

fn cmd_euclidean(
    common: &Common,
    geom: &GeometrySpec,
    candidates: Option<&[Point]>,
    count: usize,
    config: &EuclideanConfig,
) -> CmdResult<Report> {
    let candidates = match candidates {
        Some(c) => c.to_vec(),
        None => random_points(geom, &unit_box(geom.dim()), count, common.seed),
    };
    if candidates.len() < 2 {
        return Err("need at least two candidate points".into());
    }
    let report = full_report(geom, &candidates, config).map_err(err)?;
    let failed = report.failed_conditions();
    let mut summary = report.summary();
    let _ = writeln!(
        summary,
        "failed={}",
        if failed.is_empty() { "none".to_string() } else { failed.join(",") }
    );
    let mut csv = String::from("condition,passed\n");
    for name in ["I", "II", "III", "IV"] {
        let _ = writeln!(csv, "{name},{}", !failed.contains(&name));
    }
    let mut json = serde_json::to_value(&report).expect("report serializes");
    json["candidates"] = json!(candidates);
    json["failed_conditions"] = json!(failed);
    Ok(Report {
        summary,
        csv,
        json,
        code: if report.verdict { EXIT_OK } else { EXIT_FALSE },
    })
}
