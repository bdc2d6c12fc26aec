//! `obl` — batch driver for outer (dual) billiard computations.
//!
//! Subcommands: `step` and `orbit` iterate the map pointwise, `scan4`
//! classifies the period-4 set of a rational polygon exactly, `measure`
//! estimates the periodic fraction by seeded sampling, `family-check`
//! evaluates the quadrilateral structure-equation residuals on a midpoint
//! family, `verify` runs the exact symbolic identity suite, and `render`
//! turns reports into SVG. Every run is deterministic for a fixed
//! configuration; `OBL_THREADS` caps the worker count without changing any
//! output byte.
//!
//! Exit codes: 0 success, 1 failed check or `--expect` mismatch, 2 input
//! error, 3 pointwise operation hit a singular configuration.

mod render;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use obl_core::dynamics::{orbit, orbit_csv, step, DynError, Termination};
use obl_core::eds::{ddelta_check, family_residual};
use obl_core::eds::{integral_element, midpoint_family, structure_residuals, theta56};
use obl_core::geometry::{BBox, Point, Polygon};
use obl_core::periodic::{measure_estimate, period4_scan, SampleArea, Verdict};
use obl_core::tableio::{load_table_path, LoadOptions, LoadedTable, ModeRequest};
use obl_core::verify;
use obl_core::{Rat, Scalar};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Full run configuration: one subcommand plus its flags.
#[derive(Debug, Parser)]
#[command(
    name = "obl",
    version,
    about = "Outer billiard dynamics: orbits, period-4 scans, structure checks"
)]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

/// Arithmetic mode requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Exact when the table coordinates allow it, float otherwise.
    Auto,
    /// Exact rational arithmetic; rejects tables with non-rational input.
    Exact,
    /// Double-precision arithmetic.
    Float,
}

impl From<ModeArg> for ModeRequest {
    fn from(m: ModeArg) -> ModeRequest {
        match m {
            ModeArg::Auto => ModeRequest::Auto,
            ModeArg::Exact => ModeRequest::Exact,
            ModeArg::Float => ModeRequest::Float,
        }
    }
}

/// Expected `scan4` verdict, for CI-style pass/fail runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExpectArg {
    /// Some zero-translation cell has nonempty interior.
    #[value(name = "open-period-4-set")]
    OpenPeriod4Set,
    /// Every cell translates.
    #[value(name = "empty-interior")]
    EmptyInterior,
}

impl ExpectArg {
    fn verdict(self) -> Verdict {
        match self {
            ExpectArg::OpenPeriod4Set => Verdict::OpenPeriod4Set,
            ExpectArg::EmptyInterior => Verdict::EmptyInterior,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply one step of the outer map to a point.
    Step {
        /// Table JSON file.
        #[arg(long)]
        table: PathBuf,
        /// Point as `x,y`; exact mode needs rational coordinates (`p/q`).
        #[arg(long)]
        point: String,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the outer map and emit an orbit CSV (`k,x,y,tx,ty`).
    Orbit {
        #[arg(long)]
        table: PathBuf,
        /// Start point as `x,y`.
        #[arg(long)]
        point: String,
        /// Number of steps to run.
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact period-4 scan of a rational polygon: enumerate itinerary
    /// cells over a region and report the verdict.
    Scan4 {
        #[arg(long)]
        table: PathBuf,
        /// Region = table bounding box inflated by this (rational) factor.
        #[arg(long, default_value = "3")]
        inflate: String,
        /// Fail (exit 1) unless the verdict matches.
        #[arg(long, value_enum)]
        expect: Option<ExpectArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate the measure fraction of `period`-periodic points by
    /// deterministic seeded sampling.
    Measure {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// Period to test each sampled point against.
        #[arg(long, default_value_t = 4)]
        period: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Return tolerance (float mode; exact mode compares exactly).
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Bounding-box inflation factor for the default sample region.
        #[arg(long, default_value = "3")]
        inflate: String,
        /// Sample a disk `cx,cy,r` instead of the inflated bounding box.
        #[arg(long)]
        disk: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Residuals of the quadrilateral structure identities on the midpoint
    /// family of the 4-step orbit quadrilateral at a base point.
    FamilyCheck {
        #[arg(long)]
        table: PathBuf,
        /// Base point as `x,y` (float).
        #[arg(long)]
        point: String,
        /// Half-width of the parameter patch.
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        /// Grid resolution per axis.
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the exact symbolic identity suite.
    Verify {
        /// `all` or a comma-separated subset of check names.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a scan report (JSON) or an orbit CSV as SVG.
    Render {
        /// Input file: `scan4` JSON output or `orbit` CSV output.
        #[arg(long)]
        input: PathBuf,
        /// Table to draw under an orbit (scan reports embed theirs).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Output width in pixels.
        #[arg(long, default_value_t = 720)]
        width: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A run abort, carrying the process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn check(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn singular(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

fn dyn_failure(e: DynError) -> Failure {
    match e {
        DynError::SingularTangency => Failure::singular(e.to_string()),
        _ => Failure::input(e.to_string()),
    }
}

fn load(path: &Path, mode: ModeArg) -> Result<LoadedTable, Failure> {
    let opts = LoadOptions {
        mode: mode.into(),
        ..LoadOptions::default()
    };
    load_table_path(path, &opts).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Parses `x,y` with exact rational coordinates.
fn parse_point_rat(s: &str) -> Result<Point<Rat>, Failure> {
    let err = || {
        Failure::input(format!(
            "point {s:?} is not exact: expected `x,y` with integer or `p/q` coordinates"
        ))
    };
    let (x, y) = s.split_once(',').ok_or_else(err)?;
    Ok(Point::new(
        obl_cas::parse_rational(x).ok_or_else(err)?,
        obl_cas::parse_rational(y).ok_or_else(err)?,
    ))
}

/// Parses one float coordinate, accepting `p/q` strings too.
fn parse_coord_f64(s: &str) -> Option<f64> {
    if let Some(r) = obl_cas::parse_rational(s) {
        return Some(Scalar::to_f64(&r));
    }
    let v: f64 = s.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses `x,y` with float coordinates.
fn parse_point_f64(s: &str) -> Result<Point<f64>, Failure> {
    let err = || Failure::input(format!("point {s:?} is not a valid `x,y` pair"));
    let (x, y) = s.split_once(',').ok_or_else(err)?;
    Ok(Point::new(
        parse_coord_f64(x).ok_or_else(err)?,
        parse_coord_f64(y).ok_or_else(err)?,
    ))
}

/// Parses the `--inflate` factor as an exact positive rational.
fn parse_inflate(s: &str) -> Result<Rat, Failure> {
    let f = obl_cas::parse_rational(s)
        .ok_or_else(|| Failure::input(format!("--inflate {s:?} is not a rational number")))?;
    if f <= obl_cas::rational(0, 1) {
        return Err(Failure::input("--inflate must be positive"));
    }
    Ok(f)
}

fn bbox_to_f64(b: &BBox<Rat>) -> BBox<f64> {
    BBox {
        min: Point::new(Scalar::to_f64(&b.min.x), Scalar::to_f64(&b.min.y)),
        max: Point::new(Scalar::to_f64(&b.max.x), Scalar::to_f64(&b.max.y)),
    }
}

/// Writes to the output path, or stdout when none is given.
fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_step(table: &Path, point: &str, mode: ModeArg, out: Option<&Path>) -> Result<(), Failure> {
    fn run<S: Scalar, T: obl_core::dynamics::Table<S>>(
        t: &T,
        z: &Point<S>,
        out: Option<&Path>,
    ) -> Result<(), Failure> {
        let next = step(t, z).map_err(dyn_failure)?;
        emit(
            out,
            &format!("{},{}\n", next.x.format_plain(), next.y.format_plain()),
        )
    }
    match load(table, mode)? {
        LoadedTable::ExactPolygon(p) => run(&p, &parse_point_rat(point)?, out),
        LoadedTable::FloatPolygon(p) => run(&p, &parse_point_f64(point)?, out),
        LoadedTable::Ellipse(e) => run(&e, &parse_point_f64(point)?, out),
    }
}

fn cmd_orbit(
    table: &Path,
    point: &str,
    steps: usize,
    mode: ModeArg,
    out: Option<&Path>,
) -> Result<(), Failure> {
    fn run<S: Scalar, T: obl_core::dynamics::Table<S>>(
        t: &T,
        z: &Point<S>,
        steps: usize,
        out: Option<&Path>,
    ) -> Result<(), Failure> {
        let sample = orbit(t, z, steps);
        // The CSV of completed steps is written even when the orbit stops
        // early; the stop reason then decides the exit code.
        emit(out, &orbit_csv(t, &sample))?;
        match sample.termination {
            Termination::Completed => Ok(()),
            Termination::Singular { step } => Err(Failure::singular(format!(
                "orbit hit a singular configuration at step {step}"
            ))),
            Termination::Interior { step } => Err(Failure::input(format!(
                "orbit entered the table at step {step}"
            ))),
        }
    }
    match load(table, mode)? {
        LoadedTable::ExactPolygon(p) => run(&p, &parse_point_rat(point)?, steps, out),
        LoadedTable::FloatPolygon(p) => run(&p, &parse_point_f64(point)?, steps, out),
        LoadedTable::Ellipse(e) => run(&e, &parse_point_f64(point)?, steps, out),
    }
}

fn cmd_scan4(
    table: &Path,
    inflate: &str,
    expect: Option<ExpectArg>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let factor = parse_inflate(inflate)?;
    let polygon = match load(table, ModeArg::Exact)? {
        LoadedTable::ExactPolygon(p) => p,
        _ => {
            return Err(Failure::input(
                "scan4 runs exactly: the table needs rational (or integer) coordinates",
            ))
        }
    };
    let region = polygon.bbox().inflate(&factor);
    let outcome = period4_scan(&polygon, &region);
    let rep = report::scan_report(&polygon, &region, &outcome);
    emit(out, &report::to_json_string(&rep))?;
    if let Some(e) = expect {
        if e.verdict() != outcome.verdict {
            return Err(Failure::check(format!(
                "verdict {} does not match --expect {}",
                outcome.verdict,
                e.verdict()
            )));
        }
    }
    Ok(())
}

/// Parses `cx,cy,r` into a sampling disk.
fn parse_disk(s: &str) -> Result<SampleArea, Failure> {
    let err = || Failure::input(format!("--disk {s:?} is not a valid `cx,cy,r` triple"));
    let parts: Vec<&str> = s.split(',').collect();
    let [cx, cy, r] = parts.as_slice() else {
        return Err(err());
    };
    let center = Point::new(
        parse_coord_f64(cx).ok_or_else(err)?,
        parse_coord_f64(cy).ok_or_else(err)?,
    );
    let radius = parse_coord_f64(r).ok_or_else(err)?;
    if radius <= 0.0 {
        return Err(Failure::input("--disk radius must be positive"));
    }
    Ok(SampleArea::Disk { center, radius })
}

#[allow(clippy::too_many_arguments)]
fn cmd_measure(
    table: &Path,
    mode: ModeArg,
    period: usize,
    samples: u64,
    seed: u64,
    tol: f64,
    inflate: &str,
    disk: Option<&str>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Failure::input("--tol must be positive"));
    }
    if period == 0 {
        return Err(Failure::input("--period must be at least 1"));
    }
    let loaded = load(table, mode)?;
    let area = match disk {
        Some(d) => parse_disk(d)?,
        None => {
            let factor = parse_inflate(inflate)?;
            let b = match &loaded {
                LoadedTable::ExactPolygon(p) => bbox_to_f64(&p.bbox().inflate(&factor)),
                LoadedTable::FloatPolygon(p) => bbox_to_f64(&to_rat_box(p.bbox()).inflate(&factor)),
                LoadedTable::Ellipse(e) => bbox_to_f64(&to_rat_box(&e.bbox()).inflate(&factor)),
            };
            SampleArea::Box(b)
        }
    };
    let exact = matches!(loaded, LoadedTable::ExactPolygon(_));
    let outcome = match &loaded {
        LoadedTable::ExactPolygon(p) => measure_estimate(p, &area, period, tol, samples, seed),
        LoadedTable::FloatPolygon(p) => measure_estimate(p, &area, period, tol, samples, seed),
        LoadedTable::Ellipse(e) => measure_estimate(e, &area, period, tol, samples, seed),
    }
    .map_err(|e| Failure::input(e.to_string()))?;
    let rep = report::measure_report(exact, period, seed, tol, &area, &outcome);
    emit(out, &report::to_json_string(&rep))
}

/// Lossless float-to-rational box promotion for exact inflation.
fn to_rat_box(b: &BBox<f64>) -> BBox<Rat> {
    let r = |v: f64| Rat::from_f64_exact(v);
    BBox {
        min: Point::new(r(b.min.x), r(b.min.y)),
        max: Point::new(r(b.max.x), r(b.max.y)),
    }
}

fn cmd_family_check(
    table: &Path,
    point: &str,
    radius: f64,
    grid: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let z0 = parse_point_f64(point)?;
    let polygon: Polygon<f64> = match load(table, ModeArg::Auto)? {
        LoadedTable::ExactPolygon(p) => {
            obl_core::tableio::polygon_to_float(&p).map_err(|e| Failure::input(e.to_string()))?
        }
        LoadedTable::FloatPolygon(p) => p,
        LoadedTable::Ellipse(_) => {
            return Err(Failure::input(
                "family-check needs a polygon table (the orbit quadrilateral of a vertex map)",
            ))
        }
    };
    let sample = orbit(&polygon, &z0, 3);
    if sample.termination != Termination::Completed {
        return Err(Failure::singular(
            "the 4-step orbit of the base point is undefined (singular or interior)",
        ));
    }
    let quad: [Point<f64>; 4] = std::array::from_fn(|k| sample.points[k].clone());
    let q0 = obl_core::eds::QuadConfig::new(quad.clone())
        .map_err(|e| Failure::input(format!("orbit quadrilateral is degenerate: {e}")))?;
    let fp = midpoint_family(&q0, radius, grid).map_err(|e| Failure::input(e.to_string()))?;

    let theta_max = family_residual(&fp);
    let sr = structure_residuals(&fp);
    let ddelta_max = ddelta_check(&fp);

    let mut u = Vec::new();
    let mut v = Vec::new();
    let mut cases: BTreeMap<String, usize> = BTreeMap::new();
    let mut theta56_max = 0.0f64;
    for (s, t) in fp.params() {
        let q = obl_core::eds::QuadConfig::new(fp.points_at(s, t))
            .map_err(|e| Failure::input(format!("family left the nondegenerate regime: {e}")))?;
        let (ds, dt) = fp.dirs_at(s, t);
        let el = integral_element(&q, &ds, &dt)
            .map_err(|e| Failure::input(format!("family directions fail the theta check: {e}")))?;
        u.push(el.u);
        v.push(el.v);
        *cases
            .entry(report::case_name(el.case).to_string())
            .or_insert(0) += 1;
        for dq in [&ds, &dt] {
            let (t5, t6) = theta56(&q, dq);
            theta56_max = theta56_max.max(t5.abs()).max(t6.abs());
        }
    }
    let finite = |vals: &[Option<f64>], pick: fn(f64, f64) -> f64, empty: f64| {
        vals.iter().flatten().copied().fold(empty, pick)
    };
    let rep = report::FamilyCheckReport {
        base: [z0.x, z0.y],
        quad: quad.iter().map(|p| [p.x, p.y]).collect(),
        radius,
        grid_n: grid,
        fd_step: fp.fd_step(),
        theta_max,
        dtheta_max: sr.dtheta,
        wedge_ratio_max: sr.wedge_ratio,
        dom_max: sr.dom,
        area_form_max: sr.area_form,
        area_integral_max: sr.area_integral,
        ddelta_max,
        theta56_max,
        u_min: finite(&u, f64::min, f64::INFINITY),
        u_max: finite(&u, f64::max, f64::NEG_INFINITY),
        v_min: finite(&v, f64::min, f64::INFINITY),
        v_max: finite(&v, f64::max, f64::NEG_INFINITY),
        u,
        v,
        cases,
    };
    emit(out, &report::to_json_string(&rep))
}

fn cmd_verify(suite: &str, out: Option<&Path>) -> Result<(), Failure> {
    let mut rep = verify::run_all();
    if suite.trim() != "all" {
        let wanted: Vec<&str> = suite.split(',').map(str::trim).collect();
        let known: Vec<&str> = rep.checks.iter().map(|c| c.name).collect();
        if let Some(w) = wanted.iter().find(|w| !known.contains(w)) {
            return Err(Failure::input(format!(
                "unknown check {w:?}; available: {}",
                known.join(", ")
            )));
        }
        rep.checks.retain(|c| wanted.contains(&c.name));
        rep.all_pass = rep
            .checks
            .iter()
            .all(|c| c.status == verify::CheckStatus::Pass);
    }
    let pass = rep.all_pass;
    emit(out, &report::to_json_string(&rep))?;
    if !pass {
        return Err(Failure::check("one or more verification checks failed"));
    }
    Ok(())
}

fn cmd_render(
    input: &Path,
    table: Option<&Path>,
    width: u32,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if width < 64 {
        return Err(Failure::input("--width must be at least 64"));
    }
    let content = std::fs::read_to_string(input)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", input.display())))?;
    let svg = if content.trim_start().starts_with('{') {
        let rep: report::ScanReport = serde_json::from_str(&content).map_err(|e| {
            Failure::input(format!("{} is not a scan4 report: {e}", input.display()))
        })?;
        render::render_scan(&rep, width).map_err(|e| Failure::input(e.to_string()))?
    } else {
        let loaded = match table {
            Some(path) => Some(load(path, ModeArg::Auto)?),
            None => None,
        };
        render::render_orbit(&content, loaded.as_ref(), width)
            .map_err(|e| Failure::input(e.to_string()))?
    };
    emit(out, &svg)
}

fn setup_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("OBL_THREADS") else {
        return Ok(());
    };
    let n: usize =
        raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            Failure::input(format!("OBL_THREADS={raw:?} is not a positive integer"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("cannot configure {n} worker threads: {e}")))
}

fn run(config: RunConfig) -> Result<(), Failure> {
    match &config.command {
        Command::Step {
            table,
            point,
            mode,
            out,
        } => cmd_step(table, point, *mode, out.as_deref()),
        Command::Orbit {
            table,
            point,
            steps,
            mode,
            out,
        } => cmd_orbit(table, point, *steps, *mode, out.as_deref()),
        Command::Scan4 {
            table,
            inflate,
            expect,
            out,
        } => cmd_scan4(table, inflate, *expect, out.as_deref()),
        Command::Measure {
            table,
            mode,
            period,
            samples,
            seed,
            tol,
            inflate,
            disk,
            out,
        } => cmd_measure(
            table,
            *mode,
            *period,
            *samples,
            *seed,
            *tol,
            inflate,
            disk.as_deref(),
            out.as_deref(),
        ),
        Command::FamilyCheck {
            table,
            point,
            radius,
            grid,
            out,
        } => cmd_family_check(table, point, *radius, *grid, out.as_deref()),
        Command::Verify { suite, out } => cmd_verify(suite, out.as_deref()),
        Command::Render {
            input,
            table,
            width,
            out,
        } => cmd_render(input, table.as_deref(), *width, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Err(f) = setup_threads().and_then(|()| run(config)) {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    ExitCode::SUCCESS
}
