//! `raylab`: geometric phases, Bargmann invariants, null-phase tests, chart
//! geodesics and Darboux coordinates from the command line.

mod cases;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use raylab_core::acceptance::{self, Context, Mutation};
use raylab_core::bargmann::{
    bargmann_invariant, bargmann_trace_form, decompose_into_triangles, polygon_phase_check,
    polygon_phase_check_refined, ChartNullPhaseConnector, Connector, FreeGeodesicConnector, PolygonCheck,
};
use raylab_core::nullphase::{null_phase_check, TripleSampling, DEFAULT_TOL_IM};
use raylab_core::riemann::{fit_type_i, fit_type_ii, geodesic_connect, geodesic_shoot, GeodesicSolution};
use raylab_core::sampling::rng;
use raylab_core::symplectic::{isotropy_report, symplectic_area, DarbouxChart};
use raylab_core::{AnyChart, Chart, ChartId, PureState, SampledCurve, VertexList};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cases::Case;
use crate::input::{build_chart, read_json, Coords, CurveInput, VertexInput};

const CURVE_HELP: &str = "CURVE is inline JSON, a file path or `-` for stdin, in one of two forms:\n  \
    {\"params\": [...], \"states\": [{\"dim\": n, \"re\": [...], \"im\": [...]}, ...]}\n  \
    {\"chart\": \"coherent|gaussian|sphere2mode|realsphere\", \"path\": {\"kind\": ..., \"params\": {...}}, \"nodes\": 1001}\n\
    A chart curve may give \"from\"/\"to\" instead of \"path\" to use the chart's null-phase family.";

const VERTEX_HELP: &str = "VERTICES is inline JSON, a file path or `-`: a list of state objects, \
    {\"vertices\": [...]}, or {\"chart\": id, \"points\": [[ξ...], ...]}.";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] raylab_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// The command ran but reported a failed check.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "raylab", version, about = "Numerical geometry of quantum ray space")]
#[command(after_help = "Exit codes: 0 success, 1 computational failure, 2 usage error. \
    JSON output carries a versioned `schema` field; angles are in radians.")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = raylab_core::sampling::DEFAULT_SEED)]
    seed: u64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; each command documents the formats it accepts.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Total, dynamical and geometric phase and Fubini–Study length of a curve.
    #[command(after_help = format!("{CURVE_HELP}\n\nFormats: json (default); csv with columns \
        s,phi_tot,phi_dyn,phi_g, the phases accumulated from the first node."))]
    Phase {
        curve: String,
        /// Nodes for chart curves.
        #[arg(long, default_value_t = 1001)]
        nodes: usize,
    },
    /// Bargmann invariant Δₙ of a vertex list, with its phase and modulus.
    #[command(after_help = format!("{VERTEX_HELP}\n\nFormats: json."))]
    Bargmann {
        vertices: String,
        /// Also decompose Δₙ into triangles fanning out from this vertex.
        #[arg(long)]
        anchor: Option<usize>,
    },
    /// Geometric phase of the polygon closed by null-phase sides against −arg Δₙ.
    #[command(after_help = format!("{VERTEX_HELP}\n\nExplicit vertices use free geodesics, chart vertices the \
        chart's null-phase family. Formats: json."))]
    Polygon {
        vertices: String,
        /// Nodes per side; omit to refine until the defect stabilizes.
        #[arg(long)]
        nodes_per_side: Option<usize>,
    },
    /// Geodesics of a chart's induced metric.
    #[command(subcommand)]
    Geodesic(GeodesicCommand),
    /// Null-phase certificates.
    #[command(subcommand)]
    Nullphase(NullphaseCommand),
    /// Darboux coordinates, symplectic area and isotropy.
    #[command(subcommand)]
    Symplectic(SymplecticCommand),
    /// Runs a named scenario and reports computed against expected values.
    #[command(after_help = "Formats: json. Exit code 1 if any check fails.")]
    Reproduce {
        #[arg(value_enum)]
        case: Case,
        /// Print what the case reproduces instead of running it.
        #[arg(long)]
        describe: bool,
    },
    /// Runs the acceptance catalogue.
    #[command(after_help = "Formats: table (default; columns id, criterion, check, expected, computed, tol, status) \
        or json. Exit code 1 if any criterion fails.")]
    Acceptance {
        /// Run only criteria whose slug contains, tag equals or id equals this value.
        #[arg(long)]
        filter: Option<String>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Negate the dynamical phase everywhere, to check the catalogue catches it.
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
}

#[derive(Args)]
struct ChartArgs {
    #[arg(long)]
    chart: ChartId,
    /// Ambient dimension of the real-sphere chart.
    #[arg(long)]
    dim: Option<usize>,
}

const GEODESIC_HELP: &str = "Coordinates are comma-separated, e.g. --from 0.5,1. \
    Formats: json summary (default; length, speed drift, fit parameters on the Gaussian chart) or csv with \
    columns s,xi_1..,xi_dot_1..,conserved_speed.";

#[derive(Subcommand)]
enum GeodesicCommand {
    /// Integrates the geodesic equation from a point and velocity.
    #[command(after_help = GEODESIC_HELP)]
    Shoot {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, allow_hyphen_values = true)]
        xi: Coords,
        #[arg(long, allow_hyphen_values = true)]
        velocity: Coords,
        #[arg(long, default_value_t = 1.0)]
        s_max: f64,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Finds the geodesic between two points by shooting, on s ∈ [0, 1].
    #[command(after_help = GEODESIC_HELP)]
    Connect {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: Coords,
        #[arg(long, allow_hyphen_values = true)]
        to: Coords,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
}

#[derive(Subcommand)]
enum NullphaseCommand {
    /// Separability and three-point reality tests, with witnesses.
    #[command(after_help = format!("{CURVE_HELP}\n\nFormats: json."))]
    Check {
        curve: String,
        /// Separability tolerance; default scales with the grid.
        #[arg(long)]
        tol_sep: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL_IM)]
        tol_im: f64,
        #[arg(long, default_value_t = 1001)]
        nodes: usize,
    },
}

const FRAME_HELP: &str = "FRAME is {\"base\": [[re, im], ...], \"basis\": [[[re, im], ...], ...]}; \
    the basis is optional and completed by Gram–Schmidt.";

#[derive(Subcommand)]
enum SymplecticCommand {
    /// Darboux coordinates (α, β, γ) of one or more states.
    #[command(after_help = format!("{FRAME_HELP}\nSTATES is a state, a list of states or a curve.\n\n\
        Formats: json, or csv with columns alpha,beta_1..,gamma_1.."))]
    Coords {
        #[arg(long)]
        frame: String,
        states: String,
    },
    /// Symplectic area of a closed curve with its phases and lengths.
    #[command(after_help = format!("{FRAME_HELP}\nWithout --frame the chart is centered on the first node.\n\
        {CURVE_HELP}\n\nFormats: json."))]
    Area {
        #[arg(long)]
        frame: Option<String>,
        curve: String,
        #[arg(long, default_value_t = 1001)]
        nodes: usize,
    },
    /// Largest pulled-back two-form entry over random chart points.
    #[command(after_help = "Formats: json.")]
    Isotropy {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("raylab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Phase { curve, nodes } => phase(cli, curve, *nodes),
        Command::Bargmann { vertices, anchor } => bargmann(cli, vertices, *anchor),
        Command::Polygon { vertices, nodes_per_side } => polygon(cli, vertices, *nodes_per_side),
        Command::Geodesic(g) => geodesic(cli, g),
        Command::Nullphase(NullphaseCommand::Check { curve, tol_sep, tol_im, nodes }) => {
            nullphase(cli, curve, *tol_sep, *tol_im, *nodes)
        }
        Command::Symplectic(s) => symplectic(cli, s),
        Command::Reproduce { case, describe } => reproduce(cli, *case, *describe),
        Command::Acceptance { filter, jobs, inject_sign_error } => {
            acceptance_cmd(cli, filter.as_deref(), *jobs, *inject_sign_error)
        }
    }
}

fn format_of(cli: &Cli, allowed: &[Format]) -> CliResult<Format> {
    let f = cli.format.unwrap_or(allowed[0]);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("format {f:?} is not available for this command").to_lowercase()))
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(cli: &Cli, schema: &str, body: Value) -> CliResult<()> {
    let mut doc = json!({ "schema": schema });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    emit(cli, &(serde_json::to_string_pretty(&doc).expect("JSON serializes") + "\n"))
}

fn phase_summary<P: PureState>(c: &SampledCurve<P>) -> CliResult<Value> {
    Ok(json!({
        "nodes": c.len(),
        "closed": c.is_closed()?,
        "total_phase": c.total_phase()?,
        "dynamical_phase": c.dynamical_phase()?,
        "geometric_phase": c.geometric_phase()?,
        "length": c.curve_length()?,
    }))
}

fn phase(cli: &Cli, curve: &str, nodes: usize) -> CliResult<()> {
    let format = format_of(cli, &[Format::Json, Format::Csv])?;
    let curve = CurveInput::parse(&read_json(curve)?, nodes)?;
    match (format, &curve) {
        (Format::Csv, CurveInput::Explicit(c)) => emit(cli, &c.phase_table_csv()?),
        (Format::Csv, CurveInput::Chart(c)) => emit(cli, &c.phase_table_csv()?),
        (_, CurveInput::Explicit(c)) => emit_json(cli, "raylab.phase/1", phase_summary(c)?),
        (_, CurveInput::Chart(c)) => emit_json(cli, "raylab.phase/1", phase_summary(c)?),
    }
}

fn invariant_summary<P: PureState>(v: &VertexList<P>, anchor: Option<usize>) -> CliResult<Value> {
    let d = bargmann_invariant(v)?;
    let mut out = json!({
        "n": v.len(),
        "delta_re": d.re,
        "delta_im": d.im,
        "phase": d.arg(),
        "modulus": d.norm(),
    });
    if let Some(a) = anchor {
        out["decomposition"] = serde_json::to_value(decompose_into_triangles(v, a)?).expect("JSON serializes");
    }
    Ok(out)
}

fn bargmann(cli: &Cli, vertices: &str, anchor: Option<usize>) -> CliResult<()> {
    format_of(cli, &[Format::Json])?;
    let body = match VertexInput::parse(&read_json(vertices)?)? {
        VertexInput::Explicit(v) => {
            let mut out = invariant_summary(&v, anchor)?;
            let t = bargmann_trace_form(&v)?;
            out["trace_form"] = json!({ "re": t.re, "im": t.im });
            out
        }
        VertexInput::Chart(v) => invariant_summary(&v, anchor)?,
    };
    emit_json(cli, "raylab.bargmann/1", body)
}

fn polygon_with<P: PureState, C: Connector<P>>(v: &VertexList<P>, conn: &C, nodes: Option<usize>) -> CliResult<Value> {
    let check: PolygonCheck = match nodes {
        Some(n) => polygon_phase_check(v, conn, n)?,
        None => polygon_phase_check_refined(v, conn)?,
    };
    let mut out = serde_json::to_value(check).expect("JSON serializes");
    out["connector"] = json!(conn.name());
    Ok(out)
}

fn polygon(cli: &Cli, vertices: &str, nodes: Option<usize>) -> CliResult<()> {
    format_of(cli, &[Format::Json])?;
    let body = match VertexInput::parse(&read_json(vertices)?)? {
        VertexInput::Explicit(v) => polygon_with(&v, &FreeGeodesicConnector, nodes)?,
        VertexInput::Chart(v) => polygon_with(&v, &ChartNullPhaseConnector, nodes)?,
    };
    emit_json(cli, "raylab.polygon/1", body)
}

fn geodesic_summary(chart: &AnyChart, sol: &GeodesicSolution) -> Value {
    let mut out = json!({
        "chart": chart.id(),
        "nodes": sol.len(),
        "length": sol.length(),
        "speed_drift": sol.speed_drift(),
        "exited": sol.exited,
        "start": sol.xi.first(),
        "end": sol.end(),
    });
    if chart.id() == ChartId::Gaussian && sol.len() >= 3 {
        out["fit"] = json!({
            "type_i": fit_type_i(&sol.s, &sol.xi),
            "type_ii": fit_type_ii(&sol.xi),
        });
    }
    out
}

fn geodesic(cli: &Cli, cmd: &GeodesicCommand) -> CliResult<()> {
    let format = format_of(cli, &[Format::Json, Format::Csv])?;
    let (args, result) = match cmd {
        GeodesicCommand::Shoot { chart, xi, velocity, s_max, steps } => {
            let c = build_chart(chart.chart, chart.dim)?;
            let sol = geodesic_shoot(c.as_ref(), &xi.0, &velocity.0, *s_max, *steps)?;
            let summary = geodesic_summary(&c, &sol);
            (sol, summary)
        }
        GeodesicCommand::Connect { chart, from, to, steps } => {
            let c = build_chart(chart.chart, chart.dim)?;
            let conn = geodesic_connect(c.as_ref(), &from.0, &to.0, *steps)?;
            let mut summary = geodesic_summary(&c, &conn.solution);
            summary["initial_velocity"] = json!(conn.initial_velocity);
            summary["miss"] = json!(conn.miss);
            summary["iterations"] = json!(conn.iterations);
            (conn.solution, summary)
        }
    };
    match format {
        Format::Csv => emit(cli, &args.to_csv()),
        _ => emit_json(cli, "raylab.geodesic/1", result),
    }
}

fn nullphase(cli: &Cli, curve: &str, tol_sep: Option<f64>, tol_im: f64, nodes: usize) -> CliResult<()> {
    format_of(cli, &[Format::Json])?;
    let spec = TripleSampling { seed: cli.seed, tol_im, ..TripleSampling::default() };
    let report = match CurveInput::parse(&read_json(curve)?, nodes)? {
        CurveInput::Explicit(c) => null_phase_check(&c, tol_sep, &spec)?,
        CurveInput::Chart(c) => null_phase_check(&c, tol_sep, &spec)?,
    };
    emit_json(cli, "raylab.nullphase/1", serde_json::to_value(report).expect("JSON serializes"))
}

fn symplectic(cli: &Cli, cmd: &SymplecticCommand) -> CliResult<()> {
    match cmd {
        SymplecticCommand::Coords { frame, states } => {
            let format = format_of(cli, &[Format::Json, Format::Csv])?;
            let chart = input::darboux_chart(&read_json(frame)?)?;
            let coords = input::states_of(&read_json(states)?)?
                .iter()
                .map(|s| chart.to_coords(s))
                .collect::<Result<Vec<_>, _>>()?;
            if format == Format::Csv {
                let n = chart.n_pairs();
                let mut header = vec!["alpha".to_string()];
                header.extend((1..=n).map(|r| format!("beta_{r}")));
                header.extend((1..=n).map(|r| format!("gamma_{r}")));
                let mut out = header.join(",") + "\n";
                for x in &coords {
                    let row: Vec<String> =
                        std::iter::once(x.alpha).chain(x.eta()).map(|v| format!("{v:.17e}")).collect();
                    out += &(row.join(",") + "\n");
                }
                return emit(cli, &out);
            }
            let body = json!({
                "n_pairs": chart.n_pairs(),
                "coords": coords,
                "chi_norm_sq": coords.iter().map(|x| x.chi_norm_sq()).collect::<Vec<_>>(),
            });
            emit_json(cli, "raylab.symplectic.coords/1", body)
        }
        SymplecticCommand::Area { frame, curve, nodes } => {
            format_of(cli, &[Format::Json])?;
            let curve = CurveInput::parse(&read_json(curve)?, *nodes)?.to_explicit()?;
            let chart = match frame {
                Some(f) => input::darboux_chart(&read_json(f)?)?,
                None => DarbouxChart::new(curve.start().clone())?,
            };
            let coords = chart.coords_curve(&curve)?;
            let body = json!({
                "area": symplectic_area(&coords)?,
                "integral_a": coords.integrate_a(),
                "dynamical_phase": curve.dynamical_phase()?,
                "geometric_phase": curve.geometric_phase()?,
                "fs_length": coords.fs_length()?,
                "curve_length": curve.curve_length()?,
            });
            emit_json(cli, "raylab.symplectic.area/1", body)
        }
        SymplecticCommand::Isotropy { chart, samples } => {
            format_of(cli, &[Format::Json])?;
            let c = build_chart(chart.chart, chart.dim)?;
            let bounds = input::sample_box(&c);
            let mut g = rng(cli.seed);
            let mut points = Vec::with_capacity(*samples);
            while points.len() < *samples {
                let xi: Vec<f64> = bounds.iter().map(|&(lo, hi)| g.random_range(lo..hi)).collect();
                if c.in_domain(&xi) {
                    points.push(xi);
                }
            }
            let report = isotropy_report(c.as_ref(), &points)?;
            let body = json!({
                "chart": c.id(),
                "samples": points.len(),
                "isotropic": report.isotropic,
                "max_entry": report.max_entry,
            });
            emit_json(cli, "raylab.symplectic.isotropy/1", body)
        }
    }
}

fn reproduce(cli: &Cli, case: Case, describe: bool) -> CliResult<()> {
    format_of(cli, &[Format::Json])?;
    let d = case.describe();
    if describe {
        return emit_json(cli, "raylab.reproduce/1", serde_json::to_value(d).expect("JSON serializes"));
    }
    let checks = case.run()?;
    let passed = checks.iter().all(|c| c.passed);
    let mut body = serde_json::to_value(&d).expect("JSON serializes");
    body["checks"] = serde_json::to_value(&checks).expect("JSON serializes");
    body["passed"] = json!(passed);
    emit_json(cli, "raylab.reproduce/1", body)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{} checks failed", checks.iter().filter(|c| !c.passed).count())))
    }
}

fn acceptance_cmd(cli: &Cli, filter: Option<&str>, jobs: usize, inject: bool) -> CliResult<()> {
    let format = format_of(cli, &[Format::Table, Format::Json])?;
    let ctx = Context { seed: cli.seed, mutation: inject.then_some(Mutation::FlipDynamicalSign) };
    let report = acceptance::run(&ctx, filter, jobs);
    if report.criteria.is_empty() {
        return Err(CliError::Usage(format!("no criterion matches `{}`", filter.unwrap_or(""))));
    }
    match format {
        Format::Json => emit(cli, &(serde_json::to_string_pretty(&report).expect("JSON serializes") + "\n"))?,
        _ => {
            let passed = report.criteria.iter().filter(|c| c.passed).count();
            emit(cli, &format!("{}{passed}/{} criteria passed\n", report.table(), report.criteria.len()))?
        }
    }
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Failed("acceptance criteria failed".into()))
    }
}
