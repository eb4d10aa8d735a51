//! Command-line front end for the contextlab library.
//!
//! Exit codes: 0 for success (including a colorable verdict), 2 for rejected
//! input, 3 for a successful run that determined noncolorability, 1 for
//! internal errors. All output is byte-deterministic for fixed arguments.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use contextlab::epr::{self, CorrelationModel};
use contextlab::ks::{
    self, DiagramFormat, OrthogonalityDiagram, orthogonality_closure, peres_directions,
    two_tripod_diagram,
};
use contextlab::matrix::ComplexMatrix;
use contextlab::spin::{self, PolarDirection};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "contextlab",
    version,
    about = "Spin-1 contextuality laboratory: operators, correlations, colorability",
    after_help = "Angles are radians unless --deg is given. Exit codes: \
                  0 success, 2 bad input, 3 noncolorable diagram, 1 internal error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print operator matrices as JSON ({rows, cols, re, im}, row-major)
    Operators(OperatorsArgs),
    /// Report residuals of the squared-spin operator identities at an azimuth
    Verify(VerifyArgs),
    /// Exact and sampled correlation at a single azimuth
    Correlate(CorrelateArgs),
    /// Correlation curve over an azimuth grid, as CSV rows or a JSON report
    Sweep(SweepArgs),
    /// Decide whether a diagram admits a two-valued measure (exit 3 if not)
    KsCheck(DiagramArgs),
    /// Enumerate two-valued measures of a diagram
    KsEnumerate(KsEnumerateArgs),
    /// Render an orthogonality diagram (dot, ascii or json)
    Greechie(GreechieArgs),
}

#[derive(Args)]
struct WeightArgs {
    /// Weight of the first squared component
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Weight of the second squared component
    #[arg(long, default_value_t = 3.0)]
    b: f64,
    /// Weight of the third squared component
    #[arg(long, default_value_t = 5.0)]
    c: f64,
    /// First weight on the rotated side [default: --a]
    #[arg(long)]
    abar: Option<f64>,
    /// Second weight on the rotated side [default: --b]
    #[arg(long)]
    bbar: Option<f64>,
    /// Third weight on the rotated side [default: --c]
    #[arg(long)]
    cbar: Option<f64>,
}

impl WeightArgs {
    fn left(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    fn right(&self) -> [f64; 3] {
        [
            self.abar.unwrap_or(self.a),
            self.bbar.unwrap_or(self.b),
            self.cbar.unwrap_or(self.c),
        ]
    }
}

#[derive(Args)]
struct OperatorsArgs {
    /// Azimuth of the rotated tripod [default: 0]
    #[arg(long)]
    phi: Option<f64>,
    /// Interpret angles as degrees
    #[arg(long)]
    deg: bool,
    /// Operator to print: j1, j2, j3, j1sq, j2sq, j3sq, u, ubar (repeatable)
    #[arg(long = "dump", value_name = "NAME")]
    dump: Vec<String>,
    /// Include the identity-residual report
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    weights: WeightArgs,
    /// Write output to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Azimuth of the rotated tripod [default: 0]
    #[arg(long)]
    phi: Option<f64>,
    /// Interpret angles as degrees
    #[arg(long)]
    deg: bool,
    /// Write output to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ModelArg {
    /// Born-rule prediction on the entangled state
    Quantum,
    /// Strawman model that flips the rotated-side reading
    Toy,
}

impl ModelArg {
    fn to_model(self, flip_rate: f64) -> CorrelationModel {
        match self {
            ModelArg::Quantum => CorrelationModel::Quantum,
            ModelArg::Toy => CorrelationModel::Toy { flip_rate },
        }
    }
}

#[derive(Args)]
struct CorrelateArgs {
    /// Azimuth of the rotated (right-hand) context [default: 0]
    #[arg(long)]
    phi: Option<f64>,
    /// Interpret angles as degrees
    #[arg(long)]
    deg: bool,
    /// Number of simulated measurement pairs
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    /// Seed for the deterministic sampler
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Correlation model to simulate
    #[arg(long, value_enum, default_value_t = ModelArg::Quantum)]
    model: ModelArg,
    /// Flip rate of the toy model
    #[arg(long, default_value_t = 0.1)]
    flip_rate: f64,
    #[command(flatten)]
    weights: WeightArgs,
    /// Write output to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum SweepFormat {
    /// phi,c_exact,c_estimate,shots,seed rows
    Csv,
    /// Hypothesis report with classification
    Json,
}

#[derive(Args)]
struct SweepArgs {
    /// First grid azimuth [default: 0]
    #[arg(long)]
    start: Option<f64>,
    /// Last grid azimuth [default: pi/2]
    #[arg(long)]
    end: Option<f64>,
    /// Number of grid points, endpoints inclusive
    #[arg(long, default_value_t = 65)]
    steps: usize,
    /// Interpret angles as degrees
    #[arg(long)]
    deg: bool,
    /// Number of simulated measurement pairs per grid point
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    /// Base seed; grid point i uses seed + i
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Correlation model to simulate
    #[arg(long, value_enum, default_value_t = ModelArg::Quantum)]
    model: ModelArg,
    /// Flip rate of the toy model
    #[arg(long, default_value_t = 0.1)]
    flip_rate: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    format: SweepFormat,
    /// Write output to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramArgs {
    /// Ray set: peres17, peres17-closed, two-tripods, or file:PATH
    #[arg(long, value_name = "SET")]
    set: String,
    /// Azimuth between the tripods of the two-tripods set [default: pi/4]
    #[arg(long)]
    phi: Option<f64>,
    /// Interpret angles as degrees
    #[arg(long)]
    deg: bool,
    /// Close the ray set under cross products of orthogonal pairs
    #[arg(long)]
    close: bool,
    /// Write output to a file instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KsEnumerateArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    /// Keep at most this many measures
    #[arg(long, value_name = "N")]
    limit: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum GreechieFormat {
    Dot,
    Ascii,
    Json,
}

impl From<GreechieFormat> for DiagramFormat {
    fn from(f: GreechieFormat) -> DiagramFormat {
        match f {
            GreechieFormat::Dot => DiagramFormat::Dot,
            GreechieFormat::Ascii => DiagramFormat::Ascii,
            GreechieFormat::Json => DiagramFormat::Json,
        }
    }
}

#[derive(Args)]
struct GreechieArgs {
    #[command(flatten)]
    diagram: DiagramArgs,
    /// Rendering format
    #[arg(long, value_enum, default_value_t = GreechieFormat::Dot)]
    format: GreechieFormat,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Internal(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// Converts a possibly-degree angle to radians and applies the subcommand
/// default when absent. The default is a radian value and is never run
/// through the degree conversion.
fn resolve_angle(value: Option<f64>, deg: bool, default_rad: f64) -> Result<f64, CliError> {
    let angle = match value {
        Some(x) => {
            if !x.is_finite() {
                return Err(CliError::Input(format!("angle {x} is not finite")));
            }
            if deg { x.to_radians() } else { x }
        }
        None => default_rad,
    };
    Ok(angle)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let terminated = if text.ends_with('\n') {
        text.to_string()
    } else {
        format!("{text}\n")
    };
    match out {
        Some(path) => std::fs::write(path, terminated)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{terminated}");
            Ok(())
        }
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))
}

fn operator_by_name(
    name: &str,
    phi: f64,
    weights: &WeightArgs,
) -> Result<ComplexMatrix, CliError> {
    let component = |theta: f64, azimuth: f64| -> Result<ComplexMatrix, CliError> {
        let dir = PolarDirection::with_wrapped_phi(theta, azimuth).map_err(input_err)?;
        Ok(spin::spin_matrix(dir).matrix().clone())
    };
    let [a, b, c] = weights.left();
    let [abar, bbar, cbar] = weights.right();
    match name {
        "j1" => component(FRAC_PI_2, phi),
        "j2" => component(FRAC_PI_2, phi + FRAC_PI_2),
        "j3" => component(0.0, 0.0),
        "j1sq" | "j2sq" | "j3sq" => {
            if !phi.is_finite() {
                return Err(CliError::Input(format!("angle {phi} is not finite")));
            }
            let triple = spin::squared_spin_triple(phi);
            let index = match name {
                "j1sq" => 1,
                "j2sq" => 2,
                _ => 3,
            };
            Ok(triple.component(index).map_err(input_err)?.matrix().clone())
        }
        "u" => Ok(spin::maximal_operator(0.0, a, b, c)
            .map_err(input_err)?
            .matrix()
            .clone()),
        "ubar" => Ok(spin::maximal_operator(phi, abar, bbar, cbar)
            .map_err(input_err)?
            .matrix()
            .clone()),
        other => Err(CliError::Input(format!(
            "unknown operator '{other}' (expected j1, j2, j3, j1sq, j2sq, j3sq, u, ubar)"
        ))),
    }
}

fn run_operators(args: &OperatorsArgs) -> Result<(), CliError> {
    let phi = resolve_angle(args.phi, args.deg, 0.0)?;
    if args.dump.is_empty() && !args.check {
        return Err(CliError::Input(
            "nothing to do: pass --dump NAME and/or --check".to_string(),
        ));
    }
    let text = if args.dump.len() == 1 && !args.check {
        let matrix = operator_by_name(&args.dump[0], phi, &args.weights)?;
        to_pretty_json(&matrix)?
    } else {
        // Several dumps or a residual report: bundle into one object with
        // sorted keys (serde_json maps are ordered), so output is stable.
        let mut bundle = serde_json::Map::new();
        for name in &args.dump {
            let matrix = operator_by_name(name, phi, &args.weights)?;
            let value = serde_json::to_value(&matrix)
                .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
            bundle.insert(name.clone(), value);
        }
        if args.check {
            if !phi.is_finite() {
                return Err(CliError::Input(format!("angle {phi} is not finite")));
            }
            let report = spin::verify_identities(phi);
            let value = serde_json::to_value(&report)
                .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
            bundle.insert("identities".to_string(), value);
        }
        to_pretty_json(&serde_json::Value::Object(bundle))?
    };
    emit(args.out.as_deref(), &text)
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let phi = resolve_angle(args.phi, args.deg, 0.0)?;
    if !phi.is_finite() {
        return Err(CliError::Input(format!("angle {phi} is not finite")));
    }
    let report = spin::verify_identities(phi);
    emit(args.out.as_deref(), &to_pretty_json(&report)?)
}

fn run_correlate(args: &CorrelateArgs) -> Result<(), CliError> {
    let phi = resolve_angle(args.phi, args.deg, 0.0)?;
    let (c_exact, c_estimate) = match args.model {
        ModelArg::Quantum => {
            let dist =
                epr::joint_distribution(0.0, phi, args.weights.left(), args.weights.right())
                    .map_err(input_err)?;
            let records = epr::sample_records(&dist, args.shots, args.seed).map_err(input_err)?;
            let estimate = epr::estimate_correlation(&records).map_err(input_err)?;
            (dist.correlation(), estimate)
        }
        ModelArg::Toy => {
            let exact = epr::toy_contextual_correlation(phi, args.flip_rate).map_err(input_err)?;
            let estimate =
                epr::estimate_toy_correlation(phi, args.flip_rate, args.shots, args.seed)
                    .map_err(input_err)?;
            (exact, estimate)
        }
    };
    let row = epr::CorrelationEstimate {
        phi,
        c_exact,
        c_estimate,
        shots: args.shots,
        seed: args.seed,
    };
    emit(args.out.as_deref(), &to_pretty_json(&row)?)
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let start = resolve_angle(args.start, args.deg, 0.0)?;
    let end = resolve_angle(args.end, args.deg, FRAC_PI_2)?;
    if args.steps < 1 {
        return Err(CliError::Input("steps must be at least 1".to_string()));
    }
    let grid = epr::uniform_grid(start, end, args.steps);
    let model = args.model.to_model(args.flip_rate);
    let text = match args.format {
        SweepFormat::Csv => {
            let rows =
                epr::correlation_sweep(&grid, args.shots, args.seed, model).map_err(input_err)?;
            epr::sweep_csv(&rows)
        }
        SweepFormat::Json => {
            let report =
                epr::hypothesis_report(&grid, args.shots, args.seed, model).map_err(input_err)?;
            to_pretty_json(&report)?
        }
    };
    emit(args.out.as_deref(), &text)
}

fn load_diagram(args: &DiagramArgs) -> Result<OrthogonalityDiagram, CliError> {
    let phi = resolve_angle(args.phi, args.deg, FRAC_PI_4)?;
    let rays = match args.set.as_str() {
        "peres17" => peres_directions(),
        "peres17-closed" => return Ok(orthogonality_closure(&peres_directions())),
        "two-tripods" => two_tripod_diagram(phi)
            .map_err(input_err)?
            .rays()
            .to_vec(),
        other => match other.strip_prefix("file:") {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
                ks::parse_ray_file(&text).map_err(input_err)?
            }
            None => {
                return Err(CliError::Input(format!(
                    "unknown set '{other}' (expected peres17, peres17-closed, two-tripods or file:PATH)"
                )));
            }
        },
    };
    if rays.is_empty() {
        return Err(CliError::Input("the ray set is empty".to_string()));
    }
    Ok(if args.close {
        orthogonality_closure(&rays)
    } else {
        OrthogonalityDiagram::from_rays(rays)
    })
}

fn run_ks_check(args: &DiagramArgs) -> Result<ExitCode, CliError> {
    let diagram = load_diagram(args)?;
    let certificate = ks::is_colorable(&diagram);
    emit(args.out.as_deref(), &to_pretty_json(&certificate)?)?;
    Ok(if certificate.colorable {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn run_ks_enumerate(args: &KsEnumerateArgs) -> Result<(), CliError> {
    let diagram = load_diagram(&args.diagram)?;
    let limit = args.limit.unwrap_or(usize::MAX);
    if limit == 0 {
        return Err(CliError::Input("limit must be at least 1".to_string()));
    }
    let enumeration = ks::enumerate_two_valued_measures(&diagram, limit);
    let value = json!({
        "ray_count": diagram.ray_count(),
        "measures": enumeration.measures,
        "exhausted": enumeration.exhausted,
    });
    emit(args.diagram.out.as_deref(), &to_pretty_json(&value)?)
}

fn run_greechie(args: &GreechieArgs) -> Result<(), CliError> {
    let diagram = load_diagram(&args.diagram)?;
    let text = ks::greechie_emit(&diagram, args.format.into());
    emit(args.diagram.out.as_deref(), &text)
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Operators(args) => run_operators(args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => run_verify(args).map(|()| ExitCode::SUCCESS),
        Command::Correlate(args) => run_correlate(args).map(|()| ExitCode::SUCCESS),
        Command::Sweep(args) => run_sweep(args).map(|()| ExitCode::SUCCESS),
        Command::KsCheck(args) => run_ks_check(args),
        Command::KsEnumerate(args) => run_ks_enumerate(args).map(|()| ExitCode::SUCCESS),
        Command::Greechie(args) => run_greechie(args).map(|()| ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
