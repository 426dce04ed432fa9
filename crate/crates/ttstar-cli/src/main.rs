//! Command-line front end for the cyclic tt*-frame toolkit.
//!
//! Subcommands map one-to-one onto the library entry points: frame
//! validation, fixed-point classification, index normalization, reduction
//! to independent unknowns, the radial boundary-value solver, slope
//! extraction from solver CSV output, minimal-model data, and the exact
//! identity suites.
//!
//! Outputs are deterministic: fixed float formatting, stable field order,
//! no timestamps.  Errors print a machine-readable JSON object on stderr
//! and select the exit code by kind: `2` for schema or input errors, `3`
//! for solver non-convergence, `4` for failed verification.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use ttstar::asymmetry::{normalize_l, reduce_system};
use ttstar::classify::{canonicalize_to_toda_frame, classification_report, ClassifyError, Sign};
use ttstar::frame::{validate_ttstar_frame, FrameStructure};
use ttstar::identities::{exact_identity_suite, exact_twist_suite, float_identity_suite};
use ttstar::solver::{
    extract_asymptotics, solve_radial_toda, write_csv, AsymptoticData, GridSpec, RadialSolution,
    SolverError, SolverOptions,
};
use ttstar::walgebra::{minimal_model_for, RationalAsymptoticData};

#[derive(Parser)]
#[command(
    name = "ttstar",
    version,
    about = "Cyclic tt*-frame classification, radial Toda solving, and minimal-model data"
)]
struct Cli {
    /// Path to the input file, or inline JSON when the value starts with
    /// '{' or '[' (the `asymptotics` command always takes a CSV path)
    #[arg(long, global = true)]
    input: Option<String>,

    /// Output file; stdout when omitted (required by `solve` for the CSV)
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Optional JSON file supplying defaults for the other flags;
    /// explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Numerical tolerance (validation / classification residuals, solver
    /// convergence, float identity checks)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Number of grid points for `solve`
    #[arg(long, global = true)]
    grid_points: Option<usize>,

    /// Left end of the solver grid in the log-radial coordinate
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_min: Option<f64>,

    /// Right end of the solver grid in the log-radial coordinate
    #[arg(long, global = true, allow_hyphen_values = true)]
    x_max: Option<f64>,

    /// Number of leading grid points in the slope fit of `solve` /
    /// `asymptotics` summaries
    #[arg(long, global = true)]
    window: Option<usize>,

    /// Arithmetic backend for `verify-identities`
    #[arg(long, global = true, value_enum)]
    arithmetic: Option<Arithmetic>,

    /// Worker threads for batch `solve`
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Largest rank checked by `verify-identities`
    #[arg(long, global = true)]
    n_max: Option<usize>,

    /// Explicit level for `ceff` (defaults to the smallest admissible one)
    #[arg(long, global = true)]
    level: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the defining conditions of a tt*-frame and report residuals
    Validate,
    /// Canonicalize a cyclic fixed point and report (l, epsilon, class)
    Classify,
    /// Rotate an anti-symmetric exponent tuple to index 0 or 1
    Normalize,
    /// Reduce a normalized index pair to its independent unknowns
    Reduce,
    /// Solve the radial Toda boundary-value problem (CSV + summary JSON)
    Solve,
    /// Re-extract asymptotic exponents from a solver CSV
    Asymptotics,
    /// Compute exact minimal-model data from rational exponents
    Ceff,
    /// Run the operator identity suites and print pass/fail per identity
    VerifyIdentities,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Arithmetic {
    Float,
    Exact,
}

/// Flag defaults loadable from `--config`; any explicit flag overrides
/// the corresponding file entry.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<String>,
    output: Option<PathBuf>,
    tol: Option<f64>,
    grid_points: Option<usize>,
    x_min: Option<f64>,
    x_max: Option<f64>,
    window: Option<usize>,
    arithmetic: Option<Arithmetic>,
    jobs: Option<usize>,
    n_max: Option<usize>,
    level: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ErrorKind {
    Schema,
    Solver,
    Verification,
}

impl ErrorKind {
    fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Schema => "schema",
            ErrorKind::Solver => "solver",
            ErrorKind::Verification => "verification",
        }
    }

    fn code(self) -> u8 {
        match self {
            ErrorKind::Schema => 2,
            ErrorKind::Solver => 3,
            ErrorKind::Verification => 4,
        }
    }
}

struct CliError {
    kind: ErrorKind,
    message: String,
}

fn schema(message: impl Into<String>) -> CliError {
    CliError {
        kind: ErrorKind::Schema,
        message: message.into(),
    }
}

fn verification(message: impl Into<String>) -> CliError {
    CliError {
        kind: ErrorKind::Verification,
        message: message.into(),
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> CliError {
        let kind = match e {
            SolverError::NonConvergence { .. } | SolverError::SingularJacobian { .. } => {
                ErrorKind::Solver
            }
            _ => ErrorKind::Schema,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> CliError {
        verification(e.to_string())
    }
}

/// Effective settings after merging flags over the optional config file.
struct Settings {
    input: Option<String>,
    output: Option<PathBuf>,
    tol: Option<f64>,
    grid_points: usize,
    x_min: f64,
    x_max: f64,
    window: usize,
    arithmetic: Arithmetic,
    jobs: Option<usize>,
    n_max: usize,
    level: Option<u64>,
}

fn merge_settings(cli: &Cli) -> Result<Settings, CliError> {
    let file: FileConfig = match &cli.config {
        None => FileConfig::default(),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| schema(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| schema(format!("config {}: {e}", path.display())))?
        }
    };
    let defaults = GridSpec::default();
    let settings = Settings {
        input: cli.input.clone().or(file.input),
        output: cli.output.clone().or(file.output),
        tol: cli.tol.or(file.tol),
        grid_points: cli.grid_points.or(file.grid_points).unwrap_or(defaults.points),
        x_min: cli.x_min.or(file.x_min).unwrap_or(defaults.x_min),
        x_max: cli.x_max.or(file.x_max).unwrap_or(defaults.x_max),
        window: cli.window.or(file.window).unwrap_or(10),
        arithmetic: cli.arithmetic.or(file.arithmetic).unwrap_or(Arithmetic::Exact),
        jobs: cli.jobs.or(file.jobs),
        n_max: cli.n_max.or(file.n_max).unwrap_or(6),
        level: cli.level.or(file.level),
    };
    if let Some(t) = settings.tol {
        if !(t > 0.0) {
            return Err(schema(format!("tolerance must be positive, got {t}")));
        }
    }
    Ok(settings)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("TODA_TTSTAR_LOG", "error"),
    )
    .init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": {"kind": e.kind.as_str(), "message": e.message}})
            );
            ExitCode::from(e.kind.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let settings = merge_settings(cli)?;
    match cli.command {
        Command::Validate => cmd_validate(&settings),
        Command::Classify => cmd_classify(&settings),
        Command::Normalize => cmd_normalize(&settings),
        Command::Reduce => cmd_reduce(&settings),
        Command::Solve => cmd_solve(&settings),
        Command::Asymptotics => cmd_asymptotics(&settings),
        Command::Ceff => cmd_ceff(&settings),
        Command::VerifyIdentities => cmd_verify_identities(&settings),
    }
}

/// Raw input text: inline JSON if it looks like JSON, file contents
/// otherwise.
fn load_input(settings: &Settings) -> Result<String, CliError> {
    let raw = settings
        .input
        .as_ref()
        .ok_or_else(|| schema("--input is required for this command"))?;
    let trimmed = raw.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(raw.clone())
    } else {
        fs::read_to_string(raw).map_err(|e| schema(format!("cannot read input {raw}: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| schema(format!("invalid input: {e}")))
}

fn pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| schema(format!("serialization failed: {e}")))
}

/// Writes to the output file when set, otherwise to stdout.
fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| schema(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_validate(settings: &Settings) -> Result<(), CliError> {
    let frame: FrameStructure = parse_json(&load_input(settings)?)?;
    let report = validate_ttstar_frame(&frame, settings.tol.unwrap_or(1e-8));
    emit(&settings.output, &pretty(&report)?)?;
    if report.all_passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name.as_str())
            .collect();
        Err(verification(format!(
            "frame failed validity checks: {}",
            failed.join(", ")
        )))
    }
}

fn cmd_classify(settings: &Settings) -> Result<(), CliError> {
    let frame: FrameStructure = parse_json(&load_input(settings)?)?;
    let canon = canonicalize_to_toda_frame(&frame, settings.tol.unwrap_or(1e-8))?;
    let report = classification_report(&canon);
    emit(&settings.output, &pretty(&report)?)
}

#[derive(Deserialize)]
struct NormalizeInput {
    n: usize,
    l: usize,
    values: Vec<f64>,
}

fn cmd_normalize(settings: &Settings) -> Result<(), CliError> {
    let input: NormalizeInput = parse_json(&load_input(settings)?)?;
    let normalized = normalize_l(input.n, input.l, &input.values)
        .map_err(|e| schema(format!("invalid tuple: {e}")))?;
    emit(&settings.output, &pretty(&normalized)?)
}

#[derive(Deserialize)]
struct ReduceInput {
    n: usize,
    l: usize,
}

fn cmd_reduce(settings: &Settings) -> Result<(), CliError> {
    let input: ReduceInput = parse_json(&load_input(settings)?)?;
    let reduced = reduce_system(input.n, input.l)
        .map_err(|e| schema(format!("invalid index pair: {e}")))?;
    emit(&settings.output, &pretty(&reduced)?)
}

#[derive(Deserialize)]
struct SolveInput {
    n: usize,
    l: usize,
    m: Vec<f64>,
}

#[derive(Serialize)]
struct SolveSummary {
    residual_sup: f64,
    newton_iterations: usize,
    m_hat: Vec<f64>,
    anti_symmetry_sup: f64,
    component_sum_sup: f64,
    window: usize,
}

fn solve_record(record: &SolveInput, settings: &Settings) -> Result<(RadialSolution, SolveSummary), CliError> {
    let data = AsymptoticData::new(record.n, record.l, record.m.clone())?;
    let grid = GridSpec::new(settings.x_min, settings.x_max, settings.grid_points)?;
    let options = SolverOptions {
        tol: settings.tol.unwrap_or(SolverOptions::default().tol),
        ..SolverOptions::default()
    };
    let solution = solve_radial_toda(&data, &grid, &options)?;
    let m_hat = extract_asymptotics(&solution, settings.window)?;
    let summary = SolveSummary {
        residual_sup: solution.residual_sup,
        newton_iterations: solution.newton_iterations,
        m_hat,
        anti_symmetry_sup: solution.anti_symmetry_defect(),
        component_sum_sup: solution.component_sum_defect(),
        window: settings.window,
    };
    Ok((solution, summary))
}

fn write_solution_csv(path: &Path, solution: &RadialSolution) -> Result<(), CliError> {
    let mut buffer = Vec::new();
    write_csv(solution, &mut buffer).map_err(|e| schema(format!("CSV encoding failed: {e}")))?;
    fs::write(path, buffer).map_err(|e| schema(format!("cannot write {}: {e}", path.display())))
}

/// `base` with `_index` appended to the file stem.
fn indexed_path(base: &Path, index: usize, extension: &str) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "record".into());
    let mut name = format!("{stem}_{index}.{extension}");
    if let Some(parent) = base.parent() {
        if !parent.as_os_str().is_empty() {
            return parent.join(name);
        }
    }
    name = format!("./{name}");
    PathBuf::from(name)
}

fn cmd_solve(settings: &Settings) -> Result<(), CliError> {
    let text = load_input(settings)?;
    let value: serde_json::Value = parse_json(&text)?;
    let base = settings
        .output
        .as_ref()
        .ok_or_else(|| schema("solve requires --output for the CSV"))?;

    if !value.is_array() {
        let record: SolveInput = parse_json(&text)?;
        let (solution, summary) = solve_record(&record, settings)?;
        write_solution_csv(base, &solution)?;
        print!("{}", pretty(&summary)?);
        return Ok(());
    }

    // batch mode: one worker pool over the records, one CSV and one
    // summary JSON per record, combined listing on stdout
    let records: Vec<SolveInput> = parse_json(&text)?;
    if records.is_empty() {
        return Err(schema("batch input contains no records"));
    }
    let jobs = settings
        .jobs
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
        .clamp(1, records.len());
    let extension = base
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());

    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<serde_json::Value, CliError>>>> =
        Mutex::new((0..records.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if index >= records.len() {
                    break;
                }
                let outcome = (|| -> Result<serde_json::Value, CliError> {
                    let (solution, summary) = solve_record(&records[index], settings)?;
                    let csv_path = indexed_path(base, index, &extension);
                    let summary_path = indexed_path(base, index, "json");
                    write_solution_csv(&csv_path, &solution)?;
                    fs::write(&summary_path, pretty(&summary)?).map_err(|e| {
                        schema(format!("cannot write {}: {e}", summary_path.display()))
                    })?;
                    Ok(json!({
                        "index": index,
                        "csv": csv_path.to_string_lossy(),
                        "summary": summary,
                    }))
                })();
                results.lock().unwrap()[index] = Some(outcome);
            });
        }
    });

    let mut listing = Vec::with_capacity(records.len());
    let mut first_error: Option<CliError> = None;
    for (index, slot) in results.into_inner().unwrap().into_iter().enumerate() {
        match slot.expect("every record is processed") {
            Ok(entry) => listing.push(entry),
            Err(e) => {
                listing.push(json!({
                    "index": index,
                    "error": {"kind": e.kind.as_str(), "message": e.message},
                }));
                if first_error.is_none() {
                    first_error = Some(e);
                }
            }
        }
    }
    print!("{}", pretty(&listing)?);
    match first_error {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

/// Parses a solver CSV (`x,w0,...,wn` header, one row per node) back into
/// a profile.
fn parse_solution_csv(text: &str) -> Result<RadialSolution, CliError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| schema("empty CSV"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 3 || columns[0] != "x" {
        return Err(schema("expected CSV header x,w0,...,wn"));
    }
    for (j, name) in columns[1..].iter().enumerate() {
        if *name != format!("w{j}") {
            return Err(schema(format!(
                "unexpected CSV column {name} at position {}",
                j + 1
            )));
        }
    }
    let dim = columns.len() - 1;
    let mut x = Vec::new();
    let mut w = vec![Vec::new(); dim];
    for (row, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 1 {
            return Err(schema(format!(
                "row {} has {} fields, expected {}",
                row + 2,
                fields.len(),
                dim + 1
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse::<f64>()
                .map_err(|e| schema(format!("row {}: bad float {s:?}: {e}", row + 2)))
        };
        x.push(parse(fields[0])?);
        for j in 0..dim {
            w[j].push(parse(fields[j + 1])?);
        }
    }
    if x.len() < 2 {
        return Err(schema("CSV needs at least two data rows"));
    }
    Ok(RadialSolution {
        data: AsymptoticData {
            n: dim - 1,
            l: 0,
            m: vec![0.0; dim],
            is_strict: true,
        },
        grid: GridSpec {
            x_min: x[0],
            x_max: *x.last().unwrap(),
            points: x.len(),
        },
        x,
        w,
        residual_sup: 0.0,
        newton_iterations: 0,
    })
}

fn cmd_asymptotics(settings: &Settings) -> Result<(), CliError> {
    let raw = settings
        .input
        .as_ref()
        .ok_or_else(|| schema("--input must point at a solver CSV"))?;
    let text =
        fs::read_to_string(raw).map_err(|e| schema(format!("cannot read input {raw}: {e}")))?;
    let solution = parse_solution_csv(&text)?;
    let m_hat = extract_asymptotics(&solution, settings.window)?;
    let payload = json!({"m_hat": m_hat, "window": settings.window});
    emit(&settings.output, &pretty(&payload)?)
}

fn cmd_ceff(settings: &Settings) -> Result<(), CliError> {
    let data: RationalAsymptoticData = parse_json(&load_input(settings)?)?;
    let model = minimal_model_for(&data, settings.level)
        .map_err(|e| schema(format!("invalid exponent data: {e}")))?;
    emit(&settings.output, &pretty(&model)?)
}

fn cmd_verify_identities(settings: &Settings) -> Result<(), CliError> {
    let mut lines = Vec::new();
    let mut all_passed = true;
    let mut record = |passed: bool, text: String| {
        all_passed &= passed;
        lines.push(format!("{} {text}", if passed { "PASS" } else { "FAIL" }));
    };
    match settings.arithmetic {
        Arithmetic::Exact => {
            for n in 1..=settings.n_max {
                for epsilon in [Sign::Minus, Sign::Plus] {
                    let suite = exact_identity_suite(n, epsilon);
                    for check in &suite.checks {
                        record(
                            check.holds,
                            format!("{} (n={n}, epsilon={:+})", check.name, epsilon.as_int()),
                        );
                    }
                }
                for l in 0..=n {
                    let suite = exact_twist_suite(n, l);
                    for check in &suite.checks {
                        record(check.holds, format!("{} (n={n}, l={l})", check.name));
                    }
                }
            }
        }
        Arithmetic::Float => {
            let tol = settings.tol.unwrap_or(1e-12);
            for n in 1..=settings.n_max {
                for epsilon in [Sign::Minus, Sign::Plus] {
                    for check in float_identity_suite(n, epsilon, tol) {
                        record(
                            check.passed,
                            format!(
                                "{} (n={n}, epsilon={:+}) residual {:.3e}",
                                check.name,
                                epsilon.as_int(),
                                check.residual
                            ),
                        );
                    }
                }
            }
        }
    }
    let mut text = lines.join("\n");
    text.push('\n');
    emit(&settings.output, &text)?;
    if all_passed {
        Ok(())
    } else {
        Err(verification("identity suite reported failures"))
    }
}
