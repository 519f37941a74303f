//! `anyon-entropy`: entropy sweeps, matrix dumps, convergence reports and the
//! validation battery.

mod format;
mod grid;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use anyon_entropy::rdm::MatrixDump;
use anyon_entropy::spectrum::{convergence_report, rdm_eigenvalues, ConvergenceRow};
use anyon_entropy::validation::{run_battery, CheckResult, ValidationOptions};
use anyon_entropy::{
    build_rdm, entropy_sweep, von_neumann_entropy, EntropySample, LogBase, RdmMethod, ReducedDensityMatrix,
    StatisticsParameter, TruncationConfig, TwoAnyonState,
};

use format::{sig12, write_csv, write_curve, write_json};

const THREADS_ENV: &str = "ANYON_ENTROPY_THREADS";

#[derive(Parser)]
#[command(
    name = "anyon-entropy",
    version,
    about = "Entanglement entropy of two one-dimensional anyons"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy and top eigenvalues over a grid of η.
    Sweep(SweepArgs),
    /// Full reduced density matrix at one η, as JSON.
    Matrix(MatrixArgs),
    /// Entropy at one η for a ladder of truncations.
    Converge(ConvergeArgs),
    /// Run the identity and oracle battery and print a pass/fail table.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct Truncation {
    /// Matrix basis dimension M.
    #[arg(long = "basis-dim", default_value_t = TruncationConfig::default().basis_dim)]
    basis_dim: usize,
    /// Partial-trace cutoff K (terms k < K).
    #[arg(long = "trace-cap", default_value_t = TruncationConfig::default().trace_cap)]
    trace_cap: usize,
    /// Closed-form series length L.
    #[arg(long = "series-len", default_value_t = TruncationConfig::default().series_len)]
    series_len: usize,
    /// Absolute tail tolerance for the closed-form series.
    #[arg(long, default_value_t = TruncationConfig::default().series_tol)]
    tol: f64,
}

impl Truncation {
    fn config(&self) -> Result<TruncationConfig, Failure> {
        let cfg = TruncationConfig {
            basis_dim: self.basis_dim,
            trace_cap: self.trace_cap,
            series_len: self.series_len,
            series_tol: self.tol,
            ..TruncationConfig::default()
        };
        cfg.validate().map_err(|e| Failure::Usage(e.into()))?;
        Ok(cfg)
    }
}

#[derive(Args, Clone)]
struct Common {
    /// Two-particle state as `j,i`.
    #[arg(long, default_value = "0,0", value_parser = parse_state)]
    state: (usize, usize),
    #[arg(long = "log-base", value_enum, default_value_t = BaseArg::Two)]
    log_base: BaseArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Generic)]
    method: MethodArg,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Add a generation timestamp to the output metadata.
    #[arg(long)]
    stamp: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    truncation: Truncation,
    /// `min:max:steps`, a comma list, or a single value.
    #[arg(long, default_value = "0:4:41")]
    eta: String,
    /// Space `min:max:steps` logarithmically.
    #[arg(long = "log-grid")]
    log_grid: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Recompute the spectrum of a saved matrix dump instead of building one.
    #[arg(long = "from-matrix", value_name = "DUMP")]
    from_matrix: Option<PathBuf>,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    truncation: Truncation,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Comma list of basis dimensions M.
    #[arg(long = "basis-dim", default_value = "16,24,32,40")]
    basis_dim: String,
    /// Comma list of trace cutoffs K, one per M; defaults to max(40, M).
    #[arg(long = "trace-cap")]
    trace_cap: Option<String>,
    #[arg(long = "series-len", default_value_t = TruncationConfig::default().series_len)]
    series_len: usize,
    #[arg(long, default_value_t = TruncationConfig::default().series_tol)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args)]
struct ValidateArgs {
    /// Reduced grids.
    #[arg(long)]
    quick: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    format: ReportFormat,
    /// Test hook: scale 𝔇(1, η) by 1 + 1e-3 in the series path.
    #[arg(long = "perturb-script-d", hide = true)]
    perturb_script_d: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum BaseArg {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

impl From<BaseArg> for LogBase {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Two => LogBase::Two,
            BaseArg::E => LogBase::E,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    Generic,
    #[value(alias = "closed_form")]
    Closed,
}

impl From<MethodArg> for RdmMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Generic => RdmMethod::Generic,
            MethodArg::Closed => RdmMethod::ClosedForm,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

fn parse_state(s: &str) -> Result<(usize, usize), String> {
    grid::parse_state(s).map_err(|e| format!("{e:#}"))
}

/// Exit status classes: usage errors exit 2, computation failures exit 1.
enum Failure {
    Usage(anyhow::Error),
    Compute(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Sweep(a) => run_sweep(a),
        Command::Matrix(a) => run_matrix(a),
        Command::Converge(a) => run_converge(a),
        Command::Validate(a) => run_validate(a),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(anyhow!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Compute(e.into()))
}

fn timestamp(stamp: bool) -> Option<String> {
    stamp.then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn usage(e: anyon_entropy::Error) -> Failure {
    Failure::Usage(e.into())
}

fn run_sweep(args: SweepArgs) -> Result<bool, Failure> {
    let stamp = timestamp(args.common.stamp);
    let base = LogBase::from(args.common.log_base);
    if let Some(path) = &args.from_matrix {
        let sample = sample_from_dump(path, base)?;
        let ok = sample.is_ok();
        let out = open_output(args.common.output.as_deref())?;
        match args.format {
            FormatArg::Csv => write_csv(out, std::slice::from_ref(&sample), stamp.as_deref())?,
            FormatArg::Json => write_json(out, &sample, stamp.as_deref())?,
        }
        return Ok(ok);
    }
    let config = args.truncation.config()?;
    let grid = grid::parse_grid(&args.eta, args.log_grid).map_err(Failure::Usage)?;
    let method = RdmMethod::from(args.common.method);
    let curve = entropy_sweep(args.common.state, &grid, &config, method, base).map_err(usage)?;
    write_curve(
        open_output(args.common.output.as_deref())?,
        &curve,
        args.format == FormatArg::Json,
        stamp.as_deref(),
    )?;
    let failures = curve.failures();
    if failures > 0 {
        eprintln!("{failures} of {} samples failed", curve.samples.len());
    }
    Ok(failures == 0)
}

/// Loads a matrix dump (extra fields such as `entropy` are ignored) and
/// recomputes its spectrum.
fn sample_from_dump(path: &Path, base: LogBase) -> Result<EntropySample, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let dump: MatrixDump =
        serde_json::from_str(&text).with_context(|| format!("{} is not a matrix dump", path.display()))?;
    let rho = ReducedDensityMatrix::from_dump(&dump).map_err(|e| Failure::Compute(e.into()))?;
    let eigenvalues = rdm_eigenvalues(&rho).map_err(|e| Failure::Compute(e.into()))?;
    Ok(EntropySample {
        eta: dump.eta,
        entropy: von_neumann_entropy(&eigenvalues, base).map_err(|e| Failure::Compute(e.into()))?,
        eigenvalues,
        trace_error: dump.trace_error,
        basis_dim: dump.basis_dim,
        trace_cap: dump.trace_cap,
        series_len: dump.series_len,
        error: None,
    })
}

#[derive(Serialize)]
struct MatrixReport {
    #[serde(flatten)]
    dump: MatrixDump,
    eigenvalues: Vec<f64>,
    entropy: f64,
    log_base: LogBase,
}

fn run_matrix(args: MatrixArgs) -> Result<bool, Failure> {
    let config = args.truncation.config()?;
    let eta = StatisticsParameter::new(args.eta).map_err(usage)?;
    let (j, i) = args.common.state;
    let base = LogBase::from(args.common.log_base);
    let rho = build_rdm(&TwoAnyonState::new(j, i, eta), &config, args.common.method.into())
        .map_err(|e| Failure::Compute(e.into()))?;
    let eigenvalues = rdm_eigenvalues(&rho).map_err(|e| Failure::Compute(e.into()))?;
    let entropy = von_neumann_entropy(&eigenvalues, base).map_err(|e| Failure::Compute(e.into()))?;
    let stamp = timestamp(args.common.stamp);
    let out = open_output(args.common.output.as_deref())?;
    match args.format {
        FormatArg::Json => {
            let report = MatrixReport {
                dump: rho.to_dump(),
                eigenvalues,
                entropy,
                log_base: base,
            };
            write_json(out, &report, stamp.as_deref())?;
        }
        FormatArg::Csv => write_matrix_csv(out, &rho, stamp.as_deref())?,
    }
    Ok(true)
}

fn write_matrix_csv(out: Box<dyn Write>, rho: &ReducedDensityMatrix, stamp: Option<&str>) -> Result<(), Failure> {
    let mut out = out;
    if let Some(ts) = stamp {
        writeln!(out, "# generated {ts}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "n", "value"]).map_err(anyhow::Error::from)?;
    for m in 0..rho.dim() {
        for n in 0..rho.dim() {
            w.write_record([m.to_string(), n.to_string(), sig12(rho.get(m, n))])
                .map_err(anyhow::Error::from)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run_converge(args: ConvergeArgs) -> Result<bool, Failure> {
    let eta = StatisticsParameter::new(args.eta).map_err(usage)?;
    let dims = grid::parse_list(&args.basis_dim).map_err(Failure::Usage)?;
    let caps = match &args.trace_cap {
        Some(input) => grid::parse_list(input).map_err(Failure::Usage)?,
        None => dims.iter().map(|&m| m.max(40)).collect(),
    };
    if caps.len() != dims.len() {
        return Err(Failure::Usage(anyhow!(
            "--trace-cap needs one value per --basis-dim entry ({} vs {})",
            caps.len(),
            dims.len()
        )));
    }
    let configs = dims
        .iter()
        .zip(&caps)
        .map(|(&m, &k)| {
            let cfg = TruncationConfig {
                basis_dim: m,
                trace_cap: k,
                series_len: args.series_len,
                series_tol: args.tol,
                ..TruncationConfig::default()
            };
            cfg.validate().map(|()| cfg)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let (j, i) = args.common.state;
    let rows = convergence_report(
        &TwoAnyonState::new(j, i, eta),
        &configs,
        args.common.method.into(),
        args.common.log_base.into(),
    )
    .map_err(|e| Failure::Compute(e.into()))?;
    let stamp = timestamp(args.common.stamp);
    let out = open_output(args.common.output.as_deref())?;
    match args.format {
        FormatArg::Json => write_json(out, &rows, stamp.as_deref())?,
        FormatArg::Csv => write_converge_csv(out, &rows, stamp.as_deref())?,
    }
    Ok(true)
}

fn write_converge_csv(out: Box<dyn Write>, rows: &[ConvergenceRow], stamp: Option<&str>) -> Result<(), Failure> {
    let mut out = out;
    if let Some(ts) = stamp {
        writeln!(out, "# generated {ts}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["M", "K", "L", "entropy", "trace_error", "delta"])
        .map_err(anyhow::Error::from)?;
    for r in rows {
        w.write_record([
            r.config.basis_dim.to_string(),
            r.config.trace_cap.to_string(),
            r.config.series_len.to_string(),
            sig12(r.entropy),
            sig12(r.trace_error),
            r.delta.map_or_else(String::new, sig12),
        ])
        .map_err(anyhow::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

fn run_validate(args: ValidateArgs) -> Result<bool, Failure> {
    let results = run_battery(ValidationOptions {
        quick: args.quick,
        perturb_script_d: args.perturb_script_d,
    });
    let all_passed = results.iter().all(|r| r.passed);
    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &results).map_err(anyhow::Error::from)?;
            writeln!(out)?;
        }
        ReportFormat::Table => write_table(&mut out, &results)?,
    }
    out.flush()?;
    Ok(all_passed)
}

fn write_table(out: &mut dyn Write, results: &[CheckResult]) -> io::Result<()> {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    writeln!(
        out,
        "{:<width$}  {:>12}  {:>12}  status  detail",
        "check", "measured", "tolerance"
    )?;
    for r in results {
        writeln!(
            out,
            "{:<width$}  {:>12.3e}  {:>12.3e}  {:<6}  {}",
            r.name,
            r.measured,
            r.tolerance,
            if r.passed { "pass" } else { "FAIL" },
            r.detail
        )?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} checks, {} failed", results.len(), failed)
}
