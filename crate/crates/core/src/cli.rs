//! The `trapwalk` command line.
//!
//! ```text
//! trapwalk thresholds --lmax K
//! trapwalk profile --alpha A --L L [--solver closed|linear]
//! trapwalk simulate --alpha A --beta B [--confine L] --steps N --seed S [--record full|thin]
//! trapwalk verify <log> --L L [--eps E --D D] [--alpha A]
//! trapwalk experiment {trapping|convergence|streams|coupling|range} <params>
//! ```
//!
//! Every subcommand accepts `--config FILE` (flat `key=value` lines, keys
//! named like the long flags; explicit flags win), `--dump-config FILE`
//! (write the resolved configuration and exit) and `--threads N`.
//! Log verbosity is read from `TRAPWALK_LOG` (`error`, `warn`, `info`, ...).
//!
//! Exit codes: 0 on success, 2 for invalid arguments, 1 when a requested
//! assertion fails.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::experiments::{
    coupling_survival_experiment, profile_convergence_experiment, range_growth_experiment,
    stream_growth_experiment, trapping_probability_experiment, write_rows, ConvergenceParams,
    CouplingParams, CsvRow, ExperimentError, ExperimentOutput, RangeParams, StreamParams,
    TrappingParams,
};
use crate::format::g17;
use crate::paths::{
    check_stream_lipschitz, infer_alpha, max_interior_stream, proposition_on_series,
    scan_confinement_on_series, scan_thresholds, upstream_jumps, PropositionVerdict, StreamSeries,
};
use crate::profile::{alpha_threshold, limit_profile, solved_profile, ProfileError};
use crate::walk::{
    read_trajectory_csv, run_walk_with, write_local_times_csv, write_trajectory_csv,
    InteractionKernel, LocalTimeField, Recording, TrajectoryLog, WalkError, WalkParameters,
};

/// Environment variable holding the log filter.
pub const LOG_ENV: &str = "TRAPWALK_LOG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) | CliError::Io(_) => 1,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Parser, Debug)]
#[command(name = "trapwalk", version, about = "Self-interacting random walks pushed by their own edge local times")]
pub struct Cli {
    /// Flat key=value file; flags given on the command line override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write the resolved configuration to FILE and exit.
    #[arg(long, global = true, value_name = "FILE")]
    dump_config: Option<PathBuf>,
    /// Worker threads for experiments (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trapping thresholds α_1..α_K.
    Thresholds(ThresholdsArgs),
    /// Limiting local-time profile of the interval {0..L+1}.
    Profile(ProfileArgs),
    /// Run one walk and write its trajectory.
    Simulate(SimulateArgs),
    /// Path diagnostics on a recorded trajectory CSV.
    Verify(VerifyArgs),
    /// Seeded Monte Carlo experiments.
    Experiment {
        #[command(subcommand)]
        kind: ExperimentKind,
    },
}

#[derive(Args, Debug, Serialize)]
struct ThresholdsArgs {
    #[arg(long)]
    lmax: usize,
    /// CSV output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Solver {
    Closed,
    Linear,
}

#[derive(Args, Debug, Serialize)]
struct ProfileArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    interior: usize,
    #[arg(long, value_enum, default_value_t = Solver::Closed)]
    solver: Solver,
    /// CSV output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON sidecar (default: next to --out with a .json extension).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum RecordMode {
    Full,
    Thin,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Interior length L; confines the walk to {0..L+1}.
    #[arg(long)]
    confine: Option<usize>,
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = RecordMode::Full)]
    record: RecordMode,
    /// Snapshots per factor ten of time under --record thin.
    #[arg(long, default_value_t = 10)]
    per_decade: u32,
    /// Kernel coefficients c_1,c_2,... (default 1,-alpha).
    #[arg(long, allow_hyphen_values = true)]
    kernel: Option<String>,
    /// Trajectory CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Final local times as j,ell CSV.
    #[arg(long)]
    local_times: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Trajectory CSV with header n,position,delta,dir.
    #[serde(skip)]
    log: PathBuf,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    interior: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long = "D", default_value_t = 100.0)]
    #[serde(rename = "D")]
    bound: f64,
    /// Interaction strength; inferred from the recorded drifts when absent.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Fail when a stream exceeds D before any upstream jump above eps·D.
    #[arg(long)]
    require_proposition: bool,
    /// JSON report file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct OutputArgs {
    /// Directory for trials.csv, checkpoints.csv and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum ExperimentKind {
    /// Free walks; trap verdicts, trap sizes and trapped profiles.
    Trapping {
        #[command(flatten)]
        params: TrappingParams,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Confined walk; sup error of ℓ(n,·)/n against the limiting profile.
    Convergence {
        #[command(flatten)]
        params: ConvergenceParams,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Confined walk; interior stream maxima and boundary stream rates.
    Streams {
        #[command(flatten)]
        params: StreamParams,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Confined walk; log-survival of the coupling with the free walk.
    Coupling {
        #[command(flatten)]
        params: CouplingParams,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Free walks; range growth between H/10 and H.
    Range {
        #[command(flatten)]
        params: RangeParams,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    dispatch_to(args, &mut lock)
}

/// [`dispatch`] with standard output redirected to `out`.
pub fn dispatch_to<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .target(env_logger::Target::Stderr)
        .try_init();
    let argv: Vec<String> = args
        .into_iter()
        .map(|a| a.into().to_string_lossy().into_owned())
        .collect();
    let argv = match apply_config_file(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = e.print();
                    2
                }
            };
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Reads `--config FILE` from `argv` and appends every key not already
/// given as a flag.
fn apply_config_file(mut argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            match argv.get(i + 1) {
                Some(p) => path = Some(p.clone()),
                None => return usage("--config needs a file name"),
            }
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(&path)
        .or_else(|e| usage(format!("--config: cannot read {path}: {e}")))?;
    for (k, v) in parse_config(&text)? {
        let flag = format!("--{k}");
        let given = argv
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match v.as_str() {
            "true" => argv.push(flag),
            "false" => {}
            _ => argv.push(format!("{flag}={v}")),
        }
    }
    Ok(argv)
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return usage(format!("--config line {}: expected key=value", i + 1));
        };
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

fn config_lines(values: &[Value], threads: usize) -> String {
    let mut map = BTreeMap::new();
    for v in values {
        if let Value::Object(o) = v {
            for (k, v) in o {
                let s = match v {
                    Value::Null => continue,
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                map.insert(k.replace('_', "-"), s);
            }
        }
    }
    map.insert("threads".into(), threads.to_string());
    map.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn resolved_config<A: Serialize, B: Serialize>(a: &A, b: &B) -> Vec<Value> {
    vec![
        serde_json::to_value(a).expect("plain data"),
        serde_json::to_value(b).expect("plain data"),
    ]
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let config = match &cli.command {
        Command::Thresholds(a) => resolved_config(a, &()),
        Command::Profile(a) => resolved_config(a, &()),
        Command::Simulate(a) => resolved_config(a, &()),
        Command::Verify(a) => resolved_config(a, &()),
        Command::Experiment { kind } => match kind {
            ExperimentKind::Trapping { params, output } => resolved_config(params, output),
            ExperimentKind::Convergence { params, output } => resolved_config(params, output),
            ExperimentKind::Streams { params, output } => resolved_config(params, output),
            ExperimentKind::Coupling { params, output } => resolved_config(params, output),
            ExperimentKind::Range { params, output } => resolved_config(params, output),
        },
    };
    if let Some(path) = &cli.dump_config {
        fs::write(path, config_lines(&config, cli.threads))?;
        log::info!("wrote resolved configuration to {}", path.display());
        return Ok(());
    }
    match cli.command {
        Command::Thresholds(a) => thresholds(a, out),
        Command::Profile(a) => profile(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Experiment { kind } => experiment(kind, cli.threads, &config, out),
    }
}

fn sink<'a>(path: &Option<PathBuf>, out: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>, CliError> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
        None => Box::new(out),
    })
}

fn thresholds(a: ThresholdsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.lmax == 0 {
        return usage("--lmax must be at least 1");
    }
    let mut w = sink(&a.out, out)?;
    writeln!(w, "L,alpha")?;
    for l in 1..=a.lmax {
        let v = alpha_threshold(l).expect("l >= 1");
        writeln!(w, "{l},{}", g17(v))?;
    }
    w.flush()?;
    Ok(())
}

fn profile_error(e: ProfileError) -> CliError {
    match e {
        ProfileError::InvalidLength(_) => CliError::Usage("--L must be at least 1".into()),
        ProfileError::OutsideDomain { alpha, interior, upper } => CliError::Usage(format!(
            "--alpha {alpha} is outside the closed-form range (1/3, {upper}) for --L {interior}; try --solver linear"
        )),
        ProfileError::NoFrequency(a) => CliError::Usage(format!(
            "--alpha {a} has no closed form (needs alpha > 1/3); try --solver linear"
        )),
        ProfileError::Singular { .. } => CliError::Usage(format!("--alpha is critical for this --L: {e}")),
        other => CliError::Usage(other.to_string()),
    }
}

fn profile(a: ProfileArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let closed = limit_profile(a.alpha, a.interior);
    let p = match a.solver {
        Solver::Closed => closed.clone().map_err(profile_error)?,
        Solver::Linear => solved_profile(a.alpha, a.interior).map_err(profile_error)?,
    };
    let closed = closed.ok();
    let peak = p.u.iter().cloned().fold(f64::MIN, f64::max);
    {
        let mut w = sink(&a.out, out)?;
        writeln!(w, "j,u,ell_style")?;
        for (i, &u) in p.u.iter().enumerate() {
            writeln!(w, "{},{},{}", i + 1, g17(u), g17(u / peak))?;
        }
        w.flush()?;
    }
    let sidecar = a
        .json
        .clone()
        .or_else(|| a.out.as_ref().map(|o| o.with_extension("json")));
    if let Some(path) = sidecar {
        let meta = json!({
            "alpha": a.alpha,
            "L": a.interior,
            "omega": closed.as_ref().and_then(|c| c.omega),
            "phi": closed.as_ref().and_then(|c| c.phi),
            "d0": p.d0,
            "dL1": p.dl1,
            "Z": closed.as_ref().and_then(|c| c.z),
        });
        fs::write(path, serde_json::to_string_pretty(&meta).expect("plain data") + "\n")?;
    }
    Ok(())
}

fn walk_error(e: WalkError) -> CliError {
    CliError::Usage(match e {
        WalkError::InvalidBeta(b) => format!("--beta must be positive and finite, got {b}"),
        WalkError::InvalidAlpha(a) => format!("--alpha must be finite, got {a}"),
        WalkError::InvalidConfinement(l) => format!("--confine must be at least 1, got {l}"),
    })
}

fn parse_kernel(spec: &str) -> Result<InteractionKernel, CliError> {
    let coefs: Result<Vec<f64>, _> = spec.split(',').map(|c| c.trim().parse::<f64>()).collect();
    coefs
        .ok()
        .and_then(InteractionKernel::new)
        .ok_or_else(|| CliError::Usage(format!("--kernel: expected finite numbers c1,c2,..., got {spec:?}")))
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut params = WalkParameters::new(a.alpha, a.beta, a.seed);
    if let Some(l) = a.confine {
        params = params.confined(l);
    }
    if let Some(k) = &a.kernel {
        params = params.with_kernel(parse_kernel(k)?);
    }
    let recording = match a.record {
        RecordMode::Full => Recording::Full,
        RecordMode::Thin => Recording::Geometric {
            per_decade: a.per_decade,
        },
    };
    log::info!("simulating {} steps", a.steps);
    let log = run_walk_with(params, a.steps, recording).map_err(walk_error)?;
    {
        let mut w = sink(&a.out, out)?;
        match a.record {
            RecordMode::Full => write_trajectory_csv(&mut w, &log.records)?,
            RecordMode::Thin => {
                writeln!(w, "n,position,j,ell")?;
                for s in &log.snapshots {
                    for (j, ell) in s.local_times.iter() {
                        writeln!(w, "{},{},{j},{ell}", s.n, s.position)?;
                    }
                }
            }
        }
        w.flush()?;
    }
    if let Some(p) = &a.local_times {
        let mut f = io::BufWriter::new(fs::File::create(p)?);
        write_local_times_csv(&mut f, &log.final_local_times)?;
        f.flush()?;
    }
    Ok(())
}

/// Rebuilds a full log from records read back from CSV.
fn log_from_records(
    params: WalkParameters,
    records: Vec<crate::walk::StepRecord>,
) -> Result<TrajectoryLog, CliError> {
    for (i, r) in records.iter().enumerate() {
        if r.n != i as u64 {
            return usage(format!("log: row {} has n = {}, expected {i}", i + 1, r.n));
        }
    }
    let mut lt = LocalTimeField::new();
    for r in &records {
        lt.increment(if r.dir > 0 { r.position + 1 } else { r.position });
    }
    let final_position = records
        .last()
        .map_or(0, |r| r.position + r.dir as i64);
    Ok(TrajectoryLog {
        params,
        steps: records.len() as u64,
        recording: Recording::Full,
        records,
        snapshots: Vec::new(),
        final_position,
        final_local_times: lt,
    })
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.interior == 0 {
        return usage("--L must be at least 1");
    }
    if !(a.eps > 0.0 && a.bound > 0.0) {
        return usage("--eps and --D must be positive");
    }
    let file = fs::File::open(&a.log)
        .or_else(|e| usage(format!("log: cannot open {}: {e}", a.log.display())))?;
    let records = read_trajectory_csv(BufReader::new(file))
        .or_else(|e| usage(format!("log: {}: {e}", a.log.display())))?;
    let (alpha, source) = match a.alpha {
        Some(x) => (x, "flag"),
        None => match infer_alpha(&records) {
            Some(x) => (x, "inferred"),
            None => return usage("--alpha is required: the log does not determine it"),
        },
    };
    let log = log_from_records(WalkParameters::new(alpha, 1.0, 0), records)?;
    let series = StreamSeries::from_log(&log, a.interior)
        .or_else(|e| usage(format!("log: {e}")))?;
    let deltas: Vec<f64> = log.records.iter().map(|r| r.delta).collect();
    let lipschitz = check_stream_lipschitz(&log, a.interior).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = max_interior_stream(&log, a.interior).map_err(|e| CliError::Usage(e.to_string()))?;
    let scan = scan_confinement_on_series(&series, &deltas, &scan_thresholds(report.overall_max()));
    let upstream = upstream_jumps(&log, a.interior).map_err(|e| CliError::Usage(e.to_string()))?;
    let prop = proposition_on_series(&series, &deltas, a.eps, a.bound);
    let (verdict, first_exceed, sigma) = match prop {
        PropositionVerdict::HoldsVacuously => ("holds_vacuously", None, None),
        PropositionVerdict::Holds { n, sigma } => ("holds", Some(n), Some(sigma)),
        PropositionVerdict::Violated { n } => ("violated", Some(n), None),
    };
    let body = json!({
        "lipschitz": if lipschitz.holds() { "pass" } else { "fail" },
        "lipschitz_report": lipschitz,
        "confinement_instances": { "checked": scan.checked, "held": scan.held },
        "proposition": {
            "eps": a.eps,
            "D": a.bound,
            "verdict": verdict,
            "first_exceed": first_exceed,
            "sigma": sigma,
        },
        "upstream_jumps": upstream.len(),
        "max_stream": report.overall_max(),
        "alpha": alpha,
        "alpha_source": source,
        "steps": log.steps,
        "L": a.interior,
    });
    {
        let mut w = sink(&a.out, out)?;
        writeln!(w, "{}", serde_json::to_string_pretty(&body).expect("plain data"))?;
        w.flush()?;
    }
    let mut failures = Vec::new();
    if !lipschitz.holds() {
        failures.push("stream Lipschitz check failed".to_string());
    }
    if scan.held != scan.checked {
        failures.push(format!("{} confinement instances violated", scan.checked - scan.held));
    }
    if a.require_proposition && !prop.holds() {
        failures.push("proposition instance violated".to_string());
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failures.join("; ")))
    }
}

fn experiment_error(e: ExperimentError) -> CliError {
    match e {
        ExperimentError::Empty(what) => CliError::Usage(format!("--{what} must be at least 1")),
        ExperimentError::Walk(w) => walk_error(w),
        ExperimentError::Profile(p) => profile_error(p),
        ExperimentError::Pool(msg) => CliError::Failed(format!("--threads: {msg}")),
    }
}

fn emit<R: CsvRow, C: CsvRow>(
    output: &ExperimentOutput<R, C>,
    dir: &Option<PathBuf>,
    config: &[Value],
    threads: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut summary = serde_json::to_value(&output.summary).expect("plain data");
    summary["config"] = Value::String(config_lines(config, threads));
    let text = serde_json::to_string_pretty(&summary).expect("plain data") + "\n";
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
        write_file(&dir.join("trials.csv"), |w| write_rows(w, &output.rows))?;
        if !output.checkpoints.is_empty() {
            write_file(&dir.join("checkpoints.csv"), |w| write_rows(w, &output.checkpoints))?;
        }
        fs::write(dir.join("summary.json"), &text)?;
    }
    out.write_all(text.as_bytes())?;
    for a in &output.summary.assertions {
        log::info!("{}: {} ({})", a.name, if a.passed { "pass" } else { "FAIL" }, a.detail);
    }
    let failed: Vec<_> = output
        .summary
        .assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| format!("{}: {}", a.name, a.detail))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("assertion failed: {}", failed.join("; "))))
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<()> {
    let mut w = io::BufWriter::new(fs::File::create(path)?);
    f(&mut w)?;
    w.flush()
}

impl CsvRow for () {
    const HEADER: &'static str = "";
    fn fields(&self) -> String {
        String::new()
    }
}

fn experiment(kind: ExperimentKind, threads: usize, config: &[Value], out: &mut dyn Write) -> Result<(), CliError> {
    log::info!("running experiment with {threads} threads (0 = all cores)");
    match kind {
        ExperimentKind::Trapping { params, output } => {
            let o = trapping_probability_experiment(&params, threads).map_err(experiment_error)?;
            emit(&o, &output.out, config, threads, out)
        }
        ExperimentKind::Range { params, output } => {
            let o = range_growth_experiment(&params, threads).map_err(experiment_error)?;
            emit(&o, &output.out, config, threads, out)
        }
        ExperimentKind::Convergence { params, output } => {
            let o = profile_convergence_experiment(&params, threads).map_err(experiment_error)?;
            emit(&o, &output.out, config, threads, out)
        }
        ExperimentKind::Streams { params, output } => {
            let o = stream_growth_experiment(&params, threads).map_err(experiment_error)?;
            emit(&o, &output.out, config, threads, out)
        }
        ExperimentKind::Coupling { params, output } => {
            let o = coupling_survival_experiment(&params, threads).map_err(experiment_error)?;
            emit(&o, &output.out, config, threads, out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = dispatch_to(std::iter::once("trapwalk").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn thresholds_table() {
        let (code, out) = run_capture(&["thresholds", "--lmax", "6"]);
        assert_eq!(code, 0);
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "L,alpha");
        assert_eq!(lines[1], "1,inf");
        assert_eq!(lines[2], "2,1");
        assert_eq!(lines[4], "4,0.5");
        assert!(lines[6].starts_with("6,0.41421356"));
    }

    #[test]
    fn profile_table() {
        let (code, out) = run_capture(&["profile", "--alpha", "0.8", "--L", "2"]);
        assert_eq!(code, 0);
        let u: Vec<f64> = out
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        for (a, b) in u.iter().zip([5.0 / 19.0, 9.0 / 19.0, 5.0 / 19.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(out.lines().nth(2).unwrap().ends_with(",1"));
    }

    #[test]
    fn bad_arguments_exit_two() {
        assert_eq!(run_capture(&["thresholds", "--lmax", "0"]).0, 2);
        assert_eq!(run_capture(&["thresholds"]).0, 2);
        assert_eq!(run_capture(&["profile", "--alpha", "0.3", "--L", "2"]).0, 2);
        assert_eq!(run_capture(&["profile", "--alpha", "1", "--L", "2", "--solver", "linear"]).0, 2);
        assert_eq!(run_capture(&["simulate", "--alpha", "0.8", "--beta", "0", "--steps", "3"]).0, 2);
        assert_eq!(run_capture(&["nonsense"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("experiment"));
    }

    #[test]
    fn empty_simulation() {
        let (code, out) = run_capture(&["simulate", "--alpha", "0.8", "--beta", "1", "--steps", "0", "--seed", "7"]);
        assert_eq!(code, 0);
        assert_eq!(out, "n,position,delta,dir\n");
    }

    #[test]
    fn negative_alpha_accepted() {
        let (code, out) = run_capture(&["simulate", "--alpha", "-0.5", "--steps", "3"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn config_parsing() {
        let c = parse_config("# comment\nalpha = 0.8\n\nper_decade=3\n").unwrap();
        assert_eq!(c["alpha"], "0.8");
        assert_eq!(c["per-decade"], "3");
        assert!(parse_config("oops").is_err());
    }
}
