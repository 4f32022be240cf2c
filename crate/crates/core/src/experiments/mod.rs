//! Seeded Monte Carlo experiments over the free and confined walks.
//!
//! Every experiment draws trial `i`'s generator from
//! [`trial_seed`]`(master, i)`, runs trials on a rayon pool and collects
//! results in trial order, so per-trial output does not depend on the
//! number of worker threads.
//!
//! Each run produces typed per-trial rows (written as CSV through
//! [`CsvRow`]) and an [`ExperimentSummary`] carrying the echoed parameters,
//! aggregates, requested assertions, wall-clock time and seed provenance.

mod convergence;
mod coupling;
mod free;
mod streams;

pub use convergence::{
    profile_convergence_experiment, ConvergenceCheckpoint, ConvergenceParams, ConvergenceRow,
};
pub use coupling::{
    coupling_survival_experiment, ln_inward_probability, CouplingParams, CouplingRow,
    SurvivalCheckpoint, STABLE_TOLERANCE,
};
pub use free::{
    range_growth_experiment, run_free_trial, trapping_probability_experiment, FreeTrialRow,
    RangeParams, TrapVerdict, TrappingParams, TRAP_WINDOWS,
};
pub use streams::{stream_growth_experiment, StreamCheckpoint, StreamParams, StreamRow, FIT_START};

use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::profile::{limit_profile, solved_profile, ProfileError};
use crate::rng::trial_seed;
use crate::walk::WalkError;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{0} must be at least 1")]
    Empty(&'static str),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// One row of a per-trial or per-checkpoint table.
pub trait CsvRow {
    const HEADER: &'static str;
    fn fields(&self) -> String;
}

pub fn write_rows<W: Write, R: CsvRow>(mut w: W, rows: &[R]) -> io::Result<()> {
    writeln!(w, "{}", R::HEADER)?;
    for r in rows {
        writeln!(w, "{}", r.fields())?;
    }
    Ok(())
}

pub fn rows_to_string<R: CsvRow>(rows: &[R]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("rows are ASCII")
}

pub(crate) fn opt_g17(x: Option<f64>) -> String {
    x.map(crate::format::g17).unwrap_or_default()
}

/// Runs `f(index, seed)` for every trial on a pool of `threads` workers
/// (`0` = rayon's default) and returns the results in trial order.
pub fn run_trials<T, F>(trials: u64, master: u64, threads: usize, f: F) -> Result<Vec<T>, ExperimentError>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    Ok(pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| f(i, trial_seed(master, i)))
            .collect()
    }))
}

/// Count with its Wilson score 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub count: u64,
    pub total: u64,
    pub fraction: f64,
    pub lower: f64,
    pub upper: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

impl Frequency {
    pub fn new(count: u64, total: u64) -> Self {
        let (lower, upper) = wilson_interval(count, total);
        Self {
            count,
            total,
            fraction: if total == 0 { 0.0 } else { count as f64 / total as f64 },
            lower,
            upper,
        }
    }
}

pub fn wilson_interval(count: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = count as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lower = if count == 0 { 0.0 } else { (centre - half).max(0.0) };
    let upper = if count == total { 1.0 } else { (centre + half).min(1.0) };
    (lower, upper)
}

/// Outcome of one requested check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedProvenance {
    pub master_seed: u64,
    pub generator: String,
    pub trial_seed: String,
}

impl SeedProvenance {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            generator: "ChaCha8Rng::seed_from_u64; uniform = (next_u64 >> 11) * 2^-53".into(),
            trial_seed: "mix64(master ^ mix64((index + 1) * 0x9E3779B97F4A7C15)), mix64 = SplitMix64 finalizer"
                .into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub parameters: Value,
    pub trials: u64,
    pub horizon: u64,
    pub aggregates: Value,
    pub assertions: Vec<Assertion>,
    pub wall_clock_seconds: f64,
    pub seeds: SeedProvenance,
}

impl ExperimentSummary {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

/// Per-trial rows, optional per-checkpoint rows for trial 0, and the summary.
#[derive(Clone, Debug)]
pub struct ExperimentOutput<R, C = ()> {
    pub rows: Vec<R>,
    pub checkpoints: Vec<C>,
    pub summary: ExperimentSummary,
}

pub(crate) struct Clock(Instant);

impl Clock {
    pub fn start() -> Self {
        Clock(Instant::now())
    }
    pub fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

/// Limiting profile for the interval of interior length `L`: the closed
/// form where it applies, the linear solve otherwise.
pub fn target_profile(alpha: f64, interior: usize) -> Result<Vec<f64>, ProfileError> {
    match limit_profile(alpha, interior) {
        Ok(p) => Ok(p.u),
        Err(ProfileError::OutsideDomain { .. }) | Err(ProfileError::NoFrequency(_)) => {
            solved_profile(alpha, interior).map(|p| p.u)
        }
        Err(e) => Err(e),
    }
}

pub(crate) fn sup_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
