//! Convergence of `ℓ(n, ·)/n` to the limiting profile for the confined walk.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    run_trials, sup_error, target_profile, Assertion, Clock, CsvRow, ExperimentError,
    ExperimentOutput, ExperimentSummary, Frequency, SeedProvenance,
};
use crate::format::g17;
use crate::profile::boundary_streams;
use crate::rng::walk_rng;
use crate::walk::{geometric_checkpoints, WalkParameters, WalkState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct ConvergenceParams {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub interior: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: u64,
    /// Geometric checkpoints per factor ten.
    #[arg(long, default_value_t = 4)]
    pub per_decade: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent repeats.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Assert the final sup error is at most this ...
    #[arg(long)]
    pub max_final_error: Option<f64>,
    /// ... in at least this fraction of repeats.
    #[arg(long, default_value_t = 1.0)]
    pub min_pass_fraction: f64,
    /// Assert the error at `H` is at most the error at `H/100` in this
    /// fraction of repeats.
    #[arg(long)]
    pub min_improved_fraction: Option<f64>,
    /// Assert `|Δ(H, 0)/H − d_0| ≤` this in every repeat.
    #[arg(long)]
    pub boundary_tolerance: Option<f64>,
}

impl ConvergenceParams {
    pub fn new(alpha: f64, interior: usize, beta: f64, horizon: u64, seed: u64) -> Self {
        Self {
            alpha,
            interior,
            beta,
            horizon,
            per_decade: 4,
            seed,
            trials: 1,
            max_final_error: None,
            min_pass_fraction: 1.0,
            min_improved_fraction: None,
            boundary_tolerance: None,
        }
    }
}

/// Per-repeat summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub trial: u64,
    pub seed: u64,
    pub final_error: f64,
    /// Error at the checkpoint `H/100` (absent for tiny horizons).
    pub early_error: Option<f64>,
    /// `Δ(H, 0)/H` and `Δ(H, L+1)/H`.
    pub d0_estimate: f64,
    pub dl1_estimate: f64,
}

impl CsvRow for ConvergenceRow {
    const HEADER: &'static str = "trial,seed,final_error,early_error,d0_estimate,dl1_estimate";
    fn fields(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.trial,
            self.seed,
            g17(self.final_error),
            super::opt_g17(self.early_error),
            g17(self.d0_estimate),
            g17(self.dl1_estimate)
        )
    }
}

/// `sup_j |ℓ(n, j)/n − u_j|` at one checkpoint, plus the profile itself.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCheckpoint {
    pub n: u64,
    pub sup_error: f64,
    pub profile: Vec<f64>,
}

impl CsvRow for ConvergenceCheckpoint {
    const HEADER: &'static str = "n,sup_error,profile";
    fn fields(&self) -> String {
        let p: Vec<String> = self.profile.iter().map(|&x| g17(x)).collect();
        format!("{},{},{}", self.n, g17(self.sup_error), p.join(";"))
    }
}

fn one_run(
    p: &ConvergenceParams,
    target: &[f64],
    trial: u64,
    seed: u64,
) -> Result<(ConvergenceRow, Vec<ConvergenceCheckpoint>), ExperimentError> {
    let params = WalkParameters::new(p.alpha, p.beta, seed).confined(p.interior);
    let mut state = WalkState::new(params)?;
    let mut rng = walk_rng(seed);
    let checkpoints = geometric_checkpoints(p.horizon, p.per_decade);
    let early_at = p.horizon / 100;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut early_error = None;
    for &c in &checkpoints {
        while state.steps() < c {
            state.step(&mut rng);
        }
        let lt = state.local_times();
        let profile: Vec<f64> = (1..=p.interior as i64 + 1)
            .map(|e| lt.get(e) as f64 / c as f64)
            .collect();
        let err = sup_error(&profile, target);
        if c == early_at {
            early_error = Some(err);
        }
        out.push(ConvergenceCheckpoint {
            n: c,
            sup_error: err,
            profile,
        });
    }
    let n = state.steps().max(1) as f64;
    let row = ConvergenceRow {
        trial,
        seed,
        final_error: out.last().map_or(f64::NAN, |c| c.sup_error),
        early_error,
        d0_estimate: state.delta_at(0) / n,
        dl1_estimate: state.delta_at(p.interior as i64 + 1) / n,
    };
    Ok((row, out))
}

/// Confined walk to `horizon`, sup error against the limiting profile at
/// geometric checkpoints.
pub fn profile_convergence_experiment(
    params: &ConvergenceParams,
    threads: usize,
) -> Result<ExperimentOutput<ConvergenceRow, ConvergenceCheckpoint>, ExperimentError> {
    let clock = Clock::start();
    let p = params;
    if p.trials == 0 {
        return Err(ExperimentError::Empty("trials"));
    }
    if p.horizon == 0 {
        return Err(ExperimentError::Empty("horizon"));
    }
    let target = target_profile(p.alpha, p.interior)?;
    let (d0, dl1) = boundary_streams(&target, p.alpha)?;
    let results: Vec<_> = run_trials(p.trials, p.seed, threads, |i, s| one_run(p, &target, i, s))?
        .into_iter()
        .collect::<Result<_, _>>()?;
    let (rows, mut traces): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let checkpoints = std::mem::take(&mut traces[0]);

    let total = rows.len() as u64;
    let improved = rows
        .iter()
        .filter(|r| r.early_error.is_some_and(|e| r.final_error <= e))
        .count() as u64;
    let tol = p.max_final_error.unwrap_or(0.01);
    let passing = rows.iter().filter(|r| r.final_error <= tol).count() as u64;
    let worst_d0 = rows.iter().map(|r| (r.d0_estimate - d0).abs()).fold(0.0, f64::max);
    let worst_dl1 = rows.iter().map(|r| (r.dl1_estimate - dl1).abs()).fold(0.0, f64::max);

    let mut assertions = Vec::new();
    if p.max_final_error.is_some() {
        let need = (p.min_pass_fraction * total as f64).ceil() as u64;
        assertions.push(Assertion::new(
            "final_sup_error",
            passing >= need,
            format!("{passing}/{total} repeats within {tol} (need {need})"),
        ));
    }
    if let Some(min) = p.min_improved_fraction {
        let f = Frequency::new(improved, total);
        assertions.push(Assertion::new(
            "error_decreases",
            f.fraction >= min,
            format!("{improved}/{total} repeats with error(H) <= error(H/100)"),
        ));
    }
    if let Some(t) = p.boundary_tolerance {
        assertions.push(Assertion::new(
            "boundary_stream_rate",
            worst_d0 <= t && worst_dl1 <= t,
            format!("max |Δ(H,0)/H − d0| = {}, max |Δ(H,L+1)/H − dL1| = {}", g17(worst_d0), g17(worst_dl1)),
        ));
    }

    let summary = ExperimentSummary {
        experiment: "convergence".into(),
        parameters: serde_json::to_value(p).expect("plain data"),
        trials: total,
        horizon: p.horizon,
        aggregates: json!({
            "target": target,
            "d0": d0,
            "dL1": dl1,
            "within_tolerance": Frequency::new(passing, total),
            "tolerance": tol,
            "improved": Frequency::new(improved, total),
            "max_final_error": rows.iter().map(|r| r.final_error).fold(0.0, f64::max),
            "max_d0_deviation": worst_d0,
            "max_dL1_deviation": worst_dl1,
        }),
        assertions,
        wall_clock_seconds: clock.seconds(),
        seeds: SeedProvenance::new(p.seed),
    };
    Ok(ExperimentOutput {
        rows,
        checkpoints,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_interior_site_converges_to_halves() {
        let out = profile_convergence_experiment(&ConvergenceParams::new(2.0, 1, 1.0, 10_000, 5), 1).unwrap();
        assert!(out.rows[0].final_error < 1e-3, "{:?}", out.rows[0]);
        assert_eq!(out.checkpoints.last().unwrap().n, 10_000);
    }

    #[test]
    fn checkpoints_include_early_reference() {
        let out = profile_convergence_experiment(&ConvergenceParams::new(0.8, 2, 1.0, 100_000, 5), 1).unwrap();
        assert!(out.checkpoints.iter().any(|c| c.n == 1_000));
        assert!(out.rows[0].early_error.is_some());
        assert!(out.checkpoints.windows(2).all(|w| w[0].n < w[1].n));
    }
}
