//! Survival of the natural coupling between the confined and free walks.
//!
//! Run the confined walk and, at every visit to an endpoint, add the log of
//! the probability that the free walk would also have stepped inwards. The
//! running sum `S(t)` is the log of the probability that the coupling has
//! not broken by time `t`.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    run_trials, Assertion, Clock, CsvRow, ExperimentError, ExperimentOutput, ExperimentSummary,
    Frequency, SeedProvenance,
};
use crate::format::g17;
use crate::rng::walk_rng;
use crate::walk::{geometric_checkpoints, ln_right_probability, WalkParameters, WalkState};

/// Successive checkpoints closer than this in log-survival count as stable.
pub const STABLE_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct CouplingParams {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub interior: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 4)]
    pub per_decade: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Assert every repeat stabilizes with a positive survival estimate.
    #[arg(long)]
    pub expect_positive: bool,
    /// Assert the final survival estimate is below this ...
    #[arg(long)]
    pub max_survival: Option<f64>,
    /// ... in at least this fraction of repeats.
    #[arg(long, default_value_t = 0.95)]
    pub min_vanish_fraction: f64,
}

impl CouplingParams {
    pub fn new(alpha: f64, interior: usize, beta: f64, horizon: u64, seed: u64) -> Self {
        Self {
            alpha,
            interior,
            beta,
            horizon,
            per_decade: 4,
            seed,
            trials: 1,
            expect_positive: false,
            max_survival: None,
            min_vanish_fraction: 0.95,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingRow {
    pub trial: u64,
    pub seed: u64,
    /// `S(H)`.
    pub log_survival: f64,
    /// `S` at the checkpoint before `H`.
    pub previous_log_survival: f64,
    /// `|S(H) − S(previous)| < STABLE_TOLERANCE`.
    pub stabilized: bool,
    pub boundary_visits: u64,
}

impl CsvRow for CouplingRow {
    const HEADER: &'static str =
        "trial,seed,log_survival,previous_log_survival,survival,stabilized,boundary_visits";
    fn fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.trial,
            self.seed,
            g17(self.log_survival),
            g17(self.previous_log_survival),
            g17(self.log_survival.exp()),
            self.stabilized as u8,
            self.boundary_visits
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCheckpoint {
    pub n: u64,
    pub log_survival: f64,
    pub survival: f64,
}

impl CsvRow for SurvivalCheckpoint {
    const HEADER: &'static str = "n,log_survival,survival";
    fn fields(&self) -> String {
        format!("{},{},{}", self.n, g17(self.log_survival), g17(self.survival))
    }
}

/// `ln P(free walk steps inwards)` for a walker at an endpoint of `{0..L+1}`.
pub fn ln_inward_probability(beta: f64, delta: f64, at_left_end: bool) -> f64 {
    if at_left_end {
        ln_right_probability(beta, delta)
    } else {
        ln_right_probability(beta, -delta)
    }
}

fn one_run(
    p: &CouplingParams,
    trial: u64,
    seed: u64,
) -> Result<(CouplingRow, Vec<SurvivalCheckpoint>), ExperimentError> {
    let params = WalkParameters::new(p.alpha, p.beta, seed).confined(p.interior);
    let mut state = WalkState::new(params)?;
    let mut rng = walk_rng(seed);
    let right_end = p.interior as i64 + 1;
    let mut s = 0.0f64;
    let mut visits = 0u64;
    let mut out = Vec::new();
    for c in geometric_checkpoints(p.horizon, p.per_decade) {
        while state.steps() < c {
            let x = state.position();
            if x == 0 || x == right_end {
                s += ln_inward_probability(p.beta, state.drift(), x == 0);
                visits += 1;
            }
            state.step(&mut rng);
        }
        out.push(SurvivalCheckpoint {
            n: c,
            log_survival: s,
            survival: s.exp(),
        });
    }
    let prev = if out.len() >= 2 { out[out.len() - 2].log_survival } else { f64::NAN };
    let row = CouplingRow {
        trial,
        seed,
        log_survival: s,
        previous_log_survival: prev,
        stabilized: (s - prev).abs() < STABLE_TOLERANCE,
        boundary_visits: visits,
    };
    Ok((row, out))
}

/// Log-survival of the coupling at geometric checkpoints.
pub fn coupling_survival_experiment(
    params: &CouplingParams,
    threads: usize,
) -> Result<ExperimentOutput<CouplingRow, SurvivalCheckpoint>, ExperimentError> {
    let clock = Clock::start();
    let p = params;
    if p.trials == 0 {
        return Err(ExperimentError::Empty("trials"));
    }
    if p.horizon == 0 {
        return Err(ExperimentError::Empty("horizon"));
    }
    let results: Vec<_> = run_trials(p.trials, p.seed, threads, |i, s| one_run(p, i, s))?
        .into_iter()
        .collect::<Result<_, _>>()?;
    let (rows, mut traces): (Vec<CouplingRow>, Vec<_>) = results.into_iter().unzip();
    let checkpoints = std::mem::take(&mut traces[0]);

    let total = rows.len() as u64;
    let stable = rows
        .iter()
        .filter(|r| r.stabilized && r.log_survival.is_finite())
        .count() as u64;
    let bound = p.max_survival.unwrap_or(1e-6);
    let vanished = rows.iter().filter(|r| r.log_survival.exp() < bound).count() as u64;

    let mut assertions = Vec::new();
    if p.expect_positive {
        assertions.push(Assertion::new(
            "survival_positive",
            stable == total,
            format!("{stable}/{total} repeats stabilized at a finite log-survival"),
        ));
    }
    if p.max_survival.is_some() {
        let need = (p.min_vanish_fraction * total as f64).ceil() as u64;
        assertions.push(Assertion::new(
            "survival_vanishes",
            vanished >= need,
            format!("{vanished}/{total} repeats below {bound} (need {need})"),
        ));
    }

    let summary = ExperimentSummary {
        experiment: "coupling".into(),
        parameters: serde_json::to_value(p).expect("plain data"),
        trials: total,
        horizon: p.horizon,
        aggregates: json!({
            "stabilized": Frequency::new(stable, total),
            "survival_bound": bound,
            "below_bound": Frequency::new(vanished, total),
            "mean_log_survival": rows.iter().map(|r| r.log_survival).sum::<f64>() / total as f64,
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
    use crate::walk::right_probability;

    #[test]
    fn inward_probability_mirrors() {
        assert_eq!(ln_inward_probability(1.0, 0.0, true), 0.5f64.ln());
        let a = ln_inward_probability(1.0, 0.7, true);
        let b = ln_inward_probability(1.0, -0.7, false);
        assert_eq!(a, b);
        assert!((a - right_probability(1.0, 0.7).ln()).abs() < 1e-15);
    }

    #[test]
    fn inward_probability_monotone_in_beta_delta() {
        let mut last = f64::NEG_INFINITY;
        for k in -50..=50 {
            let v = ln_inward_probability(1.0, k as f64 * 0.1, true);
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn first_visit_counts_half() {
        let out = coupling_survival_experiment(&CouplingParams::new(0.8, 2, 1.0, 1, 0), 1).unwrap();
        assert_eq!(out.rows[0].boundary_visits, 1);
        assert_eq!(out.rows[0].log_survival, 0.5f64.ln());
    }
}
