//! Free-walk trials: trap verdicts, trapped profiles and range growth.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    opt_g17, run_trials, sup_error, target_profile, Assertion, Clock, CsvRow, ExperimentError,
    ExperimentOutput, ExperimentSummary, Frequency, SeedProvenance,
};
use crate::rng::walk_rng;
use crate::walk::{WalkParameters, WalkState};

/// Start of each observation window as a fraction `(num, den)` of the
/// horizon. A trial is trapped when the visited interval is the same over
/// all of them.
pub const TRAP_WINDOWS: [(u64, u64); 3] = [(1, 4), (1, 2), (7, 8)];

/// Interval visited over the final windows of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapVerdict {
    pub trapped: bool,
    /// Left end `x` of the interval `[x, x + L' + 1]`.
    pub x: i64,
    /// Interior length `L'`.
    pub interior_length: usize,
    /// `L' + 2`.
    pub site_count: usize,
}

/// One free-walk trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeTrialRow {
    pub trial: u64,
    pub seed: u64,
    pub verdict: TrapVerdict,
    /// Sup distance between the normalized local times on the trap and the
    /// limiting profile of that interval; trapped trials only.
    pub profile_err: Option<f64>,
    /// Number of sites visited by time `H/10`.
    pub range_early: u64,
    /// Number of sites visited by time `H`.
    pub range_final: u64,
}

impl CsvRow for FreeTrialRow {
    const HEADER: &'static str =
        "trial,seed,trapped,x,interior_length,site_count,profile_err,range_early,range_final";
    fn fields(&self) -> String {
        let v = &self.verdict;
        let (x, il, sc) = if v.trapped {
            (v.x.to_string(), v.interior_length.to_string(), v.site_count.to_string())
        } else {
            Default::default()
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.trial,
            self.seed,
            v.trapped as u8,
            x,
            il,
            sc,
            opt_g17(self.profile_err),
            self.range_early,
            self.range_final
        )
    }
}

/// Runs one free walk for `horizon` steps from `seed`.
pub fn run_free_trial(
    alpha: f64,
    beta: f64,
    horizon: u64,
    trial: u64,
    seed: u64,
) -> Result<FreeTrialRow, ExperimentError> {
    let mut state = WalkState::new(WalkParameters::new(alpha, beta, seed))?;
    let mut rng = walk_rng(seed);
    let starts = TRAP_WINDOWS.map(|(a, b)| horizon * a / b);
    let mut windows = [(i64::MAX, i64::MIN); 3];
    let (mut lo, mut hi) = (0i64, 0i64);
    let mut range_early = 1;
    for n in 1..=horizon {
        state.step(&mut rng);
        let x = state.position();
        lo = lo.min(x);
        hi = hi.max(x);
        if n == horizon / 10 {
            range_early = (hi - lo + 1) as u64;
        }
        for (w, &s) in windows.iter_mut().zip(&starts) {
            if n >= s {
                w.0 = w.0.min(x);
                w.1 = w.1.max(x);
            }
        }
    }
    let range_final = (hi - lo + 1) as u64;
    let (wlo, whi) = windows[0];
    let trapped = horizon >= 8 && windows.iter().all(|&w| w == windows[0]) && whi - wlo >= 2;
    let site_count = if horizon > 0 { (whi - wlo + 1) as usize } else { 1 };
    let verdict = TrapVerdict {
        trapped,
        x: wlo,
        interior_length: site_count.saturating_sub(2),
        site_count,
    };
    let profile_err = if trapped {
        let lt = state.local_times();
        let edges: Vec<f64> = (wlo + 1..=whi).map(|e| lt.get(e) as f64).collect();
        let total: f64 = edges.iter().sum();
        let observed: Vec<f64> = edges.iter().map(|e| e / total).collect();
        target_profile(alpha, verdict.interior_length)
            .ok()
            .map(|u| sup_error(&observed, &u))
    } else {
        None
    };
    Ok(FreeTrialRow {
        trial,
        seed,
        verdict,
        profile_err,
        range_early,
        range_final,
    })
}

fn run_all(
    alpha: f64,
    beta: f64,
    trials: u64,
    horizon: u64,
    seed: u64,
    threads: usize,
) -> Result<Vec<FreeTrialRow>, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::Empty("trials"));
    }
    run_trials(trials, seed, threads, |i, s| run_free_trial(alpha, beta, horizon, i, s))?
        .into_iter()
        .collect()
}

/// Aggregates recomputable from the per-trial rows.
pub(crate) fn free_aggregates(rows: &[FreeTrialRow], profile_tolerance: f64) -> serde_json::Value {
    let total = rows.len() as u64;
    let trapped: Vec<_> = rows.iter().filter(|r| r.verdict.trapped).collect();
    let mut by_sites: BTreeMap<usize, u64> = BTreeMap::new();
    for r in &trapped {
        *by_sites.entry(r.verdict.site_count).or_default() += 1;
    }
    let histogram: BTreeMap<String, Frequency> = by_sites
        .iter()
        .map(|(&k, &c)| (k.to_string(), Frequency::new(c, total)))
        .collect();
    let with_err: Vec<f64> = trapped.iter().filter_map(|r| r.profile_err).collect();
    let within = with_err.iter().filter(|&&e| e <= profile_tolerance).count() as u64;
    let growth = rows.iter().filter(|r| r.range_final > r.range_early).count() as u64;
    json!({
        "trapped": Frequency::new(trapped.len() as u64, total),
        "trapped_by_site_count": histogram,
        "profile_tolerance": profile_tolerance,
        "profile_within_tolerance": Frequency::new(within, with_err.len() as u64),
        "max_profile_err": with_err.iter().cloned().fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e)))),
        "strict_range_growth": Frequency::new(growth, total),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct TrappingParams {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Error bound for the trapped-profile check.
    #[arg(long, default_value_t = 0.05)]
    pub profile_tolerance: f64,
    /// Assert at least one trial trapped on this many sites.
    #[arg(long)]
    pub expect_sites: Option<usize>,
    /// Assert every trapped trial occupies this many sites.
    #[arg(long)]
    pub expect_only_sites: Option<usize>,
    /// Assert this fraction of trapped trials lie within `profile_tolerance`.
    #[arg(long)]
    pub min_profile_fraction: Option<f64>,
    /// Assert no trial is trapped with interior length at most this.
    #[arg(long)]
    pub expect_no_trap_upto: Option<usize>,
    /// Assert this fraction of trials show strict range growth.
    #[arg(long)]
    pub min_growth_fraction: Option<f64>,
}

impl TrappingParams {
    pub fn new(alpha: f64, beta: f64, trials: u64, horizon: u64, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            trials,
            horizon,
            seed,
            profile_tolerance: 0.05,
            expect_sites: None,
            expect_only_sites: None,
            min_profile_fraction: None,
            expect_no_trap_upto: None,
            min_growth_fraction: None,
        }
    }
}

fn growth_assertion(rows: &[FreeTrialRow], min: f64) -> Assertion {
    let f = Frequency::new(
        rows.iter().filter(|r| r.range_final > r.range_early).count() as u64,
        rows.len() as u64,
    );
    Assertion::new(
        "strict_range_growth",
        f.fraction >= min,
        format!("{}/{} trials grew (need fraction >= {min})", f.count, f.total),
    )
}

/// Free walks to `horizon`, one trap verdict per trial.
pub fn trapping_probability_experiment(
    params: &TrappingParams,
    threads: usize,
) -> Result<ExperimentOutput<FreeTrialRow>, ExperimentError> {
    let clock = Clock::start();
    let p = params;
    let rows = run_all(p.alpha, p.beta, p.trials, p.horizon, p.seed, threads)?;
    let trapped: Vec<_> = rows.iter().filter(|r| r.verdict.trapped).collect();
    let mut assertions = Vec::new();
    if let Some(k) = p.expect_sites {
        let c = trapped.iter().filter(|r| r.verdict.site_count == k).count();
        assertions.push(Assertion::new(
            "trapped_on_sites",
            c >= 1,
            format!("{c} trials trapped on exactly {k} sites"),
        ));
    }
    if let Some(k) = p.expect_only_sites {
        let other = trapped.iter().filter(|r| r.verdict.site_count != k).count();
        assertions.push(Assertion::new(
            "only_site_count",
            other == 0,
            format!("{other} of {} trapped trials not on {k} sites", trapped.len()),
        ));
    }
    if let Some(min) = p.min_profile_fraction {
        let within = trapped
            .iter()
            .filter(|r| r.profile_err.is_some_and(|e| e <= p.profile_tolerance))
            .count();
        let frac = if trapped.is_empty() { 0.0 } else { within as f64 / trapped.len() as f64 };
        assertions.push(Assertion::new(
            "trapped_profile_error",
            !trapped.is_empty() && frac >= min,
            format!(
                "{within}/{} trapped trials within {} (need fraction >= {min})",
                trapped.len(),
                p.profile_tolerance
            ),
        ));
    }
    if let Some(k) = p.expect_no_trap_upto {
        let c = trapped.iter().filter(|r| r.verdict.interior_length <= k).count();
        assertions.push(Assertion::new(
            "no_trap",
            c == 0,
            format!("{c} trials trapped with interior length <= {k}"),
        ));
    }
    if let Some(min) = p.min_growth_fraction {
        assertions.push(growth_assertion(&rows, min));
    }
    let summary = ExperimentSummary {
        experiment: "trapping".into(),
        parameters: serde_json::to_value(p).expect("plain data"),
        trials: p.trials,
        horizon: p.horizon,
        aggregates: free_aggregates(&rows, p.profile_tolerance),
        assertions,
        wall_clock_seconds: clock.seconds(),
        seeds: SeedProvenance::new(p.seed),
    };
    Ok(ExperimentOutput {
        rows,
        checkpoints: Vec::new(),
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct RangeParams {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Assert this fraction of trials grow strictly between `H/10` and `H`.
    #[arg(long)]
    pub min_growth_fraction: Option<f64>,
    /// Assert at least one trial keeps the same range over that span.
    #[arg(long)]
    pub expect_frozen: bool,
}

impl RangeParams {
    pub fn new(alpha: f64, beta: f64, trials: u64, horizon: u64, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            trials,
            horizon,
            seed,
            min_growth_fraction: None,
            expect_frozen: false,
        }
    }
}

/// Range at `H/10` and `H` for free walks.
pub fn range_growth_experiment(
    params: &RangeParams,
    threads: usize,
) -> Result<ExperimentOutput<FreeTrialRow>, ExperimentError> {
    let clock = Clock::start();
    let p = params;
    let rows = run_all(p.alpha, p.beta, p.trials, p.horizon, p.seed, threads)?;
    let mut assertions = Vec::new();
    if let Some(min) = p.min_growth_fraction {
        assertions.push(growth_assertion(&rows, min));
    }
    if p.expect_frozen {
        let frozen = rows.iter().filter(|r| r.range_final == r.range_early).count();
        assertions.push(Assertion::new(
            "frozen_range",
            frozen > 0,
            format!("{frozen} trials with unchanged range"),
        ));
    }
    let summary = ExperimentSummary {
        experiment: "range".into(),
        parameters: serde_json::to_value(p).expect("plain data"),
        trials: p.trials,
        horizon: p.horizon,
        aggregates: free_aggregates(&rows, 0.05),
        assertions,
        wall_clock_seconds: clock.seconds(),
        seeds: SeedProvenance::new(p.seed),
    };
    Ok(ExperimentOutput {
        rows,
        checkpoints: Vec::new(),
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::rows_to_string;

    #[test]
    fn single_trial_reproducible() {
        let a = run_free_trial(0.8, 1.0, 20_000, 0, 77).unwrap();
        let b = run_free_trial(0.8, 1.0, 20_000, 0, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_horizon() {
        let r = run_free_trial(0.8, 1.0, 0, 0, 1).unwrap();
        assert!(!r.verdict.trapped);
        assert_eq!((r.range_early, r.range_final), (1, 1));
    }

    #[test]
    fn strong_alpha_traps_on_four_sites() {
        let out = trapping_probability_experiment(
            &TrappingParams {
                expect_sites: Some(4),
                ..TrappingParams::new(0.8, 1.0, 20, 20_000, 3)
            },
            2,
        )
        .unwrap();
        assert!(out.summary.passed(), "{:?}", out.summary.assertions);
        let csv = rows_to_string(&out.rows);
        assert!(csv.starts_with(FreeTrialRow::HEADER));
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn untrapped_rows_leave_interval_blank() {
        let row = FreeTrialRow {
            trial: 3,
            seed: 9,
            verdict: TrapVerdict {
                trapped: false,
                x: -4,
                interior_length: 10,
                site_count: 12,
            },
            profile_err: None,
            range_early: 5,
            range_final: 40,
        };
        assert_eq!(row.fields(), "3,9,0,,,,,5,40");
    }
}
