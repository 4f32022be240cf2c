//! Growth of the interior streams of the confined walk.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    run_trials, target_profile, Assertion, Clock, CsvRow, ExperimentError, ExperimentOutput,
    ExperimentSummary, SeedProvenance,
};
use crate::format::g17;
use crate::profile::boundary_streams;
use crate::rng::walk_rng;
use crate::walk::{geometric_checkpoints, StreamField, WalkParameters, WalkState};

/// The `c` fit ignores times before this, where `ln n` is tiny.
pub const FIT_START: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, clap::Args)]
pub struct StreamParams {
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
    /// Assert `max_j |Δ(H, j)| ≤` this `· H` in every repeat.
    #[arg(long)]
    pub max_stream_fraction: Option<f64>,
    /// Assert `|Δ(H,0)/H − d_0|` and `|Δ(H,L+1)/H − d_{L+1}|` are at most this.
    #[arg(long)]
    pub boundary_tolerance: Option<f64>,
    /// Assert the fitted `c` is finite with `max c / min c` at most this
    /// across repeats.
    #[arg(long)]
    pub max_fit_spread: Option<f64>,
}

impl StreamParams {
    pub fn new(alpha: f64, interior: usize, beta: f64, horizon: u64, seed: u64) -> Self {
        Self {
            alpha,
            interior,
            beta,
            horizon,
            per_decade: 4,
            seed,
            trials: 1,
            max_stream_fraction: None,
            boundary_tolerance: None,
            max_fit_spread: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamRow {
    pub trial: u64,
    pub seed: u64,
    /// `max_j |Δ(H, j)|` over interior `j`.
    pub final_max_stream: f64,
    /// Smallest `c` with `max_j |Δ(n, j)| ≤ c ln n` for all `FIT_START ≤ n ≤ H`.
    pub c_fit: f64,
    pub d0_estimate: f64,
    pub dl1_estimate: f64,
}

impl CsvRow for StreamRow {
    const HEADER: &'static str = "trial,seed,final_max_stream,c_fit,d0_estimate,dl1_estimate";
    fn fields(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.trial,
            self.seed,
            g17(self.final_max_stream),
            g17(self.c_fit),
            g17(self.d0_estimate),
            g17(self.dl1_estimate)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamCheckpoint {
    pub n: u64,
    pub max_stream: f64,
    /// `max_stream / ln n`.
    pub log_ratio: f64,
    /// `Δ(n, 0)/n` and `Δ(n, L+1)/n`.
    pub d0_rate: f64,
    pub dl1_rate: f64,
}

impl CsvRow for StreamCheckpoint {
    const HEADER: &'static str = "n,max_stream,log_ratio,d0_rate,dl1_rate";
    fn fields(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n,
            g17(self.max_stream),
            g17(self.log_ratio),
            g17(self.d0_rate),
            g17(self.dl1_rate)
        )
    }
}

fn one_run(
    p: &StreamParams,
    trial: u64,
    seed: u64,
) -> Result<(StreamRow, Vec<StreamCheckpoint>), ExperimentError> {
    let params = WalkParameters::new(p.alpha, p.beta, seed).confined(p.interior);
    let kernel = params.kernel.clone();
    let mut state = WalkState::new(params)?;
    let mut rng = walk_rng(seed);
    let l = p.interior as i64;
    let mut field = StreamField::new(kernel, 0, l + 1);
    let interior_max = |f: &StreamField| (1..=l).map(|j| f.get(j).abs()).fold(0.0, f64::max);
    let mut c_fit: f64 = 0.0;
    let mut out = Vec::new();
    for c in geometric_checkpoints(p.horizon, p.per_decade) {
        while state.steps() < c {
            let rec = state.step(&mut rng);
            field.record(if rec.dir > 0 { rec.position + 1 } else { rec.position });
            let n = state.steps();
            if n >= FIT_START {
                c_fit = c_fit.max(interior_max(&field) / (n as f64).ln());
            }
        }
        let m = interior_max(&field);
        out.push(StreamCheckpoint {
            n: c,
            max_stream: m,
            log_ratio: if c > 1 { m / (c as f64).ln() } else { f64::NAN },
            d0_rate: field.get(0) / c as f64,
            dl1_rate: field.get(l + 1) / c as f64,
        });
    }
    let last = out.last().cloned();
    let row = StreamRow {
        trial,
        seed,
        final_max_stream: last.as_ref().map_or(0.0, |c| c.max_stream),
        c_fit,
        d0_estimate: last.as_ref().map_or(0.0, |c| c.d0_rate),
        dl1_estimate: last.as_ref().map_or(0.0, |c| c.dl1_rate),
    };
    Ok((row, out))
}

/// Max interior stream against `ln n`, and the boundary-stream rates.
pub fn stream_growth_experiment(
    params: &StreamParams,
    threads: usize,
) -> Result<ExperimentOutput<StreamRow, StreamCheckpoint>, ExperimentError> {
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
    let results: Vec<_> = run_trials(p.trials, p.seed, threads, |i, s| one_run(p, i, s))?
        .into_iter()
        .collect::<Result<_, _>>()?;
    let (rows, mut traces): (Vec<StreamRow>, Vec<_>) = results.into_iter().unzip();
    let checkpoints = std::mem::take(&mut traces[0]);

    let h = p.horizon as f64;
    let worst_fraction = rows.iter().map(|r| r.final_max_stream / h).fold(0.0, f64::max);
    let c_min = rows.iter().map(|r| r.c_fit).fold(f64::INFINITY, f64::min);
    let c_max = rows.iter().map(|r| r.c_fit).fold(0.0, f64::max);
    let spread = c_max / c_min;
    let worst_d0 = rows.iter().map(|r| (r.d0_estimate - d0).abs()).fold(0.0, f64::max);
    let worst_dl1 = rows.iter().map(|r| (r.dl1_estimate - dl1).abs()).fold(0.0, f64::max);

    let mut assertions = Vec::new();
    if let Some(f) = p.max_stream_fraction {
        assertions.push(Assertion::new(
            "max_stream_sublinear",
            worst_fraction <= f,
            format!("max over repeats of max_j |Δ(H,j)|/H = {}", g17(worst_fraction)),
        ));
    }
    if let Some(t) = p.boundary_tolerance {
        assertions.push(Assertion::new(
            "boundary_stream_rate",
            worst_d0 <= t && worst_dl1 <= t,
            format!("deviations d0 {}, dL1 {}", g17(worst_d0), g17(worst_dl1)),
        ));
    }
    if let Some(s) = p.max_fit_spread {
        assertions.push(Assertion::new(
            "c_fit_stable",
            c_max.is_finite() && c_min > 0.0 && spread <= s,
            format!("c_fit in [{}, {}], spread {}", g17(c_min), g17(c_max), g17(spread)),
        ));
    }

    let summary = ExperimentSummary {
        experiment: "streams".into(),
        parameters: serde_json::to_value(p).expect("plain data"),
        trials: p.trials,
        horizon: p.horizon,
        aggregates: json!({
            "d0": d0,
            "dL1": dl1,
            "max_stream_fraction": worst_fraction,
            "c_fit_min": c_min,
            "c_fit_max": c_max,
            "c_fit_spread": spread,
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
    fn boundary_rates_approach_d0() {
        let out = stream_growth_experiment(&StreamParams::new(0.8, 2, 1.0, 200_000, 1), 1).unwrap();
        let r = &out.rows[0];
        assert!((r.d0_estimate - 2.2 / 19.0).abs() < 0.02, "{r:?}");
        assert!((r.dl1_estimate + 2.2 / 19.0).abs() < 0.02, "{r:?}");
        assert!(r.c_fit.is_finite() && r.c_fit > 0.0);
    }
}
