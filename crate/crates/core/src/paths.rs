//! Deterministic diagnostics over recorded trajectories of the confined walk.
//!
//! Everything here is a pure function of a [`TrajectoryLog`] and the
//! interior length `L`. Interior sites are `1..=L`; the streams `Δ(n, j)`
//! are recomputed by replaying the recorded path, while the stream felt by
//! the walker is taken from the log's own records.
//!
//! An *upstream jump* is a jump from an interior site against the strict
//! sign of the stream felt there; its intensity is `|Δ_n|`. Steps with
//! `Δ_n = 0` are never upstream.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::{uniform01, walk_rng};
use crate::walk::{InteractionKernel, LocalTimeField, StepRecord, StreamField, TrajectoryLog};

/// Random `(n1, n2)` pairs sampled by the stream-Lipschitz check, on top of
/// every single step.
pub const LIPSCHITZ_RANDOM_PAIRS: usize = 10_000;

const LIPSCHITZ_PAIR_SEED: u64 = 0x11f5_c412_7a1b_0c3d;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("log holds thinned snapshots; per-step records are required")]
    NotFull,
    #[error("interior length L must be at least 1")]
    InvalidLength,
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("record {0} does not continue the previous step")]
    BrokenPath(u64),
}

/// Which way a stream pushes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Positive streams, pushing right.
    Right,
    /// Negative streams, pushing left.
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpstreamJump {
    pub n: u64,
    pub position: i64,
    pub intensity: f64,
}

/// Time and site at which a stream first reached its threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamAppearance {
    pub n: u64,
    pub site: i64,
}

/// Streams `Δ(n, j)` for every time `n = 0..=N` and site `j = 0..=L+1`,
/// with the walker's positions.
#[derive(Clone, Debug)]
pub struct StreamSeries {
    interior: usize,
    width: usize,
    values: Vec<f64>,
    positions: Vec<i64>,
}

impl StreamSeries {
    /// Replays a full log.
    pub fn from_log(log: &TrajectoryLog, interior: usize) -> Result<Self, PathError> {
        if !log.is_full() {
            return Err(PathError::NotFull);
        }
        for w in log.records.windows(2) {
            if w[1].position != w[0].position + w[0].dir as i64 {
                return Err(PathError::BrokenPath(w[1].n));
            }
        }
        if let Some(last) = log.records.last() {
            if log.final_position != last.position + last.dir as i64 {
                return Err(PathError::BrokenPath(last.n + 1));
            }
        }
        Self::from_positions(&log.params.kernel, &log.positions(), interior)
    }

    /// Replays a nearest-neighbour position sequence with zero initial local time.
    pub fn from_positions(
        kernel: &InteractionKernel,
        positions: &[i64],
        interior: usize,
    ) -> Result<Self, PathError> {
        if interior == 0 {
            return Err(PathError::InvalidLength);
        }
        let width = interior + 2;
        let mut field = StreamField::new(kernel.clone(), 0, interior as i64 + 1);
        let mut values = Vec::with_capacity(positions.len() * width);
        values.extend(field.values());
        for (n, w) in positions.windows(2).enumerate() {
            let edge = match w[1] - w[0] {
                1 => w[1],
                -1 => w[0],
                _ => return Err(PathError::BrokenPath(n as u64)),
            };
            field.record(edge);
            values.extend(field.values());
        }
        Ok(Self {
            interior,
            width,
            values,
            positions: positions.to_vec(),
        })
    }

    /// Streams computed directly from a sequence of local-time fields, one
    /// per time. The fields need not be consistent with any path.
    pub fn from_local_time_sequence(
        kernel: &InteractionKernel,
        interior: usize,
        fields: &[LocalTimeField],
        positions: &[i64],
    ) -> Result<Self, PathError> {
        if interior == 0 {
            return Err(PathError::InvalidLength);
        }
        assert_eq!(fields.len(), positions.len());
        let width = interior + 2;
        let mut values = Vec::with_capacity(fields.len() * width);
        for lt in fields {
            values.extend((0..width as i64).map(|j| kernel.stream(lt, j)));
        }
        Ok(Self {
            interior,
            width,
            values,
            positions: positions.to_vec(),
        })
    }

    pub fn interior(&self) -> usize {
        self.interior
    }

    /// Number of steps `N`; times run over `0..=N`.
    pub fn steps(&self) -> u64 {
        (self.positions.len() - 1) as u64
    }

    pub fn position(&self, n: u64) -> i64 {
        self.positions[n as usize]
    }

    /// `Δ(n, site)` for `site ∈ 0..=L+1`.
    #[inline]
    pub fn stream(&self, n: u64, site: i64) -> f64 {
        assert!((0..self.width as i64).contains(&site), "site {site} outside 0..=L+1");
        self.values[n as usize * self.width + site as usize]
    }

    /// `max_{j ∈ 1..=L} |Δ(n, j)|` and the site attaining it (smallest on ties).
    pub fn max_interior(&self, n: u64) -> (f64, i64) {
        (1..=self.interior as i64)
            .map(|j| (self.stream(n, j).abs(), j))
            .fold((-1.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
    }

    /// First `n` with `Δ(n, j) ≥ γ^{jL} M` for some interior `j` (right side),
    /// or `Δ(n, L+1−j) ≤ −γ^{jL} M` (left side). Reports the largest such `j`
    /// at that time.
    pub fn first_appearance(
        &self,
        threshold: f64,
        gamma: f64,
        side: Side,
    ) -> Result<Option<StreamAppearance>, PathError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(PathError::InvalidGamma(gamma));
        }
        let l = self.interior as i64;
        let levels: Vec<f64> = (1..=l)
            .map(|j| gamma.powi((j * l) as i32) * threshold)
            .collect();
        for n in 0..=self.steps() {
            let hit = (1..=l).rev().find(|&j| {
                let level = levels[(j - 1) as usize];
                match side {
                    Side::Right => self.stream(n, j) >= level,
                    Side::Left => self.stream(n, l + 1 - j) <= -level,
                }
            });
            if let Some(j) = hit {
                let site = match side {
                    Side::Right => j,
                    Side::Left => l + 1 - j,
                };
                return Ok(Some(StreamAppearance { n, site }));
            }
        }
        Ok(None)
    }
}

fn require_full(log: &TrajectoryLog, interior: usize) -> Result<(), PathError> {
    if interior == 0 {
        return Err(PathError::InvalidLength);
    }
    if !log.is_full() {
        return Err(PathError::NotFull);
    }
    Ok(())
}

/// Every jump from an interior site against the strict sign of `Δ_n`.
pub fn upstream_jumps(log: &TrajectoryLog, interior: usize) -> Result<Vec<UpstreamJump>, PathError> {
    require_full(log, interior)?;
    let l = interior as i64;
    Ok(log
        .records
        .iter()
        .filter(|r| (1..=l).contains(&r.position))
        .filter(|r| (r.delta > 0.0 && r.dir < 0) || (r.delta < 0.0 && r.dir > 0))
        .map(|r| UpstreamJump {
            n: r.n,
            position: r.position,
            intensity: r.delta.abs(),
        })
        .collect())
}

/// `σ(M)`: the first upstream jump of intensity strictly greater than `M`.
pub fn first_upstream_exceeding(
    log: &TrajectoryLog,
    interior: usize,
    threshold: f64,
) -> Result<Option<u64>, PathError> {
    Ok(upstream_jumps(log, interior)?
        .into_iter()
        .find(|u| u.intensity > threshold)
        .map(|u| u.n))
}

/// `θ₊(M)` or `θ₋(M)`; see [`StreamSeries::first_appearance`].
pub fn first_stream_appearance(
    log: &TrajectoryLog,
    interior: usize,
    threshold: f64,
    gamma: f64,
    side: Side,
) -> Result<Option<StreamAppearance>, PathError> {
    require_full(log, interior)?;
    StreamSeries::from_log(log, interior)?.first_appearance(threshold, gamma, side)
}

/// Recovers `α` of the four-edge kernel from recorded drifts.
///
/// `Δ_n = A_n + α B_n` with integer `A_n = ℓ(x) − ℓ(x+1)` and
/// `B_n = ℓ(x+2) − ℓ(x−1)` at the walker's site `x`; the first record with
/// `B_n ≠ 0` fixes `α`. `None` if there is no such record.
pub fn infer_alpha(records: &[StepRecord]) -> Option<f64> {
    let mut lt = LocalTimeField::new();
    for r in records {
        let x = r.position;
        let b = lt.get(x + 2) as i64 - lt.get(x - 1) as i64;
        if b != 0 {
            let a = lt.get(x) as i64 - lt.get(x + 1) as i64;
            return Some((r.delta - a as f64) / b as f64);
        }
        lt.increment(if r.dir > 0 { x + 1 } else { x });
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamPoint {
    pub n: u64,
    /// `max_{j ∈ 1..=L} |Δ(n, j)|`.
    pub max_abs: f64,
    pub site: i64,
    /// Largest `max_abs` over all points up to this one.
    pub running_max: f64,
}

/// Interior stream maxima, one point per step of a full log or per snapshot
/// of a thinned one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamReport {
    pub points: Vec<StreamPoint>,
}

impl StreamReport {
    /// Latest point at or before `n`.
    pub fn at(&self, n: u64) -> Option<&StreamPoint> {
        let idx = self.points.partition_point(|p| p.n <= n);
        idx.checked_sub(1).map(|i| &self.points[i])
    }

    pub fn overall_max(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.running_max)
    }
}

pub fn max_interior_stream(log: &TrajectoryLog, interior: usize) -> Result<StreamReport, PathError> {
    if interior == 0 {
        return Err(PathError::InvalidLength);
    }
    let mut raw: Vec<(u64, f64, i64)> = Vec::new();
    if log.is_full() {
        let series = StreamSeries::from_log(log, interior)?;
        for n in 0..=series.steps() {
            let (m, j) = series.max_interior(n);
            raw.push((n, m, j));
        }
    } else {
        let kernel = &log.params.kernel;
        let fresh = LocalTimeField::new();
        let fields = std::iter::once((0, &fresh))
            .chain(log.snapshots.iter().map(|s| (s.n, &s.local_times)));
        for (n, lt) in fields {
            let (m, j) = (1..=interior as i64)
                .map(|j| (kernel.stream(lt, j).abs(), j))
                .fold((-1.0, 0), |b, c| if c.0 > b.0 { c } else { b });
            raw.push((n, m, j));
        }
    }
    let mut running = 0.0f64;
    let points = raw
        .into_iter()
        .map(|(n, max_abs, site)| {
            running = running.max(max_abs);
            StreamPoint {
                n,
                max_abs,
                site,
                running_max: running,
            }
        })
        .collect();
    Ok(StreamReport { points })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzViolation {
    pub n1: u64,
    pub n2: u64,
    pub site: i64,
    /// `|Δ(n2, j) − Δ(n1, j)|`.
    pub change: f64,
    /// `K · (n2 − n1)` with `K` the kernel's Lipschitz constant.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    /// `max_i |c_i|`, which is 1 for the four-edge kernel with `|α| ≤ 1`.
    pub constant: f64,
    pub pairs_checked: u64,
    pub first_violation: Option<LipschitzViolation>,
    /// First single step whose change is not one of `0, ±c_i`.
    pub first_bad_increment: Option<(u64, i64, f64)>,
    /// First record whose stored drift disagrees with the replayed stream.
    pub first_drift_mismatch: Option<u64>,
}

impl LipschitzReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
            && self.first_bad_increment.is_none()
            && self.first_drift_mismatch.is_none()
    }
}

/// Rounding allowance for a stream at time `n`: its terms are bounded by
/// `n Σ|c_i|`, and cancellation between them leaves absolute error of that
/// order times machine precision.
fn rounding_scale(kernel: &InteractionKernel, n: u64) -> f64 {
    let total: f64 = kernel.coefficients().iter().map(|c| c.abs()).sum();
    (n as f64 + 1.0) * total.max(1.0)
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-12 * scale
}

/// Checks `|Δ(n2, j) − Δ(n1, j)| ≤ K (n2 − n1)` at every interior site over
/// all single steps and `random_pairs` sampled pairs, plus membership of
/// each single-step change in `{0, ±c_i}`.
pub fn lipschitz_report(
    series: &StreamSeries,
    kernel: &InteractionKernel,
    random_pairs: usize,
) -> LipschitzReport {
    let constant = kernel.lipschitz_constant();
    let mut allowed = vec![0.0];
    for &c in kernel.coefficients() {
        allowed.push(c);
        allowed.push(-c);
    }
    let l = series.interior() as i64;
    let steps = series.steps();
    let mut report = LipschitzReport {
        constant,
        pairs_checked: 0,
        first_violation: None,
        first_bad_increment: None,
        first_drift_mismatch: None,
    };
    let check = |n1: u64, n2: u64, report: &mut LipschitzReport| {
        report.pairs_checked += 1;
        for j in 1..=l {
            let (a, b) = (series.stream(n1, j), series.stream(n2, j));
            let change = (b - a).abs();
            let bound = constant * (n2 - n1) as f64;
            let scale = rounding_scale(kernel, n2);
            if change > bound + 1e-12 * scale && report.first_violation.is_none() {
                report.first_violation = Some(LipschitzViolation {
                    n1,
                    n2,
                    site: j,
                    change,
                    bound,
                });
            }
            if n2 == n1 + 1
                && report.first_bad_increment.is_none()
                && !allowed.iter().any(|&c| close(b - a, c, scale))
            {
                report.first_bad_increment = Some((n1, j, b - a));
            }
        }
    };
    for n in 0..steps {
        check(n, n + 1, &mut report);
    }
    if steps >= 2 {
        let mut rng = walk_rng(LIPSCHITZ_PAIR_SEED ^ steps);
        for _ in 0..random_pairs {
            let a = (uniform01(&mut rng) * (steps + 1) as f64) as u64;
            let mut b = (uniform01(&mut rng) * steps as f64) as u64;
            if b >= a {
                b += 1;
            }
            let (n1, n2) = if a < b { (a, b) } else { (b, a) };
            check(n1, n2, &mut report);
        }
    }
    report
}

/// Stream-Lipschitz check on a full log, including a comparison of every
/// recorded drift against the replayed stream at the walker.
pub fn check_stream_lipschitz(log: &TrajectoryLog, interior: usize) -> Result<LipschitzReport, PathError> {
    require_full(log, interior)?;
    let series = StreamSeries::from_log(log, interior)?;
    let mut report = lipschitz_report(&series, &log.params.kernel, LIPSCHITZ_RANDOM_PAIRS);
    let mut replay = LocalTimeField::new();
    for r in &log.records {
        let fresh = log.params.kernel.stream(&replay, r.position);
        if !close(fresh, r.delta, rounding_scale(&log.params.kernel, r.n)) {
            report.first_drift_mismatch = Some(r.n);
            break;
        }
        replay.increment(if r.dir > 0 { r.position + 1 } else { r.position });
    }
    if report.first_drift_mismatch.is_none() {
        let stored: Vec<_> = log.final_local_times.iter().collect();
        let replayed: Vec<_> = replay.iter().collect();
        if stored != replayed {
            report.first_drift_mismatch = Some(log.steps);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ConfinementVerdict {
    PremiseNotMet(String),
    Holds,
    /// The walker was at `position` at time `n`, outside the predicted half.
    Violated { n: u64, position: i64 },
}

/// First upstream jump with intensity above `threshold`, from a series.
fn sigma_from_positions(
    series: &StreamSeries,
    deltas: &[f64],
    threshold: f64,
) -> Option<u64> {
    let l = series.interior() as i64;
    (0..series.steps()).find(|&n| {
        let x = series.position(n);
        let d = deltas[n as usize];
        let dir = series.position(n + 1) - x;
        (1..=l).contains(&x) && ((d > 0.0 && dir < 0) || (d < 0.0 && dir > 0)) && d.abs() > threshold
    })
}

/// Confinement check on a stream series with the drifts felt by the walker.
///
/// Premise: `M > 1`, `1 ≤ j ≤ L`, `n1 < n2 ≤ N`, no upstream jump of
/// intensity above `M` at any step `≤ n2`, and `Δ(n, j) > M + 1` throughout
/// `[n1, n2]` (right side; `< −(M+1)` for the left side). Conclusion: the
/// walker stays in `{j, ..., L+1}` (right) or `{0, ..., j}` (left) for all
/// `n ∈ [n1, n2]`.
pub fn confinement_on_series(
    series: &StreamSeries,
    deltas: &[f64],
    site: i64,
    threshold: f64,
    n1: u64,
    n2: u64,
    side: Side,
) -> ConfinementVerdict {
    let l = series.interior() as i64;
    if !(threshold > 1.0) {
        return ConfinementVerdict::PremiseNotMet("M must exceed 1".into());
    }
    if !(1..=l).contains(&site) {
        return ConfinementVerdict::PremiseNotMet(format!("site {site} is not interior"));
    }
    if !(n1 < n2 && n2 <= series.steps()) {
        return ConfinementVerdict::PremiseNotMet("need n1 < n2 <= N".into());
    }
    if let Some(s) = sigma_from_positions(series, deltas, threshold) {
        if s <= n2 {
            return ConfinementVerdict::PremiseNotMet(format!("upstream jump above M at step {s}"));
        }
    }
    let strong = |n: u64| match side {
        Side::Right => series.stream(n, site) > threshold + 1.0,
        Side::Left => series.stream(n, site) < -(threshold + 1.0),
    };
    if let Some(n) = (n1..=n2).find(|&n| !strong(n)) {
        return ConfinementVerdict::PremiseNotMet(format!("stream not above M+1 at time {n}"));
    }
    for n in n1..=n2 {
        let x = series.position(n);
        let inside = match side {
            Side::Right => x >= site,
            Side::Left => x <= site,
        };
        if !inside {
            return ConfinementVerdict::Violated { n, position: x };
        }
    }
    ConfinementVerdict::Holds
}

fn recorded_deltas(log: &TrajectoryLog) -> Vec<f64> {
    log.records.iter().map(|r| r.delta).collect()
}

/// Confinement check for one instance `(j, M, n1, n2)` on a full log.
pub fn check_confinement_property(
    log: &TrajectoryLog,
    interior: usize,
    site: i64,
    threshold: f64,
    n1: u64,
    n2: u64,
    side: Side,
) -> Result<ConfinementVerdict, PathError> {
    require_full(log, interior)?;
    let series = StreamSeries::from_log(log, interior)?;
    Ok(confinement_on_series(
        &series,
        &recorded_deltas(log),
        site,
        threshold,
        n1,
        n2,
        side,
    ))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfinementScan {
    pub checked: u64,
    pub held: u64,
    /// `(site, M, side, n1, n2, verdict)` for every violated instance.
    pub violations: Vec<(i64, f64, Side, u64, u64, ConfinementVerdict)>,
}

/// Thresholds `M` used by [`scan_confinement_instances`]: `1.5 · √2^k`
/// below the largest interior stream.
pub fn scan_thresholds(max_stream: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut m = 1.5f64;
    while m + 1.0 < max_stream {
        out.push(m);
        m *= std::f64::consts::SQRT_2;
    }
    out
}

/// Checks every maximal premise window for each interior site, each side
/// and each threshold in `thresholds`.
pub fn scan_confinement_on_series(
    series: &StreamSeries,
    deltas: &[f64],
    thresholds: &[f64],
) -> ConfinementScan {
    let mut scan = ConfinementScan::default();
    let l = series.interior() as i64;
    let steps = series.steps();
    for &m in thresholds {
        let limit = match sigma_from_positions(series, deltas, m) {
            Some(s) if s == 0 => continue,
            Some(s) => (s - 1).min(steps),
            None => steps,
        };
        for side in [Side::Right, Side::Left] {
            for j in 1..=l {
                let strong = |n: u64| match side {
                    Side::Right => series.stream(n, j) > m + 1.0,
                    Side::Left => series.stream(n, j) < -(m + 1.0),
                };
                let mut n = 0;
                while n <= limit {
                    if !strong(n) {
                        n += 1;
                        continue;
                    }
                    let start = n;
                    while n < limit && strong(n + 1) {
                        n += 1;
                    }
                    if n > start {
                        let verdict = confinement_on_series(series, deltas, j, m, start, n, side);
                        scan.checked += 1;
                        match verdict {
                            ConfinementVerdict::Holds => scan.held += 1,
                            v => scan.violations.push((j, m, side, start, n, v)),
                        }
                    }
                    n += 1;
                }
            }
        }
    }
    scan
}

/// [`scan_confinement_on_series`] over a full log with [`scan_thresholds`].
pub fn scan_confinement_instances(log: &TrajectoryLog, interior: usize) -> Result<ConfinementScan, PathError> {
    require_full(log, interior)?;
    let series = StreamSeries::from_log(log, interior)?;
    let max = (0..=series.steps())
        .map(|n| series.max_interior(n).0)
        .fold(0.0, f64::max);
    Ok(scan_confinement_on_series(
        &series,
        &recorded_deltas(log),
        &scan_thresholds(max),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PropositionVerdict {
    /// No interior stream ever exceeded `D`.
    HoldsVacuously,
    /// The first time `n` an interior stream exceeded `D` was preceded by an
    /// upstream jump of intensity above `εD` at step `sigma < n`.
    Holds { n: u64, sigma: u64 },
    /// An interior stream exceeded `D` at time `n` with no earlier upstream
    /// jump above `εD`.
    Violated { n: u64 },
}

impl PropositionVerdict {
    pub fn holds(&self) -> bool {
        !matches!(self, PropositionVerdict::Violated { .. })
    }
}

/// For every prefix of the path, either all interior streams are at most
/// `D` in absolute value, or an upstream jump of intensity above `εD` has
/// already happened.
pub fn proposition_on_series(
    series: &StreamSeries,
    deltas: &[f64],
    eps: f64,
    bound: f64,
) -> PropositionVerdict {
    let first_exceed = (0..=series.steps()).find(|&n| series.max_interior(n).0 > bound);
    match first_exceed {
        None => PropositionVerdict::HoldsVacuously,
        Some(n) => match sigma_from_positions(series, deltas, eps * bound) {
            Some(sigma) if sigma < n => PropositionVerdict::Holds { n, sigma },
            _ => PropositionVerdict::Violated { n },
        },
    }
}

pub fn check_proposition_instance(
    log: &TrajectoryLog,
    interior: usize,
    eps: f64,
    bound: f64,
) -> Result<PropositionVerdict, PathError> {
    require_full(log, interior)?;
    let series = StreamSeries::from_log(log, interior)?;
    Ok(proposition_on_series(&series, &recorded_deltas(log), eps, bound))
}

/// Reference constants for a given `γ`: `ε = γ^{L(L+1)}`, `D_0 = 10/ε`.
///
/// They assume `γ < 10⁻²` (and below a non-explicit continuity bound),
/// so these are far beyond anything a simulation can reach.
pub fn proposition_constants(gamma: f64, interior: usize) -> (f64, f64) {
    let l = interior as i32;
    let eps = gamma.powi(l * (l + 1));
    (eps, 10.0 / eps)
}
