//! Independent oracles shared by the integration tests and the acceptance run.
//!
//! Nothing here goes through the crate's stream machinery: local times are
//! recounted from positions and streams are expanded by hand.

#![allow(dead_code)]

use trapwalk::paths::{
    confinement_on_series, lipschitz_report, proposition_on_series, ConfinementVerdict,
    PropositionVerdict, Side, StreamSeries,
};
use trapwalk::walk::InteractionKernel;

/// `α_L` from the cosine characterization: the unique `α > 1/3` with
/// `ω = 2π/(L+2)` where `cos ω = (1 − α)/(2α)`, so `α = 1/(2 cos ω + 1)`.
pub fn threshold_oracle(l: usize) -> f64 {
    if l == 1 {
        return f64::INFINITY;
    }
    let omega = 2.0 * std::f64::consts::PI / (l as f64 + 2.0);
    1.0 / (2.0 * omega.cos() + 1.0)
}

/// Margin used to keep grids off the critical points.
pub fn margin(lo: f64, hi: f64) -> f64 {
    1e-3f64.min((hi - lo) / 10.0)
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let m = margin(lo, hi);
    let (a, b) = (lo + m, hi - m);
    (0..points)
        .map(|i| a + (b - a) * i as f64 / (points - 1) as f64)
        .collect()
}

/// 50 points strictly inside `(max(1/3, α_{L+1}), α_L)`, with `α_1` capped at 10.
pub fn trap_grid(l: usize) -> Vec<f64> {
    let hi = threshold_oracle(l).min(10.0);
    let lo = threshold_oracle(l + 1).max(1.0 / 3.0);
    grid(lo, hi, 50)
}

/// 50 points strictly inside `(1/3, α_{L+1})`.
pub fn escape_grid(l: usize) -> Vec<f64> {
    grid(1.0 / 3.0, threshold_oracle(l + 1), 50)
}

/// Every nearest-neighbour path on `{0, ..., L+1}` of `len` steps from 0,
/// pushed inwards at both ends.
pub fn confined_paths(l: i64, len: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut path = vec![0i64];
    fn go(l: i64, len: usize, path: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if path.len() == len + 1 {
            out.push(path.clone());
            return;
        }
        let x = *path.last().unwrap();
        let moves: &[i64] = if x == 0 {
            &[1]
        } else if x == l + 1 {
            &[-1]
        } else {
            &[-1, 1]
        };
        for &d in moves {
            path.push(x + d);
            go(l, len, path, out);
            path.pop();
        }
    }
    go(l, len, &mut path, &mut out);
    out
}

/// `ℓ(n, e)` for every `n ≤ N` and edges `e ∈ -1..=L+3`, stored with offset 1.
pub fn local_time_table(path: &[i64], l: i64) -> Vec<Vec<i64>> {
    let edges = (l + 5) as usize;
    let mut table = vec![vec![0i64; edges]];
    for w in path.windows(2) {
        let mut row = table.last().unwrap().clone();
        let e = w[0].max(w[1]);
        row[(e + 1) as usize] += 1;
        table.push(row);
    }
    table
}

/// `Δ(n, j) = ℓ(j) − ℓ(j+1) − α(ℓ(j−1) − ℓ(j+2))`, by hand.
pub fn stream_table(path: &[i64], l: i64, alpha: f64) -> Vec<Vec<f64>> {
    local_time_table(path, l)
        .iter()
        .map(|lt| {
            let at = |e: i64| lt[(e + 1) as usize] as f64;
            (0..=l + 1)
                .map(|j| (at(j) - at(j + 1)) - alpha * (at(j - 1) - at(j + 2)))
                .collect()
        })
        .collect()
}

/// First step `n` at an interior site whose jump opposes the strict sign of
/// `Δ_n` and whose intensity exceeds `m`.
pub fn sigma_oracle(path: &[i64], streams: &[Vec<f64>], l: i64, m: f64) -> Option<usize> {
    (0..path.len() - 1).find(|&n| {
        let x = path[n];
        let d = streams[n][x as usize];
        let dir = path[n + 1] - x;
        (1..=l).contains(&x) && d * (dir as f64) < 0.0 && d.abs() > m
    })
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ExhaustiveReport {
    pub paths: usize,
    pub lipschitz_pairs: u64,
    pub lipschitz_violations: u64,
    pub bad_increments: u64,
    pub library_lipschitz_failures: u64,
    pub premise_instances: u64,
    pub confinement_violations: u64,
    pub library_disagreements: u64,
    pub proposition_instances: u64,
    pub proposition_disagreements: u64,
}

impl ExhaustiveReport {
    pub fn clean(&self) -> bool {
        self.lipschitz_violations == 0
            && self.bad_increments == 0
            && self.library_lipschitz_failures == 0
            && self.confinement_violations == 0
            && self.library_disagreements == 0
            && self.proposition_disagreements == 0
            && self.premise_instances > 0
    }
}

/// Thresholds `M > 1` at which the confinement premise can change, one
/// representative per region between consecutive breakpoints.
fn threshold_representatives(streams: &[Vec<f64>], l: i64) -> Vec<f64> {
    let mut breaks: Vec<f64> = vec![1.0];
    for row in streams {
        for j in 0..=l + 1 {
            let v = row[j as usize].abs();
            breaks.push(v);
            breaks.push(v - 1.0);
        }
    }
    breaks.retain(|&b| b >= 1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut reps: Vec<f64> = breaks.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    reps.push(breaks.last().unwrap() + 0.5);
    reps
}

/// All confined `L = 2` paths of `len` steps at the given `α`: every pair
/// of times for the Lipschitz bound, every `(j, M, side, n1, n2)` for the
/// confinement property, and a grid of `(ε, D)` for the implication check.
/// Shorter paths are prefixes, and every instance on a prefix is an instance
/// on each of its extensions.
pub fn exhaustive_check(alpha: f64, len: usize) -> ExhaustiveReport {
    let l = 2i64;
    let kernel = InteractionKernel::nearest(alpha);
    let k = alpha.abs().max(1.0);
    let mut rep = ExhaustiveReport::default();
    let eps_grid = [0.05, 0.1, 0.25, 0.5, 1.0];
    let d_grid = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0];
    for path in confined_paths(l, len) {
        rep.paths += 1;
        let streams = stream_table(&path, l, alpha);
        let deltas: Vec<f64> = (0..len).map(|n| streams[n][path[n] as usize]).collect();
        let n_max = len;

        for n1 in 0..=n_max {
            for n2 in n1 + 1..=n_max {
                rep.lipschitz_pairs += 1;
                for j in 1..=l as usize {
                    let change = (streams[n2][j] - streams[n1][j]).abs();
                    if change > k * (n2 - n1) as f64 + 1e-12 {
                        rep.lipschitz_violations += 1;
                    }
                    if n2 == n1 + 1 {
                        let d = streams[n2][j] - streams[n1][j];
                        let ok = [0.0, 1.0, -1.0, alpha, -alpha]
                            .iter()
                            .any(|&c| (d - c).abs() < 1e-12);
                        if !ok {
                            rep.bad_increments += 1;
                        }
                    }
                }
            }
        }

        let series = StreamSeries::from_positions(&kernel, &path, l as usize).unwrap();
        if !lipschitz_report(&series, &kernel, 0).holds() {
            rep.library_lipschitz_failures += 1;
        }

        for m in threshold_representatives(&streams, l) {
            let sigma = sigma_oracle(&path, &streams, l, m);
            let limit = sigma.map_or(n_max, |s| s.min(n_max + 1).saturating_sub(1));
            if sigma == Some(0) {
                continue;
            }
            for side in [Side::Right, Side::Left] {
                for j in 1..=l {
                    let strong = |n: usize| match side {
                        Side::Right => streams[n][j as usize] > m + 1.0,
                        Side::Left => streams[n][j as usize] < -(m + 1.0),
                    };
                    let inside = |n: usize| match side {
                        Side::Right => path[n] >= j,
                        Side::Left => path[n] <= j,
                    };
                    for n1 in 0..=limit {
                        if !strong(n1) {
                            continue;
                        }
                        let mut ok = inside(n1);
                        for n2 in n1 + 1..=limit {
                            if !strong(n2) {
                                break;
                            }
                            ok &= inside(n2);
                            rep.premise_instances += 1;
                            if !ok {
                                rep.confinement_violations += 1;
                            }
                            let lib = confinement_on_series(
                                &series, &deltas, j, m, n1 as u64, n2 as u64, side,
                            );
                            let agree = match lib {
                                ConfinementVerdict::Holds => ok,
                                ConfinementVerdict::Violated { .. } => !ok,
                                ConfinementVerdict::PremiseNotMet(_) => false,
                            };
                            if !agree {
                                rep.library_disagreements += 1;
                            }
                        }
                    }
                }
            }
        }

        for &eps in &eps_grid {
            for &d in &d_grid {
                rep.proposition_instances += 1;
                let first = (0..=n_max).find(|&n| {
                    (1..=l as usize).any(|j| streams[n][j].abs() > d)
                });
                let sigma = sigma_oracle(&path, &streams, l, eps * d);
                let expected_holds = match first {
                    None => true,
                    Some(t) => sigma.is_some_and(|s| s < t),
                };
                let lib = proposition_on_series(&series, &deltas, eps, d);
                let lib_vacuous = matches!(lib, PropositionVerdict::HoldsVacuously);
                if lib.holds() != expected_holds || lib_vacuous != first.is_none() {
                    rep.proposition_disagreements += 1;
                }
            }
        }
    }
    rep
}
