//! The walk itself: local times, the stream felt by the walker, and the
//! free and force-confined step rules.
//!
//! Sites are integers, and edge `j` joins sites `j-1` and `j`. A walker at
//! site `x` that steps right traverses edge `x+1`; stepping left traverses
//! edge `x`. The walker at `x` jumps right with probability
//! `1 / (1 + exp(-2βΔ))`, where `Δ` is the kernel stream at `x`.
//!
//! The confined walk lives on `{0, ..., L+1}` and is pushed inwards
//! deterministically from both endpoints.

mod kernel;
mod local_time;
mod stream_field;
mod trajectory;

pub use kernel::InteractionKernel;
pub use local_time::LocalTimeField;
pub use stream_field::StreamField;
pub use trajectory::{
    geometric_checkpoints, read_local_times_csv, read_trajectory_csv, run_walk, run_walk_with,
    write_local_times_csv, write_trajectory_csv, Recording, Snapshot, StepRecord, TrajectoryLog,
};

use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::uniform01;

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("beta must be positive and finite, got {0}")]
    InvalidBeta(f64),
    #[error("alpha must be finite, got {0}")]
    InvalidAlpha(f64),
    #[error("confinement length L must be at least 1, got {0}")]
    InvalidConfinement(usize),
}

/// Parameters of a single walk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParameters {
    pub alpha: f64,
    pub beta: f64,
    pub kernel: InteractionKernel,
    /// Interior length `L`; the walk is then confined to `{0, ..., L+1}`.
    pub confinement: Option<usize>,
    pub seed: u64,
}

impl WalkParameters {
    /// Free walk with the four-edge kernel.
    pub fn new(alpha: f64, beta: f64, seed: u64) -> Self {
        Self {
            alpha,
            beta,
            kernel: InteractionKernel::nearest(alpha),
            confinement: None,
            seed,
        }
    }

    pub fn confined(mut self, interior: usize) -> Self {
        self.confinement = Some(interior);
        self
    }

    pub fn with_kernel(mut self, kernel: InteractionKernel) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn validate(&self) -> Result<(), WalkError> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(WalkError::InvalidBeta(self.beta));
        }
        if !self.alpha.is_finite() {
            return Err(WalkError::InvalidAlpha(self.alpha));
        }
        match self.confinement {
            Some(l) if l < 1 => Err(WalkError::InvalidConfinement(l)),
            _ => Ok(()),
        }
    }
}

/// Probability of a right jump under stream `delta`.
///
/// Evaluated as the logistic `1/(1+exp(-2βΔ))` with a single `exp` of a
/// non-positive argument, so it never overflows.
#[inline]
pub fn right_probability(beta: f64, delta: f64) -> f64 {
    let x = 2.0 * beta * delta;
    let e = (-x.abs()).exp();
    let r = 1.0 / (1.0 + e);
    if x >= 0.0 {
        r
    } else {
        e * r
    }
}

/// `ln` of [`right_probability`], accurate in both tails.
#[inline]
pub fn ln_right_probability(beta: f64, delta: f64) -> f64 {
    let x = 2.0 * beta * delta;
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Position, clock and local times of one walker.
#[derive(Clone, Debug)]
pub struct WalkState {
    position: i64,
    n: u64,
    local_times: LocalTimeField,
    params: WalkParameters,
}

impl WalkState {
    pub fn new(params: WalkParameters) -> Result<Self, WalkError> {
        params.validate()?;
        let local_times = match params.confinement {
            Some(l) => LocalTimeField::with_span(0, l as i64 + 2),
            None => LocalTimeField::new(),
        };
        Ok(Self {
            position: 0,
            n: 0,
            local_times,
            params,
        })
    }

    pub fn position(&self) -> i64 {
        self.position
    }

    /// Number of steps taken.
    pub fn steps(&self) -> u64 {
        self.n
    }

    pub fn local_times(&self) -> &LocalTimeField {
        &self.local_times
    }

    pub fn params(&self) -> &WalkParameters {
        &self.params
    }

    /// Stream `Δ(n, j)` at site `j`.
    #[inline]
    pub fn delta_at(&self, site: i64) -> f64 {
        self.params.kernel.stream(&self.local_times, site)
    }

    /// Stream felt by the walker, `Δ_n = Δ(n, X_n)`.
    #[inline]
    pub fn drift(&self) -> f64 {
        self.delta_at(self.position)
    }

    /// Probability that the next jump goes right, ignoring confinement.
    #[inline]
    pub fn step_probability_right(&self) -> f64 {
        right_probability(self.params.beta, self.drift())
    }

    /// Advances by one step using `rng`, honouring confinement if present.
    #[inline]
    pub fn step<R: RngCore + ?Sized>(&mut self, rng: &mut R) -> StepRecord {
        if self.is_forced() {
            // Boundary moves consume no randomness.
            self.step_with_uniform(0.0)
        } else {
            self.step_with_uniform(uniform01(rng))
        }
    }

    /// True when the next move is deterministic (confined walk at an endpoint).
    #[inline]
    pub fn is_forced(&self) -> bool {
        match self.params.confinement {
            Some(l) => self.position == 0 || self.position == l as i64 + 1,
            None => false,
        }
    }

    /// Advances by one step given the uniform variate `u`: right iff `u < p_right`.
    #[inline]
    pub fn step_with_uniform(&mut self, u: f64) -> StepRecord {
        let delta = self.drift();
        let dir: i8 = match self.params.confinement {
            Some(_) if self.position == 0 => 1,
            Some(l) if self.position == l as i64 + 1 => -1,
            _ => {
                if u < right_probability(self.params.beta, delta) {
                    1
                } else {
                    -1
                }
            }
        };
        self.apply(dir, delta)
    }

    #[inline]
    fn apply(&mut self, dir: i8, delta: f64) -> StepRecord {
        let record = StepRecord {
            n: self.n,
            position: self.position,
            delta,
            dir,
        };
        let edge = if dir > 0 {
            self.position + 1
        } else {
            self.position
        };
        self.local_times.increment(edge);
        self.position += dir as i64;
        self.n += 1;
        debug_assert_eq!(self.local_times.total(), self.n);
        record
    }

    /// Forces a move in direction `dir` (`±1`) regardless of the law.
    ///
    /// Used to replay recorded paths.
    pub fn force_step(&mut self, dir: i8) -> StepRecord {
        assert!(dir == 1 || dir == -1, "direction must be ±1");
        let delta = self.drift();
        self.apply(dir, delta)
    }
}

/// One free step; the state must be unconfined.
pub fn step_free<R: RngCore + ?Sized>(state: &mut WalkState, rng: &mut R) -> StepRecord {
    debug_assert!(state.params.confinement.is_none());
    state.step(rng)
}

/// One confined step: inward from the endpoints, free law inside.
pub fn step_confined<R: RngCore + ?Sized>(state: &mut WalkState, rng: &mut R) -> StepRecord {
    debug_assert!(state.params.confinement.is_some());
    state.step(rng)
}
