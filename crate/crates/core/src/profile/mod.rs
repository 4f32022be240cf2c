//! Trapping thresholds and the limiting local-time profile.
//!
//! For an interval `{0, ..., L+1}` the limiting profile `u_1..u_{L+1}` is the
//! normalized solution of "every interior stream vanishes". For `α > 1/3`
//! it lies on the periodic sequence `cos φ − cos(ωj + φ)` with
//! `cos ω = (1−α)/(2α)` and `φ = (2π − (L+2)ω)/2`, which vanishes at edges
//! `0` and `L+2`. It is strictly positive exactly when `α < α_L`, and the
//! signs of the streams just outside the interval, `d_0` and `d_{L+1}`,
//! decide whether a walk sitting on this profile is pushed back in
//! (`α_{L+1} < α < α_L`) or out (`α < α_{L+1}`).

mod linear;
mod regime;

pub use linear::{profile_matrix, solve_profile_system};
pub use regime::{
    classify_regime, regime_of, trapping_index, Regime, RegimeReport, Sign, CRITICAL_TOLERANCE,
};

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::walk::InteractionKernel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("interior length L must be at least 1, got {0}")]
    InvalidLength(usize),
    #[error("alpha = {alpha} is outside the closed-form domain (1/3, {upper}) for L = {interior}")]
    OutsideDomain {
        alpha: f64,
        interior: usize,
        upper: f64,
    },
    #[error("alpha = {0} has no real frequency: need alpha > 1/3")]
    NoFrequency(f64),
    #[error("profile system of size {size} is singular (condition estimate {condition_estimate:e})")]
    Singular {
        size: usize,
        condition_estimate: f64,
    },
    #[error("alpha = 0 has no backward extension")]
    ZeroAlpha,
    #[error("profile must have at least two entries, got {0}")]
    ShortProfile(usize),
}

/// Threshold `α_L = 1/(1 + 2cos(2π/(L+2)))`, with `α_1 = +∞`.
///
/// The cosine is evaluated as `sin(π(L−2)/(2(L+2)))`, which is exactly zero
/// at `L = 2` and so gives `α_2 = 1` exactly.
pub fn alpha_threshold(interior: usize) -> Result<f64, ProfileError> {
    match interior {
        0 => Err(ProfileError::InvalidLength(0)),
        1 => Ok(f64::INFINITY),
        l => {
            let l = l as f64;
            let cos = (PI * (l - 2.0) / (2.0 * (l + 2.0))).sin();
            Ok(1.0 / (1.0 + 2.0 * cos))
        }
    }
}

/// `ω ∈ (0, π)` with `cos ω = (1−α)/(2α)`; requires `α > 1/3`.
pub fn omega_of_alpha(alpha: f64) -> Result<f64, ProfileError> {
    if !(alpha > 1.0 / 3.0) {
        return Err(ProfileError::NoFrequency(alpha));
    }
    if alpha.is_infinite() {
        return Ok(2.0 * PI / 3.0);
    }
    let c = (1.0 - alpha) / (2.0 * alpha);
    if c == 0.0 {
        return Ok(FRAC_PI_2);
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

fn check_domain(alpha: f64, interior: usize) -> Result<(), ProfileError> {
    let upper = alpha_threshold(interior)?;
    if alpha > 1.0 / 3.0 && alpha < upper {
        Ok(())
    } else {
        Err(ProfileError::OutsideDomain {
            alpha,
            interior,
            upper,
        })
    }
}

/// Phase `φ = (2π − (L+2)ω)/2`, which places the zeros of the periodic
/// sequence at edges `0` and `L+2`. Requires `1/3 < α < α_L`.
pub fn phase_of(alpha: f64, interior: usize) -> Result<f64, ProfileError> {
    check_domain(alpha, interior)?;
    let omega = omega_of_alpha(alpha)?;
    Ok((2.0 * PI - (interior as f64 + 2.0) * omega) / 2.0)
}

/// Limiting profile of the interval `{0, ..., L+1}` together with its
/// boundary streams.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitProfile {
    pub interior: usize,
    pub alpha: f64,
    /// `u_1..u_{L+1}`, summing to one.
    pub u: Vec<f64>,
    /// Frequency and phase; `None` when built by the linear solver only.
    pub omega: Option<f64>,
    pub phi: Option<f64>,
    /// Normalization `Z = Σ_j (cos φ − cos(ωj + φ))` of the closed form.
    pub z: Option<f64>,
    /// Stream at site `0`, `−u_1 + α u_2`.
    pub d0: f64,
    /// Stream at site `L+1`, `−α u_L + u_{L+1}`.
    pub dl1: f64,
    /// Extension of the profile one edge beyond each end; `None` for `α = 0`.
    pub ltilde_m1: Option<f64>,
    pub ltilde_l3: Option<f64>,
}

impl LimitProfile {
    /// Wraps a solved profile of the four-edge kernel.
    pub fn from_solution(alpha: f64, u: Vec<f64>) -> Result<Self, ProfileError> {
        let (d0, dl1) = boundary_streams(&u, alpha)?;
        let ext = extend_profile(&u, alpha).ok();
        Ok(Self {
            interior: u.len() - 1,
            alpha,
            u,
            omega: None,
            phi: None,
            z: None,
            d0,
            dl1,
            ltilde_m1: ext.map(|e| e.0),
            ltilde_l3: ext.map(|e| e.1),
        })
    }

    /// Largest `|Δ_j|`, `j = 1..L`, recomputed from `u`.
    pub fn max_residual(&self) -> f64 {
        interior_residuals(&self.u, &InteractionKernel::nearest(self.alpha))
            .into_iter()
            .fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Closed-form limiting profile, `u_j = (cos φ − cos(ωj + φ))/Z`.
///
/// Requires `1/3 < α < α_L`.
pub fn limit_profile(alpha: f64, interior: usize) -> Result<LimitProfile, ProfileError> {
    let phi = phase_of(alpha, interior)?;
    let omega = omega_of_alpha(alpha)?;
    let raw: Vec<f64> = (1..=interior + 1)
        .map(|j| phi.cos() - (omega * j as f64 + phi).cos())
        .collect();
    let z: f64 = raw.iter().sum();
    let u: Vec<f64> = raw.iter().map(|r| r / z).collect();
    let mut p = LimitProfile::from_solution(alpha, u)?;
    p.omega = Some(omega);
    p.phi = Some(phi);
    p.z = Some(z);
    Ok(p)
}

/// Profile of the four-edge kernel by direct solve; valid for any `α`
/// where the system is nonsingular.
pub fn solved_profile(alpha: f64, interior: usize) -> Result<LimitProfile, ProfileError> {
    let u = solve_profile_system(&InteractionKernel::nearest(alpha), interior)?;
    LimitProfile::from_solution(alpha, u)
}

/// Boundary streams `(d_0, d_{L+1}) = (−l_1 + α l_2, −α l_L + l_{L+1})`.
pub fn boundary_streams(profile: &[f64], alpha: f64) -> Result<(f64, f64), ProfileError> {
    let n = profile.len();
    if n < 2 {
        return Err(ProfileError::ShortProfile(n));
    }
    let d0 = -profile[0] + alpha * profile[1];
    let dl1 = -alpha * profile[n - 2] + profile[n - 1];
    Ok((d0, dl1))
}

/// Boundary streams for an arbitrary kernel, zero weight outside the interval.
pub fn kernel_boundary_streams(profile: &[f64], kernel: &InteractionKernel) -> (f64, f64) {
    let value = edge_lookup(profile);
    let last_site = profile.len() as i64;
    (
        kernel.stream_of(&value, 0),
        kernel.stream_of(&value, last_site),
    )
}

/// Streams at the interior sites `1..=L` of a profile over edges `1..=L+1`.
pub fn interior_residuals(profile: &[f64], kernel: &InteractionKernel) -> Vec<f64> {
    let value = edge_lookup(profile);
    (1..profile.len() as i64)
        .map(|site| kernel.stream_of(&value, site))
        .collect()
}

fn edge_lookup(profile: &[f64]) -> impl Fn(i64) -> f64 + '_ {
    move |edge: i64| {
        if edge >= 1 && edge as usize <= profile.len() {
            profile[edge as usize - 1]
        } else {
            0.0
        }
    }
}

/// Extends the profile one edge past each end along the recurrence
/// `α l̃_{j+2} = α l̃_{j−1} − l̃_j + l̃_{j+1}`, with `l̃_0 = l̃_{L+2} = 0`.
///
/// Returns `(l̃_{−1}, l̃_{L+3})`; these satisfy `d_0 = α l̃_{−1}` and
/// `d_{L+1} = −α l̃_{L+3}`.
pub fn extend_profile(profile: &[f64], alpha: f64) -> Result<(f64, f64), ProfileError> {
    let n = profile.len();
    if n < 2 {
        return Err(ProfileError::ShortProfile(n));
    }
    if alpha == 0.0 {
        return Err(ProfileError::ZeroAlpha);
    }
    // Backward at j = 0: α l̃_{-1} = l̃_0 − l̃_1 + α l̃_2.
    let back = (0.0 - profile[0] + alpha * profile[1]) / alpha;
    // Forward at j = L+1: α l̃_{L+3} = α l̃_L − l̃_{L+1} + l̃_{L+2}.
    let fwd = (alpha * profile[n - 2] - profile[n - 1] + 0.0) / alpha;
    Ok((back, fwd))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(alpha_threshold(1).unwrap(), f64::INFINITY);
        assert_eq!(alpha_threshold(2).unwrap(), 1.0);
        assert!((alpha_threshold(4).unwrap() - 0.5).abs() < 1e-15);
        assert!((alpha_threshold(6).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(alpha_threshold(0).is_err());
    }

    #[test]
    fn omega_values() {
        assert!((omega_of_alpha(1.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((omega_of_alpha(0.8).unwrap() - 0.125f64.acos()).abs() < 1e-15);
        assert!((omega_of_alpha(0.8).unwrap() - 1.4454685).abs() < 1e-7);
        for l in 2..20 {
            let w = omega_of_alpha(alpha_threshold(l).unwrap()).unwrap();
            assert!((w - 2.0 * PI / (l as f64 + 2.0)).abs() < 1e-12, "L={l}");
        }
        assert!(omega_of_alpha(1.0 / 3.0).is_err());
        assert!(omega_of_alpha(0.2).is_err());
    }

    #[test]
    fn phase_values() {
        let w = (-0.25f64).acos();
        assert!((w - 1.8234766).abs() < 1e-7);
        let phi = phase_of(2.0, 1).unwrap();
        assert!((phi - (PI - 1.5 * w)).abs() < 1e-15);
        assert!((phi - 0.4063778).abs() < 1e-7);
        let phi = phase_of(0.8, 2).unwrap();
        assert!((phi - 0.2506557).abs() < 1e-7);
        // φ → 0 as α ↑ α_L.
        let a4 = alpha_threshold(4).unwrap();
        assert!(phase_of(a4 - 1e-9, 4).unwrap().abs() < 1e-6);
        assert!(phase_of(0.9, 3).is_err());
        assert!(phase_of(0.3, 3).is_err());
    }

    #[test]
    fn closed_form_small_cases() {
        for alpha in [1.5, 2.0, 7.0] {
            let p = limit_profile(alpha, 1).unwrap();
            assert!((p.u[0] - 0.5).abs() < 1e-14 && (p.u[1] - 0.5).abs() < 1e-14);
        }
        let p = limit_profile(0.8, 2).unwrap();
        let want = [5.0 / 19.0, 9.0 / 19.0, 5.0 / 19.0];
        for (a, b) in p.u.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((p.d0 - 2.2 / 19.0).abs() < 1e-12);
        assert!((p.dl1 + 2.2 / 19.0).abs() < 1e-12);
        assert!((p.ltilde_m1.unwrap() - 2.75 / 19.0).abs() < 1e-12);
        assert!(p.max_residual() < 1e-12);
    }

    #[test]
    fn boundary_and_extension() {
        let (d0, _) = boundary_streams(&[0.5, 0.5], 2.0).unwrap();
        assert_eq!(d0, 0.5);
        let (m1, _) = extend_profile(&[0.5, 0.5], 2.0).unwrap();
        assert_eq!(m1, 0.25);
        let u = [5.0 / 19.0, 9.0 / 19.0, 5.0 / 19.0];
        let (d0, dl1) = boundary_streams(&u, 0.8).unwrap();
        assert!((d0 - 2.2 / 19.0).abs() < 1e-15 && (dl1 + d0).abs() < 1e-15);
        let (m1, l3) = extend_profile(&u, 0.8).unwrap();
        assert!((m1 - 2.75 / 19.0).abs() < 1e-15);
        assert!((dl1 + 0.8 * l3).abs() < 1e-15);
        assert_eq!(extend_profile(&u, 0.0), Err(ProfileError::ZeroAlpha));
        assert!(boundary_streams(&[1.0], 0.8).is_err());
    }

    #[test]
    fn kernel_streams_match_default() {
        let u = limit_profile(0.43, 5).unwrap();
        let (d0, dl1) = kernel_boundary_streams(&u.u, &InteractionKernel::nearest(0.43));
        assert!((d0 - u.d0).abs() < 1e-15 && (dl1 - u.dl1).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_solver_example() {
        let a = limit_profile(0.43, 5).unwrap();
        let b = solve_profile_system(&InteractionKernel::nearest(0.43), 5).unwrap();
        for (x, y) in a.u.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn subcritical_uses_solver() {
        assert!(limit_profile(0.3, 3).is_err());
        let p = solved_profile(0.3, 3).unwrap();
        assert!((p.u.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(p.max_residual() < 1e-12);
        assert!(p.omega.is_none());
    }
}
