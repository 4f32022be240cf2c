use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{alpha_threshold, omega_of_alpha, solved_profile, ProfileError};

/// `α` within this distance of some `α_M` is reported as critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `α ∈ (α_{L+1}, α_L)`: trapping on `L+2` sites has positive probability.
    TrapPossible(usize),
    /// `α < α_{L+1}` (and `α > 1/3`): the walk cannot stay on `L+2` sites.
    EscapeCertain(usize),
    /// `α ≤ 1/3`: no finite trap.
    Subcritical,
    /// `α = α_M` up to [`CRITICAL_TOLERANCE`].
    Critical(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

/// Regime of `α` relative to a given interval, with the boundary-stream
/// signs of that interval's solved profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub alpha: f64,
    pub interior: usize,
    pub regime: Regime,
    /// `None` when the interval's profile system is singular.
    pub d0: Option<f64>,
    pub dl1: Option<f64>,
    /// Signs `(d_0, d_{L+1})` implied by the regime, when it implies any.
    pub expected: Option<(Sign, Sign)>,
    /// The computed signs agree with `expected` (vacuously true without one).
    pub consistent: bool,
}

/// Threshold bracket of `α` without reference to an interval: the trap
/// size `L` with `α_{L+1} < α < α_L`, a critical hit, or subcritical.
pub fn regime_of(alpha: f64) -> Regime {
    if alpha.is_nan() || alpha <= 1.0 / 3.0 {
        return Regime::Subcritical;
    }
    if alpha.is_infinite() {
        return Regime::TrapPossible(1);
    }
    let omega = omega_of_alpha(alpha).expect("alpha > 1/3");
    let guess = ((2.0 * PI / omega).floor() as usize).saturating_sub(2).max(1);
    let threshold = |l: usize| alpha_threshold(l).expect("l >= 1");
    for m in guess.saturating_sub(1).max(2)..=guess + 2 {
        if (alpha - threshold(m)).abs() <= CRITICAL_TOLERANCE {
            return Regime::Critical(m);
        }
    }
    let mut l = guess;
    while alpha <= threshold(l + 1) {
        l += 1;
    }
    while l > 1 && alpha >= threshold(l) {
        l -= 1;
    }
    Regime::TrapPossible(l)
}

/// The `L` with `α_{L+1} < α < α_L`; `None` when `α ≤ 1/3` or `α` is critical.
pub fn trapping_index(alpha: f64) -> Option<usize> {
    match regime_of(alpha) {
        Regime::TrapPossible(l) => Some(l),
        _ => None,
    }
}

/// Classifies `α` against the interval of interior length `L` and checks the
/// signs of `(d_0, d_{L+1})` at that interval's solved profile.
pub fn classify_regime(alpha: f64, interior: usize) -> Result<RegimeReport, ProfileError> {
    if interior == 0 {
        return Err(ProfileError::InvalidLength(0));
    }
    let regime = match regime_of(alpha) {
        Regime::TrapPossible(l) if l < interior => Regime::TrapPossible(l),
        Regime::TrapPossible(l) if l > interior => Regime::EscapeCertain(interior),
        other => other,
    };
    let expected = match regime {
        Regime::TrapPossible(l) if l == interior => Some((Sign::Positive, Sign::Negative)),
        Regime::EscapeCertain(_) => Some((Sign::Negative, Sign::Positive)),
        Regime::Subcritical if alpha >= 0.0 => Some((Sign::Negative, Sign::Positive)),
        _ => None,
    };
    let (d0, dl1) = match solved_profile(alpha, interior) {
        Ok(p) => (Some(p.d0), Some(p.dl1)),
        Err(ProfileError::Singular { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    let consistent = match (expected, d0, dl1) {
        (Some((s0, s1)), Some(a), Some(b)) => Sign::of(a) == s0 && Sign::of(b) == s1,
        (Some(_), _, _) => false,
        (None, _, _) => true,
    };
    Ok(RegimeReport {
        alpha,
        interior,
        regime,
        d0,
        dl1,
        expected,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        assert_eq!(trapping_index(0.8), Some(2));
        assert_eq!(trapping_index(0.4), Some(6));
        assert_eq!(trapping_index(0.3), None);
        assert_eq!(trapping_index(2.0), Some(1));
        assert_eq!(trapping_index(1.0 / 3.0), None);
        assert_eq!(regime_of(1.0), Regime::Critical(2));
        assert_eq!(regime_of(0.5), Regime::Critical(4));
        assert_eq!(regime_of(1e300), Regime::TrapPossible(1));
    }

    #[test]
    fn just_below_each_threshold() {
        for l in 2..=40 {
            let a = alpha_threshold(l).unwrap();
            assert_eq!(trapping_index(a - 1e-9), Some(l), "L={l}");
            assert_eq!(trapping_index(a + 1e-9), Some(l - 1), "L={l}");
        }
    }

    #[test]
    fn classification_examples() {
        let r = classify_regime(0.8, 2).unwrap();
        assert_eq!(r.regime, Regime::TrapPossible(2));
        assert_eq!(r.expected, Some((Sign::Positive, Sign::Negative)));
        assert!(r.consistent);

        let r = classify_regime(0.45, 2).unwrap();
        assert_eq!(r.regime, Regime::EscapeCertain(2));
        assert!(r.d0.unwrap() < 0.0 && r.dl1.unwrap() > 0.0);
        assert!(r.consistent);

        let r = classify_regime(0.3, 2).unwrap();
        assert_eq!(r.regime, Regime::Subcritical);
        assert!(r.consistent);

        let r = classify_regime(0.8, 5).unwrap();
        assert_eq!(r.regime, Regime::TrapPossible(2));

        let r = classify_regime(1.0, 2).unwrap();
        assert_eq!(r.regime, Regime::Critical(2));
        assert_eq!(r.d0, None);
    }
}
