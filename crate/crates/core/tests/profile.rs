//! Thresholds, frequencies, profiles and regimes at hand-computed points.

mod common;

use std::f64::consts::PI;

use common::{escape_grid, threshold_oracle, trap_grid};
use trapwalk::profile::{
    alpha_threshold, boundary_streams, classify_regime, extend_profile, limit_profile,
    omega_of_alpha, phase_of, regime_of, solve_profile_system, solved_profile, trapping_index,
    Regime, Sign,
};
use trapwalk::walk::InteractionKernel;

const FIVE_NINE_FIVE: [f64; 3] = [5.0 / 19.0, 9.0 / 19.0, 5.0 / 19.0];

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn thresholds_against_oracle() {
    assert_eq!(alpha_threshold(1).unwrap(), f64::INFINITY);
    assert_eq!(alpha_threshold(2).unwrap(), 1.0);
    assert!((alpha_threshold(4).unwrap() - 0.5).abs() <= 1e-15);
    assert!((alpha_threshold(6).unwrap() - (2f64.sqrt() - 1.0)).abs() <= 1e-15);
    for l in 2..=200 {
        assert!((alpha_threshold(l).unwrap() - threshold_oracle(l)).abs() < 1e-14);
    }
    assert!(alpha_threshold(0).is_err());
}

#[test]
fn trap_index_examples() {
    assert_eq!(trapping_index(0.8), Some(2));
    assert_eq!(trapping_index(0.4), Some(6));
    assert_eq!(trapping_index(0.3), None);
    assert_eq!(trapping_index(2.0), Some(1));
    assert!((alpha_threshold(3).unwrap() - 0.618034).abs() < 1e-6);
    assert!((alpha_threshold(7).unwrap() - 0.394931).abs() < 1e-6);
}

#[test]
fn frequency_and_phase() {
    assert!((omega_of_alpha(1.0).unwrap() - PI / 2.0).abs() < 1e-15);
    assert!((omega_of_alpha(0.8).unwrap() - 1.4454685).abs() < 1e-7);
    for l in 2..=12 {
        let a = alpha_threshold(l).unwrap();
        assert!((omega_of_alpha(a).unwrap() - 2.0 * PI / (l as f64 + 2.0)).abs() < 1e-12);
        assert!(phase_of(a - 1e-9, l).unwrap().abs() < 1e-6);
    }
    assert!((phase_of(0.8, 2).unwrap() - 0.2506557).abs() < 1e-7);
    assert!((phase_of(2.0, 1).unwrap() - 0.4063778).abs() < 1e-7);
}

#[test]
fn small_profiles() {
    assert!(max_diff(&limit_profile(0.8, 2).unwrap().u, &FIVE_NINE_FIVE) <= 1e-12);
    let k = InteractionKernel::nearest(0.8);
    assert!(max_diff(&solve_profile_system(&k, 2).unwrap(), &FIVE_NINE_FIVE) <= 1e-12);
    assert!(max_diff(&solve_profile_system(&k, 1).unwrap(), &[0.5, 0.5]) <= 1e-15);
    for alpha in [1.5, 2.0, 7.0] {
        assert!(max_diff(&limit_profile(alpha, 1).unwrap().u, &[0.5, 0.5]) <= 1e-12);
    }
    let closed = limit_profile(0.43, 5).unwrap().u;
    let linear = solve_profile_system(&InteractionKernel::nearest(0.43), 5).unwrap();
    assert!(max_diff(&closed, &linear) <= 1e-10);
}

#[test]
fn boundary_values_and_extension() {
    let (d0, dl1) = boundary_streams(&FIVE_NINE_FIVE, 0.8).unwrap();
    assert!((d0 - 2.2 / 19.0).abs() < 1e-15 && (dl1 + 2.2 / 19.0).abs() < 1e-15);
    let (d0, _) = boundary_streams(&[0.5, 0.5], 2.0).unwrap();
    assert!((d0 - 0.5).abs() < 1e-15);
    let (m1, _) = extend_profile(&[0.5, 0.5], 2.0).unwrap();
    assert!((m1 - 0.25).abs() < 1e-15);
    let (m1, l3) = extend_profile(&FIVE_NINE_FIVE, 0.8).unwrap();
    assert!((m1 - 2.75 / 19.0).abs() < 1e-15 && (l3 - 2.75 / 19.0).abs() < 1e-15);
}

#[test]
fn regimes() {
    let r = classify_regime(0.8, 2).unwrap();
    assert_eq!(r.regime, Regime::TrapPossible(2));
    assert_eq!(r.expected, Some((Sign::Positive, Sign::Negative)));
    assert!(r.consistent);
    let r = classify_regime(0.45, 2).unwrap();
    assert!(matches!(r.regime, Regime::EscapeCertain(2)));
    assert_eq!(Sign::of(r.d0.unwrap()), Sign::Negative);
    assert_eq!(Sign::of(r.dl1.unwrap()), Sign::Positive);
    assert_eq!(regime_of(0.3), Regime::Subcritical);
}

#[test]
fn grids_equivalence_and_signs() {
    for l in 1..=30 {
        for alpha in trap_grid(l) {
            let c = limit_profile(alpha, l).unwrap();
            let s = solved_profile(alpha, l).unwrap();
            assert!(max_diff(&c.u, &s.u) <= 1e-10, "L={l} α={alpha}");
            assert!(c.max_residual() <= 1e-12);
            assert!((c.d0 + c.dl1).abs() <= 1e-12);
            assert!(c.d0 > 0.0 && c.dl1 < 0.0);
        }
        for alpha in escape_grid(l) {
            let s = solved_profile(alpha, l).unwrap();
            assert!(s.d0 < 0.0 && s.dl1 > 0.0, "L={l} α={alpha}");
        }
    }
}
