//! Trap sizes of the free walk across the thresholds.

use trapwalk::experiments::{trapping_probability_experiment, TrappingParams};
use trapwalk::profile::trapping_index;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for alpha in [1.5, 0.8, 0.5 + 1e-3, 0.3] {
        let params = TrappingParams::new(alpha, 1.0, 40, 40_000, 2024);
        let out = trapping_probability_experiment(&params, 0)?;
        let agg = &out.summary.aggregates;
        println!(
            "alpha {alpha:<6} predicted sites {:?}: trapped {} of 40, by sites {}",
            trapping_index(alpha).map(|l| l + 2),
            agg["trapped"]["count"],
            agg["trapped_by_site_count"]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("trapping example");
}
