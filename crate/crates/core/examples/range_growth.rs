//! Range of the free walk at H/10 and H below and above α = 1/3.

use trapwalk::experiments::{range_growth_experiment, RangeParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for alpha in [0.0, 0.3, 0.8] {
        let out = range_growth_experiment(&RangeParams::new(alpha, 1.0, 40, 50_000, 11), 0)?;
        let grew = &out.summary.aggregates["strict_range_growth"];
        let mean_final =
            out.rows.iter().map(|r| r.range_final as f64).sum::<f64>() / out.rows.len() as f64;
        println!(
            "alpha {alpha}: {} of {} trials grew, mean final range {mean_final:.1}",
            grew["count"], grew["total"]
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("range growth example");
}
