//! Trapping thresholds and the regime of a few interaction strengths.

use trapwalk::profile::{alpha_threshold, classify_regime, regime_of};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>3}  {:>20}", "L", "alpha_L");
    for l in 1..=12 {
        println!("{l:>3}  {:>20.15}", alpha_threshold(l)?);
    }
    for alpha in [2.0, 1.0, 0.8, 0.45, 0.4, 0.34, 0.3] {
        println!("alpha = {alpha:<5} -> {:?}", regime_of(alpha));
    }
    let r = classify_regime(0.45, 2)?;
    println!(
        "alpha = 0.45 on the 4-site interval: {:?}, d0 = {:?}, dL1 = {:?}",
        r.regime, r.d0, r.dl1
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("thresholds example");
}
