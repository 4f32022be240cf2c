//! Log-survival of the coupling between the confined and the free walk on
//! either side of the threshold α_3.

use trapwalk::experiments::{coupling_survival_experiment, CouplingParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for alpha in [0.8, 0.45] {
        let out = coupling_survival_experiment(&CouplingParams::new(alpha, 2, 1.0, 100_000, 1), 1)?;
        println!("alpha {alpha}");
        for c in &out.checkpoints {
            println!("  n = {:>7}  log S = {:>14.6}", c.n, c.log_survival);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("coupling example");
}
