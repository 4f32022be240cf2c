//! A longer-range interaction kernel: the walk, its streams and the
//! profile of the matching linear system.

use trapwalk::paths::check_stream_lipschitz;
use trapwalk::profile::{interior_residuals, solve_profile_system};
use trapwalk::walk::{run_walk, InteractionKernel, WalkParameters};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let kernel = InteractionKernel::new(vec![1.0, -0.9, 0.3]).ok_or("bad kernel")?;
    let l = 5;
    let params = WalkParameters::new(0.9, 1.0, 17).confined(l).with_kernel(kernel.clone());
    let log = run_walk(params, 100_000, 1)?;
    let n = log.steps as f64;
    // The walk may settle on fewer edges than the confinement allows.
    let occupied: Vec<f64> = (1..=l as i64 + 1)
        .map(|e| log.final_local_times.get(e) as f64 / n)
        .filter(|&f| f > 0.01)
        .collect();
    println!("occupation after {n} steps {occupied:?}");
    let u = solve_profile_system(&kernel, occupied.len() - 1)?;
    println!("profile of that interval {u:?}");
    println!("residuals {:?}", interior_residuals(&u, &kernel));
    let lip = check_stream_lipschitz(&log, l)?;
    println!("Lipschitz constant {} holds: {}", lip.constant, lip.holds());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("general kernel example");
}
