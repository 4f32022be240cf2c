//! The force-confined walk: occupation profile against the limit, and the
//! trajectory CSV round trip.

use trapwalk::profile::limit_profile;
use trapwalk::walk::{
    read_trajectory_csv, run_walk, write_trajectory_csv, WalkParameters,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let target = limit_profile(0.8, 2)?.u;
    let steps = 200_000;
    let log = run_walk(WalkParameters::new(0.8, 1.0, 42).confined(2), steps, 0)?;
    for s in log.snapshots.iter().filter(|s| s.n >= 100) {
        let err = (1..=3)
            .map(|e| (s.local_times.get(e) as f64 / s.n as f64 - target[e as usize - 1]).abs())
            .fold(0.0, f64::max);
        println!("n = {:>7}  sup error = {err:.5}", s.n);
    }

    let full = run_walk(WalkParameters::new(0.8, 1.0, 42).confined(2), 1_000, 1)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &full.records)?;
    let back = read_trajectory_csv(csv.as_slice())?;
    assert_eq!(back, full.records);
    println!("{} records survive the CSV round trip", back.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("confined walk example");
}
