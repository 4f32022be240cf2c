//! Upstream jumps, first stream appearances and the path checkers on a
//! recorded confined trajectory.

use trapwalk::paths::{
    check_proposition_instance, check_stream_lipschitz, first_stream_appearance,
    first_upstream_exceeding, max_interior_stream, proposition_constants,
    scan_confinement_instances, upstream_jumps, Side,
};
use trapwalk::walk::{run_walk, WalkParameters};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let l = 3;
    let log = run_walk(WalkParameters::new(0.6, 1.0, 5).confined(l), 50_000, 1)?;

    let up = upstream_jumps(&log, l)?;
    let strongest = up.iter().map(|u| u.intensity).fold(0.0, f64::max);
    println!("{} upstream jumps, strongest {strongest}", up.len());
    for m in [0.5, 1.0, 2.0, 4.0] {
        println!("  sigma({m}) = {:?}", first_upstream_exceeding(&log, l, m)?);
    }
    for m in [1.0, 4.0, 16.0] {
        let hit = first_stream_appearance(&log, l, m, 0.5, Side::Right)?;
        println!("  theta+({m}) at gamma 0.5 = {hit:?}");
    }

    let report = max_interior_stream(&log, l)?;
    println!("largest interior stream {}", report.overall_max());

    let lip = check_stream_lipschitz(&log, l)?;
    println!("Lipschitz: {} over {} pairs", lip.holds(), lip.pairs_checked);
    let scan = scan_confinement_instances(&log, l)?;
    println!("confinement: {}/{} instances held", scan.held, scan.checked);

    println!("proposition eps 0.2, D 8: {:?}", check_proposition_instance(&log, l, 0.2, 8.0)?);
    let (eps, d0) = proposition_constants(0.009, l);
    println!("reference constants at gamma 0.009: eps = {eps:e}, D0 = {d0:e}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("path diagnostics example");
}
