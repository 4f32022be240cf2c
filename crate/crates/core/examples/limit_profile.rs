//! Closed-form limiting profile against the direct solve, with boundary
//! streams and the one-step extension beyond each end.

use trapwalk::profile::{
    extend_profile, limit_profile, solve_profile_system, solved_profile,
};
use trapwalk::walk::InteractionKernel;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = limit_profile(0.8, 2)?;
    println!("alpha 0.8, L 2: u = {:?}", p.u);
    println!("  omega = {:?}, phi = {:?}", p.omega, p.phi);
    println!("  d0 = {}, dL1 = {}, max residual = {:e}", p.d0, p.dl1, p.max_residual());

    let (alpha, l) = (0.43, 5);
    let closed = limit_profile(alpha, l)?;
    let direct = solved_profile(alpha, l)?;
    let gap = closed
        .u
        .iter()
        .zip(&direct.u)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("alpha {alpha}, L {l}: closed form vs solve differ by {gap:e}");
    let (m1, l3) = extend_profile(&closed.u, alpha)?;
    println!("  extension: l(-1) = {m1}, l(L+3) = {l3}");

    // Below 1/3 only the solver applies.
    let sub = solved_profile(0.3, 3)?;
    println!("alpha 0.3, L 3: u = {:?}, d0 = {}", sub.u, sub.d0);

    // A three-coefficient kernel.
    let k = InteractionKernel::new(vec![1.0, -0.6, 0.2]).ok_or("bad kernel")?;
    println!("kernel (1, -0.6, 0.2), L 4: {:?}", solve_profile_system(&k, 4)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("limit profile example");
}
