//! Interior streams stay logarithmic while the boundary streams grow
//! linearly at rates d_0 and d_{L+1}.

use trapwalk::experiments::{stream_growth_experiment, StreamParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out = stream_growth_experiment(&StreamParams::new(0.8, 2, 1.0, 1_000_000, 8), 1)?;
    println!("{:>8} {:>12} {:>10} {:>10} {:>10}", "n", "max stream", "/ ln n", "D(n,0)/n", "D(n,3)/n");
    for c in &out.checkpoints {
        println!(
            "{:>8} {:>12.3} {:>10.4} {:>10.5} {:>10.5}",
            c.n, c.max_stream, c.log_ratio, c.d0_rate, c.dl1_rate
        );
    }
    println!("c fit {:.4}; d0 = {}", out.rows[0].c_fit, out.summary.aggregates["d0"]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("stream growth example");
}
