//! Gradient variance over random Hamiltonians as the register grows.
//!
//! cargo run --release --example bp_variance -- 2000

use oevqe::oracle::{bp_variance_experiment, log2_slope};

fn main() -> oevqe::Result<()> {
    let samples = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("sample count"));
    let mut points = Vec::new();
    for n in [4, 6, 8] {
        let r = bp_variance_experiment(n, samples, 7)?;
        println!(
            "n={n}  var {:.4e}  mean {:+.3e}  SE {:.3e}",
            r.variance, r.mean, r.std_error
        );
        points.push((n, r.variance));
    }
    println!("log2 variance slope {:.3} per qubit", log2_slope(&points));
    Ok(())
}
