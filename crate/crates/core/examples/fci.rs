//! Exact ground state by Lanczos, checked against dense diagonalization.
//!
//! cargo run --release --example fci -- fixtures/h4_1.50.fcidump

use oevqe::integrals::read_fcidump;
use oevqe::oracle::{fci_ground_state_with, FciMethod};
use oevqe::projection::SubspaceHamiltonian;

fn main() -> oevqe::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/h4_1.50.fcidump".into());
    let ints = read_fcidump(&path)?;
    let h = SubspaceHamiltonian::full(&ints);
    let lanczos = fci_ground_state_with(&h, FciMethod::Lanczos)?;
    println!("Lanczos  {:.12}  dim {}  iterations {}", lanczos.energy, lanczos.dimension, lanczos.iterations);
    if lanczos.dimension <= 4000 {
        let dense = fci_ground_state_with(&h, FciMethod::Dense)?;
        println!("dense    {:.12}  |diff| {:.1e}", dense.energy, (dense.energy - lanczos.energy).abs());
    }
    let mut weights: Vec<(f64, usize)> = lanczos.coeffs.iter().map(|c| c * c).zip(0..).collect();
    weights.sort_by(|a, b| b.0.total_cmp(&a.0));
    let ns = lanczos.strings.len();
    for (w, idx) in weights.iter().take(5) {
        let (a, b) = (lanczos.strings[idx / ns], lanczos.strings[idx % ns]);
        println!("  {w:.6}  alpha {a:0width$b}  beta {b:0width$b}", width = ints.n_orb);
    }
    Ok(())
}
