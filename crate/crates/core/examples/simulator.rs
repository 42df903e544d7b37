//! The statevector simulator on its own: encode, rotate, measure, differentiate.
//!
//! cargo run --example simulator

use oevqe::fermisim::{apply_excitation, energy_gradient, expectation, jw_encode, reference_state};
use oevqe::embedding::FragmentSpec;
use oevqe::integrals::read_fcidump;
use oevqe::solver::{build_pool, pool_size, Pipeline, SolverConfig};

fn main() -> oevqe::Result<()> {
    let ints = read_fcidump("fixtures/h2_0.74.fcidump")?;
    // Whole-system fragment: the canonical RHF orbitals.
    let pipe = Pipeline::new(&ints, &FragmentSpec::all(ints.n_orb), &SolverConfig::default())?;
    let h = pipe.stage_hamiltonian(&ints, 0)?;
    let psi0 = reference_state(2, 1, &[])?;
    println!("pool sizes: {:?}", (1..=5).map(pool_size).collect::<Vec<_>>());

    // a†_2 a†_3 a_1 a_0: the only double excitation of H2.
    let op = jw_encode(&[2, 3, 1, 0], 4)?;
    println!("{op}: {} Pauli strings", op.pauli_terms.len());
    for theta in [-0.2, -0.1, 0.0, 0.1] {
        let psi = apply_excitation(&psi0, &op, theta);
        let g = energy_gradient(&[&op], &[theta], &psi0, &h)?[0];
        println!(
            "theta {theta:>5.2}  E {:.10}  dE/dtheta {g:>10.6}  N {:.3}",
            expectation(&psi, &h)? + h.e_core + h.e_nuc,
            psi.number_expectation()
        );
    }
    println!("{} generators in the 2-orbital pool", build_pool(2).len());
    Ok(())
}
