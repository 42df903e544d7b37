//! Fragment, bath and ranked environment for one fragment choice.
//!
//! cargo run --example embedding -- fixtures/h6_2.00.fcidump 2,3

use oevqe::embedding::{build_bath, FragmentSpec};
use oevqe::integrals::read_fcidump;
use oevqe::linalg::orthonormality_error;
use oevqe::ranking::{rank_environment, stage_hamiltonian};
use oevqe::scf::run_rhf;

fn main() -> oevqe::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let ints = read_fcidump(args.get(1).map_or("fixtures/h6_2.00.fcidump", |s| s.as_str()))?;
    let frag = FragmentSpec::parse(args.get(2).map_or("2,3", |s| s.as_str()), ints.n_orb)?;
    let sol = run_rhf(&ints, 500, 1e-10)?;
    let basis = build_bath(&sol.density, &frag, 1e-6)?;
    println!(
        "fragment {}  bath {}  core {}  virtual {}",
        basis.n_frag(),
        basis.n_bath(),
        basis.n_core(),
        basis.n_vir()
    );
    println!("frame orthonormality {:.1e}", orthonormality_error(&basis.full_rotation()));

    let ranked = rank_environment(&ints, &basis)?;
    println!("rank  class     delta_lambda");
    for (i, (d, c)) in ranked.delta_lambda.iter().zip(&ranked.class_of).enumerate() {
        println!("{i:>4}  {:<8}  {d:.6e}", format!("{c:?}"));
    }
    for n_s in 0..=ranked.n_env() {
        let h = stage_hamiltonian(&ints, &ranked, n_s)?;
        println!(
            "N_s={n_s}: {} qubits, {} electrons, E_ref {:.10}",
            h.n_qubits(),
            h.n_elec_sub,
            h.reference_energy() + h.e_core + h.e_nuc
        );
    }
    println!("HF   {:.10}", sol.energy);
    Ok(())
}
