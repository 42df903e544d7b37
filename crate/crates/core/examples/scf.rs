//! Restricted Hartree-Fock and MP2 from an FCIDUMP file.
//!
//! cargo run --example scf -- fixtures/h6_2.40.fcidump

use oevqe::integrals::{parse_fcidump, read_fcidump, write_fcidump};
use oevqe::oracle::mp2_total_energy;
use oevqe::scf::{run_rhf_with, ScfOptions};

fn main() -> oevqe::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/h6_2.40.fcidump".into());
    let ints = read_fcidump(&path)?;
    println!("{} orbitals, {} electrons, E_nuc {:.10}", ints.n_orb, ints.n_elec, ints.e_nuc);

    let sol = run_rhf_with(&ints, &ScfOptions::default())?;
    println!("RHF  {:.10}  ({} iterations)", sol.energy, sol.iterations);
    for (i, e) in sol.orbital_energies.iter().enumerate() {
        let occ = if i < ints.n_occ() { "occ" } else { "vir" };
        println!("  eps[{i}] {e:>14.8} {occ}");
    }
    let mp2 = mp2_total_energy(&ints, &sol)?;
    println!("MP2  {:.10}  (E_corr {:.3e})", mp2.e_total, mp2.e_corr);

    // Plain mixing instead of DIIS.
    let mixed = run_rhf_with(&ints, &ScfOptions { diis_space: 0, ..ScfOptions::default() });
    match mixed {
        Ok(s) => println!("mixing only: {:.10} in {} iterations", s.energy, s.iterations),
        Err(e) => println!("mixing only: {e}"),
    }

    let again = parse_fcidump(&write_fcidump(&ints))?;
    assert_eq!(again.n_orb, ints.n_orb);
    Ok(())
}
