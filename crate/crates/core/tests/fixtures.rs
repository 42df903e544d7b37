mod common;

use nalgebra::DMatrix;
use oevqe::integrals::{write_fcidump, parse_fcidump, Eri, IntegralSet};
use oevqe::oracle::{fci_ground_state_with, fci_integrals, mp2_total_energy, FciMethod};
use oevqe::projection::{transform_eri, SubspaceHamiltonian};
use oevqe::scf::run_rhf;

#[test]
fn hartree_fock_matches_reference() {
    for r in common::references() {
        let ints = common::load(&r.name);
        assert_eq!(ints.n_orb, r.n_orb);
        assert!((ints.e_nuc - r.e_nuc).abs() < 1e-10, "{}", r.name);
        let sol = run_rhf(&ints, 500, 1e-10).unwrap();
        assert!((sol.energy - r.e_hf).abs() < 1e-8, "{}: {} vs {}", r.name, sol.energy, r.e_hf);
    }
}

#[test]
fn mp2_matches_reference() {
    for r in common::references() {
        let ints = common::load(&r.name);
        let sol = run_rhf(&ints, 500, 1e-10).unwrap();
        let mp2 = mp2_total_energy(&ints, &sol).unwrap();
        assert!((mp2.e_total - r.e_mp2).abs() < 1e-8, "{}: {} vs {}", r.name, mp2.e_total, r.e_mp2);
    }
}

#[test]
fn fci_matches_reference() {
    for r in common::references() {
        let ints = common::load(&r.name);
        let fci = fci_integrals(&ints).unwrap();
        assert!((fci.energy - r.e_fci).abs() < 1e-8, "{}: {} vs {}", r.name, fci.energy, r.e_fci);
        assert!(fci.energy < r.e_hf);
    }
}

#[test]
fn lanczos_agrees_with_dense_diagonalization() {
    for name in ["h4_1.00", "h4_1.50", "h6_2.00"] {
        let h = SubspaceHamiltonian::full(&common::load(name));
        let a = fci_ground_state_with(&h, FciMethod::Lanczos).unwrap();
        let b = fci_ground_state_with(&h, FciMethod::Dense).unwrap();
        assert!((a.energy - b.energy).abs() < 1e-10, "{name}");
    }
}

#[test]
fn fci_is_invariant_under_orbital_rotation() {
    let ints = common::load("h4_1.50");
    let n = ints.n_orb;
    let m = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 3) as f64).sin());
    let q = (m.clone() + m.transpose()).symmetric_eigen().eigenvectors;
    let h1 = q.transpose() * &ints.h1 * &q;
    let eri: Eri = transform_eri(&ints.eri, &q);
    let rotated = IntegralSet::new(ints.n_elec, ints.e_nuc, h1, eri, "rotated").unwrap();
    let a = fci_integrals(&ints).unwrap().energy;
    let b = fci_integrals(&rotated).unwrap().energy;
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn fixtures_round_trip_through_writer() {
    let ints = common::load("h6_1.00");
    let back = parse_fcidump(&write_fcidump(&ints)).unwrap();
    assert!(ints.max_difference(&back) < 1e-15);
}
