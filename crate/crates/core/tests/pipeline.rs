mod common;

use oevqe::embedding::{build_bath, FragmentSpec};
use oevqe::fermisim::{pool_gradients, reference_state, CompiledHamiltonian, Statevector};
use oevqe::linalg::orthonormality_error;
use oevqe::oracle::{fci_ground_state, fci_integrals};
use oevqe::projection::{assemble_energy, SubspaceHamiltonian};
use oevqe::ranking::{rank_environment, stage_hamiltonian};
use oevqe::scf::run_rhf;
use oevqe::solver::{
    adapt_run, adapt_stage, build_pool, measurement_accounting, oe_run, oe_uccsd, pool_size,
    Direction, SolverConfig,
};

fn fragments(n_orb: usize) -> Vec<String> {
    let mut out = vec!["0".to_string()];
    if n_orb >= 4 {
        out.push("0,1".into());
        out.push(format!("{},{}", n_orb / 2 - 1, n_orb / 2));
    }
    if n_orb >= 6 {
        out.push("1".into());
        out.push("0,5".into());
    }
    out
}

#[test]
fn bath_never_exceeds_fragment_and_frame_is_orthonormal() {
    for name in common::HYDROGEN {
        let ints = common::load(name);
        let sol = run_rhf(&ints, 500, 1e-10).unwrap();
        for f in fragments(ints.n_orb) {
            let frag = FragmentSpec::parse(&f, ints.n_orb).unwrap();
            let b = build_bath(&sol.density, &frag, 1e-6).unwrap();
            assert!(b.n_bath() <= b.n_frag(), "{name} frag {f}");
            assert_eq!(b.n_frag() + b.n_bath() + b.n_core() + b.n_vir(), ints.n_orb);
            assert!(orthonormality_error(&b.full_rotation()) < 1e-10);
            let r = rank_environment(&ints, &b).unwrap();
            assert!(orthonormality_error(&r.u_full) < 1e-10);
        }
    }
}

#[test]
fn every_stage_reference_reproduces_hartree_fock() {
    for name in common::HYDROGEN {
        let ints = common::load(name);
        let sol = run_rhf(&ints, 500, 1e-10).unwrap();
        for f in fragments(ints.n_orb) {
            let frag = FragmentSpec::parse(&f, ints.n_orb).unwrap();
            let b = build_bath(&sol.density, &frag, 1e-6).unwrap();
            let r = rank_environment(&ints, &b).unwrap();
            for n_s in 0..=r.n_env() {
                let h = stage_hamiltonian(&ints, &r, n_s).unwrap();
                let psi0 = reference_state(h.k, h.n_imp_occ, &h.occ_pattern).unwrap();
                let ham = CompiledHamiltonian::for_state(&h, &psi0).unwrap();
                let e = ham.expectation(&psi0) + h.e_core + h.e_nuc;
                assert!((e - sol.energy).abs() < 1e-8, "{name} frag {f} N_s={n_s}: {e} vs {}", sol.energy);
                assert!((h.reference_energy() + h.e_core + h.e_nuc - sol.energy).abs() < 1e-8);
                assert!((psi0.number_expectation() - h.n_elec_sub as f64).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn full_expansion_recovers_exact_energy() {
    for name in ["h4_1.50", "h6_1.00", "h6_2.40"] {
        let ints = common::load(name);
        let exact = fci_integrals(&ints).unwrap().energy;
        let sol = run_rhf(&ints, 500, 1e-10).unwrap();
        let f = if ints.n_orb == 6 { "2,3" } else { "1" };
        let frag = FragmentSpec::parse(f, ints.n_orb).unwrap();
        let b = build_bath(&sol.density, &frag, 1e-6).unwrap();
        let r = rank_environment(&ints, &b).unwrap();
        let mut previous = f64::INFINITY;
        for n_s in 0..=r.n_env() {
            let e = fci_ground_state(&stage_hamiltonian(&ints, &r, n_s).unwrap()).unwrap().energy;
            assert!(e >= exact - 1e-10, "{name} N_s={n_s}: below the full ground state");
            assert!(e <= previous + 1e-10, "{name} N_s={n_s}: not monotone");
            previous = e;
        }
        assert!((previous - exact).abs() < 1e-8, "{name}");
    }
}

#[test]
fn ranking_scores_are_sorted_and_nonnegative() {
    let ints = common::load("h6_1.50");
    let sol = run_rhf(&ints, 500, 1e-10).unwrap();
    let frag = FragmentSpec::parse("0", ints.n_orb).unwrap();
    let r = rank_environment(&ints, &build_bath(&sol.density, &frag, 1e-6).unwrap()).unwrap();
    assert!(r.delta_lambda.windows(2).all(|w| w[0] >= w[1]));
    assert!(r.delta_lambda.iter().all(|d| *d >= -1e-12));
    let frag = FragmentSpec::parse("2,3", ints.n_orb).unwrap();
    let r = rank_environment(&ints, &build_bath(&sol.density, &frag, 1e-6).unwrap()).unwrap();
    assert!(r.delta_lambda[0] > *r.delta_lambda.last().unwrap());
}

#[test]
fn baseline_equals_oe_with_whole_system_fragment() {
    let ints = common::load("h4_1.00");
    let cfg = SolverConfig::default();
    let a = adapt_run(&ints, &cfg).unwrap();
    let b = oe_run(&ints, &FragmentSpec::all(ints.n_orb), &cfg).unwrap();
    assert_eq!(b.stages.len(), 1);
    let la: Vec<&str> = a.operators.iter().map(|o| o.label.as_str()).collect();
    let lb: Vec<&str> = b.operators.iter().map(|o| o.label.as_str()).collect();
    assert_eq!(la, lb);
    assert_eq!(a.final_e_g.to_bits(), b.final_e_g.to_bits());
}

#[test]
fn hydrogen_molecule_needs_one_double() {
    let ints = common::load("h2_0.74");
    let exact = fci_integrals(&ints).unwrap().energy;
    let r = adapt_run(&ints, &SolverConfig::default()).unwrap();
    assert_eq!(r.total_ops, 1);
    assert!((r.final_e_g - exact).abs() < 1e-8);
    let u = oe_uccsd(&ints, &FragmentSpec::all(2), &SolverConfig::default()).unwrap();
    assert!((u.final_e_g - exact).abs() < 1e-8);
}

#[test]
fn full_space_adapt_converges_on_h4() {
    let ints = common::load("h4_1.50");
    let exact = fci_integrals(&ints).unwrap().energy;
    let cfg = SolverConfig {
        grad_threshold: 1e-6,
        ..SolverConfig::default()
    };
    let r = adapt_run(&ints, &cfg).unwrap();
    assert!(r.total_ops <= 100);
    assert!((r.final_e_g - exact).abs() < 1e-6, "error {:e}", (r.final_e_g - exact).abs());
}

#[test]
fn uccsd_expansion_is_variational() {
    let ints = common::load("h4_1.00");
    let frag = FragmentSpec::parse("0", 4).unwrap();
    let r = oe_uccsd(&ints, &frag, &SolverConfig::default()).unwrap();
    let exact = fci_integrals(&ints).unwrap().energy;
    for s in &r.stages {
        assert!(s.e_g <= s.e_reference + 1e-10);
        assert!(s.e_g >= exact - 1e-10);
    }
}

#[test]
fn huge_threshold_appends_nothing() {
    let ints = common::load("h4_1.00");
    let h = SubspaceHamiltonian::full(&ints);
    let cfg = SolverConfig {
        grad_threshold: 1e3,
        ..SolverConfig::default()
    };
    let out = adapt_stage(&h, Direction::new(), &build_pool(4), &cfg).unwrap();
    assert!(out.direction.is_empty());
    assert!((out.e_sub - h.reference_energy()).abs() < 1e-12);
}

#[test]
fn selected_operator_has_the_largest_gradient() {
    let ints = common::load("h4_1.50");
    let h = SubspaceHamiltonian::full(&ints);
    let pool = build_pool(4);
    let psi0 = reference_state(4, 2, &[]).unwrap();
    let ham = CompiledHamiltonian::for_state(&h, &psi0).unwrap();
    let run = |n: usize| {
        let cfg = SolverConfig {
            max_ops_total: n,
            ..SolverConfig::default()
        };
        adapt_stage(&h, Direction::new(), &pool, &cfg).unwrap()
    };
    let full = run(4);
    for i in 0..full.direction.len() {
        let before = run(i).direction;
        let psi: Statevector = before.prepare(&psi0);
        let g = pool_gradients(&psi, &ham.apply(psi.amps()), &pool);
        let best = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!((full.selected_gradients[i] - best).abs() < 1e-9);
        let op = &full.direction.records()[i].op;
        let chosen = pool
            .iter()
            .position(|o| o.create == op.create && o.annihilate == op.annihilate)
            .unwrap();
        assert!(g[chosen].abs() >= best - 1e-12);
    }
}

#[test]
fn oe_run_bookkeeping_is_consistent() {
    let ints = common::load("h6_1.50");
    let frag = FragmentSpec::parse("0", 6).unwrap();
    let cfg = SolverConfig {
        max_ops_total: 40,
        ..SolverConfig::default()
    };
    let a = oe_run(&ints, &frag, &cfg).unwrap();
    let b = oe_run(&ints, &frag, &cfg).unwrap();
    assert_eq!(a.total_ops, b.total_ops);
    assert_eq!(a.final_e_g.to_bits(), b.final_e_g.to_bits());
    assert_eq!(a.stages.len(), a.delta_lambda.len() + 1);
    for s in &a.stages {
        assert_eq!(s.e_g, assemble_energy(s.e_sub, s.e_core, s.e_nuc));
        assert!((s.e_warm_start - s.e_reference).abs() < 1e-8 || s.n_s > 0);
        assert!(s.energies.windows(2).all(|w| w[1] <= w[0] + 1e-10), "stage {}", s.n_s);
        if let Some(first) = s.energies.first() {
            assert!(*first <= s.e_warm_start + 1e-10);
        }
    }
    let ops: usize = a.stages.iter().map(|s| s.ops_appended).sum();
    assert_eq!(ops, a.total_ops);
    assert!(a.total_ops <= 40);
}

#[test]
fn first_stage_starts_from_hartree_fock() {
    let ints = common::load("h6_2.00");
    let frag = FragmentSpec::parse("2,3", 6).unwrap();
    let r = oe_run(&ints, &frag, &SolverConfig::default()).unwrap();
    assert!((r.stages[0].e_warm_start - r.e_hf).abs() < 1e-8);
    for s in &r.stages {
        assert!((s.e_reference - r.e_hf).abs() < 1e-8);
    }
}

#[test]
fn measurement_accounting_formulas() {
    let ints = common::load("h6_1.00");
    let frag = FragmentSpec::parse("0", 6).unwrap();
    let cfg = SolverConfig::default();
    let oe = oe_run(&ints, &frag, &cfg).unwrap();
    let m = oe.measurement.as_ref().unwrap();
    assert_eq!(m.m_base, oe.total_ops as u64 * pool_size(6) as u64 * 1_000_000);
    let sum: u64 = oe
        .stages
        .iter()
        .map(|s| s.ops_appended as u64 * pool_size(s.k) as u64 * 1_000_000)
        .sum();
    assert_eq!(m.m_total, sum);
    assert!(m.m_total < m.m_base);
    let mut empty = oe.clone();
    empty.stages.clear();
    empty.total_ops = 0;
    let e = measurement_accounting(&empty, &cfg, None);
    assert_eq!((e.m_total, e.m_base), (0, 0));
}

#[test]
fn delta_threshold_is_validated() {
    let ints = common::load("h4_1.00");
    let cfg = SolverConfig {
        delta: -1.0,
        ..SolverConfig::default()
    };
    let e = oe_run(&ints, &FragmentSpec::parse("0", 4).unwrap(), &cfg).unwrap_err();
    assert!(e.is_input_error());
}
