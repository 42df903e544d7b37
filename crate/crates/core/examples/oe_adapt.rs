//! Orbital-expansion ADAPT-VQE on an FCIDUMP file.
//!
//! cargo run --release --example oe_adapt -- fixtures/h6_1.00.fcidump 0 [schedule] [final_threshold] [budget]
//!
//! `schedule` is a comma list such as `0,4`; `-` keeps every stage.

use oevqe::embedding::FragmentSpec;
use oevqe::integrals::read_fcidump;
use oevqe::oracle::fci_integrals;
use oevqe::solver::{oe_run, SolverConfig};

fn main() -> oevqe::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().collect();
    let arg = |i: usize| args.get(i).map(String::as_str).filter(|s| *s != "-");
    let ints = read_fcidump(arg(1).unwrap_or("fixtures/h4_1.00.fcidump"))?;
    let frag = FragmentSpec::parse(arg(2).unwrap_or("0"), ints.n_orb)?;
    let mut cfg = SolverConfig::default();
    let n_stages = match arg(3) {
        Some(s) => {
            let stages: Vec<usize> = s.split(',').map(|x| x.parse().expect("stage index")).collect();
            let n = stages.len();
            cfg.stage_schedule = Some(stages);
            n
        }
        None => ints.n_orb + 1,
    };
    if let Some(t) = arg(4) {
        let mut th = vec![cfg.grad_threshold; n_stages];
        th[n_stages - 1] = t.parse().expect("final-stage threshold");
        cfg.stage_thresholds = th;
    }
    if let Some(b) = arg(5) {
        cfg.max_ops_total = b.parse().expect("operator budget");
    }
    let mut report = oe_run(&ints, &frag, &cfg)?;
    let fci = fci_integrals(&ints)?;
    report.set_reference(fci.energy);
    println!("HF   {:.10}", report.e_hf);
    for s in &report.stages {
        println!(
            "N_s={:<2} k={:<2} ops+{:<3} E_ref={:.10} E_g={:.10}",
            s.n_s, s.k, s.ops_appended, s.e_reference, s.e_g
        );
    }
    println!("FCI  {:.10}", fci.energy);
    println!("ops {} error {:.3e}", report.total_ops, report.error.unwrap_or(f64::NAN));
    Ok(())
}
