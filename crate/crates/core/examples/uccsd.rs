//! Fixed UCCSD ansatz grown stage by stage.
//!
//! cargo run --release --example uccsd -- fixtures/h4_1.50.fcidump 0

use oevqe::embedding::FragmentSpec;
use oevqe::integrals::read_fcidump;
use oevqe::oracle::fci_integrals;
use oevqe::solver::{oe_uccsd, SolverConfig};

fn main() -> oevqe::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let ints = read_fcidump(args.get(1).map_or("fixtures/h4_1.50.fcidump", |s| s.as_str()))?;
    let frag = FragmentSpec::parse(args.get(2).map_or("0", |s| s.as_str()), ints.n_orb)?;
    let mut report = oe_uccsd(&ints, &frag, &SolverConfig::default())?;
    report.set_reference(fci_integrals(&ints)?.energy);
    for s in &report.stages {
        println!("N_s={} k={} +{} amplitudes  E_g {:.10}", s.n_s, s.k, s.ops_appended, s.e_g);
    }
    println!("{} amplitudes, error {:.3e}", report.total_ops, report.error.unwrap_or(f64::NAN));
    Ok(())
}
