//! OE-ADAPT against plain ADAPT at the same operator budget.
//!
//! cargo run --release --example compare_adapt -- fixtures/h6_2.00.fcidump 0 100

use oevqe::embedding::FragmentSpec;
use oevqe::integrals::read_fcidump;
use oevqe::oracle::fci_integrals;
use oevqe::solver::{adapt_run, oe_run, SolverConfig};

fn main() -> oevqe::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().collect();
    let ints = read_fcidump(args.get(1).map_or("fixtures/h6_2.00.fcidump", |s| s.as_str()))?;
    let frag = FragmentSpec::parse(args.get(2).map_or("0", |s| s.as_str()), ints.n_orb)?;
    let cfg = SolverConfig {
        max_ops_total: args.get(3).map_or(100, |s| s.parse().expect("budget")),
        ..SolverConfig::default()
    };
    let fci = fci_integrals(&ints)?.energy;
    let base = adapt_run(&ints, &cfg)?;
    let mut oe = oe_run(&ints, &frag, &cfg)?;
    oe.set_reference(fci);
    oe.set_baseline(&base);
    let m = oe.measurement.as_ref().expect("measurement summary");
    println!("E_FCI      {fci:.10}");
    println!("ADAPT      {:.10}  ops {:>3}  error {:.3e}", base.final_e_g, base.total_ops, (base.final_e_g - fci).abs());
    println!("OE-ADAPT   {:.10}  ops {:>3}  error {:.3e}", oe.final_e_g, oe.total_ops, oe.error.unwrap_or(f64::NAN));
    println!("shots      OE {}  base {}  ratio {:.4}", m.m_total, m.m_base, m.ratio);
    Ok(())
}
