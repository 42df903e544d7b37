//! H6 dissociation scan, OE-ADAPT against the exact energy.
//!
//! cargo run --release --example curve -- 2,3

use oevqe::embedding::FragmentSpec;
use oevqe::integrals::read_fcidump;
use oevqe::oracle::fci_integrals;
use oevqe::solver::{oe_run, SolverConfig};
use rayon::prelude::*;

fn main() -> oevqe::Result<()> {
    let frag_text = std::env::args().nth(1).unwrap_or_else(|| "2,3".into());
    let cfg = SolverConfig::default();
    let rows: Vec<oevqe::Result<(f64, f64, f64, usize)>> = ["1.00", "1.50", "2.00", "2.40"]
        .par_iter()
        .map(|d| {
            let ints = read_fcidump(format!("fixtures/h6_{d}.fcidump"))?;
            let frag = FragmentSpec::parse(&frag_text, ints.n_orb)?;
            let r = oe_run(&ints, &frag, &cfg)?;
            Ok((d.parse().unwrap(), r.final_e_g, fci_integrals(&ints)?.energy, r.total_ops))
        })
        .collect();
    println!("d(A)   E_OE            E_FCI           error      ops");
    for row in rows {
        let (d, e, fci, ops) = row?;
        println!("{d:.2}  {e:.10}  {fci:.10}  {:.2e}  {ops}", (e - fci).abs());
    }
    Ok(())
}
