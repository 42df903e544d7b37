//! Closed-shell MP2 energy from canonical RHF orbitals.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::scf::RhfSolution;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Mp2Energy {
    pub e_hf: f64,
    pub e_corr: f64,
    pub e_total: f64,
}

/// `E_corr = Σ (ia|jb) [2(ia|jb) − (ib|ja)] / (ε_i + ε_j − ε_a − ε_b)`.
pub fn mp2_total_energy(ints: &IntegralSet, sol: &RhfSolution) -> Result<Mp2Energy> {
    let n = ints.n_orb;
    let no = ints.n_occ();
    let nv = n - no;
    let c = &sol.coeffs;
    let eps = &sol.orbital_energies;
    if c.nrows() != n || c.ncols() != n || eps.len() != n {
        return Err(Error::Dimension("RHF solution does not match the integrals".into()));
    }
    // (ia|jb) by direct half transforms: first (ia|rs), then contract r, s.
    let mut ia_rs = vec![0.0; no * nv * n * n];
    for i in 0..no {
        for a in 0..nv {
            for r in 0..n {
                for s in 0..=r {
                    let mut v = 0.0;
                    for p in 0..n {
                        let cpi = c[(p, i)];
                        if cpi == 0.0 {
                            continue;
                        }
                        for q in 0..n {
                            v += cpi * c[(q, no + a)] * ints.get_eri(p, q, r, s);
                        }
                    }
                    ia_rs[((i * nv + a) * n + r) * n + s] = v;
                    ia_rs[((i * nv + a) * n + s) * n + r] = v;
                }
            }
        }
    }
    let mut ovov = vec![0.0; no * nv * no * nv];
    for ia in 0..no * nv {
        for j in 0..no {
            for b in 0..nv {
                let mut v = 0.0;
                for r in 0..n {
                    for s in 0..n {
                        v += c[(r, j)] * c[(s, no + b)] * ia_rs[(ia * n + r) * n + s];
                    }
                }
                ovov[(ia * no + j) * nv + b] = v;
            }
        }
    }
    let get = |i: usize, a: usize, j: usize, b: usize| ovov[((i * nv + a) * no + j) * nv + b];
    let mut e_corr = 0.0;
    for i in 0..no {
        for j in 0..no {
            for a in 0..nv {
                for b in 0..nv {
                    let d = eps[i] + eps[j] - eps[no + a] - eps[no + b];
                    if d.abs() < 1e-10 {
                        return Err(Error::DegenerateDenominator {
                            i,
                            j,
                            a,
                            b,
                            value: d,
                        });
                    }
                    let v = get(i, a, j, b);
                    e_corr += v * (2.0 * v - get(i, b, j, a)) / d;
                }
            }
        }
    }
    Ok(Mp2Energy {
        e_hf: sol.energy,
        e_corr,
        e_total: sol.energy + e_corr,
    })
}
