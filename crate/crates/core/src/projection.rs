//! Projected active-space Hamiltonians.
//!
//! A subspace is given by an `L×k` column isometry `C` (in the LO basis) and
//! the doubly occupied orbitals that sit outside it (`core_remainder`). The
//! frozen core enters through an effective one-body potential `V_eff`, a
//! scalar core energy, and a reduced electron count.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{Eri, IntegralSet};
use crate::scf::{build_fock, two_electron_potential};

/// Occupation of an environment orbital appended to the active space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvTag {
    /// Doubly occupied in the reference.
    Core,
    /// Empty in the reference.
    Virtual,
}

/// Active-space Hamiltonian `H_sub`, orbitals ordered impurity first, then
/// appended environment orbitals.
#[derive(Clone, Debug)]
pub struct SubspaceHamiltonian {
    pub k: usize,
    /// One-body integrals including `V_eff`.
    pub h1: DMatrix<f64>,
    pub eri: Eri,
    pub e_core: f64,
    pub e_nuc: f64,
    pub n_elec_sub: usize,
    /// Doubly occupied impurity orbitals in the reference (orbitals `0..n_imp_occ`).
    pub n_imp_occ: usize,
    /// Tags of the appended environment orbitals (the last `occ_pattern.len()` orbitals).
    pub occ_pattern: Vec<EnvTag>,
}

impl SubspaceHamiltonian {
    /// The full Hamiltonian in its own basis (identity projection).
    pub fn full(ints: &IntegralSet) -> Self {
        Self {
            k: ints.n_orb,
            h1: ints.h1.clone(),
            eri: ints.eri.clone(),
            e_core: 0.0,
            e_nuc: ints.e_nuc,
            n_elec_sub: ints.n_elec,
            n_imp_occ: ints.n_occ(),
            occ_pattern: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.k
    }

    pub fn n_impurity(&self) -> usize {
        self.k - self.occ_pattern.len()
    }

    /// Export as an integral set whose constant is `E_core + E_nuc`.
    pub fn to_integral_set(&self, label: &str) -> Result<IntegralSet> {
        IntegralSet::new(
            self.n_elec_sub,
            self.e_core + self.e_nuc,
            self.h1.clone(),
            self.eri.clone(),
            label,
        )
    }

    /// Closed-form energy of the reference determinant (`E_sub` only).
    pub fn reference_energy(&self) -> f64 {
        let occ = self.reference_occupied();
        let mut e = 0.0;
        for &i in &occ {
            e += 2.0 * self.h1[(i, i)];
            for &j in &occ {
                e += 2.0 * self.eri.get(i, i, j, j) - self.eri.get(i, j, j, i);
            }
        }
        e
    }

    /// Spatial orbitals doubly occupied in the reference determinant.
    pub fn reference_occupied(&self) -> Vec<usize> {
        let n_imp = self.n_impurity();
        let mut occ: Vec<usize> = (0..self.n_imp_occ).collect();
        for (i, tag) in self.occ_pattern.iter().enumerate() {
            if *tag == EnvTag::Core {
                occ.push(n_imp + i);
            }
        }
        occ
    }
}

/// `D_core = 2 R Rᵀ`.
pub fn core_density(core_remainder: &DMatrix<f64>) -> DMatrix<f64> {
    core_remainder * core_remainder.transpose() * 2.0
}

/// Frozen-core energy `½ Σ (h + F[D_core])_ij (D_core)_ij`.
pub fn core_energy(ints: &IntegralSet, d_core: &DMatrix<f64>) -> Result<f64> {
    let f = build_fock(d_core, ints)?;
    Ok(0.5 * (&ints.h1 + f).component_mul(d_core).sum())
}

/// `(pq|rs) → Σ C_pa C_qb C_rc C_sd (pq|rs)` as four one-index passes.
pub fn transform_eri(eri: &Eri, c: &DMatrix<f64>) -> Eri {
    let n = eri.n_orb();
    let k = c.ncols();
    let dense = eri.to_dense();
    // pass 1: (a q | r s)
    let mut t1 = vec![0.0; k * n * n * n];
    let n3 = n * n * n;
    for p in 0..n {
        let src = &dense[p * n3..(p + 1) * n3];
        for a in 0..k {
            let cpa = c[(p, a)];
            if cpa == 0.0 {
                continue;
            }
            let dst = &mut t1[a * n3..(a + 1) * n3];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += cpa * s;
            }
        }
    }
    // pass 2: (a b | r s)
    let n2 = n * n;
    let mut t2 = vec![0.0; k * k * n2];
    for a in 0..k {
        for q in 0..n {
            let src = &t1[(a * n + q) * n2..(a * n + q + 1) * n2];
            for b in 0..k {
                let cqb = c[(q, b)];
                if cqb == 0.0 {
                    continue;
                }
                let dst = &mut t2[(a * k + b) * n2..(a * k + b + 1) * n2];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += cqb * s;
                }
            }
        }
    }
    // pass 3: (a b | c s)
    let mut t3 = vec![0.0; k * k * k * n];
    for ab in 0..k * k {
        for r in 0..n {
            let src = &t2[ab * n2 + r * n..ab * n2 + (r + 1) * n];
            for cc in 0..k {
                let crc = c[(r, cc)];
                if crc == 0.0 {
                    continue;
                }
                let dst = &mut t3[(ab * k + cc) * n..(ab * k + cc + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += crc * s;
                }
            }
        }
    }
    // pass 4: (a b | c d)
    let mut t4 = vec![0.0; k * k * k * k];
    for abc in 0..k * k * k {
        let src = &t3[abc * n..(abc + 1) * n];
        for d in 0..k {
            let mut acc = 0.0;
            for (s, v) in src.iter().enumerate() {
                acc += c[(s, d)] * v;
            }
            t4[abc * k + d] = acc;
        }
    }
    Eri::from_dense(k, &t4)
}

/// Build `H_sub` for the column space of `c` with the orbitals of
/// `core_remainder` frozen doubly occupied.
pub fn build_subspace_hamiltonian(
    ints: &IntegralSet,
    c: &DMatrix<f64>,
    core_remainder: &DMatrix<f64>,
    n_elec_sub: usize,
) -> Result<SubspaceHamiltonian> {
    let l = ints.n_orb;
    let k = c.ncols();
    if k == 0 {
        return Err(Error::InvalidInput("empty subspace".into()));
    }
    if c.nrows() != l || core_remainder.nrows() != l {
        return Err(Error::Dimension(format!(
            "projector has {} rows, core block {} rows, basis {}",
            c.nrows(),
            core_remainder.nrows(),
            l
        )));
    }
    if k + core_remainder.ncols() > l {
        return Err(Error::Dimension("subspace plus core exceeds the basis".into()));
    }
    if !n_elec_sub.is_multiple_of(2)
        || n_elec_sub > 2 * k
        || n_elec_sub + 2 * core_remainder.ncols() != ints.n_elec
    {
        return Err(Error::InvalidInput(format!(
            "electron count {n_elec_sub} inconsistent with k={k}, {} core orbitals, {} total",
            core_remainder.ncols(),
            ints.n_elec
        )));
    }
    let d_core = core_density(core_remainder);
    let v_eff = two_electron_potential(ints, &d_core);
    let h1 = c.transpose() * (&ints.h1 + v_eff) * c;
    let h1 = crate::linalg::symmetrize(&h1);
    let eri = transform_eri(&ints.eri, c);
    let e_core = if core_remainder.ncols() == 0 {
        0.0
    } else {
        core_energy(ints, &d_core)?
    };
    Ok(SubspaceHamiltonian {
        k,
        h1,
        eri,
        e_core,
        e_nuc: ints.e_nuc,
        n_elec_sub,
        n_imp_occ: n_elec_sub / 2,
        occ_pattern: Vec::new(),
    })
}

/// `E_sub = Σ h_ij ¹D_ij + ½ Σ (il|jk) ²D_ijkl` with
/// `²D_ijkl = Σ_στ ⟨a†_iσ a†_jτ a_kτ a_lσ⟩` stored row-major.
pub fn subspace_energy(h: &SubspaceHamiltonian, rdm1: &DMatrix<f64>, rdm2: &[f64]) -> Result<f64> {
    let k = h.k;
    if rdm1.nrows() != k || rdm1.ncols() != k || rdm2.len() != k * k * k * k {
        return Err(Error::Dimension(format!(
            "RDMs do not match a {k}-orbital subspace"
        )));
    }
    let mut e = h.h1.component_mul(rdm1).sum();
    let mut e2 = 0.0;
    for i in 0..k {
        for j in 0..k {
            for kk in 0..k {
                for l in 0..k {
                    let d = rdm2[((i * k + j) * k + kk) * k + l];
                    if d != 0.0 {
                        e2 += h.eri.get(i, l, j, kk) * d;
                    }
                }
            }
        }
    }
    e += 0.5 * e2;
    Ok(e)
}

/// `E_g = E_sub + E_core + E_nuc`.
pub fn assemble_energy(e_sub: f64, e_core: f64, e_nuc: f64) -> f64 {
    e_sub + e_core + e_nuc
}
