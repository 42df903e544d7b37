//! MP2-based ranking of environment orbitals.
//!
//! Two MP2 calculations estimate how many electrons each environment orbital
//! exchanges with the impurity: impurity-occupied with environment-virtual
//! (score `λ^vir`) and environment-core with impurity-unoccupied (score
//! `2 − λ^core`). Environment orbitals are rotated into the natural orbitals
//! of those blocks and sorted by score.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::embedding::EmbeddingBasis;
use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::linalg::{hcat, sym_eigen, symmetrize};
use crate::projection::{build_subspace_hamiltonian, transform_eri, EnvTag, SubspaceHamiltonian};
use crate::scf::build_fock;

/// Impurity orbitals in the eigenbasis of the projected Fock matrix.
#[derive(Clone, Debug)]
pub struct ImpuritySplit {
    pub u_occ: DMatrix<f64>,
    pub u_unocc: DMatrix<f64>,
    /// Ascending; the first `u_occ.ncols()` belong to occupied orbitals.
    pub energies: Vec<f64>,
    pub n_elec_imp: usize,
    /// `F^LO` built from the full density.
    pub fock_lo: DMatrix<f64>,
}

pub fn impurity_fock_split(ints: &IntegralSet, b: &EmbeddingBasis) -> Result<ImpuritySplit> {
    let fock_lo = build_fock(&b.density, ints)?;
    let c_imp = b.impurity_columns();
    let f_ueo = c_imp.transpose() * &fock_lo * &c_imp;
    let (energies, vecs) = sym_eigen(&f_ueo);
    let trace = b.impurity_electrons();
    let l = trace.round();
    if (trace - l).abs() > 1e-6 || l < 0.0 {
        return Err(Error::NonIntegralElectrons(trace));
    }
    let l = l as usize;
    let n_occ = (l / 2).min(c_imp.ncols());
    let rotated = c_imp * vecs;
    Ok(ImpuritySplit {
        u_occ: rotated.columns(0, n_occ).into_owned(),
        u_unocc: rotated.columns(n_occ, rotated.ncols() - n_occ).into_owned(),
        energies,
        n_elec_imp: l,
        fock_lo,
    })
}

/// Spin-summed MP2 densities of one occupied/virtual block pair, expressed in
/// the basis of the input columns.
#[derive(Clone, Debug)]
pub struct Mp2Block {
    pub d_occ: DMatrix<f64>,
    pub d_vir: DMatrix<f64>,
    pub e_corr: f64,
}

/// Unrelaxed MP2 one-body densities for the occupied space `occ_cols` and the
/// virtual space `vir_cols`, with orbital energies from `fock_lo`.
pub fn mp2_block_rdm(
    ints: &IntegralSet,
    fock_lo: &DMatrix<f64>,
    occ_cols: &DMatrix<f64>,
    vir_cols: &DMatrix<f64>,
) -> Result<Mp2Block> {
    let l = ints.n_orb;
    if occ_cols.nrows() != l || vir_cols.nrows() != l || fock_lo.nrows() != l {
        return Err(Error::Dimension("MP2 block columns do not match the basis".into()));
    }
    let (no, nv) = (occ_cols.ncols(), vir_cols.ncols());
    if no == 0 || nv == 0 {
        return Ok(Mp2Block {
            d_occ: DMatrix::identity(no, no) * 2.0,
            d_vir: DMatrix::zeros(nv, nv),
            e_corr: 0.0,
        });
    }
    let (eps_o, r_o) = sym_eigen(&(occ_cols.transpose() * fock_lo * occ_cols));
    let (eps_v, r_v) = sym_eigen(&(vir_cols.transpose() * fock_lo * vir_cols));
    let c = hcat(&[&(occ_cols * &r_o), &(vir_cols * &r_v)], l);
    let eri = transform_eri(&ints.eri, &c);

    let idx = |i: usize, j: usize, a: usize, b: usize| ((i * no + j) * nv + a) * nv + b;
    let mut t = vec![0.0; no * no * nv * nv];
    let mut e_corr = 0.0;
    for i in 0..no {
        for j in 0..no {
            for a in 0..nv {
                for b in 0..nv {
                    let denom = eps_o[i] + eps_o[j] - eps_v[a] - eps_v[b];
                    let v = eri.get(i, no + a, j, no + b);
                    if denom.abs() < 1e-10 {
                        if v.abs() < 1e-14 {
                            continue;
                        }
                        return Err(Error::DegenerateDenominator {
                            i,
                            j,
                            a,
                            b,
                            value: denom,
                        });
                    }
                    t[idx(i, j, a, b)] = v / denom;
                }
            }
        }
    }
    for i in 0..no {
        for j in 0..no {
            for a in 0..nv {
                for b in 0..nv {
                    e_corr += eri.get(i, no + a, j, no + b)
                        * (2.0 * t[idx(i, j, a, b)] - t[idx(i, j, b, a)]);
                }
            }
        }
    }

    let mut d_vir = DMatrix::zeros(nv, nv);
    for a in 0..nv {
        for b in 0..nv {
            let mut acc = 0.0;
            for i in 0..no {
                for j in 0..no {
                    for c in 0..nv {
                        acc += t[idx(i, j, a, c)]
                            * (2.0 * t[idx(i, j, b, c)] - t[idx(i, j, c, b)]);
                    }
                }
            }
            d_vir[(a, b)] = 2.0 * acc;
        }
    }
    let mut d_occ = DMatrix::identity(no, no) * 2.0;
    for i in 0..no {
        for j in 0..no {
            let mut acc = 0.0;
            for k in 0..no {
                for a in 0..nv {
                    for b in 0..nv {
                        acc += t[idx(i, k, a, b)]
                            * (2.0 * t[idx(j, k, a, b)] - t[idx(j, k, b, a)]);
                    }
                }
            }
            d_occ[(i, j)] -= 2.0 * acc;
        }
    }
    Ok(Mp2Block {
        d_occ: symmetrize(&(&r_o * symmetrize(&d_occ) * r_o.transpose())),
        d_vir: symmetrize(&(&r_v * symmetrize(&d_vir) * r_v.transpose())),
        e_corr,
    })
}

/// LO → MUEO rotation with ranked environment columns.
#[derive(Clone, Debug, Serialize)]
pub struct RankedBasis {
    #[serde(skip)]
    pub u_full: DMatrix<f64>,
    pub delta_lambda: Vec<f64>,
    pub class_of: Vec<EnvTag>,
    pub n_frag: usize,
    pub n_bath: usize,
    /// Doubly occupied impurity orbitals in the reference.
    pub l_occ: usize,
    pub n_elec: usize,
    pub impurity_energies: Vec<f64>,
    /// Block-Fock energy of each ranked environment column.
    pub env_energies: Vec<f64>,
    pub mp2_corr_vir: f64,
    pub mp2_corr_core: f64,
}

impl RankedBasis {
    pub fn n_impurity(&self) -> usize {
        self.n_frag + self.n_bath
    }

    pub fn n_env(&self) -> usize {
        self.delta_lambda.len()
    }

    pub fn n_orb(&self) -> usize {
        self.u_full.nrows()
    }
}

struct Candidate {
    score: f64,
    tag: EnvTag,
    fermi_distance: f64,
    energy: f64,
    column: DMatrix<f64>,
}

pub fn rank_environment(ints: &IntegralSet, b: &EmbeddingBasis) -> Result<RankedBasis> {
    let split = impurity_fock_split(ints, b)?;
    let fock = &split.fock_lo;
    let l = ints.n_orb;

    let (vir_block, core_block) = rayon::join(
        || mp2_block_rdm(ints, fock, &split.u_occ, &b.u_vir),
        || mp2_block_rdm(ints, fock, &b.u_core, &split.u_unocc),
    );
    let (vir_block, core_block) = (vir_block?, core_block?);

    let n_occ = split.u_occ.ncols();
    let fermi = match (n_occ, split.energies.len()) {
        (0, 0) => 0.0,
        (0, _) => split.energies[0],
        (o, n) if o == n => split.energies[o - 1],
        (o, _) => 0.5 * (split.energies[o - 1] + split.energies[o]),
    };

    let mut cands = Vec::new();
    let mut push = |score: f64, tag: EnvTag, column: DMatrix<f64>| {
        let energy = (column.transpose() * fock * &column)[(0, 0)];
        cands.push(Candidate {
            score: score.clamp(0.0, 2.0),
            tag,
            fermi_distance: (energy - fermi).abs(),
            energy,
            column,
        });
    };
    let (lv, vv) = sym_eigen(&vir_block.d_vir);
    let rotated_vir = &b.u_vir * vv;
    for (j, lam) in lv.iter().enumerate() {
        push(*lam, EnvTag::Virtual, rotated_vir.columns(j, 1).into_owned());
    }
    let (lc, vc) = sym_eigen(&core_block.d_occ);
    let rotated_core = &b.u_core * vc;
    for (j, lam) in lc.iter().enumerate() {
        push(2.0 - lam, EnvTag::Core, rotated_core.columns(j, 1).into_owned());
    }

    cands.sort_by(|x, y| {
        let d = y.score - x.score;
        if d.abs() > 1e-12 {
            return d.partial_cmp(&0.0).unwrap();
        }
        let rank = |t: EnvTag| if t == EnvTag::Virtual { 0 } else { 1 };
        rank(x.tag)
            .cmp(&rank(y.tag))
            .then(x.fermi_distance.total_cmp(&y.fermi_distance))
    });

    let mut blocks: Vec<&DMatrix<f64>> = vec![&split.u_occ, &split.u_unocc];
    blocks.extend(cands.iter().map(|c| &c.column));
    let u_full = hcat(&blocks, l);

    Ok(RankedBasis {
        u_full,
        delta_lambda: cands.iter().map(|c| c.score).collect(),
        class_of: cands.iter().map(|c| c.tag).collect(),
        n_frag: b.n_frag(),
        n_bath: b.n_bath(),
        l_occ: n_occ,
        n_elec: ints.n_elec,
        impurity_energies: split.energies.clone(),
        env_energies: cands.iter().map(|c| c.energy).collect(),
        mp2_corr_vir: vir_block.e_corr,
        mp2_corr_core: core_block.e_corr,
    })
}

/// Column selection for one stage.
#[derive(Clone, Debug)]
pub struct StageProjector {
    pub c: DMatrix<f64>,
    pub core_remainder: DMatrix<f64>,
    pub occ_pattern: Vec<EnvTag>,
    pub n_elec_sub: usize,
    pub n_imp_occ: usize,
}

pub fn stage_projector(r: &RankedBasis, n_s: usize) -> Result<StageProjector> {
    if n_s > r.n_env() {
        return Err(Error::InvalidInput(format!(
            "stage {n_s} exceeds the {} environment orbitals",
            r.n_env()
        )));
    }
    let k = r.n_impurity() + n_s;
    let c = r.u_full.columns(0, k).into_owned();
    let remainder: Vec<usize> = (n_s..r.n_env())
        .filter(|&j| r.class_of[j] == EnvTag::Core)
        .map(|j| r.n_impurity() + j)
        .collect();
    let core_remainder = crate::linalg::select_columns(&r.u_full, &remainder);
    Ok(StageProjector {
        c,
        n_elec_sub: r.n_elec - 2 * remainder.len(),
        core_remainder,
        occ_pattern: r.class_of[..n_s].to_vec(),
        n_imp_occ: r.l_occ,
    })
}

/// `H_sub(N_s)` with the reference occupation attached.
pub fn stage_hamiltonian(ints: &IntegralSet, r: &RankedBasis, n_s: usize) -> Result<SubspaceHamiltonian> {
    let p = stage_projector(r, n_s)?;
    let mut h = build_subspace_hamiltonian(ints, &p.c, &p.core_remainder, p.n_elec_sub)?;
    h.n_imp_occ = p.n_imp_occ;
    h.occ_pattern = p.occ_pattern;
    Ok(h)
}
