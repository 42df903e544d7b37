//! Closed-shell restricted Hartree–Fock in an orthonormal orbital basis.
//!
//! Fixed-point iteration accelerated by DIIS on the commutator `FD − DF`,
//! or plain linear density mixing when the DIIS space is zero. Convergence is
//! declared when both `max |FD − DF|` and the energy change fall below the
//! tolerance.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrals::IntegralSet;
use crate::linalg::{max_abs, sym_eigen};

/// Converged mean-field state.
#[derive(Clone, Debug, Serialize)]
pub struct RhfSolution {
    /// Orbital coefficients; columns are MOs in the input basis.
    #[serde(skip)]
    pub coeffs: DMatrix<f64>,
    /// Ascending orbital energies.
    pub orbital_energies: Vec<f64>,
    /// Spin-summed density `2 C_occ C_occᵀ`.
    #[serde(skip)]
    pub density: DMatrix<f64>,
    /// Total energy including nuclear repulsion.
    pub energy: f64,
    pub iterations: usize,
    /// Total energy at every iteration (before mixing).
    pub energy_history: Vec<f64>,
    pub final_residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct ScfOptions {
    pub max_iter: usize,
    pub conv_tol: f64,
    /// Weight of the new aufbau density in `D ← D + w (D_new − D)`.
    pub mixing: f64,
    /// Number of stored Fock/error pairs; 0 disables DIIS.
    pub diis_space: usize,
}

impl Default for ScfOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            conv_tol: 1e-10,
            mixing: 0.7,
            diis_space: 8,
        }
    }
}

/// `G[D]_ij = Σ_kl D_kl ((ij|kl) − ½ (ik|jl))`.
pub fn two_electron_potential(ints: &IntegralSet, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = ints.n_orb;
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    let dkl = d[(k, l)];
                    if dkl == 0.0 {
                        continue;
                    }
                    acc += dkl * (ints.get_eri(i, j, k, l) - 0.5 * ints.get_eri(i, k, j, l));
                }
            }
            g[(i, j)] = acc;
            g[(j, i)] = acc;
        }
    }
    g
}

/// Fock matrix `F = h + G[D]`.
pub fn build_fock(d: &DMatrix<f64>, ints: &IntegralSet) -> Result<DMatrix<f64>> {
    if d.nrows() != ints.n_orb || d.ncols() != ints.n_orb {
        return Err(Error::Dimension(format!(
            "density is {}x{}, basis has {} orbitals",
            d.nrows(),
            d.ncols(),
            ints.n_orb
        )));
    }
    Ok(&ints.h1 + two_electron_potential(ints, d))
}

/// `½ Σ_ij (h + F)_ij D_ij`, without nuclear repulsion.
pub fn electronic_energy(h1: &DMatrix<f64>, fock: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    0.5 * (h1 + fock).component_mul(d).sum()
}

fn aufbau_density(coeffs: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let occ = coeffs.columns(0, n_occ);
    occ * occ.transpose() * 2.0
}

fn commutator_residual(f: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    max_abs(&(f * d - d * f))
}

/// RHF with the default mixing factor.
pub fn run_rhf(ints: &IntegralSet, max_iter: usize, conv_tol: f64) -> Result<RhfSolution> {
    run_rhf_with(
        ints,
        &ScfOptions {
            max_iter,
            conv_tol,
            ..ScfOptions::default()
        },
    )
}

pub fn run_rhf_with(ints: &IntegralSet, opts: &ScfOptions) -> Result<RhfSolution> {
    let n_occ = ints.n_occ();
    let (_, c0) = sym_eigen(&ints.h1);
    let mut d = aufbau_density(&c0, n_occ);
    let mut history = Vec::new();
    let mut prev_energy = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut diis: Vec<(DMatrix<f64>, DMatrix<f64>)> = Vec::new();

    for iter in 0..opts.max_iter {
        let f = build_fock(&d, ints)?;
        let energy = electronic_energy(&ints.h1, &f, &d) + ints.e_nuc;
        history.push(energy);
        residual = commutator_residual(&f, &d);
        let de = (energy - prev_energy).abs();
        log::debug!("scf iter {iter:3}: E = {energy:.12}  [F,D] = {residual:.3e}");
        if residual < opts.conv_tol && de < opts.conv_tol {
            return finish(ints, &d, history, iter + 1, residual);
        }
        prev_energy = energy;
        if opts.diis_space > 0 {
            let err = &f * &d - &d * &f;
            diis.push((f, err));
            if diis.len() > opts.diis_space {
                diis.remove(0);
            }
            let f_ext = diis_extrapolate(&mut diis);
            let (_, c) = sym_eigen(&f_ext);
            d = aufbau_density(&c, n_occ);
        } else {
            let (_, c) = sym_eigen(&f);
            let d_new = aufbau_density(&c, n_occ);
            d += (d_new - &d) * opts.mixing;
        }
    }
    Err(Error::ScfNotConverged {
        iterations: opts.max_iter,
        residual,
    })
}

/// Pulay extrapolation; drops the oldest entries while the system is singular.
fn diis_extrapolate(space: &mut Vec<(DMatrix<f64>, DMatrix<f64>)>) -> DMatrix<f64> {
    while space.len() > 1 {
        let m = space.len();
        let mut b = DMatrix::<f64>::zeros(m + 1, m + 1);
        for i in 0..m {
            for j in 0..=i {
                let v = space[i].1.dot(&space[j].1);
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
            b[(i, m)] = -1.0;
            b[(m, i)] = -1.0;
        }
        let mut rhs = DVector::<f64>::zeros(m + 1);
        rhs[m] = -1.0;
        if let Some(c) = b.lu().solve(&rhs).filter(|c| c.iter().all(|x| x.is_finite())) {
            let mut f = DMatrix::zeros(space[0].0.nrows(), space[0].0.ncols());
            for (i, (fi, _)) in space.iter().enumerate() {
                f += fi * c[i];
            }
            return f;
        }
        space.remove(0);
    }
    space[0].0.clone()
}

fn finish(
    ints: &IntegralSet,
    d: &DMatrix<f64>,
    history: Vec<f64>,
    iterations: usize,
    residual: f64,
) -> Result<RhfSolution> {
    let n_occ = ints.n_occ();
    let f = build_fock(d, ints)?;
    let (eps, c) = sym_eigen(&f);
    if n_occ < ints.n_orb {
        let (homo, lumo) = (eps[n_occ - 1], eps[n_occ]);
        if (lumo - homo).abs() < 1e-8 {
            return Err(Error::DegenerateFermiLevel { homo, lumo });
        }
    }
    let density = aufbau_density(&c, n_occ);
    let f_final = build_fock(&density, ints)?;
    let energy = electronic_energy(&ints.h1, &f_final, &density) + ints.e_nuc;
    Ok(RhfSolution {
        coeffs: c,
        orbital_energies: eps,
        density,
        energy,
        iterations,
        energy_history: history,
        final_residual: residual,
    })
}
