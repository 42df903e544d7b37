//! Gradient variance of excitation generators under random Hamiltonians.
//!
//! Each sample is `H = V† H₀ V` with `V` Haar-random and `H₀` a fixed
//! traceless diagonal of unit Hilbert–Schmidt norm. The gradient of every
//! generator that moves the reference determinant `|x₀⟩` to `s|y⟩` is
//! `2 s Re ⟨y|H|x₀⟩`, which needs only columns `x₀` and `y` of `V`. Those
//! columns come from a thin QR of a complex Gaussian matrix, which has the
//! same law as the corresponding columns of a full Haar unitary.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermisim::{jw_encode, C64};

pub const MAX_BP_QUBITS: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct BpResult {
    pub n_qubits: usize,
    pub n_hamiltonians: usize,
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of the mean from per-Hamiltonian averages.
    pub std_error: f64,
}

/// Generators acting nontrivially on `|x0⟩`, as `(y, s)` with `τ|x0⟩ = s|y⟩`.
/// The action is read off the Pauli expansion.
pub fn reference_couplings(n_qubits: usize, x0: u64) -> Result<Vec<(u64, f64)>> {
    let mut index_sets: Vec<Vec<usize>> = Vec::new();
    for p in 0..n_qubits {
        for q in p + 1..n_qubits {
            if p % 2 == q % 2 {
                index_sets.push(vec![p, q]);
            }
        }
    }
    let mut pairs = Vec::new();
    for p in 0..n_qubits {
        for q in p + 1..n_qubits {
            pairs.push((p, q));
        }
    }
    for (i, &(p, q)) in pairs.iter().enumerate() {
        for &(r, s) in &pairs[..i] {
            let distinct = [p, q].iter().all(|x| *x != r && *x != s);
            let beta = |a: usize, b: usize| a % 2 + b % 2;
            if distinct && beta(p, q) == beta(r, s) {
                index_sets.push(vec![p, q, r, s]);
            }
        }
    }
    let mut out = Vec::new();
    for idx in index_sets {
        let op = jw_encode(&idx, n_qubits)?;
        let mut image: BTreeMap<u64, C64> = BTreeMap::new();
        for t in &op.pauli_terms {
            let (y, ph) = t.apply_basis(x0);
            *image.entry(y).or_insert(C64::new(0.0, 0.0)) += t.coeff * ph;
        }
        for (y, c) in image {
            if c.norm() > 1e-12 {
                out.push((y, c.re));
            }
        }
    }
    Ok(out)
}

/// Half-filled closed-shell reference on `n_qubits / 2` orbitals.
pub fn bp_reference(n_qubits: usize) -> u64 {
    let k = n_qubits / 2;
    (0..k / 2).fold(0u64, |x, j| x | 0b11 << (2 * j))
}

/// Fixed traceless diagonal with `Tr(H₀²) = 1`.
pub fn bp_diagonal(n_qubits: usize, seed: u64) -> Vec<f64> {
    let d = 1usize << n_qubits;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean = h.iter().sum::<f64>() / d as f64;
    h.iter_mut().for_each(|x| *x -= mean);
    let norm = h.iter().map(|x| x * x).sum::<f64>().sqrt();
    h.iter_mut().for_each(|x| *x /= norm);
    h
}

/// Gradients `2 s Re Σ_i conj(V_iy) h_i V_ix0` given the columns of `V`
/// (column 0 is `x0`, column `j+1` the target of `couplings[j]`).
fn gradients_from_columns(h0: &[f64], cols: &DMatrix<C64>, couplings: &[(u64, f64)], col_of: &BTreeMap<u64, usize>) -> Vec<f64> {
    couplings
        .iter()
        .map(|(y, s)| {
            let cy = col_of[y];
            let mut acc = C64::new(0.0, 0.0);
            for (i, h) in h0.iter().enumerate() {
                acc += cols[(i, cy)].conj() * cols[(i, 0)] * *h;
            }
            2.0 * s * acc.re
        })
        .collect()
}

fn target_columns(couplings: &[(u64, f64)]) -> (Vec<u64>, BTreeMap<u64, usize>) {
    let mut targets: Vec<u64> = couplings.iter().map(|c| c.0).collect();
    targets.sort_unstable();
    targets.dedup();
    let col_of = targets.iter().enumerate().map(|(j, &y)| (y, j + 1)).collect();
    (targets, col_of)
}

/// Gradients at the reference for `H = V† diag(h0) V` with an explicit unitary.
pub fn bp_gradients_with_unitary(n_qubits: usize, h0: &[f64], v: &DMatrix<C64>) -> Result<Vec<f64>> {
    let d = 1usize << n_qubits;
    if v.nrows() != d || v.ncols() != d || h0.len() != d {
        return Err(Error::Dimension(format!("unitary or diagonal does not match {n_qubits} qubits")));
    }
    let x0 = bp_reference(n_qubits);
    let couplings = reference_couplings(n_qubits, x0)?;
    let (targets, col_of) = target_columns(&couplings);
    let mut cols = DMatrix::from_element(d, targets.len() + 1, C64::new(0.0, 0.0));
    cols.set_column(0, &v.column(x0 as usize));
    for (j, y) in targets.iter().enumerate() {
        cols.set_column(j + 1, &v.column(*y as usize));
    }
    Ok(gradients_from_columns(h0, &cols, &couplings, &col_of))
}

/// First `m` columns of a Haar unitary of dimension `d`.
pub fn haar_columns(d: usize, m: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn bp_variance_experiment(n_qubits: usize, n_hamiltonians: usize, seed: u64) -> Result<BpResult> {
    if n_qubits < 4 || !n_qubits.is_multiple_of(2) || n_qubits > MAX_BP_QUBITS {
        return Err(Error::InvalidInput(format!(
            "qubit count must be even and in [4, {MAX_BP_QUBITS}], got {n_qubits}"
        )));
    }
    if n_hamiltonians == 0 {
        return Err(Error::InvalidInput("at least one Hamiltonian is required".into()));
    }
    let d = 1usize << n_qubits;
    let h0 = bp_diagonal(n_qubits, seed);
    let couplings = reference_couplings(n_qubits, bp_reference(n_qubits))?;
    let (targets, col_of) = target_columns(&couplings);
    let samples: Vec<Vec<f64>> = (0..n_hamiltonians)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64 + 1);
            let cols = haar_columns(d, targets.len() + 1, &mut rng);
            gradients_from_columns(&h0, &cols, &couplings, &col_of)
        })
        .collect();
    let all: Vec<f64> = samples.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let mean = all.iter().sum::<f64>() / n;
    let variance = all.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let per_h: Vec<f64> = samples
        .iter()
        .map(|s| s.iter().sum::<f64>() / s.len() as f64)
        .collect();
    let nh = per_h.len() as f64;
    let mh = per_h.iter().sum::<f64>() / nh;
    let var_h = per_h.iter().map(|x| (x - mh).powi(2)).sum::<f64>() / (nh - 1.0).max(1.0);
    Ok(BpResult {
        n_qubits,
        n_hamiltonians,
        n_samples: all.len(),
        mean,
        variance,
        std_error: (var_h / nh).sqrt(),
    })
}

/// Least-squares slope of `log₂(variance)` against qubit count.
pub fn log2_slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
