//! Full CI in the `S_z = 0` determinant sector.
//!
//! Determinants are pairs of α and β occupation strings, ordered α-first
//! (`a†_α… a†_β… |vac⟩`), so β excitations carry no sign from the α string.
//! The σ-vector uses the replacement-list form
//! `H = Σ k_pq E_pq + ½ Σ (pq|rs) E_pq E_rs` with
//! `k_pq = h_pq − ½ Σ_r (pr|rq)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::fermisim::{Statevector, C64};
use crate::integrals::IntegralSet;
use crate::projection::SubspaceHamiltonian;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FciMethod {
    Lanczos,
    Dense,
}

#[derive(Clone, Debug)]
pub struct FciResult {
    /// Total energy, including `E_core + E_nuc`.
    pub energy: f64,
    pub electronic: f64,
    /// Ground-state coefficients over `strings × strings`, α index major.
    pub coeffs: Vec<f64>,
    pub strings: Vec<u64>,
    pub n_orb: usize,
    pub dimension: usize,
    pub iterations: usize,
}

impl FciResult {
    /// The ground state on the spin-interleaved qubit register.
    pub fn to_statevector(&self) -> Result<Statevector> {
        let k = self.n_orb;
        let ns = self.strings.len();
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << (2 * k)];
        for (ia, &a) in self.strings.iter().enumerate() {
            for (ib, &b) in self.strings.iter().enumerate() {
                let mut x = 0u64;
                let mut inversions = 0u32;
                for i in 0..k {
                    if a >> i & 1 == 1 {
                        x |= 1 << (2 * i);
                        inversions += (b & ((1u64 << i) - 1)).count_ones();
                    }
                    if b >> i & 1 == 1 {
                        x |= 1 << (2 * i + 1);
                    }
                }
                let sign = if inversions.is_multiple_of(2) { 1.0 } else { -1.0 };
                amps[x as usize] = C64::new(sign * self.coeffs[ia * ns + ib], 0.0);
            }
        }
        Statevector::from_amplitudes(2 * k, amps)
    }
}

/// `E_pq |J⟩ = sign |I⟩` within one spin string space.
#[derive(Clone, Copy)]
struct Replacement {
    pq: usize,
    target: usize,
    sign: f64,
}

struct StringSpace {
    strings: Vec<u64>,
    lists: Vec<Vec<Replacement>>,
}

fn string_space(k: usize, n: usize) -> StringSpace {
    let strings: Vec<u64> = (0..1u64 << k).filter(|s| s.count_ones() as usize == n).collect();
    let mut lookup = vec![usize::MAX; 1usize << k];
    for (i, &s) in strings.iter().enumerate() {
        lookup[s as usize] = i;
    }
    let sign_below = |s: u64, j: usize| -> f64 {
        if (s & ((1u64 << j) - 1)).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    };
    let lists = strings
        .iter()
        .map(|&s| {
            let mut out = Vec::new();
            for q in (0..k).filter(|&q| s >> q & 1 == 1) {
                let s1 = s ^ (1 << q);
                let sg1 = sign_below(s, q);
                for p in 0..k {
                    if s1 >> p & 1 == 1 {
                        continue;
                    }
                    let t = s1 | (1 << p);
                    out.push(Replacement {
                        pq: p * k + q,
                        target: lookup[t as usize],
                        sign: sg1 * sign_below(s1, p),
                    });
                }
            }
            out
        })
        .collect();
    StringSpace { strings, lists }
}

struct Sigma {
    k: usize,
    space: StringSpace,
    kmat: Vec<f64>,
    /// `½ (pq|rs)` as a `k² × k²` matrix.
    half_eri: DMatrix<f64>,
}

impl Sigma {
    fn new(h: &SubspaceHamiltonian) -> Self {
        let k = h.k;
        let mut kmat = vec![0.0; k * k];
        for p in 0..k {
            for q in 0..k {
                let mut v = h.h1[(p, q)];
                for r in 0..k {
                    v -= 0.5 * h.eri.get(p, r, r, q);
                }
                kmat[p * k + q] = v;
            }
        }
        let half_eri = DMatrix::from_fn(k * k, k * k, |pq, rs| {
            0.5 * h.eri.get(pq / k, pq % k, rs / k, rs % k)
        });
        Self {
            k,
            space: string_space(k, h.n_elec_sub / 2),
            kmat,
            half_eri,
        }
    }

    fn dim(&self) -> usize {
        self.space.strings.len().pow(2)
    }

    /// `out[pq] += E_pq c` for all `pq`, stored as a `dim × k²` matrix.
    fn excitations(&self, c: &[f64]) -> DMatrix<f64> {
        let ns = self.space.strings.len();
        let mut d = DMatrix::zeros(ns * ns, self.k * self.k);
        for ja in 0..ns {
            for jb in 0..ns {
                let cj = c[ja * ns + jb];
                if cj == 0.0 {
                    continue;
                }
                for r in &self.space.lists[ja] {
                    d[(r.target * ns + jb, r.pq)] += r.sign * cj;
                }
                for r in &self.space.lists[jb] {
                    d[(ja * ns + r.target, r.pq)] += r.sign * cj;
                }
            }
        }
        d
    }

    /// `Σ_pq E_pq g[:, pq]`.
    fn contract(&self, g: &DMatrix<f64>) -> Vec<f64> {
        let ns = self.space.strings.len();
        let mut out = vec![0.0; ns * ns];
        // E_pq† = E_qp, so gather through the transposed replacement lists.
        for ja in 0..ns {
            for jb in 0..ns {
                let mut acc = 0.0;
                for r in &self.space.lists[ja] {
                    let qp = (r.pq % self.k) * self.k + r.pq / self.k;
                    acc += r.sign * g[(r.target * ns + jb, qp)];
                }
                for r in &self.space.lists[jb] {
                    let qp = (r.pq % self.k) * self.k + r.pq / self.k;
                    acc += r.sign * g[(ja * ns + r.target, qp)];
                }
                out[ja * ns + jb] = acc;
            }
        }
        out
    }

    fn apply(&self, c: &[f64]) -> Vec<f64> {
        let d = self.excitations(c);
        let g = &d * &self.half_eri;
        let mut sigma = self.contract(&g);
        for (col, kv) in self.kmat.iter().enumerate() {
            if *kv == 0.0 {
                continue;
            }
            for (s, x) in sigma.iter_mut().zip(d.column(col).iter()) {
                *s += kv * x;
            }
        }
        sigma
    }
}

fn lanczos(op: &Sigma, max_iter: usize, tol: f64) -> Result<(f64, Vec<f64>, usize)> {
    let n = op.dim();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nrm = v0.iter().map(|x| x * x).sum::<f64>().sqrt();
    v0.iter_mut().for_each(|x| *x /= nrm);

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut basis: Vec<Vec<f64>> = vec![v0];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let max_iter = max_iter.min(n);
    let mut last = (f64::NAN, Vec::new());
    for it in 0..max_iter {
        let mut w = op.apply(&basis[it]);
        let a = dot(&w, &basis[it]);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = dot(&w, &w).sqrt();
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let imin = eig.eigenvalues.imin();
        let y: DVector<f64> = eig.eigenvectors.column(imin).into_owned();
        let residual = (b * y[m - 1]).abs();
        last = (eig.eigenvalues[imin], y.iter().copied().collect::<Vec<_>>());
        if residual < tol || b < 1e-12 || m == n {
            let mut vec = vec![0.0; n];
            for (coef, v) in last.1.iter().zip(&basis) {
                vec.iter_mut().zip(v).for_each(|(x, y)| *x += coef * y);
            }
            let nrm = dot(&vec, &vec).sqrt();
            vec.iter_mut().for_each(|x| *x /= nrm);
            return Ok((last.0, vec, it + 1));
        }
        beta.push(b);
        basis.push(w.into_iter().map(|x| x / b).collect());
    }
    Err(Error::EigenNotConverged(format!(
        "Lanczos stopped after {max_iter} iterations at E = {:.12}",
        last.0
    )))
}

fn fix_phase(v: &mut [f64]) {
    let imax = v
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, x)| if x.abs() > acc.1 + 1e-12 { (i, x.abs()) } else { acc })
        .0;
    if v.get(imax).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lowest eigenpair of `H_sub` in the closed-shell `S_z = 0` sector.
pub fn fci_ground_state_with(h: &SubspaceHamiltonian, method: FciMethod) -> Result<FciResult> {
    if h.k > 16 {
        return Err(Error::InvalidInput(format!("{} orbitals exceed the FCI limit", h.k)));
    }
    if !h.n_elec_sub.is_multiple_of(2) || h.n_elec_sub > 2 * h.k {
        return Err(Error::InvalidInput("empty closed-shell sector".into()));
    }
    let op = Sigma::new(h);
    let n = op.dim();
    let (e, mut vec, iterations) = match method {
        FciMethod::Lanczos => lanczos(&op, 400, 1e-10)?,
        FciMethod::Dense => {
            if n > 4000 {
                return Err(Error::InvalidInput(format!("dense FCI at dimension {n}")));
            }
            let mut m = DMatrix::zeros(n, n);
            let mut e = vec![0.0; n];
            for j in 0..n {
                e[j] = 1.0;
                let col = op.apply(&e);
                m.set_column(j, &DVector::from_vec(col));
                e[j] = 0.0;
            }
            let eig = SymmetricEigen::new(crate::linalg::symmetrize(&m));
            let imin = eig.eigenvalues.imin();
            (
                eig.eigenvalues[imin],
                eig.eigenvectors.column(imin).iter().copied().collect(),
                1,
            )
        }
    };
    fix_phase(&mut vec);
    Ok(FciResult {
        energy: e + h.e_core + h.e_nuc,
        electronic: e,
        coeffs: vec,
        strings: op.space.strings,
        n_orb: h.k,
        dimension: n,
        iterations,
    })
}

pub fn fci_ground_state(h: &SubspaceHamiltonian) -> Result<FciResult> {
    fci_ground_state_with(h, FciMethod::Lanczos)
}

/// FCI of a full integral set.
pub fn fci_integrals(ints: &IntegralSet) -> Result<FciResult> {
    fci_ground_state(&SubspaceHamiltonian::full(ints))
}
