//! Real-arithmetic ansatz kernels on the sector basis of a compiled Hamiltonian.

use super::{CompiledHamiltonian, ExcitationOp, Statevector};
use crate::error::{Error, Result};

type Pairs = Vec<(u32, u32, f64)>;

/// A product ansatz whose generators are pre-expanded into coupled pairs of
/// sector positions. Valid for real states only.
pub struct SectorAnsatz<'h> {
    ham: &'h CompiledHamiltonian,
    pairs: Vec<Pairs>,
}

fn rotate(v: &mut [f64], pairs: &Pairs, theta: f64) {
    let (sn, c) = theta.sin_cos();
    for &(x, y, s) in pairs {
        let (x, y) = (x as usize, y as usize);
        let (a, b) = (v[x], v[y]);
        v[x] = a * c - b * s * sn;
        v[y] = b * c + a * s * sn;
    }
}

fn overlap(bra: &[f64], ket: &[f64], pairs: &Pairs) -> f64 {
    pairs
        .iter()
        .map(|&(x, y, s)| {
            let (x, y) = (x as usize, y as usize);
            (bra[y] * ket[x] - bra[x] * ket[y]) * s
        })
        .sum()
}

impl<'h> SectorAnsatz<'h> {
    /// `None` when `ham` is applied on the fly rather than stored.
    pub fn new(ham: &'h CompiledHamiltonian, ops: &[&ExcitationOp]) -> Option<Self> {
        let (_, index) = ham.sector_index()?;
        let n = ham.n_qubits();
        let pairs = ops
            .iter()
            .map(|op| {
                let mut p = Vec::new();
                op.for_each_pair(n, |x, y, s| {
                    let (ix, iy) = (index[x], index[y]);
                    if ix != u32::MAX && iy != u32::MAX {
                        p.push((ix, iy, s));
                    }
                });
                p
            })
            .collect();
        Some(Self { ham, pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Sector components of a real state; `None` if `psi` has imaginary parts
    /// or weight outside the sectors.
    pub fn restrict(&self, psi: &Statevector) -> Option<Vec<f64>> {
        let (states, index) = self.ham.sector_index()?;
        for (x, a) in psi.amps().iter().enumerate() {
            if a.im != 0.0 || (index[x] == u32::MAX && a.re != 0.0) {
                return None;
            }
        }
        Some(states.iter().map(|&x| psi.amps()[x as usize].re).collect())
    }

    /// Energy and gradient of `Π_i e^{θ_i τ_i}` on the sector vector `psi0`.
    pub fn energy_and_gradient(&self, thetas: &[f64], psi0: &[f64]) -> Result<(f64, Vec<f64>)> {
        if thetas.len() != self.pairs.len() {
            return Err(Error::Dimension(format!(
                "{} operators with {} angles",
                self.pairs.len(),
                thetas.len()
            )));
        }
        let mut phi = psi0.to_vec();
        for (p, &t) in self.pairs.iter().zip(thetas) {
            rotate(&mut phi, p, t);
        }
        let mut lam = vec![0.0; phi.len()];
        self.ham.apply_real_sector(&phi, &mut lam);
        let energy = phi.iter().zip(&lam).map(|(a, b)| a * b).sum();
        let mut grad = vec![0.0; thetas.len()];
        for i in (0..thetas.len()).rev() {
            grad[i] = 2.0 * overlap(&lam, &phi, &self.pairs[i]);
            if i > 0 {
                rotate(&mut phi, &self.pairs[i], -thetas[i]);
                rotate(&mut lam, &self.pairs[i], -thetas[i]);
            }
        }
        Ok((energy, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermisim::{energy_and_gradient, jw_encode, reference_state};
    use crate::integrals::{Eri, IntegralSet};
    use crate::projection::SubspaceHamiltonian;
    use nalgebra::DMatrix;

    #[test]
    fn matches_full_register_kernel() {
        let n = 3;
        let h1 = DMatrix::from_fn(n, n, |i, j| -1.0 / (1.0 + (i as f64 - j as f64).abs()));
        let mut eri = Eri::zeros(n);
        for p in 0..n {
            for q in 0..n {
                eri.set(p, p, q, q, 0.5 / (1.0 + (p as f64 - q as f64).abs()));
            }
        }
        let ints = IntegralSet::new(2, 0.0, h1, eri, "toy").unwrap();
        let h = SubspaceHamiltonian::full(&ints);
        let psi0 = reference_state(3, 1, &[]).unwrap();
        let ham = CompiledHamiltonian::for_state(&h, &psi0).unwrap();
        let ops = [
            jw_encode(&[0, 2], 6).unwrap(),
            jw_encode(&[2, 3, 0, 1], 6).unwrap(),
            jw_encode(&[4, 5, 0, 1], 6).unwrap(),
            jw_encode(&[1, 5], 6).unwrap(),
        ];
        let refs: Vec<&ExcitationOp> = ops.iter().collect();
        let thetas = [0.3, -0.2, 0.15, 0.05];
        let (e, g, _) = energy_and_gradient(&refs, &thetas, &psi0, &ham).unwrap();
        let sa = SectorAnsatz::new(&ham, &refs).unwrap();
        let v0 = sa.restrict(&psi0).unwrap();
        let (es, gs) = sa.energy_and_gradient(&thetas, &v0).unwrap();
        assert!((e - es).abs() < 1e-12);
        for (a, b) in g.iter().zip(&gs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
