//! Action of a subspace Hamiltonian on statevectors.
//!
//! `H = Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`, applied by
//! direct fermionic action on occupied/empty spin orbitals.

use rayon::prelude::*;

use super::excitation::{apply_excitation_in_place, tau_overlap, ExcitationOp};
use super::{annihilate, create, sector_of, Statevector, C64};
use crate::error::{Error, Result};
use crate::projection::SubspaceHamiltonian;

/// Dense copies of the integrals for the inner loops.
#[derive(Clone, Debug)]
struct Tables {
    k: usize,
    h1: Vec<f64>,
    eri: Vec<f64>,
}

impl Tables {
    fn new(h: &SubspaceHamiltonian) -> Self {
        let k = h.k;
        Self {
            k,
            h1: h.h1.transpose().as_slice().to_vec(),
            eri: h.eri.to_dense(),
        }
    }

    #[inline]
    fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let k = self.k;
        self.eri[((p * k + q) * k + r) * k + s]
    }

    /// Every `(y, ⟨y|H|x⟩)` contribution, duplicates included.
    fn for_each_element(&self, x: u64, mut f: impl FnMut(u64, f64)) {
        let k = self.k;
        let n = 2 * k;
        let occ: Vec<usize> = (0..n).filter(|&i| x >> i & 1 == 1).collect();
        for &i in &occ {
            let (sigma, q) = (i % 2, i / 2);
            let (y1, s1) = annihilate(i, x).unwrap();
            for p in 0..k {
                let h = self.h1[p * k + q];
                if h == 0.0 {
                    continue;
                }
                let j = 2 * p + sigma;
                if let Some((y, s2)) = create(j, y1) {
                    f(y, h * s1 * s2);
                }
            }
        }
        for &qq in &occ {
            let (y1, s1) = annihilate(qq, x).unwrap();
            let (sig, q) = (qq % 2, qq / 2);
            for &ss in &occ {
                if ss == qq {
                    continue;
                }
                let (y2, s2) = annihilate(ss, y1).unwrap();
                let (tau, s) = (ss % 2, ss / 2);
                for r in 0..k {
                    let Some((y3, s3)) = create(2 * r + tau, y2) else {
                        continue;
                    };
                    for p in 0..k {
                        let v = self.eri(p, q, r, s);
                        if v == 0.0 {
                            continue;
                        }
                        if let Some((y4, s4)) = create(2 * p + sig, y3) {
                            f(y4, 0.5 * v * s1 * s2 * s3 * s4);
                        }
                    }
                }
            }
        }
    }
}

fn check_register(psi: &Statevector, h: &SubspaceHamiltonian) -> Result<()> {
    if psi.n_qubits() != 2 * h.k {
        return Err(Error::Dimension(format!(
            "{}-qubit state for a {}-orbital Hamiltonian",
            psi.n_qubits(),
            h.k
        )));
    }
    Ok(())
}

/// `H|ψ⟩` by direct action.
pub fn apply_hamiltonian(psi: &Statevector, h: &SubspaceHamiltonian) -> Result<Vec<C64>> {
    check_register(psi, h)?;
    let t = Tables::new(h);
    let mut out = vec![C64::new(0.0, 0.0); psi.amps().len()];
    for (x, a) in psi.amps().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        t.for_each_element(x as u64, |y, v| out[y as usize] += a * v);
    }
    Ok(out)
}

/// `⟨ψ|H_sub|ψ⟩` (no core or nuclear constant).
pub fn expectation(psi: &Statevector, h: &SubspaceHamiltonian) -> Result<f64> {
    let hpsi = apply_hamiltonian(psi, h)?;
    Ok(real_overlap(psi.amps(), &hpsi))
}

fn real_overlap(a: &[C64], b: &[C64]) -> f64 {
    let z: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    debug_assert!(z.im.abs() < 1e-8 * z.re.abs().max(1.0), "complex energy {z}");
    z.re
}

#[derive(Clone, Debug)]
enum Action {
    Sparse {
        states: Vec<u64>,
        index: Vec<u32>,
        row_ptr: Vec<usize>,
        cols: Vec<u32>,
        vals: Vec<f64>,
    },
    Direct {
        sectors: Vec<(u32, u32)>,
    },
}

/// `H_sub` restricted to fixed particle sectors, stored sparse when small
/// enough and applied on the fly otherwise.
#[derive(Clone, Debug)]
pub struct CompiledHamiltonian {
    n_qubits: usize,
    tables: Tables,
    action: Action,
}

impl CompiledHamiltonian {
    /// Largest sector dimension stored as a sparse matrix.
    pub const SPARSE_LIMIT: usize = 20_000;

    pub fn new(h: &SubspaceHamiltonian, sectors: &[(u32, u32)]) -> Result<Self> {
        let n = 2 * h.k;
        if n > Statevector::MAX_QUBITS {
            return Err(Error::InvalidInput(format!("{n} qubits exceed the simulator limit")));
        }
        let tables = Tables::new(h);
        let states: Vec<u64> = (0..1u64 << n)
            .filter(|&x| sectors.contains(&sector_of(x)))
            .collect();
        if states.len() > Self::SPARSE_LIMIT {
            return Ok(Self {
                n_qubits: n,
                tables,
                action: Action::Direct {
                    sectors: sectors.to_vec(),
                },
            });
        }
        let mut index = vec![u32::MAX; 1usize << n];
        for (i, &x) in states.iter().enumerate() {
            index[x as usize] = i as u32;
        }
        let mut row_ptr = vec![0usize];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut row: Vec<(u32, f64)> = Vec::new();
        for &x in &states {
            row.clear();
            tables.for_each_element(x, |y, v| row.push((index[y as usize], v)));
            row.sort_unstable_by_key(|e| e.0);
            let mut last = u32::MAX;
            for &(j, v) in &row {
                if j == last {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                    last = j;
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self {
            n_qubits: n,
            tables,
            action: Action::Sparse {
                states,
                index,
                row_ptr,
                cols,
                vals,
            },
        })
    }

    /// Compile for the sectors in which `psi` has weight.
    pub fn for_state(h: &SubspaceHamiltonian, psi: &Statevector) -> Result<Self> {
        check_register(psi, h)?;
        Self::new(h, &psi.sectors(1e-24))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dimension(&self) -> Option<usize> {
        match &self.action {
            Action::Sparse { states, .. } => Some(states.len()),
            Action::Direct { .. } => None,
        }
    }

    /// `H|ψ⟩` on the full register; components outside the sectors are dropped.
    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        assert_eq!(amps.len(), 1usize << self.n_qubits);
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        match &self.action {
            Action::Sparse {
                states,
                row_ptr,
                cols,
                vals,
                ..
            } => {
                for (i, &x) in states.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for e in row_ptr[i]..row_ptr[i + 1] {
                        acc += amps[states[cols[e] as usize] as usize] * vals[e];
                    }
                    out[x as usize] = acc;
                }
            }
            Action::Direct { sectors } => {
                for (x, a) in amps.iter().enumerate() {
                    if a.norm_sqr() == 0.0 || !sectors.contains(&sector_of(x as u64)) {
                        continue;
                    }
                    self.tables
                        .for_each_element(x as u64, |y, v| out[y as usize] += a * v);
                }
            }
        }
        out
    }

    pub fn expectation(&self, psi: &Statevector) -> f64 {
        real_overlap(psi.amps(), &self.apply(psi.amps()))
    }

    /// Sector basis and the map from basis state to sector position
    /// (`u32::MAX` outside), when stored sparse.
    pub(crate) fn sector_index(&self) -> Option<(&[u64], &[u32])> {
        match &self.action {
            Action::Sparse { states, index, .. } => Some((states, index)),
            Action::Direct { .. } => None,
        }
    }

    /// `out = H v` for real vectors in sector order. Panics unless sparse.
    pub(crate) fn apply_real_sector(&self, v: &[f64], out: &mut [f64]) {
        let Action::Sparse {
            row_ptr, cols, vals, ..
        } = &self.action
        else {
            panic!("sector kernels need a sparse Hamiltonian");
        };
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for e in row_ptr[i]..row_ptr[i + 1] {
                acc += v[cols[e] as usize] * vals[e];
            }
            *o = acc;
        }
    }

    /// Real symmetric sector matrix as dense rows (small problems only).
    pub fn sector_matrix(&self) -> Option<(Vec<u64>, Vec<Vec<f64>>)> {
        let Action::Sparse {
            states,
            row_ptr,
            cols,
            vals,
            ..
        } = &self.action
        else {
            return None;
        };
        let d = states.len();
        let mut m = vec![vec![0.0; d]; d];
        for i in 0..d {
            for e in row_ptr[i]..row_ptr[i + 1] {
                m[i][cols[e] as usize] += vals[e];
            }
        }
        Some((states.clone(), m))
    }
}

/// `⟨ψ|[H, τ]|ψ⟩ = 2 Re ⟨Hψ|τψ⟩`.
pub fn pool_gradient(psi: &Statevector, h: &SubspaceHamiltonian, op: &ExcitationOp) -> Result<f64> {
    let hpsi = apply_hamiltonian(psi, h)?;
    Ok(2.0 * tau_overlap(&hpsi, psi.amps(), psi.n_qubits(), op).re)
}

/// Pool gradients for many operators, given `H|ψ⟩`.
pub fn pool_gradients(psi: &Statevector, hpsi: &[C64], ops: &[ExcitationOp]) -> Vec<f64> {
    let n = psi.n_qubits();
    ops.par_iter()
        .map(|op| 2.0 * tau_overlap(hpsi, psi.amps(), n, op).re)
        .collect()
}

/// Energy and exact parameter gradient of `Π_i e^{θ_i τ_i} |ψ0⟩` (operator 0
/// applied first) via one forward and one adjoint sweep.
pub fn energy_and_gradient(
    ops: &[&ExcitationOp],
    thetas: &[f64],
    psi0: &Statevector,
    ham: &CompiledHamiltonian,
) -> Result<(f64, Vec<f64>, Statevector)> {
    if ops.len() != thetas.len() {
        return Err(Error::Dimension(format!(
            "{} operators with {} angles",
            ops.len(),
            thetas.len()
        )));
    }
    if psi0.n_qubits() != ham.n_qubits() {
        return Err(Error::Dimension("state and Hamiltonian registers differ".into()));
    }
    if let Some(op) = ops.iter().find(|op| op.register_size() > psi0.n_qubits()) {
        return Err(Error::Dimension(format!("operator {op} outside the register")));
    }
    let mut psi = psi0.clone();
    for (op, &t) in ops.iter().zip(thetas) {
        apply_excitation_in_place(&mut psi, op, t);
    }
    let hpsi = ham.apply(psi.amps());
    let energy = real_overlap(psi.amps(), &hpsi);
    let n = psi.n_qubits();
    let mut phi = psi.clone();
    let mut lam = Statevector::from_amplitudes(n, hpsi)?;
    let mut grad = vec![0.0; ops.len()];
    for i in (0..ops.len()).rev() {
        grad[i] = 2.0 * tau_overlap(lam.amps(), phi.amps(), n, ops[i]).re;
        if i > 0 {
            apply_excitation_in_place(&mut phi, ops[i], -thetas[i]);
            apply_excitation_in_place(&mut lam, ops[i], -thetas[i]);
        }
    }
    Ok((energy, grad, psi))
}

/// Exact `∂E/∂θ_i` for the product ansatz on `psi0`.
pub fn energy_gradient(
    ops: &[&ExcitationOp],
    thetas: &[f64],
    psi0: &Statevector,
    h: &SubspaceHamiltonian,
) -> Result<Vec<f64>> {
    check_register(psi0, h)?;
    let ham = CompiledHamiltonian::for_state(h, psi0)?;
    Ok(energy_and_gradient(ops, thetas, psi0, &ham)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermisim::{jw_encode, reference_state};
    use crate::integrals::{Eri, IntegralSet};
    use nalgebra::DMatrix;

    fn toy() -> SubspaceHamiltonian {
        let mut eri = Eri::zeros(2);
        eri.set(0, 0, 0, 0, 0.6);
        eri.set(1, 1, 1, 1, 0.5);
        eri.set(0, 0, 1, 1, 0.4);
        eri.set(0, 1, 0, 1, 0.15);
        eri.set(0, 0, 0, 1, 0.05);
        let h1 = DMatrix::from_row_slice(2, 2, &[-1.2, 0.1, 0.1, -0.4]);
        let ints = IntegralSet::new(2, 0.0, h1, eri, "toy").unwrap();
        SubspaceHamiltonian::full(&ints)
    }

    #[test]
    fn zero_hamiltonian_has_zero_energy() {
        let ints =
            IntegralSet::new(2, 0.0, DMatrix::zeros(2, 2), Eri::zeros(2), "z").unwrap();
        let h = SubspaceHamiltonian::full(&ints);
        let psi = reference_state(2, 1, &[]).unwrap();
        assert_eq!(expectation(&psi, &h).unwrap(), 0.0);
    }

    #[test]
    fn reference_matches_closed_form() {
        let h = toy();
        let psi = reference_state(2, 1, &[]).unwrap();
        let e = expectation(&psi, &h).unwrap();
        assert!((e - h.reference_energy()).abs() < 1e-14);
        assert!((e - (2.0 * -1.2 + 0.6)).abs() < 1e-14);
    }

    #[test]
    fn compiled_matches_direct() {
        let h = toy();
        let mut psi = reference_state(2, 1, &[]).unwrap();
        let d = jw_encode(&[2, 3, 0, 1], 4).unwrap();
        let s = jw_encode(&[0, 2], 4).unwrap();
        apply_excitation_in_place(&mut psi, &d, 0.3);
        apply_excitation_in_place(&mut psi, &s, -0.2);
        let c = CompiledHamiltonian::for_state(&h, &psi).unwrap();
        assert!((c.expectation(&psi) - expectation(&psi, &h).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let h = toy();
        let psi0 = reference_state(2, 1, &[]).unwrap();
        let d = jw_encode(&[2, 3, 0, 1], 4).unwrap();
        let s = jw_encode(&[1, 3], 4).unwrap();
        let ops = [&d, &s];
        let th = [0.2, -0.1];
        let g = energy_gradient(&ops, &th, &psi0, &h).unwrap();
        let energy = |t: &[f64]| {
            let mut p = psi0.clone();
            for (op, &x) in ops.iter().zip(t) {
                apply_excitation_in_place(&mut p, op, x);
            }
            expectation(&p, &h).unwrap()
        };
        let eps = 1e-5;
        for i in 0..2 {
            let mut tp = th;
            let mut tm = th;
            tp[i] += eps;
            tm[i] -= eps;
            let fd = (energy(&tp) - energy(&tm)) / (2.0 * eps);
            assert!((fd - g[i]).abs() < 1e-8, "{i}: {fd} vs {}", g[i]);
        }
        assert!(energy_gradient(&[], &[], &psi0, &h).unwrap().is_empty());
    }
}
