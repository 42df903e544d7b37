//! Jordan–Wigner statevector simulation.
//!
//! Spatial orbital `j` maps to qubits `2j` (α) and `2j+1` (β); qubit `q` is
//! bit `q` of the basis index. A basis index `x` stands for the determinant
//! `a†_{q1} … a†_{qm} |vac⟩` with `q1 < … < qm`, so `a_j` picks up the sign
//! `(−1)^(occupied qubits below j)`. Extending the register appends qubits
//! above all existing ones and leaves every existing operator's sign pattern
//! untouched.

mod excitation;
mod hamiltonian;
mod rdm;
mod sector;

pub use excitation::{
    apply_excitation, apply_excitation_in_place, jw_encode, tau_overlap, ExcitationKind, ExcitationOp, PauliTerm,
};
pub use hamiltonian::{
    apply_hamiltonian, energy_and_gradient, energy_gradient, expectation, pool_gradient,
    pool_gradients, CompiledHamiltonian,
};
pub use rdm::rdm12;
pub use sector::SectorAnsatz;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::projection::EnvTag;

pub type C64 = Complex64;

/// Apply `a_j` to basis state `x`: `None` if the qubit is empty.
#[inline]
pub(crate) fn annihilate(j: usize, x: u64) -> Option<(u64, f64)> {
    let bit = 1u64 << j;
    if x & bit == 0 {
        return None;
    }
    Some((x ^ bit, parity_below(j, x)))
}

/// Apply `a†_j` to basis state `x`: `None` if the qubit is occupied.
#[inline]
pub(crate) fn create(j: usize, x: u64) -> Option<(u64, f64)> {
    let bit = 1u64 << j;
    if x & bit != 0 {
        return None;
    }
    Some((x | bit, parity_below(j, x)))
}

#[inline]
fn parity_below(j: usize, x: u64) -> f64 {
    if (x & ((1u64 << j) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

const ALPHA_MASK: u64 = 0x5555_5555_5555_5555;

/// `(N_α, N_β)` of a basis index.
#[inline]
pub fn sector_of(x: u64) -> (u32, u32) {
    ((x & ALPHA_MASK).count_ones(), (x & !ALPHA_MASK).count_ones())
}

/// Qubit index of spatial orbital `orb` with spin `beta`.
#[inline]
pub fn spin_orbital(orb: usize, beta: bool) -> usize {
    2 * orb + beta as usize
}

/// Complex amplitudes over `2^n_qubits` computational basis states.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl Statevector {
    pub const MAX_QUBITS: usize = 30;

    /// The basis state `|x⟩`.
    pub fn basis(n_qubits: usize, x: u64) -> Result<Self> {
        if n_qubits > Self::MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "{n_qubits} qubits exceed the simulator limit of {}",
                Self::MAX_QUBITS
            )));
        }
        if n_qubits < 64 && x >> n_qubits != 0 {
            return Err(Error::InvalidInput(format!(
                "basis index {x} does not fit {n_qubits} qubits"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1usize << n_qubits];
        amps[x as usize] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        if n_qubits > Self::MAX_QUBITS || amps.len() != 1usize << n_qubits {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_qubits / 2
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn dot(&self, other: &Statevector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨N̂⟩`.
    pub fn number_expectation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(x, a)| a.norm_sqr() * (x as u64).count_ones() as f64)
            .sum()
    }

    /// `⟨Ŝ_z⟩ = ½ ⟨N̂_α − N̂_β⟩`.
    pub fn sz_expectation(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(x, a)| {
                let (na, nb) = sector_of(x as u64);
                a.norm_sqr() * 0.5 * (na as f64 - nb as f64)
            })
            .sum()
    }

    /// Particle sectors `(N_α, N_β)` carrying weight above `tol`.
    pub fn sectors(&self, tol: f64) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for (x, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > tol {
                let s = sector_of(x as u64);
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Reference determinant: impurity orbitals `0..l_occ` doubly occupied and
/// each appended environment orbital filled iff tagged core.
pub fn reference_state(k: usize, l_occ: usize, occ_pattern: &[EnvTag]) -> Result<Statevector> {
    if occ_pattern.len() > k {
        return Err(Error::InvalidInput(format!(
            "{} appended orbitals exceed the {k}-orbital register",
            occ_pattern.len()
        )));
    }
    let n_imp = k - occ_pattern.len();
    if l_occ > n_imp {
        return Err(Error::InvalidInput(format!(
            "{l_occ} occupied orbitals exceed the {n_imp}-orbital impurity"
        )));
    }
    let mut x = 0u64;
    for j in 0..l_occ {
        x |= 0b11 << (2 * j);
    }
    for (i, tag) in occ_pattern.iter().enumerate() {
        if *tag == EnvTag::Core {
            x |= 0b11 << (2 * (n_imp + i));
        }
    }
    Statevector::basis(2 * k, x)
}

/// Tensor `psi` with new orbitals on the high qubits, filled per `tags`.
pub fn extend_register(psi: &Statevector, tags: &[EnvTag]) -> Result<Statevector> {
    let n_new = psi.n_qubits + 2 * tags.len();
    if n_new > Statevector::MAX_QUBITS {
        return Err(Error::InvalidInput(format!(
            "{n_new} qubits exceed the simulator limit"
        )));
    }
    let mut high = 0u64;
    for (i, tag) in tags.iter().enumerate() {
        if *tag == EnvTag::Core {
            high |= 0b11 << (psi.n_qubits + 2 * i);
        }
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1usize << n_new];
    for (x, a) in psi.amps.iter().enumerate() {
        amps[x | high as usize] = *a;
    }
    Ok(Statevector {
        n_qubits: n_new,
        amps,
    })
}
