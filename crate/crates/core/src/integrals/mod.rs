//! Electron integrals over an orthonormal spatial-orbital basis.
//!
//! Two-electron integrals are stored in chemist notation,
//! `(pq|rs) = ∫∫ φp(1)φq(1) r12⁻¹ φr(2)φs(2)`, packed over the eight-fold
//! permutational symmetry of real orbitals. Every formula elsewhere in the
//! crate is written against this convention; the translation from the
//! second-quantized forms used in the literature is fixed here once:
//!
//! | written form                                   | chemist form here        |
//! |------------------------------------------------|--------------------------|
//! | `½ Σ h_pqrs a†p a†q a_s a_r` (Hamiltonian)      | `h_pqrs = (pr\|qs)`       |
//! | `⟨ij\|lk⟩` inside the Fock / V_eff expressions  | `(ij\|lk)`                |
//! | `²D_ijkl = ⟨a†i a†j a_k a_l⟩` contraction       | `½ Σ (il\|jk) ²D_ijkl`    |
//!
//! The Fock and effective-potential expressions are written with the
//! chemist integral directly: `J` comes from `(ij|kl)` and `K` from `(ik|jl)`.

mod fcidump;

pub use fcidump::{parse_fcidump, read_fcidump, write_fcidump};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    if i >= j {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

/// Two-electron integrals `(pq|rs)` packed by eight-fold symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct Eri {
    n: usize,
    data: Vec<f64>,
}

impl Eri {
    pub fn zeros(n: usize) -> Self {
        let npair = n * (n + 1) / 2;
        Self {
            n,
            data: vec![0.0; npair * (npair + 1) / 2],
        }
    }

    pub fn n_orb(&self) -> usize {
        self.n
    }

    /// Canonical storage slot of `(pq|rs)`; all eight permutations share it.
    #[inline]
    pub fn slot(p: usize, q: usize, r: usize, s: usize) -> usize {
        pair_index(pair_index(p, q), pair_index(r, s))
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        assert!(
            p < self.n && q < self.n && r < self.n && s < self.n,
            "eri index ({p},{q},{r},{s}) out of range for {} orbitals",
            self.n
        );
        self.data[Self::slot(p, q, r, s)]
    }

    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        assert!(p < self.n && q < self.n && r < self.n && s < self.n);
        self.data[Self::slot(p, q, r, s)] = value;
    }

    /// Unfold into a dense row-major `n⁴` array indexed `((p·n+q)·n+r)·n+s`.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n * n];
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        out[((p * n + q) * n + r) * n + s] = self.get(p, q, r, s);
                    }
                }
            }
        }
        out
    }

    /// Fold a dense array into packed storage, averaging the eight images.
    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), n * n * n * n);
        let idx = |p: usize, q: usize, r: usize, s: usize| ((p * n + q) * n + r) * n + s;
        let mut eri = Self::zeros(n);
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if pair_index(p, q) < pair_index(r, s) {
                            continue;
                        }
                        let v = dense[idx(p, q, r, s)]
                            + dense[idx(q, p, r, s)]
                            + dense[idx(p, q, s, r)]
                            + dense[idx(q, p, s, r)]
                            + dense[idx(r, s, p, q)]
                            + dense[idx(s, r, p, q)]
                            + dense[idx(r, s, q, p)]
                            + dense[idx(s, r, q, p)];
                        eri.set(p, q, r, s, v / 8.0);
                    }
                }
            }
        }
        eri
    }

    /// Canonical unique entries `(p ≥ q, r ≥ s, pq ≥ rs)`.
    pub fn unique_entries(&self) -> impl Iterator<Item = (usize, usize, usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |p| {
            (0..=p).flat_map(move |q| {
                (0..=p).flat_map(move |r| {
                    let smax = if r == p { q } else { r };
                    (0..=smax).map(move |s| (p, q, r, s, self.get(p, q, r, s)))
                })
            })
        })
    }
}

/// Spin-free electronic Hamiltonian over `n_orb` orthonormal orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralSet {
    pub n_orb: usize,
    pub n_elec: usize,
    pub e_nuc: f64,
    pub h1: DMatrix<f64>,
    pub eri: Eri,
    pub label: String,
}

impl IntegralSet {
    pub fn new(
        n_elec: usize,
        e_nuc: f64,
        h1: DMatrix<f64>,
        eri: Eri,
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = h1.nrows();
        if h1.ncols() != n || eri.n_orb() != n {
            return Err(Error::Dimension(format!(
                "h1 is {}x{}, eri has {} orbitals",
                h1.nrows(),
                h1.ncols(),
                eri.n_orb()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidInput("zero orbitals".into()));
        }
        if n_elec == 0 || !n_elec.is_multiple_of(2) || n_elec > 2 * n {
            return Err(Error::InvalidInput(format!(
                "electron count {n_elec} must be even and in (0, {}]",
                2 * n
            )));
        }
        let scale = crate::linalg::max_abs(&h1).max(1.0);
        let asym = crate::linalg::max_abs(&(&h1 - h1.transpose()));
        if asym > 1e-12 * scale {
            return Err(Error::InvalidInput(format!(
                "one-body integrals not symmetric (max deviation {asym:.3e})"
            )));
        }
        Ok(Self {
            n_orb: n,
            n_elec,
            e_nuc,
            h1,
            eri,
            label: label.into(),
        })
    }

    /// `(pq|rs)` in chemist notation.
    #[inline]
    pub fn get_eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.eri.get(p, q, r, s)
    }

    pub fn n_occ(&self) -> usize {
        self.n_elec / 2
    }

    /// Largest deviation between two integral sets over all stored values.
    pub fn max_difference(&self, other: &IntegralSet) -> f64 {
        if self.n_orb != other.n_orb {
            return f64::INFINITY;
        }
        let h = crate::linalg::max_abs(&(&self.h1 - &other.h1));
        let e = self
            .eri
            .data
            .iter()
            .zip(&other.eri.data)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
        h.max(e).max((self.e_nuc - other.e_nuc).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_eight_permutations_share_a_value() {
        let mut eri = Eri::zeros(4);
        eri.set(0, 1, 2, 3, 0.7);
        let perms = [
            (0, 1, 2, 3),
            (1, 0, 2, 3),
            (0, 1, 3, 2),
            (1, 0, 3, 2),
            (2, 3, 0, 1),
            (3, 2, 0, 1),
            (2, 3, 1, 0),
            (3, 2, 1, 0),
        ];
        for (p, q, r, s) in perms {
            assert_eq!(eri.get(p, q, r, s), 0.7);
        }
        assert_eq!(eri.get(0, 2, 1, 3), 0.0);
    }

    #[test]
    fn single_stored_entry_reads_back_through_symmetry() {
        let mut eri = Eri::zeros(2);
        eri.set(0, 1, 0, 0, 0.125);
        assert_eq!(eri.get(0, 0, 1, 0), 0.125);
        assert_eq!(eri.get(1, 1, 1, 1), 0.0);
    }

    #[test]
    fn unique_entries_cover_every_slot_once() {
        let eri = Eri::zeros(5);
        let mut seen = vec![false; eri.data.len()];
        for (p, q, r, s, _) in eri.unique_entries() {
            let slot = Eri::slot(p, q, r, s);
            assert!(!seen[slot]);
            seen[slot] = true;
        }
        assert!(seen.into_iter().all(|x| x));
    }

    #[test]
    fn dense_round_trip() {
        let mut eri = Eri::zeros(3);
        for (k, (p, q, r, s, _)) in Eri::zeros(3).unique_entries().enumerate() {
            eri.set(p, q, r, s, 0.125 * k as f64);
        }
        let back = Eri::from_dense(3, &eri.to_dense());
        assert_eq!(back, eri);
    }

    #[test]
    fn rejects_odd_electrons_and_asymmetric_h1() {
        let h1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.2, 1.0]);
        assert!(IntegralSet::new(2, 0.0, h1, Eri::zeros(2), "x").is_err());
        let h1 = DMatrix::identity(2, 2);
        assert!(IntegralSet::new(3, 0.0, h1.clone(), Eri::zeros(2), "x").is_err());
        assert!(IntegralSet::new(6, 0.0, h1, Eri::zeros(2), "x").is_err());
    }
}
