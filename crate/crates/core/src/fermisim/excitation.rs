//! Anti-Hermitian excitation generators and their exact exponentials.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{annihilate, create, Statevector, C64};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExcitationKind {
    Single,
    Double,
}

/// `coeff · P` for a Pauli string `P`, stored as `(qubit, 'X'|'Y'|'Z')`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: C64,
    pub string: Vec<(usize, char)>,
}

impl PauliTerm {
    /// `P |x⟩ = phase |y⟩`, coefficient not included.
    pub fn apply_basis(&self, x: u64) -> (u64, C64) {
        let mut y = x;
        let mut phase = C64::new(1.0, 0.0);
        for &(q, p) in &self.string {
            let bit = (x >> q) & 1;
            match p {
                'X' => y ^= 1 << q,
                'Y' => {
                    y ^= 1 << q;
                    phase *= if bit == 0 {
                        C64::new(0.0, 1.0)
                    } else {
                        C64::new(0.0, -1.0)
                    };
                }
                'Z' => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
                _ => unreachable!(),
            }
        }
        (y, phase)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+.6}{:+.6}i)", self.coeff.re, self.coeff.im)?;
        for (q, p) in &self.string {
            write!(f, " {p}{q}")?;
        }
        Ok(())
    }
}

/// `τ = T − T†` with `T = a†_{c0} [a†_{c1}] a_{a0} [a_{a1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitationOp {
    pub kind: ExcitationKind,
    /// Created spin orbitals, ascending.
    pub create: Vec<usize>,
    /// Annihilated spin orbitals, ascending.
    pub annihilate: Vec<usize>,
    pub pauli_terms: Vec<PauliTerm>,
    mask_create: u64,
    mask_annihilate: u64,
}

impl Serialize for ExcitationOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ExcitationOp", 3)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("create", &self.create)?;
        st.serialize_field("annihilate", &self.annihilate)?;
        st.end()
    }
}

impl fmt::Display for ExcitationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| {
            v.iter()
                .map(|i| format!("{}{}", i / 2, if i % 2 == 0 { "a" } else { "b" }))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{}->{}", list(&self.annihilate), list(&self.create))
    }
}

impl ExcitationOp {
    /// Highest qubit touched plus one.
    pub fn register_size(&self) -> usize {
        self.create
            .iter()
            .chain(&self.annihilate)
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Spin-orbital indices: `[p, q]` (annihilate p, create q) for singles,
    /// `[p, q, r, s]` (create p, q; annihilate r, s) for doubles.
    pub fn indices(&self) -> Vec<usize> {
        match self.kind {
            ExcitationKind::Single => vec![self.annihilate[0], self.create[0]],
            ExcitationKind::Double => {
                let mut v = self.create.clone();
                v.extend(&self.annihilate);
                v
            }
        }
    }

    /// `T|x⟩ = sign |y⟩`, or `None` when `T` annihilates `x`.
    #[inline]
    fn forward(&self, x: u64) -> Option<(u64, f64)> {
        let mut y = x;
        let mut s = 1.0;
        for &j in self.annihilate.iter().rev() {
            let (ny, sg) = annihilate(j, y)?;
            y = ny;
            s *= sg;
        }
        for &j in self.create.iter().rev() {
            let (ny, sg) = create(j, y)?;
            y = ny;
            s *= sg;
        }
        Some((y, s))
    }

    /// Visit every coupled pair `(x, y, s)` with `τ|x⟩ = s|y⟩`, `τ|y⟩ = −s|x⟩`.
    #[inline]
    pub(crate) fn for_each_pair(&self, n_qubits: usize, mut f: impl FnMut(usize, usize, f64)) {
        let full = if n_qubits >= 64 {
            u64::MAX
        } else {
            (1u64 << n_qubits) - 1
        };
        let free = full & !(self.mask_create | self.mask_annihilate);
        let mut sub = free;
        loop {
            let x = sub | self.mask_annihilate;
            if let Some((y, s)) = self.forward(x) {
                f(x as usize, y as usize, s);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
}

type PauliPoly = BTreeMap<Vec<u8>, C64>;

fn pauli_mul(a: u8, b: u8) -> (C64, u8) {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    match (a, b) {
        (0, b) => (one, b),
        (a, 0) => (one, a),
        (a, b) if a == b => (one, 0),
        (1, 2) => (i, 3),
        (2, 3) => (i, 1),
        (3, 1) => (i, 2),
        (2, 1) => (-i, 3),
        (3, 2) => (-i, 1),
        (1, 3) => (-i, 2),
        _ => unreachable!(),
    }
}

fn poly_mul(a: &PauliPoly, b: &PauliPoly) -> PauliPoly {
    let mut out = PauliPoly::new();
    for (sa, ca) in a {
        for (sb, cb) in b {
            let mut c = ca * cb;
            let mut s = vec![0u8; sa.len()];
            for q in 0..sa.len() {
                let (ph, p) = pauli_mul(sa[q], sb[q]);
                c *= ph;
                s[q] = p;
            }
            *out.entry(s).or_insert(C64::new(0.0, 0.0)) += c;
        }
    }
    out
}

fn ladder(j: usize, n: usize, dagger: bool) -> PauliPoly {
    let mut base = vec![0u8; n];
    for q in base.iter_mut().take(j) {
        *q = 3;
    }
    let mut x = base.clone();
    x[j] = 1;
    let mut y = base;
    y[j] = 2;
    let half = C64::new(0.5, 0.0);
    let iy = C64::new(0.0, if dagger { -0.5 } else { 0.5 });
    PauliPoly::from([(x, half), (y, iy)])
}

fn pauli_expansion(create: &[usize], annihilate: &[usize], n: usize) -> Vec<PauliTerm> {
    let mut t = PauliPoly::from([(vec![0u8; n], C64::new(1.0, 0.0))]);
    for &j in create {
        t = poly_mul(&t, &ladder(j, n, true));
    }
    for &j in annihilate {
        t = poly_mul(&t, &ladder(j, n, false));
    }
    // T† has conjugated coefficients on the same Hermitian strings.
    t.into_iter()
        .filter_map(|(s, c)| {
            let coeff = c - c.conj();
            if coeff.norm() < 1e-14 {
                return None;
            }
            let string = s
                .iter()
                .enumerate()
                .filter(|(_, p)| **p != 0)
                .map(|(q, p)| (q, ['I', 'X', 'Y', 'Z'][*p as usize]))
                .collect();
            Some(PauliTerm { coeff, string })
        })
        .collect()
}

/// Build the canonical excitation for the given spin-orbital indices:
/// `[p, q]` annihilates `p` and creates `q`; `[p, q, r, s]` creates `p, q`
/// and annihilates `r, s`. The generator is fixed up to an overall sign,
/// which the rotation angle absorbs.
pub fn jw_encode(indices: &[usize], n_qubits: usize) -> Result<ExcitationOp> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= n_qubits) {
        return Err(Error::InvalidInput(format!(
            "spin orbital {bad} outside a {n_qubits}-qubit register"
        )));
    }
    let (kind, mut create, mut annihilate) = match indices {
        [p, q] => (ExcitationKind::Single, vec![*q], vec![*p]),
        [p, q, r, s] => (ExcitationKind::Double, vec![*p, *q], vec![*r, *s]),
        _ => {
            return Err(Error::InvalidInput(format!(
                "an excitation takes 2 or 4 indices, got {}",
                indices.len()
            )))
        }
    };
    let mut all: Vec<usize> = indices.to_vec();
    all.sort_unstable();
    all.dedup();
    if all.len() != indices.len() {
        return Err(Error::InvalidInput(format!(
            "repeated spin orbital in excitation {indices:?}"
        )));
    }
    let beta = |v: &[usize]| v.iter().filter(|i| *i % 2 == 1).count();
    if beta(&create) != beta(&annihilate) {
        return Err(Error::InvalidInput(format!(
            "excitation {indices:?} changes S_z"
        )));
    }
    create.sort_unstable();
    annihilate.sort_unstable();
    if annihilate > create {
        std::mem::swap(&mut create, &mut annihilate);
    }
    let mask = |v: &[usize]| v.iter().fold(0u64, |m, &j| m | 1 << j);
    let width = create.iter().chain(&annihilate).max().unwrap() + 1;
    Ok(ExcitationOp {
        kind,
        pauli_terms: pauli_expansion(&create, &annihilate, width),
        mask_create: mask(&create),
        mask_annihilate: mask(&annihilate),
        create,
        annihilate,
    })
}

/// `e^{θτ}` applied in place.
pub fn apply_excitation_in_place(psi: &mut Statevector, op: &ExcitationOp, theta: f64) {
    if theta == 0.0 {
        return;
    }
    assert!(op.register_size() <= psi.n_qubits(), "operator outside the register");
    let (sn, c) = theta.sin_cos();
    let n = psi.n_qubits();
    let amps = psi.amps_mut();
    op.for_each_pair(n, |x, y, s| {
        let (ax, ay) = (amps[x], amps[y]);
        amps[x] = ax * c - ay * (s * sn);
        amps[y] = ay * c + ax * (s * sn);
    });
}

/// `e^{θτ}|ψ⟩`.
pub fn apply_excitation(psi: &Statevector, op: &ExcitationOp, theta: f64) -> Statevector {
    let mut out = psi.clone();
    apply_excitation_in_place(&mut out, op, theta);
    out
}

/// `⟨bra|τ|ket⟩`.
pub fn tau_overlap(bra: &[C64], ket: &[C64], n_qubits: usize, op: &ExcitationOp) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    op.for_each_pair(n_qubits, |x, y, s| {
        acc += (bra[y].conj() * ket[x] - bra[x].conj() * ket[y]) * s;
    });
    acc
}
