//! Dense matrix exponential of a Jordan–Wigner generator.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fermisim::{ExcitationOp, Statevector, C64};

pub const MAX_DENSE_QUBITS: usize = 10;

/// The `2^n × 2^n` matrix `Σ c_j P_j` of the generator's Pauli expansion.
pub fn generator_matrix(op: &ExcitationOp, n_qubits: usize) -> Result<DMatrix<C64>> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::InvalidInput(format!(
            "dense oracle limited to {MAX_DENSE_QUBITS} qubits, got {n_qubits}"
        )));
    }
    if op.register_size() > n_qubits {
        return Err(Error::Dimension(format!("operator {op} outside the register")));
    }
    let d = 1usize << n_qubits;
    let mut g = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for x in 0..d {
        for term in &op.pauli_terms {
            let (y, phase) = term.apply_basis(x as u64);
            g[(y as usize, x)] += term.coeff * phase;
        }
    }
    Ok(g)
}

fn one_norm(m: &DMatrix<C64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^M` by Taylor series after scaling `M` below unit norm, then squaring.
pub fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let norm = one_norm(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = m / C64::new(2f64.powi(squarings as i32), 0.0);
    let mut result = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for j in 1..40 {
        term = &term * &a / C64::new(j as f64, 0.0);
        result += &term;
        if one_norm(&term) < 1e-17 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `e^{θτ}|ψ⟩` via the dense generator.
pub fn dense_exponential(psi: &Statevector, op: &ExcitationOp, theta: f64) -> Result<Statevector> {
    let n = psi.n_qubits();
    let g = generator_matrix(op, n)?;
    let u = expm(&(g * C64::new(theta, 0.0)));
    let v = nalgebra::DVector::from_column_slice(psi.amps());
    let out = u * v;
    Statevector::from_amplitudes(n, out.iter().copied().collect())
}
