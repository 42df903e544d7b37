//! Spin-summed reduced density matrices.

use nalgebra::DMatrix;

use super::{annihilate, create, Statevector, C64};
use crate::error::{Error, Result};

/// `¹D_ij = Σ_σ ⟨a†_iσ a_jσ⟩` and `²D_ijkl = Σ_στ ⟨a†_iσ a†_jτ a_kτ a_lσ⟩`,
/// the latter flattened row-major over `k⁴`.
pub fn rdm12(psi: &Statevector, k: usize) -> Result<(DMatrix<f64>, Vec<f64>)> {
    if psi.n_qubits() != 2 * k {
        return Err(Error::Dimension(format!(
            "{}-qubit state for {k} orbitals",
            psi.n_qubits()
        )));
    }
    let amps = psi.amps();
    let n = 2 * k;
    let mut d1 = vec![C64::new(0.0, 0.0); k * k];
    let mut d2 = vec![C64::new(0.0, 0.0); k * k * k * k];
    for (x, a) in amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let x = x as u64;
        let occ: Vec<usize> = (0..n).filter(|&i| x >> i & 1 == 1).collect();
        for &jj in &occ {
            let (y1, s1) = annihilate(jj, x).unwrap();
            let (sig, j) = (jj % 2, jj / 2);
            for i in 0..k {
                if let Some((y, s2)) = create(2 * i + sig, y1) {
                    d1[i * k + j] += amps[y as usize].conj() * a * (s1 * s2);
                }
            }
        }
        for &ll in &occ {
            let (y1, s1) = annihilate(ll, x).unwrap();
            let (sig, l) = (ll % 2, ll / 2);
            for &kk in &occ {
                if kk == ll {
                    continue;
                }
                let (y2, s2) = annihilate(kk, y1).unwrap();
                let (tau, kq) = (kk % 2, kk / 2);
                for j in 0..k {
                    let Some((y3, s3)) = create(2 * j + tau, y2) else {
                        continue;
                    };
                    for i in 0..k {
                        if let Some((y4, s4)) = create(2 * i + sig, y3) {
                            d2[((i * k + j) * k + kq) * k + l] +=
                                amps[y4 as usize].conj() * a * (s1 * s2 * s3 * s4);
                        }
                    }
                }
            }
        }
    }
    let rdm1 = DMatrix::from_fn(k, k, |i, j| d1[i * k + j].re);
    Ok((rdm1, d2.iter().map(|z| z.re).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermisim::reference_state;

    #[test]
    fn reference_rdm_is_diagonal_two_zero() {
        let psi = reference_state(3, 1, &[crate::projection::EnvTag::Core]).unwrap();
        let (d1, d2) = rdm12(&psi, 3).unwrap();
        assert_eq!(d1[(0, 0)], 2.0);
        assert_eq!(d1[(1, 1)], 0.0);
        assert_eq!(d1[(2, 2)], 2.0);
        assert_eq!(d1.trace(), 4.0);
        // Σ_ij ²D_ijji = N(N−1)
        let k = 3;
        let mut pairs = 0.0;
        for i in 0..k {
            for j in 0..k {
                pairs += d2[((i * k + j) * k + j) * k + i];
            }
        }
        assert!((pairs - 12.0).abs() < 1e-14);
    }
}
