//! PT-symmetric two-mode Bose-Hubbard model in the sector of `K - 1` bosons.
//!
//! Basis `|n1, n2>` with `n1 + n2 = K - 1`, ordered by ascending `n1`.
//! `H = -iγ (n1 - n2) + (c/2)(n1 - n2)^2 + v (a†b + b†a)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::jordan::{
    detect_jordan_structure, transition_matrix, transition_residual, PartitionSpec,
};
use crate::numkit::Matrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BHParams {
    #[serde(rename = "K")]
    pub k: usize,
    pub gamma: f64,
    pub v: f64,
    pub c: f64,
}

impl BHParams {
    pub fn new(k: usize, gamma: f64, v: f64, c: f64) -> Result<Self> {
        if k < 2 {
            return Err(invalid(format!(
                "Bose-Hubbard dimension K must be >= 2, got {k}"
            )));
        }
        if ![gamma, v, c].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("Bose-Hubbard parameters"));
        }
        Ok(Self { k, gamma, v, c })
    }

    /// `v = 1, c = 0`, the closed-form regime.
    pub fn standard(k: usize, gamma: f64) -> Result<Self> {
        Self::new(k, gamma, 1.0, 0.0)
    }

    fn diagonal<T: Scalar>(&self, n1: usize) -> T {
        let n2 = self.k - 1 - n1;
        let d = n1 as f64 - n2 as f64;
        let minus_i = T::from_c64(Complex64::new(0.0, -1.0));
        minus_i * T::from_real_param(self.gamma) * T::from_i64(d as i64)
            + T::from_real_param(self.c) * T::from_i64((d * d) as i64) / T::from_i64(2)
    }

    /// `(n1 + 1) n2` for the hop `n1 -> n1 + 1`.
    fn hop_weight(&self, n1: usize) -> i64 {
        ((n1 + 1) * (self.k - 1 - n1)) as i64
    }
}

/// Symmetric-hopping matrix: off-diagonals `v sqrt((n1+1) n2)`.
pub fn build_hamiltonian<T: Scalar>(p: &BHParams) -> Matrix<T> {
    Matrix::from_fn(p.k, p.k, |i, j| {
        if i == j {
            p.diagonal(i)
        } else if i.abs_diff(j) == 1 {
            let n1 = i.min(j);
            T::from_c64(Complex64::new(p.v * (p.hop_weight(n1) as f64).sqrt(), 0.0))
        } else {
            T::zero()
        }
    })
}

/// Diagonally similar form with superdiagonal `v` and subdiagonal
/// `v (n1+1) n2`.
///
/// Same spectrum as [`build_hamiltonian`], but free of square roots: with an
/// exact scalar type the characteristic polynomial comes out exact.
pub fn build_balanced_hamiltonian<T: Scalar>(p: &BHParams) -> Matrix<T> {
    let v = T::from_real_param(p.v);
    Matrix::from_fn(p.k, p.k, |i, j| {
        if i == j {
            p.diagonal(i)
        } else if j == i + 1 {
            v.clone()
        } else if i == j + 1 {
            v.clone() * T::from_i64(p.hop_weight(j))
        } else {
            T::zero()
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedFormSpectrum {
    /// Ascending; empty when the spectrum is not real.
    pub values: Vec<f64>,
    pub real: bool,
}

/// `E_n = sqrt(1 - γ^2) (1 - K + 2n)`, `n = 0..K-1` (valid at `v = 1, c = 0`).
pub fn closed_form_spectrum(k: usize, gamma: f64) -> ClosedFormSpectrum {
    if gamma * gamma > 1.0 {
        return ClosedFormSpectrum {
            values: Vec::new(),
            real: false,
        };
    }
    let s = (1.0 - gamma * gamma).sqrt();
    ClosedFormSpectrum {
        values: (0..k)
            .map(|n| s * (1.0 - k as f64 + 2.0 * n as f64))
            .collect(),
        real: true,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EpkCertificate {
    pub partition: PartitionSpec,
    pub transition_residual: f64,
    pub hamiltonian_norm: f64,
}

/// Verifies that `γ = ±1` is an EP of maximal order: one Jordan block of size
/// `K` at η = 0 and a transition matrix with residual `<= 1e-8 ||H||_F`.
pub fn epk_certificate(k: usize, gamma_ep: f64, rank_tol: f64) -> Result<EpkCertificate> {
    if gamma_ep.abs() != 1.0 {
        return Err(invalid(format!(
            "EPK certificate needs gamma = ±1, got {gamma_ep}"
        )));
    }
    let p = BHParams::standard(k, gamma_ep)?;
    let h: Matrix<Complex64> = build_hamiltonian(&p);
    let zero = Complex64::new(0.0, 0.0);
    let partition = detect_jordan_structure(&h, zero, rank_tol)?;
    let expected = PartitionSpec::single(k)?;
    if partition != expected {
        return Err(Error::StructureMismatch {
            expected: expected.kernel_dims(),
            detected: partition.kernel_dims(),
        });
    }
    let q = transition_matrix(&h, &partition, zero, rank_tol)?;
    let residual = transition_residual(&h, &q, &partition, zero);
    let norm = h.frobenius_norm();
    if residual > 1e-8 * norm {
        return Err(invalid(format!(
            "transition residual {residual:e} exceeds 1e-8 * ||H||"
        )));
    }
    Ok(EpkCertificate {
        partition,
        transition_residual: residual,
        hamiltonian_norm: norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{eig_oracle, Tolerances};
    use crate::scalar::ExactComplex;

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_boson_is_pauli_x() {
        let h: Matrix<Complex64> = build_hamiltonian(&BHParams::standard(2, 0.0).unwrap());
        assert_eq!(
            h,
            Matrix::from_rows(vec![
                vec![z(0.0, 0.0), z(1.0, 0.0)],
                vec![z(1.0, 0.0), z(0.0, 0.0)]
            ])
            .unwrap()
        );
    }

    #[test]
    fn interaction_keeps_tridiagonal() {
        let h: Matrix<Complex64> = build_hamiltonian(&BHParams::new(5, 0.3, 1.0, 0.4).unwrap());
        for i in 0..5usize {
            for j in 0..5 {
                if i.abs_diff(j) > 1 {
                    assert_eq!(h[(i, j)], z(0.0, 0.0));
                }
            }
        }
        // (c/2)(n1-n2)^2 at n1 = 0: 0.2 * 16
        assert!((h[(0, 0)].re - 3.2).abs() < 1e-15);
    }

    #[test]
    fn three_level_spectrum() {
        let p = BHParams::standard(3, 0.6).unwrap();
        let spec = eig_oracle(&build_hamiltonian::<Complex64>(&p), &Tolerances::default()).unwrap();
        let expected = [-1.6, 0.0, 1.6];
        for (r, e) in spec.values().iter().zip(expected) {
            assert!((r - z(e, 0.0)).norm() < 1e-10, "{r} vs {e}");
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            closed_form_spectrum(4, 0.0).values,
            vec![-3.0, -1.0, 1.0, 3.0]
        );
        assert_eq!(closed_form_spectrum(5, 1.0).values, vec![0.0; 5]);
        assert_eq!(closed_form_spectrum(5, -1.0).values, vec![0.0; 5]);
        let c = closed_form_spectrum(3, 0.6);
        assert!(c
            .values
            .iter()
            .zip([-1.6, 0.0, 1.6])
            .all(|(a, b)| (a - b).abs() < 1e-15));
        assert!(!closed_form_spectrum(3, 1.2).real);
    }

    #[test]
    fn balanced_form_is_exact_and_isospectral() {
        let p = BHParams::standard(6, 0.9).unwrap();
        let exact = eig_oracle(
            &build_balanced_hamiltonian::<ExactComplex>(&p),
            &Tolerances::default(),
        )
        .unwrap();
        let cf = closed_form_spectrum(6, 0.9).values;
        for (r, e) in exact.values().iter().zip(&cf) {
            assert!((r - z(*e, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pt_reflection_symmetry() {
        let h: Matrix<Complex64> = build_hamiltonian(&BHParams::standard(6, 0.37).unwrap());
        let k = 6;
        for j in 0..k {
            for l in 0..k {
                assert_eq!(h[(j, l)], h[(k - 1 - j, k - 1 - l)].conj());
            }
        }
    }

    #[test]
    fn epk_small() {
        let c = epk_certificate(3, 1.0, 1e-8).unwrap();
        assert_eq!(c.partition.parts(), &[3]);
        let c = epk_certificate(5, -1.0, 1e-8).unwrap();
        assert_eq!(c.partition.parts(), &[5]);
        let h: Matrix<Complex64> = build_hamiltonian(&BHParams::standard(2, 1.0).unwrap());
        assert!(h.pow(2).max_abs() < 1e-15);
        assert_eq!(
            epk_certificate(2, 1.0, 1e-8).unwrap().partition.parts(),
            &[2]
        );
        assert!(epk_certificate(3, 0.5, 1e-8).is_err());
    }
}
