use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::charpoly::char_poly;
use super::matrix::Matrix;
use super::roots::poly_roots;
use super::tolerances::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Where a list of roots came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Oracle,
    Secular,
    LeadingOrder,
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub value: Complex64,
    pub is_real: bool,
    /// Size of the cluster this root belongs to.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub provenance: Provenance,
    pub roots: Vec<RootEntry>,
    /// Roots of a truncated series polynomial lying outside the physical
    /// branch (only populated by the series solvers).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub discarded: Vec<Complex64>,
}

/// `|Im z| <= tol * max(1, |z|)`
pub fn is_real(z: Complex64, tol: f64) -> bool {
    z.im.abs() <= tol * z.norm().max(1.0)
}

/// Cluster sizes: roots within `radius * max(1, |z|)` of each other are
/// merged transitively.
pub fn cluster_sizes(roots: &[Complex64], radius: f64) -> Vec<usize> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = roots[i].norm().max(roots[j].norm()).max(1.0);
            if (roots[i] - roots[j]).norm() <= radius * scale {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots_of: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    roots_of
        .iter()
        .map(|r| roots_of.iter().filter(|x| *x == r).count())
        .collect()
}

/// Sorts by `(Re, Im)`.
pub fn sort_roots(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

impl SpectrumReport {
    pub fn from_roots(provenance: Provenance, mut roots: Vec<Complex64>, tol: &Tolerances) -> Self {
        sort_roots(&mut roots);
        let sizes = cluster_sizes(&roots, tol.cluster);
        let roots = roots
            .into_iter()
            .zip(sizes)
            .map(|(value, multiplicity)| RootEntry {
                value,
                is_real: is_real(value, tol.reality),
                multiplicity,
            })
            .collect();
        Self {
            provenance,
            roots,
            discarded: Vec::new(),
        }
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.value).collect()
    }

    pub fn all_real(&self) -> bool {
        self.roots.iter().all(|r| r.is_real)
    }

    pub fn any_non_real(&self) -> bool {
        self.roots.iter().any(|r| !r.is_real)
    }

    /// No cluster holds more than one root.
    pub fn all_distinct(&self) -> bool {
        self.roots.iter().all(|r| r.multiplicity == 1)
    }
}

/// Brute-force eigenvalues: roots of the characteristic polynomial.
///
/// The characteristic polynomial is formed in `T`, so exact scalar types give
/// exact coefficients before the floating-point root finder runs.
pub fn eig_oracle<T: Scalar>(a: &Matrix<T>, tol: &Tolerances) -> Result<SpectrumReport> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "eig_oracle",
            left: a.shape(),
            right: a.shape(),
        });
    }
    if a.rows() > tol.max_oracle_dim {
        return Err(Error::TooLarge {
            dim: a.rows(),
            max: tol.max_oracle_dim,
        });
    }
    let p = char_poly(a)?.to_c64();
    let roots = poly_roots(&p, tol)?;
    Ok(SpectrumReport::from_roots(Provenance::Oracle, roots, tol))
}

/// `||H^† Θ - Θ H||_F`, after checking Θ is Hermitian positive-definite.
pub fn quasi_hermiticity_residual<T: Scalar>(
    h: &Matrix<T>,
    theta: &Matrix<T>,
    tol: &Tolerances,
) -> Result<f64> {
    if !h.is_square() || h.shape() != theta.shape() {
        return Err(Error::DimensionMismatch {
            op: "quasi_hermiticity_residual",
            left: h.shape(),
            right: theta.shape(),
        });
    }
    let h = h.to_c64();
    let theta = theta.to_c64();
    let herm_err = (&theta - &theta.conj_transpose()).max_abs();
    if herm_err > 1e-12 * theta.max_abs().max(1.0) {
        return Err(Error::NotPositiveDefinite(format!(
            "not Hermitian (deviation {herm_err:e})"
        )));
    }
    let spec = eig_oracle(&theta, tol)?;
    if let Some(bad) = spec.values().into_iter().find(|z| !(z.re > 0.0)) {
        return Err(Error::NotPositiveDefinite(format!(
            "eigenvalue {bad} is not positive"
        )));
    }
    let lhs = &h.conj_transpose() * &theta;
    let rhs = &theta * &h;
    Ok((&lhs - &rhs).frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as Z;

    #[test]
    fn clusters() {
        let r = [Z::new(0.0, 0.0), Z::new(1e-9, 0.0), Z::new(1.0, 0.0)];
        assert_eq!(cluster_sizes(&r, 1e-6), vec![2, 2, 1]);
    }

    #[test]
    fn reality_flag_scales() {
        assert!(is_real(Z::new(100.0, 5e-7), 1e-8));
        assert!(!is_real(Z::new(1.0, 1e-6), 1e-8));
    }

    #[test]
    fn hermitian_has_zero_residual() {
        let h = Matrix::from_rows(vec![
            vec![Z::new(1.0, 0.0), Z::new(0.5, 0.5)],
            vec![Z::new(0.5, -0.5), Z::new(-2.0, 0.0)],
        ])
        .unwrap();
        let r =
            quasi_hermiticity_residual(&h, &Matrix::identity(2), &Tolerances::default()).unwrap();
        assert!(r <= 1e-12);
        let d = Matrix::diagonal(vec![Z::new(1.0, 0.0), Z::new(2.0, 0.0)]);
        assert!(
            quasi_hermiticity_residual(&d, &Matrix::identity(2), &Tolerances::default()).unwrap()
                <= 1e-12
        );
    }

    #[test]
    fn rejects_indefinite_metric() {
        let h = Matrix::<Z>::identity(2);
        let theta = Matrix::diagonal(vec![Z::new(1.0, 0.0), Z::new(-1.0, 0.0)]);
        assert!(matches!(
            quasi_hermiticity_residual(&h, &theta, &Tolerances::default()),
            Err(Error::NotPositiveDefinite(_))
        ));
        let skew = Matrix::from_rows(vec![
            vec![Z::new(1.0, 0.0), Z::new(1.0, 0.0)],
            vec![Z::new(0.0, 0.0), Z::new(1.0, 0.0)],
        ])
        .unwrap();
        assert!(quasi_hermiticity_residual(&h, &skew, &Tolerances::default()).is_err());
    }
}
