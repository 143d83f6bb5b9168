//! Dense complex linear algebra: LU with partial pivoting, Householder QR
//! with column pivoting, kernels and ranks.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::Matrix;
use super::tolerances::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::Real;

type C<F> = Complex<F>;

fn frob<F: Real>(a: &Matrix<C<F>>) -> F {
    a.data().iter().map(|z| z.norm_sqr()).sum::<F>().sqrt()
}

/// In-place LU factorization `P A = L U` with partial pivoting.
pub struct Lu<F: Real> {
    lu: Matrix<C<F>>,
    perm: Vec<usize>,
    sign: F,
}

impl<F: Real> Lu<F> {
    /// Fails with [`Error::Singular`] when a pivot drops below
    /// `singular_rel * ||a||_F`.
    pub fn new(a: &Matrix<C<F>>, singular_rel: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                op: "lu",
                left: a.shape(),
                right: a.shape(),
            });
        }
        let n = a.rows();
        let threshold = F::lit(singular_rel) * frob(a);
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = F::one();
        for k in 0..n {
            let (p, pmag) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold((k, F::neg_infinity()), |best, cur| {
                        if cur.1 > best.1 {
                            cur
                        } else {
                            best
                        }
                    });
            if !(pmag > threshold) || pmag == F::zero() {
                return Err(Error::Singular {
                    pivot: pmag.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - factor * u;
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn det(&self) -> C<F> {
        let n = self.lu.rows();
        (0..n).fold(C::new(self.sign, F::zero()), |acc, i| acc * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &Matrix<C<F>>) -> Result<Matrix<C<F>>> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch {
                op: "lu_solve",
                left: self.lu.shape(),
                right: b.shape(),
            });
        }
        let mut x = Matrix::from_fn(n, b.cols(), |i, j| b[(self.perm[i], j)]);
        for col in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, col)];
                for k in 0..i {
                    s = s - self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, col)];
                for k in i + 1..n {
                    s = s - self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Matrix inverse by LU with partial pivoting.
pub fn mat_inv<F: Real>(a: &Matrix<C<F>>, tol: &Tolerances) -> Result<Matrix<C<F>>> {
    let lu = Lu::new(a, tol.singular)?;
    lu.solve(&Matrix::identity(a.rows()))
}

pub fn solve<F: Real>(
    a: &Matrix<C<F>>,
    b: &Matrix<C<F>>,
    tol: &Tolerances,
) -> Result<Matrix<C<F>>> {
    Lu::new(a, tol.singular)?.solve(b)
}

/// Determinant via LU; exactly singular input gives zero instead of an error.
pub fn det<F: Real>(a: &Matrix<C<F>>) -> Result<C<F>> {
    match Lu::new(a, 0.0) {
        Ok(lu) => Ok(lu.det()),
        Err(Error::Singular { .. }) => Ok(C::zero()),
        Err(e) => Err(e),
    }
}

/// Result of Householder QR with column pivoting, `A P = Q R`.
///
/// Only `R`, the permutation and the numerical rank are kept.
pub struct PivotedQr<F: Real> {
    r: Matrix<C<F>>,
    perm: Vec<usize>,
    rank: usize,
}

impl<F: Real> PivotedQr<F> {
    /// Factorization stops once every remaining column has norm at most
    /// `threshold` (absolute); that step count is the numerical rank.
    pub fn new(a: &Matrix<C<F>>, threshold: F) -> Self {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rank = 0;
        for k in 0..m.min(n) {
            let col_norm =
                |r: &Matrix<C<F>>, j: usize| (k..m).map(|i| r[(i, j)].norm_sqr()).sum::<F>().sqrt();
            let (p, pn) =
                (k..n)
                    .map(|j| (j, col_norm(&r, j)))
                    .fold((k, F::neg_infinity()), |best, cur| {
                        if cur.1 > best.1 {
                            cur
                        } else {
                            best
                        }
                    });
            if !(pn > threshold) {
                break;
            }
            if p != k {
                for i in 0..m {
                    let tmp = r[(i, k)];
                    r[(i, k)] = r[(i, p)];
                    r[(i, p)] = tmp;
                }
                perm.swap(k, p);
            }
            // Householder reflector zeroing r[k+1.., k].
            let x0 = r[(k, k)];
            let phase = if x0.norm() > F::zero() {
                x0 / x0.norm()
            } else {
                C::one()
            };
            let alpha = -phase * pn;
            let mut v: Vec<C<F>> = (k..m).map(|i| r[(i, k)]).collect();
            v[0] = v[0] - alpha;
            let vnorm2: F = v.iter().map(|z| z.norm_sqr()).sum();
            if vnorm2 > F::zero() {
                for j in k..n {
                    let dot = v
                        .iter()
                        .enumerate()
                        .fold(C::zero(), |acc, (t, vi)| acc + vi.conj() * r[(k + t, j)]);
                    let f = dot * F::lit(2.0) / vnorm2;
                    for (t, vi) in v.iter().enumerate() {
                        r[(k + t, j)] = r[(k + t, j)] - *vi * f;
                    }
                }
            }
            for i in k + 1..m {
                r[(i, k)] = C::zero();
            }
            rank += 1;
        }
        Self { r, perm, rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Basis of the (numerical) kernel, one column per null direction.
    /// Returns `None` when the kernel is trivial.
    pub fn kernel(&self) -> Option<Matrix<C<F>>> {
        let n = self.r.cols();
        let r = self.rank;
        if r == n {
            return None;
        }
        let mut basis = Matrix::zeros(n, n - r);
        for (z, free) in (r..n).enumerate() {
            // Solve R11 x = -R12[:, free] by back substitution.
            let mut x = vec![C::<F>::zero(); n];
            x[free] = C::one();
            for i in (0..r).rev() {
                let mut s = -self.r[(i, free)];
                for k in i + 1..r {
                    s = s - self.r[(i, k)] * x[k];
                }
                x[i] = s / self.r[(i, i)];
            }
            for (pos, &orig) in self.perm.iter().enumerate() {
                basis[(orig, z)] = x[pos];
            }
        }
        Some(orthonormalize(&basis, F::lit(1e-300)).unwrap_or(basis))
    }
}

/// Numerical rank with threshold `rel * ||a||_F`.
pub fn rank<F: Real>(a: &Matrix<C<F>>, rel: f64) -> usize {
    PivotedQr::new(a, F::lit(rel) * frob(a)).rank()
}

/// Orthonormal basis (as columns) of the span of `a`'s columns, via modified
/// Gram–Schmidt with one re-orthogonalization pass. Columns whose residual
/// falls below `drop_tol` are discarded. `None` if nothing survives.
pub fn orthonormalize<F: Real>(a: &Matrix<C<F>>, drop_tol: F) -> Option<Matrix<C<F>>> {
    let mut kept: Vec<Vec<C<F>>> = Vec::new();
    for j in 0..a.cols() {
        let mut v = a.col(j);
        if let Some(u) = residual_against(&kept, &mut v, drop_tol) {
            kept.push(u);
        }
    }
    if kept.is_empty() {
        return None;
    }
    let n = a.rows();
    Some(Matrix::from_fn(n, kept.len(), |i, j| kept[j][i]))
}

/// Projects `v` off the orthonormal set `basis`; returns the normalized
/// remainder if its norm exceeds `tol`.
pub fn residual_against<F: Real>(basis: &[Vec<C<F>>], v: &mut [C<F>], tol: F) -> Option<Vec<C<F>>> {
    for _ in 0..2 {
        for u in basis {
            let dot = u
                .iter()
                .zip(v.iter())
                .fold(C::zero(), |acc, (a, b)| acc + a.conj() * *b);
            for (x, ui) in v.iter_mut().zip(u) {
                *x = *x - *ui * dot;
            }
        }
    }
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
    if nrm > tol {
        Some(v.iter().map(|z| *z / nrm).collect())
    } else {
        None
    }
}

/// Unit vector spanning the kernel of a (numerically) rank-deficient square
/// matrix, by inverse iteration on a shifted LU.
pub fn null_vector<F: Real>(a: &Matrix<C<F>>) -> Result<Vec<C<F>>> {
    let n = a.rows();
    let scale = frob(a).max(F::min_positive_value());
    let qr = PivotedQr::new(a, F::zero());
    // The last pivoted column is the weakest direction; take the kernel of
    // the leading (n-1) block when the rank is full numerically.
    let trial = PivotedQr {
        r: qr.r.clone(),
        perm: qr.perm.clone(),
        rank: qr.rank.min(n.saturating_sub(1)),
    };
    let mut v = trial
        .kernel()
        .map(|k| k.col(0))
        .unwrap_or_else(|| vec![C::one(); n]);
    // Two refinement steps of inverse iteration with a tiny shift.
    let shifted = a.shift_diagonal(&C::new(scale * F::lit(1e-14), F::zero()));
    if let Ok(lu) = Lu::new(&shifted, 0.0) {
        for _ in 0..2 {
            let x = lu.solve(&Matrix::column(v.clone()))?;
            let nrm = x.data().iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
            if !(nrm.is_finite() && nrm > F::zero()) {
                break;
            }
            v = x.data().iter().map(|z| *z / nrm).collect();
        }
    }
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
    Ok(v.into_iter().map(|z| z / nrm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::matrix::approx_eq;
    use num_complex::Complex64 as Z;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Matrix<Z> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |_, _| {
            Z::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn identity_inverse() {
        let i5 = Matrix::<Z>::identity(5);
        assert_eq!(mat_inv(&i5, &Tolerances::default()).unwrap(), i5);
    }

    #[test]
    fn multiply_back_check() {
        let a = random(6, 3).shift_diagonal(&Z::new(-4.0, 0.0));
        let inv = mat_inv(&a, &Tolerances::default()).unwrap();
        assert!(approx_eq(&(&a * &inv), &Matrix::identity(6), 1e-10));
    }

    #[test]
    fn singular_reports_pivot() {
        let a = Matrix::from_rows(vec![
            vec![Z::new(1.0, 0.0), Z::new(2.0, 0.0)],
            vec![Z::new(2.0, 0.0), Z::new(4.0, 0.0)],
        ])
        .unwrap();
        match mat_inv(&a, &Tolerances::default()) {
            Err(Error::Singular { pivot, .. }) => assert!(pivot < 1e-12),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn kernel_of_rank_deficient() {
        // Columns 0 and 2 equal, column 3 = col0 + col1.
        let b = random(4, 11);
        let a = Matrix::from_fn(4, 4, |i, j| match j {
            0 | 2 => b[(i, 0)],
            1 => b[(i, 1)],
            _ => b[(i, 0)] + b[(i, 1)],
        });
        let qr = PivotedQr::new(&a, 1e-10 * a.frobenius_norm());
        assert_eq!(qr.rank(), 2);
        let k = qr.kernel().unwrap();
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).max_abs() < 1e-12);
    }

    #[test]
    fn determinant_of_triangular() {
        let a = Matrix::from_fn(3, 3, |i, j| {
            if j >= i {
                Z::new((i + 1) as f64, 0.0)
            } else {
                Z::new(0.0, 0.0)
            }
        });
        assert!((det(&a).unwrap() - Z::new(6.0, 0.0)).norm() < 1e-14);
    }
}
