//! Single Jordan block: `[J^(K)(0) + λV] Ψ = ε Ψ` with `Ψ_1 = 1`.
//!
//! Writing `Ψ = e_1 + Π y` turns the eigenproblem into
//! `(A^{-1}(ε) + λZ) y = r(ε)`, where `A` is lower-triangular with
//! `A_ij = ε^(i-j)`, `Z = VΠ`, and the last component `y_K` is a slack that
//! has to vanish. Expanding the inverse as a geometric series gives `y` as a
//! polynomial in `ε` at every finite order.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::jordan::{jordan_block, shift_matrix};
use crate::numkit::linalg::Lu;
use crate::numkit::spectrum::{sort_roots, Provenance};
use crate::numkit::{poly_roots, Matrix, Polynomial, SpectrumReport, Tolerances};
use crate::scalar::{Ring, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct L1Problem<T = Complex64> {
    v: Matrix<T>,
    lambda: T,
}

impl<T: Scalar> L1Problem<T> {
    pub fn new(v: Matrix<T>, lambda: T) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::DimensionMismatch {
                op: "L1Problem",
                left: v.shape(),
                right: (v.rows(), v.rows()),
            });
        }
        if v.rows() < 2 {
            return Err(invalid(format!(
                "L=1 problem needs K >= 2, got {}",
                v.rows()
            )));
        }
        Ok(Self { v, lambda })
    }

    pub fn k(&self) -> usize {
        self.v.rows()
    }

    pub fn v(&self) -> &Matrix<T> {
        &self.v
    }

    pub fn lambda(&self) -> &T {
        &self.lambda
    }

    /// `J^(K)(0) + λV`
    pub fn hamiltonian(&self) -> Matrix<T> {
        &jordan_block(self.k(), T::zero()) + &self.v.scale(&self.lambda)
    }
}

/// Truncated series solution.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Series<T = Complex64> {
    pub order: usize,
    /// `K x 1`, entries polynomial in `ε`.
    pub y: Matrix<Polynomial<T>>,
    /// `y_K(ε)`.
    pub secular: Polynomial<T>,
}

/// Lower-triangular `A(ε)` with `A_ij = ε^(i-j)`.
pub fn build_a<T: Ring>(k: usize) -> Matrix<Polynomial<T>> {
    Matrix::from_fn(k, k, |i, j| {
        if i >= j {
            Polynomial::monomial(T::one(), i - j)
        } else {
            Polynomial::zero()
        }
    })
}

/// `A^{-1}(ε) = I - εΠ`: ones on the diagonal, `-ε` on the subdiagonal.
pub fn build_a_inverse<T: Ring>(k: usize) -> Matrix<Polynomial<T>> {
    Matrix::from_fn(k, k, |i, j| {
        if i == j {
            Polynomial::one()
        } else if i == j + 1 {
            Polynomial::monomial(-T::one(), 1)
        } else {
            Polynomial::zero()
        }
    })
}

/// `r = (ε - λV_11, -λV_21, ..., -λV_K1)^T`.
pub fn build_r<T: Scalar>(problem: &L1Problem<T>) -> Matrix<Polynomial<T>> {
    let lam = &problem.lambda;
    Matrix::from_fn(problem.k(), 1, |i, _| {
        let c = -(lam.clone() * problem.v[(i, 0)].clone());
        if i == 0 {
            Polynomial::new(vec![c, T::one()])
        } else {
            Polynomial::constant(c)
        }
    })
}

/// `Z = VΠ`: columns `2..K` of `V` moved one to the left, last column zero.
pub fn build_z<T: Ring>(v: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(v.rows(), v.cols(), |i, j| {
        if j + 1 < v.cols() {
            v[(i, j + 1)].clone()
        } else {
            T::zero()
        }
    })
}

pub(crate) fn lift<T: Ring>(m: &Matrix<T>) -> Matrix<Polynomial<T>> {
    m.map(|x| Polynomial::constant(x.clone()))
}

/// `y = sum_{t=0..order} (-λ A Z)^t A r`.
pub fn series_solution<T: Scalar>(problem: &L1Problem<T>, order: usize) -> L1Series<T> {
    let k = problem.k();
    let a = build_a::<T>(k);
    let lz = lift(&build_z(&problem.v).scale(&-problem.lambda.clone()));
    let mut term = &a * &build_r(problem);
    let mut y = term.clone();
    for _ in 0..order {
        term = &a * &(&lz * &term);
        y = &y + &term;
    }
    let secular = y[(k - 1, 0)].clone();
    L1Series { order, y, secular }
}

/// Roots of the truncated secular polynomial `y_K(ε)`.
///
/// A truncated series has degree up to `(order+1)(K-1)+1`, but only `K` of its
/// roots continue the unperturbed `ε = 0`. The `K` of smallest modulus are
/// returned as the spectrum and the rest go to `discarded`.
pub fn solve_secular(
    problem: &L1Problem,
    order: usize,
    tol: &Tolerances,
) -> Result<SpectrumReport> {
    let k = problem.k();
    if problem.lambda.is_zero() {
        return Ok(SpectrumReport::from_roots(
            Provenance::Secular,
            vec![Complex64::zero(); k],
            tol,
        ));
    }
    let secular = series_solution(problem, order).secular;
    if secular.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (kept, discarded) = select_physical(poly_roots(&secular, tol)?, k);
    let mut report = SpectrumReport::from_roots(Provenance::Secular, kept, tol);
    report.discarded = discarded;
    Ok(report)
}

/// Keeps the `n` roots of smallest modulus; the rest sorted by `(Re, Im)`.
pub(crate) fn select_physical(
    mut roots: Vec<Complex64>,
    n: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut discarded = roots.split_off(n.min(roots.len()));
    sort_roots(&mut discarded);
    (roots, discarded)
}

/// Eigenpair rebuilt from an energy without truncation.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Reconstruction {
    pub eps: Complex64,
    /// Eigenvector, not unit-normalized. For `L = 1` it has `Ψ_1 = 1`.
    pub psi: Vec<Complex64>,
    /// `||(J + λV - ε)Ψ|| / ||Ψ||`.
    pub residual: f64,
}

fn exact_system(problem: &L1Problem, eps: Complex64) -> (Matrix<Complex64>, Matrix<Complex64>) {
    let k = problem.k();
    let a_inv = build_a_inverse::<Complex64>(k).map(|p| p.eval(&eps));
    let m = &a_inv + &build_z(&problem.v).scale(&problem.lambda);
    let r = build_r(problem).map(|p| p.eval(&eps));
    (m, r)
}

fn psi_from(y: &Matrix<Complex64>) -> Vec<Complex64> {
    let mut psi = vec![Complex64::one()];
    psi.extend((0..y.rows() - 1).map(|i| y[(i, 0)]));
    psi
}

/// Relative Schrödinger residual `||(H - ε)Ψ|| / ||Ψ||`.
pub fn schrodinger_residual(h: &Matrix<Complex64>, eps: Complex64, psi: &[Complex64]) -> f64 {
    let r = &h.shift_diagonal(&eps) * &Matrix::column(psi.to_vec());
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    r.frobenius_norm() / norm
}

/// Solves `(A^{-1}(ε) + λZ) y = r(ε)` directly at `eps` and reassembles
/// `Ψ = e_1 + Π y`.
pub fn reconstruct(
    problem: &L1Problem,
    eps: Complex64,
    tol: &Tolerances,
) -> Result<Reconstruction> {
    let (m, r) = exact_system(problem, eps);
    let y = Lu::new(&m, tol.singular)?.solve(&r)?;
    let psi = psi_from(&y);
    let residual = schrodinger_residual(&problem.hamiltonian(), eps, &psi);
    Ok(Reconstruction { eps, psi, residual })
}

/// Newton iteration on the untruncated slack `y_K(ε)`, with
/// `y'(ε) = M^{-1} (e_1 + Π y)`.
pub fn refine_root(
    problem: &L1Problem,
    eps0: Complex64,
    tol: &Tolerances,
) -> Result<Reconstruction> {
    let k = problem.k();
    let pi = shift_matrix::<Complex64>(k);
    let mut eps = eps0;
    for _ in 0..tol.max_iterations {
        let (m, r) = exact_system(problem, eps);
        let lu = Lu::new(&m, tol.singular)?;
        let y = lu.solve(&r)?;
        let mut rhs = &pi * &y;
        rhs[(0, 0)] += Complex64::one();
        let dy = lu.solve(&rhs)?;
        let d = dy[(k - 1, 0)];
        if d.is_zero() {
            break;
        }
        let step = y[(k - 1, 0)] / d;
        eps -= step;
        if step.norm() <= 4.0 * f64::EPSILON * eps.norm().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    reconstruct(problem, eps, tol)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// Returns `λV` directly: `λ^((j-k+1)/2) μ_jk` on and below the diagonal,
/// `upper_jk` strictly above it.
pub fn admissible_perturbation(
    mu: &Matrix<Complex64>,
    lambda: f64,
    upper: &Matrix<Complex64>,
) -> Result<Matrix<Complex64>> {
    check_lambda(lambda)?;
    if !mu.is_square() || mu.shape() != upper.shape() {
        return Err(Error::DimensionMismatch {
            op: "admissible_perturbation",
            left: mu.shape(),
            right: upper.shape(),
        });
    }
    let n = mu.rows();
    Ok(Matrix::from_fn(n, n, |j, k| {
        if j >= k {
            mu[(j, k)] * lambda.powf((j - k + 1) as f64 / 2.0)
        } else {
            upper[(j, k)]
        }
    }))
}

/// `B_jj = λ^(j/2)` and `V_red = λ^(-1/2) B^{-1} admissible B`, so that
/// `admissible = λ^(1/2) B V_red B^{-1}`.
pub fn rescale_decomposition(
    admissible: &Matrix<Complex64>,
    lambda: f64,
) -> Result<(Matrix<Complex64>, Matrix<Complex64>)> {
    check_lambda(lambda)?;
    if !admissible.is_square() {
        return Err(invalid("rescale_decomposition needs a square matrix"));
    }
    let n = admissible.rows();
    let b = Matrix::diagonal(
        (1..=n)
            .map(|j| Complex64::new(lambda.powf(j as f64 / 2.0), 0.0))
            .collect(),
    );
    // (B^{-1} X B)_jk = λ^((k-j)/2) X_jk
    let v_red = Matrix::from_fn(n, n, |j, k| {
        admissible[(j, k)] * lambda.powf((k as f64 - j as f64 - 1.0) / 2.0)
    });
    Ok((b, v_red))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::eig_oracle;
    use crate::numkit::linalg::det;
    use crate::numkit::matrix::approx_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ones(n: usize) -> Matrix<Complex64> {
        Matrix::from_fn(n, n, |_, _| c(1.0))
    }

    #[test]
    fn a_matrix_shapes() {
        assert_eq!(build_a::<Complex64>(1), Matrix::identity(1));
        let a = build_a::<Complex64>(3);
        assert_eq!(a[(2, 0)], Polynomial::monomial(c(1.0), 2));
        assert_eq!(a[(1, 0)], Polynomial::x());
        assert!(a[(0, 2)].is_zero());
        for k in 1..=10 {
            assert!((&build_a::<Complex64>(k) * &build_a_inverse(k)).is_identity());
        }
    }

    #[test]
    fn r_and_z() {
        let v = Matrix::from_rows(vec![vec![c(2.0), c(5.0)], vec![c(3.0), c(7.0)]]).unwrap();
        let p = L1Problem::new(v.clone(), c(0.5)).unwrap();
        let r = build_r(&p);
        assert_eq!(r[(0, 0)], Polynomial::new(vec![c(-1.0), c(1.0)]));
        assert_eq!(r[(1, 0)], Polynomial::constant(c(-1.5)));
        let z = build_z(&v);
        assert_eq!(z.col(0), vec![c(5.0), c(7.0)]);
        assert_eq!(z.col(1), vec![c(0.0), c(0.0)]);
        assert!(build_z(&Matrix::<Complex64>::zeros(3, 3)).is_zero());
        let z3 = build_z(&Matrix::<Complex64>::identity(3));
        assert_eq!(z3.col(0), vec![c(0.0), c(1.0), c(0.0)]);
        assert_eq!(z3.col(1), vec![c(0.0), c(0.0), c(1.0)]);
    }

    #[test]
    fn unperturbed_series() {
        let p = L1Problem::new(ones(4), c(0.0)).unwrap();
        let s = series_solution(&p, 3);
        for i in 0..4 {
            assert_eq!(s.y[(i, 0)], Polynomial::monomial(c(1.0), i + 1));
        }
        let rep = solve_secular(&p, 3, &Tolerances::default()).unwrap();
        assert_eq!(rep.values(), vec![c(0.0); 4]);
    }

    #[test]
    fn degree_bound() {
        let p = L1Problem::new(ones(4), c(0.1)).unwrap();
        for t in 0..5 {
            let s = series_solution(&p, t);
            for i in 0..4 {
                assert!(s.y[(i, 0)].degree().unwrap() <= (t + 1) * 3 + 1);
            }
        }
    }

    #[test]
    fn k3_all_ones_matches_oracle() {
        let tol = Tolerances::default();
        let p = L1Problem::new(ones(3), c(1e-6)).unwrap();
        let rep = solve_secular(&p, 6, &tol).unwrap();
        let oracle = eig_oracle(&p.hamiltonian(), &tol).unwrap();
        for e in oracle.values() {
            let d = rep
                .values()
                .iter()
                .map(|r| (r - e).norm())
                .fold(f64::MAX, f64::min);
            assert!(d < 1e-8, "{e} missed by {d}");
        }
        // |ε| ~ λ^{1/3} and complex roots appear
        for r in rep.values() {
            assert!((r.norm() / 1e-2 - 1.0).abs() < 0.05);
        }
        assert!(rep.any_non_real());
    }

    #[test]
    fn secular_roots_are_eigenvalues() {
        let v = Matrix::from_rows(vec![
            vec![c(0.3), Complex64::new(0.1, -0.4), c(-0.7)],
            vec![Complex64::new(0.2, 0.5), c(-0.6), c(0.9)],
            vec![c(0.8), c(0.4), Complex64::new(-0.1, 0.3)],
        ])
        .unwrap();
        let tol = Tolerances::default();
        let p = L1Problem::new(v, c(1e-2)).unwrap();
        let h = p.hamiltonian();
        let scale = h.frobenius_norm().powi(3);
        for e in solve_secular(&p, 6, &tol).unwrap().values() {
            assert!(det(&h.shift_diagonal(&e)).unwrap().norm() <= 1e-8 * scale);
            let rec = reconstruct(&p, e, &tol).unwrap();
            assert!(rec.residual < 1e-8, "{}", rec.residual);
            assert_eq!(rec.psi[0], c(1.0));
            let refined = refine_root(&p, e, &tol).unwrap();
            assert!(refined.residual <= rec.residual.max(1e-14));
        }
    }

    #[test]
    fn next_term_is_order_lambda_power() {
        // zero first column keeps r = ε e_1 free of λ
        let v = Matrix::from_fn(3, 3, |i, j| {
            if j == 0 {
                c(0.0)
            } else {
                Complex64::new((i + 2 * j) as f64 / 5.0 - 0.4, 0.1 * i as f64)
            }
        });
        let t = 2;
        let diff = |lam: f64| {
            let p = L1Problem::new(v.clone(), c(lam)).unwrap();
            series_solution(&p, t + 1).secular - series_solution(&p, t).secular
        };
        let (d1, d2) = (diff(1e-2), diff(2e-2));
        assert!(!d1.is_zero());
        for (a, b) in d1.coeffs().iter().zip(d2.coeffs()) {
            assert!((b - a * 8.0).norm() <= 1e-9 * b.norm());
        }
    }

    #[test]
    fn admissible_examples() {
        let z = Matrix::<Complex64>::zeros(2, 2);
        let adm = admissible_perturbation(&ones(2), 0.01, &z).unwrap();
        let want = Matrix::from_rows(vec![vec![c(0.1), c(0.0)], vec![c(0.01), c(0.1)]]).unwrap();
        assert!(approx_eq(&adm, &want, 1e-15));
        let mu = Matrix::from_fn(3, 3, |i, j| c((i * 3 + j) as f64));
        let adm1 = admissible_perturbation(&mu, 1.0, &Matrix::zeros(3, 3)).unwrap();
        assert!(approx_eq(
            &adm1,
            &Matrix::from_fn(3, 3, |i, j| if i >= j { mu[(i, j)] } else { c(0.0) }),
            0.0
        ));
        assert!(admissible_perturbation(&mu, 0.0, &mu).is_err());
    }

    #[test]
    fn rescale_round_trip() {
        let x = Matrix::from_fn(4, 4, |i, j| {
            Complex64::new(i as f64 - j as f64, (i * j) as f64)
        });
        let lam = 0.04;
        let (b, v_red) = rescale_decomposition(&x, lam).unwrap();
        let b_inv = Matrix::diagonal((0..4).map(|j| b[(j, j)].inv()).collect());
        let back = (&(&b * &v_red) * &b_inv).scale(&c(lam.sqrt()));
        assert!(approx_eq(&back, &x, 1e-12));

        let mu = Matrix::from_fn(4, 4, |i, j| c(1.0 + (i + j) as f64));
        for lam in [1e-2, 1e-4, 1e-6] {
            let adm = admissible_perturbation(&mu, lam, &Matrix::zeros(4, 4)).unwrap();
            let (_, v_red) = rescale_decomposition(&adm, lam).unwrap();
            for i in 0..4 {
                for j in 0..=i {
                    assert!((v_red[(i, j)] - mu[(i, j)]).norm() < 1e-12 * mu[(i, j)].norm());
                }
            }
        }
    }
}
