use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::{LProblem, OmegaVector};
use crate::error::{invalid, Error, Result};
use crate::jordan::PartitionSpec;
use crate::numkit::linalg::null_vector;
use crate::numkit::spectrum::Provenance;
use crate::numkit::{poly_roots, Matrix, Polynomial, SpectrumReport, Tolerances};
use crate::{CPoly, PolyMatrix};

/// `S_PQ(ε) = Σ_m ε^m λ V^(P,Q)_{N_P - m, 1} - δ_PQ ε^{N_P}`, the order-zero
/// compat matrix up to sign. `reduced` keeps only the `m = 0` terms.
pub fn leading_order_system(problem: &LProblem, reduced: bool) -> PolyMatrix {
    let parts = problem.partition.parts();
    let l = parts.len();
    Matrix::from_fn(l, l, |p, q| {
        let block = problem.block(p, q);
        let n = parts[p];
        let terms = if reduced { 1 } else { n };
        let mut coeffs = vec![Complex64::zero(); n + 1];
        for (m, c) in coeffs.iter_mut().enumerate().take(terms) {
            *c = problem.lambda * block[(n - 1 - m, 0)];
        }
        if p == q {
            coeffs[n] -= Complex64::new(1.0, 0.0);
        }
        Polynomial::new(coeffs)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct LeadingOrderSolution {
    pub reduced: bool,
    #[serde(skip)]
    pub determinant: CPoly,
    pub spectrum: SpectrumReport,
    /// Kernel vector of `S(ε)` for each root, in spectrum order.
    pub omegas: Vec<OmegaVector>,
}

/// Kernel of a numeric `L x L` matrix, normalized as far as possible.
pub(crate) fn kernel_omega(m: &Matrix<Complex64>) -> Result<OmegaVector> {
    let v = OmegaVector(null_vector(m)?);
    Ok(v.normalized().unwrap_or_else(|| v.gauged()))
}

fn solve_pencil(
    s: &PolyMatrix,
    provenance: Provenance,
    tol: &Tolerances,
) -> Result<(CPoly, SpectrumReport, Vec<OmegaVector>)> {
    let det = s.det_expansion()?;
    if det.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let spectrum = SpectrumReport::from_roots(provenance, poly_roots(&det, tol)?, tol);
    let omegas = spectrum
        .values()
        .iter()
        .map(|e| kernel_omega(&s.map(|p| p.eval(e))))
        .collect::<Result<_>>()?;
    Ok((det, spectrum, omegas))
}

/// Roots of `det S(ε)`, each with its kernel vector `ω`.
pub fn solve_leading_order(
    problem: &LProblem,
    reduced: bool,
    tol: &Tolerances,
) -> Result<LeadingOrderSolution> {
    let s = leading_order_system(problem, reduced);
    let (determinant, spectrum, omegas) = solve_pencil(&s, Provenance::LeadingOrder, tol)?;
    Ok(LeadingOrderSolution {
        reduced,
        determinant,
        spectrum,
        omegas,
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// Problem whose first block-columns carry `λ V_{(P,i),(Q,1)} = λ^{i/2} W_{(P,i),(Q,1)}`
/// (`i` the row inside block `P`, counted from one). All other entries of `V`
/// are copied from `W`.
pub fn rescaled_problem(
    w: &Matrix<Complex64>,
    partition: &PartitionSpec,
    lambda: f64,
) -> Result<LProblem> {
    check_lambda(lambda)?;
    let k = partition.k();
    if w.shape() != (k, k) {
        return Err(Error::DimensionMismatch {
            op: "rescaled_problem",
            left: w.shape(),
            right: (k, k),
        });
    }
    let mut v = w.clone();
    let offsets = partition.offsets();
    for (&row0, &n) in offsets.iter().zip(partition.parts()) {
        for i in 0..n {
            let factor = lambda.powf((i + 1) as f64 / 2.0 - 1.0);
            for &col in &offsets {
                v[(row0 + i, col)] = w[(row0 + i, col)] * factor;
            }
        }
    }
    LProblem::new(partition.clone(), v, Complex64::new(lambda, 0.0))
}

/// `det S(√λ E)` with row `P` divided by `λ^{N_P/2}`.
///
/// For a problem built by [`rescaled_problem`] the coefficients do not depend
/// on `λ`, and the degree is `K`.
pub fn e_polynomial(problem: &LProblem) -> Result<CPoly> {
    let lam = problem.lambda;
    if lam.im != 0.0 {
        return Err(invalid("the E-polynomial needs a real positive lambda"));
    }
    check_lambda(lam.re)?;
    let s = Complex64::new(lam.re.sqrt(), 0.0);
    let parts = problem.partition.parts().to_vec();
    let system = leading_order_system(problem, false);
    let scaled = Matrix::from_fn(system.rows(), system.cols(), |p, q| {
        let row_scale = Complex64::new(lam.re.powf(-(parts[p] as f64) / 2.0), 0.0);
        system[(p, q)].scale_argument(&s).scale(&row_scale)
    });
    scaled.det_expansion()
}

#[derive(Debug, Clone, Serialize)]
pub struct RescaledSolution {
    /// Ascending coefficients of the polynomial in `E`.
    pub e_coefficients: Vec<Complex64>,
    pub e_spectrum: SpectrumReport,
    /// `ε = √λ E`, in `e_spectrum` order.
    pub eps: Vec<Complex64>,
    /// All `E` real and pairwise distinct.
    pub in_domain: bool,
}

pub fn solve_rescaled_leading_order(
    w: &Matrix<Complex64>,
    partition: &PartitionSpec,
    lambda: f64,
    tol: &Tolerances,
) -> Result<RescaledSolution> {
    let problem = rescaled_problem(w, partition, lambda)?;
    let poly = e_polynomial(&problem)?;
    if poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let e_spectrum =
        SpectrumReport::from_roots(Provenance::LeadingOrder, poly_roots(&poly, tol)?, tol);
    let eps = e_spectrum
        .values()
        .iter()
        .map(|e| e * lambda.sqrt())
        .collect();
    let in_domain = e_spectrum.all_real() && e_spectrum.all_distinct();
    Ok(RescaledSolution {
        e_coefficients: poly.coeffs().to_vec(),
        e_spectrum,
        eps,
        in_domain,
    })
}
