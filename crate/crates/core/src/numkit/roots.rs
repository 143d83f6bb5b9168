//! Aberth–Ehrlich simultaneous root finding with Newton polishing.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::poly::Polynomial;
use super::tolerances::Tolerances;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

type C<F> = Complex<F>;

/// `(p(z), p'(z), sum_k |c_k| |z|^k)` in one Horner pass.
fn horner<F: Real>(coeffs: &[C<F>], z: C<F>) -> (C<F>, C<F>, F) {
    let az = z.norm();
    let mut p = C::zero();
    let mut dp = C::zero();
    let mut s = F::zero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + *c;
        s = s * az + c.norm();
    }
    (p, dp, s)
}

/// Backward-error scale used in the residual bound: `sum_k |c_k| max(1,|z|)^k`.
pub fn residual_scale<F: Real>(coeffs: &[C<F>], z: C<F>) -> F {
    let r = z.norm().max(F::one());
    coeffs
        .iter()
        .rev()
        .fold(F::zero(), |acc, c| acc * r + c.norm())
}

/// Initial guesses from the upper convex hull of `(k, ln|c_k|)`.
fn newton_polygon_guesses<F: Real>(coeffs: &[C<F>]) -> Vec<C<F>> {
    let d = coeffs.len() - 1;
    let pts: Vec<(usize, F)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > F::zero())
        .map(|(k, c)| (k, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, F)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b if it lies on or below the segment a -> p.
            let cross = (F::lit((b.0 - a.0) as f64)) * (p.1 - a.1)
                - (b.1 - a.1) * F::lit((p.0 - a.0) as f64);
            if cross >= F::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = F::lit(0.7);
    let two_pi = F::TAU();
    let mut guesses = Vec::with_capacity(d);
    for (seg, w) in hull.windows(2).enumerate() {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let n = k1 - k0;
        let radius = ((l0 - l1) / F::lit(n as f64)).exp();
        for j in 0..n {
            let theta = two_pi * F::lit(j as f64) / F::lit(n as f64)
                + two_pi * F::lit(seg as f64) / F::lit(d as f64)
                + sigma;
            guesses.push(C::from_polar(radius, theta));
        }
    }
    guesses
}

/// All complex roots of `p` (multiple roots appear repeated).
///
/// Every returned root satisfies `|p(z)| <= tol.root_residual * sum_k |c_k| max(1,|z|)^k`;
/// otherwise [`Error::NoConvergence`] carries the per-root residual ratios.
pub fn poly_roots<F: Real>(p: &Polynomial<C<F>>, tol: &Tolerances) -> Result<Vec<C<F>>> {
    let degree = match p.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(invalid("poly_roots needs degree >= 1")),
        Some(d) => d,
    };
    if p.coeffs()
        .iter()
        .any(|c| !(c.re.is_finite() && c.im.is_finite()))
    {
        return Err(Error::NonFinite("polynomial coefficients"));
    }
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let q = &p.coeffs()[zeros..];
    let d = degree - zeros;
    let mut roots = vec![C::zero(); zeros];
    if d == 0 {
        return Ok(roots);
    }
    if d == 1 {
        roots.push(-q[0] / q[1]);
        return finish(p, roots, tol, 0);
    }

    let mut z = newton_polygon_guesses(q);
    let mut done = vec![false; d];
    let eps = F::epsilon() * F::lit(4.0 * (d + 1) as f64);
    let mut iterations = 0;
    while iterations < tol.max_iterations && done.iter().any(|x| !x) {
        iterations += 1;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (pv, dpv, s) = horner(q, z[i]);
            if pv.norm() <= eps * s {
                done[i] = true;
                continue;
            }
            let ratio = if dpv.is_zero() { pv } else { pv / dpv };
            let sum = (0..d)
                .filter(|&j| j != i && z[j] != z[i])
                .fold(C::<F>::zero(), |acc, j| acc + C::<F>::one() / (z[i] - z[j]));
            let denom: C<F> = C::<F>::one() - ratio * sum;
            let w = if denom.is_zero() {
                ratio
            } else {
                ratio / denom
            };
            z[i] = z[i] - w;
            if w.norm() <= F::epsilon() * z[i].norm() {
                done[i] = true;
            }
        }
    }

    // Newton polishing on the deflated polynomial, accepted only when it helps.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (pv, dpv, _) = horner(q, *zi);
            if dpv.is_zero() || pv.is_zero() {
                break;
            }
            let cand = *zi - pv / dpv;
            if horner(q, cand).0.norm() < pv.norm() {
                *zi = cand;
            } else {
                break;
            }
        }
    }
    roots.extend(z);
    finish(p, roots, tol, iterations)
}

fn finish<F: Real>(
    p: &Polynomial<C<F>>,
    roots: Vec<C<F>>,
    tol: &Tolerances,
    iterations: usize,
) -> Result<Vec<C<F>>> {
    let bound = F::lit(tol.root_residual);
    let ratios: Vec<F> = roots
        .iter()
        .map(|&r| {
            let (pv, _, _) = horner(p.coeffs(), r);
            pv.norm() / residual_scale(p.coeffs(), r)
        })
        .collect();
    if ratios.iter().all(|&x| x <= bound) {
        Ok(roots)
    } else {
        let residuals: Vec<f64> = ratios.iter().map(|x| x.as_f64()).collect();
        let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
        Err(Error::NoConvergence {
            iterations,
            residuals,
            max_residual,
        })
    }
}
