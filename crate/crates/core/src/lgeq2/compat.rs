use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::leading::{kernel_omega, solve_leading_order, LeadingOrderSolution};
use super::series::{build_block_pi, build_r_matrix, head_matrix, series_solution_l};
use super::{LProblem, OmegaVector};
use crate::error::Result;
use crate::l1::{schrodinger_residual, select_physical, Reconstruction};
use crate::numkit::linalg::Lu;
use crate::numkit::spectrum::sort_roots;
use crate::numkit::{poly_roots, Matrix, Tolerances};
use crate::PolyMatrix;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Seed {
    pub eps: Complex64,
    pub omega: OmegaVector,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatRoot {
    pub eps: Complex64,
    pub omega: OmegaVector,
    /// `||(C(ε)ω, Σω² - 1)||`.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedFailure {
    pub seed: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompatOutcome {
    pub order: usize,
    /// Distinct converged roots sorted by `(Re ε, Im ε)`.
    pub roots: Vec<CompatRoot>,
    pub failed: Vec<SeedFailure>,
}

impl CompatOutcome {
    pub fn eps(&self) -> Vec<Complex64> {
        self.roots.iter().map(|r| r.eps).collect()
    }
}

struct CompatSystem {
    c: PolyMatrix,
    dc: PolyMatrix,
}

impl CompatSystem {
    fn new(problem: &LProblem, order: usize) -> Self {
        let c = series_solution_l(problem, order).compat;
        let dc = c.map(|p| p.derivative());
        Self { c, dc }
    }

    fn residual(&self, eps: Complex64, w: &[Complex64]) -> (Vec<Complex64>, Matrix<Complex64>) {
        let c = self.c.map(|p| p.eval(&eps));
        let mut f: Vec<Complex64> = (0..w.len())
            .map(|p| (0..w.len()).map(|q| c[(p, q)] * w[q]).sum())
            .collect();
        f.push(w.iter().map(|x| x * x).sum::<Complex64>() - 1.0);
        (f, c)
    }

    fn newton(&self, seed: &Seed, tol: &Tolerances) -> std::result::Result<CompatRoot, String> {
        let l = seed.omega.0.len();
        let mut eps = seed.eps;
        let mut w = seed.omega.0.clone();
        let norm = |f: &[Complex64]| f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut iterations = 0;
        while iterations < tol.max_iterations {
            let (f, c) = self.residual(eps, &w);
            if norm(&f) == 0.0 {
                break;
            }
            let dc = self.dc.map(|p| p.eval(&eps));
            let jac = Matrix::from_fn(l + 1, l + 1, |i, j| match (i < l, j) {
                (true, 0) => (0..l).map(|q| dc[(i, q)] * w[q]).sum(),
                (true, j) => c[(i, j - 1)],
                (false, 0) => Complex64::zero(),
                (false, j) => w[j - 1] * 2.0,
            });
            let lu = match Lu::new(&jac, tol.singular) {
                Ok(lu) => lu,
                Err(_) if norm(&f) <= tol.newton_residual => break,
                Err(e) => return Err(format!("Jacobian singular at iteration {iterations}: {e}")),
            };
            let rhs = Matrix::column(f.iter().map(|z| -z).collect());
            let step = lu.solve(&rhs).map_err(|e| e.to_string())?;
            eps += step[(0, 0)];
            for (q, x) in w.iter_mut().enumerate() {
                *x += step[(q + 1, 0)];
            }
            iterations += 1;
            let d_eps = step[(0, 0)].norm();
            let d_w = (1..=l).map(|q| step[(q, 0)].norm()).fold(0.0, f64::max);
            if !(eps.is_finite() && w.iter().all(|x| x.is_finite())) {
                return Err("iterate diverged".into());
            }
            if d_eps <= 1e-14 * eps.norm() && d_w <= 1e-14 {
                break;
            }
        }
        let residual = norm(&self.residual(eps, &w).0);
        if residual > tol.newton_residual {
            return Err(format!(
                "residual {residual:e} after {iterations} iterations"
            ));
        }
        Ok(CompatRoot {
            eps,
            omega: OmegaVector(w).gauged(),
            residual,
            iterations,
        })
    }
}

fn same_root(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-8 * a.norm().max(b.norm())
}

/// Keeps the best-residual representative of every distinct `ε`.
fn merge(found: Vec<CompatRoot>) -> Vec<CompatRoot> {
    let mut kept: Vec<CompatRoot> = Vec::new();
    for r in found {
        match kept.iter_mut().find(|k| same_root(k.eps, r.eps)) {
            Some(k) if r.residual < k.residual => *k = r,
            Some(_) => {}
            None => kept.push(r),
        }
    }
    kept.sort_by(|a, b| {
        a.eps
            .re
            .total_cmp(&b.eps.re)
            .then(a.eps.im.total_cmp(&b.eps.im))
    });
    kept
}

/// Newton refinement of `C_t(ε) ω = 0`, `Σ ω² = 1` from every seed.
///
/// Seeds run in parallel; a failing seed is reported and does not affect
/// the others.
pub fn solve_compat_system(
    problem: &LProblem,
    order: usize,
    seeds: &[Seed],
    tol: &Tolerances,
) -> Result<CompatOutcome> {
    let system = CompatSystem::new(problem, order);
    let results: Vec<_> = seeds.par_iter().map(|s| system.newton(s, tol)).collect();
    let mut found = Vec::new();
    let mut failed = Vec::new();
    for (seed, r) in results.into_iter().enumerate() {
        match r {
            Ok(root) => found.push(root),
            Err(reason) => failed.push(SeedFailure { seed, reason }),
        }
    }
    Ok(CompatOutcome {
        order,
        roots: merge(found),
        failed,
    })
}

/// Leading-order seeding followed by refinement at the requested order.
#[derive(Debug, Clone, Serialize)]
pub struct L2Solution {
    pub leading: LeadingOrderSolution,
    pub refined: CompatOutcome,
    /// `K` distinct roots were found.
    pub complete: bool,
}

/// Seeds from the full leading-order pencil. If some branch is still
/// missing, the `K` smallest roots of `det C_t(ε)` are tried as well.
pub fn solve_l2(problem: &LProblem, order: usize, tol: &Tolerances) -> Result<L2Solution> {
    let k = problem.k();
    let leading = solve_leading_order(problem, false, tol)?;
    if problem.lambda().is_zero() {
        let roots = leading
            .omegas
            .iter()
            .map(|omega| CompatRoot {
                eps: Complex64::zero(),
                omega: omega.clone(),
                residual: 0.0,
                iterations: 0,
            })
            .collect();
        return Ok(L2Solution {
            leading,
            refined: CompatOutcome {
                order,
                roots,
                failed: Vec::new(),
            },
            complete: true,
        });
    }
    let mut seeds: Vec<Seed> = leading
        .spectrum
        .values()
        .into_iter()
        .zip(&leading.omegas)
        .map(|(eps, omega)| Seed {
            eps,
            omega: omega.clone(),
        })
        .collect();
    let mut refined = solve_compat_system(problem, order, &seeds, tol)?;
    if refined.roots.len() < k {
        let series = series_solution_l(problem, order);
        let det = series.compat_determinant();
        if !det.is_zero() {
            let (mut extra, _) = select_physical(poly_roots(&det, tol)?, k);
            sort_roots(&mut extra);
            for eps in extra {
                let omega = kernel_omega(&series.compat.map(|p| p.eval(&eps)))?;
                seeds.push(Seed { eps, omega });
            }
            refined = solve_compat_system(problem, order, &seeds, tol)?;
        }
    }
    let complete = refined.roots.len() == k;
    Ok(L2Solution {
        leading,
        refined,
        complete,
    })
}

/// Solves `(𝒜^{-1}(ε) + λVΠ) y = (εE - λVE) ω` at fixed `(ε, ω)` and returns
/// `Ψ = E ω + Π y` with its Schrödinger residual.
pub fn reassemble_state(
    problem: &LProblem,
    eps: Complex64,
    omega: &OmegaVector,
    tol: &Tolerances,
) -> Result<Reconstruction> {
    let pi = build_block_pi(problem.partition());
    let m = &(&Matrix::identity(problem.k()) - &pi.scale(&eps))
        + &(&problem.v().scale(&problem.lambda()) * &pi);
    let rhs = &build_r_matrix(problem).map(|p| p.eval(&eps)) * &omega.as_column();
    let y = Lu::new(&m, tol.singular)?.solve(&rhs)?;
    let psi = &(&head_matrix(problem.partition()) * &omega.as_column()) + &(&pi * &y);
    let psi = psi.into_data();
    let residual = schrodinger_residual(&problem.hamiltonian(), eps, &psi);
    Ok(Reconstruction { eps, psi, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::PartitionSpec;
    use crate::numkit::eig_oracle;

    fn part(p: &[usize]) -> PartitionSpec {
        PartitionSpec::new(p.to_vec()).unwrap()
    }

    fn sample_v(k: usize) -> Matrix<Complex64> {
        Matrix::from_fn(k, k, |i, j| {
            Complex64::new(
                ((3 * i + 7 * j) % 11) as f64 / 5.0 - 1.0,
                ((5 * i + 2 * j) % 7) as f64 / 6.0 - 0.5,
            )
        })
    }

    #[test]
    fn zero_lambda_seed_stays_put() {
        let p = LProblem::new(part(&[2, 2]), sample_v(4), Complex64::zero()).unwrap();
        let seed = Seed {
            eps: Complex64::zero(),
            omega: OmegaVector(vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]),
        };
        let out = solve_compat_system(&p, 3, &[seed], &Tolerances::default()).unwrap();
        assert_eq!(out.roots.len(), 1);
        assert_eq!(out.roots[0].eps, Complex64::zero());
        let full = solve_l2(&p, 3, &Tolerances::default()).unwrap();
        assert_eq!(full.refined.roots.len(), 4);
        assert!(full.complete);
    }

    #[test]
    fn two_by_two_blocks_match_oracle() {
        let tol = Tolerances::default();
        for parts in [[2, 2], [3, 2]] {
            let pt = part(&parts);
            let p = LProblem::new(pt.clone(), sample_v(pt.k()), Complex64::new(1e-4, 0.0)).unwrap();
            let sol = solve_l2(&p, 6, &tol).unwrap();
            assert!(sol.complete, "{parts:?}: {:?}", sol.refined.failed);
            for e in eig_oracle(&p.hamiltonian(), &tol).unwrap().values() {
                let d = sol
                    .refined
                    .eps()
                    .iter()
                    .map(|r| (r - e).norm())
                    .fold(f64::MAX, f64::min);
                assert!(d < 1e-7, "{parts:?} {e} {d}");
            }
            for r in &sol.refined.roots {
                assert!(r.residual <= 1e-10);
                let s: Complex64 = r.omega.0.iter().map(|w| w * w).sum();
                assert!((s - 1.0).norm() < 1e-10);
                let rec = reassemble_state(&p, r.eps, &r.omega, &tol).unwrap();
                assert!(rec.residual < 1e-8, "{}", rec.residual);
            }
        }
    }

    #[test]
    fn bad_seed_is_isolated() {
        let tol = Tolerances::default();
        let p = LProblem::new(part(&[2, 2]), sample_v(4), Complex64::new(1e-4, 0.0)).unwrap();
        let lead = solve_leading_order(&p, false, &tol).unwrap();
        let mut seeds = vec![Seed {
            eps: Complex64::new(0.0, 0.0),
            omega: OmegaVector(vec![Complex64::zero(), Complex64::zero()]),
        }];
        seeds.push(Seed {
            eps: lead.spectrum.values()[0],
            omega: lead.omegas[0].clone(),
        });
        let out = solve_compat_system(&p, 4, &seeds, &tol).unwrap();
        assert_eq!(out.failed.len(), 1);
        assert_eq!(out.failed[0].seed, 0);
        assert_eq!(out.roots.len(), 1);
    }
}
