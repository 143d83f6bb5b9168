use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::leading::{solve_rescaled_leading_order, RescaledSolution};
use crate::error::Result;
use crate::jordan::PartitionSpec;
use crate::numkit::{Matrix, Tolerances};

/// A `W` whose rescaled leading-order spectrum is real and non-degenerate.
#[derive(Debug, Clone, Serialize)]
pub struct DomainSample {
    pub seed: u64,
    /// Zero-based draw that succeeded.
    pub trial: usize,
    pub w: Matrix<Complex64>,
    pub solution: RescaledSolution,
}

/// Draws real `W` with entries uniform in `[-2, 2]` until the rescaled
/// leading-order polynomial in `E` has only real, distinct roots.
///
/// Deterministic in `seed`. Returns `None` after `max_trials` misses.
pub fn search_real_domain(
    partition: &PartitionSpec,
    seed: u64,
    max_trials: usize,
    tol: &Tolerances,
) -> Result<Option<DomainSample>> {
    let k = partition.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..max_trials {
        let w = Matrix::from_fn(k, k, |_, _| Complex64::new(rng.gen_range(-2.0..=2.0), 0.0));
        let solution = solve_rescaled_leading_order(&w, partition, 1e-2, tol)?;
        if solution.in_domain {
            return Ok(Some(DomainSample {
                seed,
                trial,
                w,
                solution,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_is_reproducible() {
        let tol = Tolerances::default();
        let pt = PartitionSpec::new(vec![2, 2]).unwrap();
        let a = search_real_domain(&pt, 7, 2000, &tol)
            .unwrap()
            .expect("a real sample");
        let b = search_real_domain(&pt, 7, 2000, &tol).unwrap().unwrap();
        assert_eq!(a.trial, b.trial);
        assert_eq!(a.w, b.w);
        assert!(a.solution.e_spectrum.all_real());
        assert_eq!(a.solution.e_spectrum.roots.len(), 4);
    }
}
