//! Several Jordan blocks at one eigenvalue: `[𝒥 + λV] Ψ = ε Ψ` with
//! `𝒥 = J^(N_1)(0) ⊕ ... ⊕ J^(N_L)(0)`, `L >= 2`.
//!
//! Every block gets its own free head `ω_j = Ψ^(j)_1`. With `E` the `K x L`
//! matrix of block heads and `Π` the block shift, `Ψ = E ω + Π y` and
//! `(𝒜^{-1}(ε) + λVΠ) y = (εE - λVE) ω`. The last entry of each block of `y`
//! must vanish, which gives `L` equations linear in `ω`.

mod compat;
mod domain;
mod leading;
mod series;

pub use compat::{
    reassemble_state, solve_compat_system, solve_l2, CompatOutcome, CompatRoot, L2Solution, Seed,
    SeedFailure,
};
pub use domain::{search_real_domain, DomainSample};
pub use leading::{
    e_polynomial, leading_order_system, rescaled_problem, solve_leading_order,
    solve_rescaled_leading_order, LeadingOrderSolution, RescaledSolution,
};
pub use series::{
    build_block_a, build_block_pi, build_r_l, build_r_matrix, head_matrix, series_solution_l,
    LSeries,
};

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::jordan::{jordan_direct_sum, PartitionSpec};
use crate::numkit::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LProblem {
    partition: PartitionSpec,
    v: Matrix<Complex64>,
    lambda: Complex64,
}

impl LProblem {
    pub fn new(partition: PartitionSpec, v: Matrix<Complex64>, lambda: Complex64) -> Result<Self> {
        if partition.l() < 2 {
            return Err(invalid(format!(
                "partitioned solver needs at least two blocks, got {partition}"
            )));
        }
        let k = partition.k();
        if v.shape() != (k, k) {
            return Err(Error::DimensionMismatch {
                op: "LProblem",
                left: v.shape(),
                right: (k, k),
            });
        }
        Ok(Self {
            partition,
            v,
            lambda,
        })
    }

    pub fn partition(&self) -> &PartitionSpec {
        &self.partition
    }

    pub fn v(&self) -> &Matrix<Complex64> {
        &self.v
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn k(&self) -> usize {
        self.partition.k()
    }

    pub fn l(&self) -> usize {
        self.partition.l()
    }

    /// `𝒥 + λV`
    pub fn hamiltonian(&self) -> Matrix<Complex64> {
        &jordan_direct_sum(&self.partition, Complex64::zero()) + &self.v.scale(&self.lambda)
    }

    /// Block `(P, Q)` of `V`.
    pub fn block(&self, p: usize, q: usize) -> Matrix<Complex64> {
        let off = self.partition.offsets();
        let parts = self.partition.parts();
        self.v.submatrix(off[p], off[q], parts[p], parts[q])
    }
}

/// Block heads `ω_j`, normalized by `Σ ω_j^2 = 1` (no conjugation).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OmegaVector(pub Vec<Complex64>);

impl OmegaVector {
    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    pub fn as_column(&self) -> Matrix<Complex64> {
        Matrix::column(self.0.clone())
    }

    /// Scales to `Σ ω^2 = 1`; `None` when `Σ ω^2` vanishes.
    pub fn normalized(&self) -> Option<Self> {
        let s: Complex64 = self.0.iter().map(|w| w * w).sum();
        let scale = self.0.iter().map(|w| w.norm_sqr()).sum::<f64>();
        if s.norm() <= 1e-12 * scale || scale == 0.0 {
            return None;
        }
        let root = s.sqrt();
        Some(Self(self.0.iter().map(|w| w / root).collect()).gauged())
    }

    /// Sign fixed so the first significant component has positive real part.
    pub fn gauged(self) -> Self {
        let big = self.0.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let first = self.0.iter().find(|w| w.norm() > 1e-8 * big);
        match first {
            Some(w) if w.re < 0.0 || (w.re == 0.0 && w.im < 0.0) => {
                Self(self.0.iter().map(|w| -w).collect())
            }
            _ => self,
        }
    }
}
