use num_complex::Complex64;
use num_traits::Zero;

use super::{LProblem, OmegaVector};
use crate::jordan::{shift_matrix, PartitionSpec};
use crate::l1::{build_a, lift};
use crate::numkit::{Matrix, Polynomial};
use crate::PolyMatrix;

/// `𝒜(ε) = A(N_1, ε) ⊕ ... ⊕ A(N_L, ε)`.
pub fn build_block_a(partition: &PartitionSpec) -> PolyMatrix {
    let blocks: Vec<_> = partition
        .parts()
        .iter()
        .map(|&n| build_a::<Complex64>(n))
        .collect();
    Matrix::direct_sum(&blocks)
}

/// Direct sum of block shift matrices.
pub fn build_block_pi(partition: &PartitionSpec) -> Matrix<Complex64> {
    let blocks: Vec<_> = partition.parts().iter().map(|&n| shift_matrix(n)).collect();
    Matrix::direct_sum(&blocks)
}

/// `K x L` matrix `E` with a one at the head of every block.
pub fn head_matrix(partition: &PartitionSpec) -> Matrix<Complex64> {
    let mut e = Matrix::zeros(partition.k(), partition.l());
    for (j, off) in partition.offsets().into_iter().enumerate() {
        e[(off, j)] = Complex64::new(1.0, 0.0);
    }
    e
}

fn r_matrix(partition: &PartitionSpec, v: &Matrix<Complex64>, lambda: Complex64) -> PolyMatrix {
    let e = head_matrix(partition);
    let coupling = &v.scale(&-lambda) * &e;
    Matrix::from_fn(partition.k(), partition.l(), |i, j| {
        Polynomial::new(vec![coupling[(i, j)], e[(i, j)]])
    })
}

/// `R(ε) = εE - λVE`, so that `r = R ω`.
pub fn build_r_matrix(problem: &LProblem) -> PolyMatrix {
    r_matrix(&problem.partition, &problem.v, problem.lambda)
}

/// Blocked right-hand side `r = (εE - λVE) ω`.
pub fn build_r_l(problem: &LProblem, omega: &OmegaVector) -> PolyMatrix {
    &build_r_matrix(problem) * &lift(&omega.as_column())
}

/// Series solution, linear in `ω`: `y = Y(ε) ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct LSeries {
    pub order: usize,
    /// `K x L`.
    pub y: PolyMatrix,
    /// `L x L`: the last row of every block of `Y`; the compat equations read
    /// `compat · ω = 0`.
    pub compat: PolyMatrix,
}

impl LSeries {
    pub fn y_for(&self, omega: &OmegaVector) -> PolyMatrix {
        &self.y * &lift(&omega.as_column())
    }

    pub fn compat_for(&self, omega: &OmegaVector) -> PolyMatrix {
        &self.compat * &lift(&omega.as_column())
    }

    /// `det compat(ε)`: its roots are the energies of the truncated system.
    pub fn compat_determinant(&self) -> Polynomial<Complex64> {
        self.compat
            .det_expansion()
            .unwrap_or_else(|_| Polynomial::zero())
    }
}

/// `Y = sum_t (-λ 𝒜 V Π)^t 𝒜 R` for any number of blocks, one included.
pub(crate) fn block_series(
    partition: &PartitionSpec,
    v: &Matrix<Complex64>,
    lambda: Complex64,
    order: usize,
) -> PolyMatrix {
    let a = build_block_a(partition);
    let g = lift(&(&v.scale(&-lambda) * &build_block_pi(partition)));
    let mut term = &a * &r_matrix(partition, v, lambda);
    let mut y = term.clone();
    for _ in 0..order {
        term = &a * &(&g * &term);
        y = &y + &term;
    }
    y
}

/// Last entry of every block.
pub(crate) fn block_tails(partition: &PartitionSpec, y: &PolyMatrix) -> PolyMatrix {
    let ends: Vec<usize> = partition
        .offsets()
        .iter()
        .zip(partition.parts())
        .map(|(o, n)| o + n - 1)
        .collect();
    Matrix::from_fn(ends.len(), y.cols(), |p, q| y[(ends[p], q)].clone())
}

pub fn series_solution_l(problem: &LProblem, order: usize) -> LSeries {
    let y = block_series(&problem.partition, &problem.v, problem.lambda, order);
    let compat = block_tails(&problem.partition, &y);
    LSeries { order, y, compat }
}
