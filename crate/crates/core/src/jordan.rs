//! Canonical exceptional-point structures and Jordan chains.

use std::fmt;
use std::str::FromStr;

use num_complex::{Complex, Complex64};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numkit::linalg::{residual_against, PivotedQr};
use crate::numkit::Matrix;
use crate::scalar::{Real, Ring};

/// Block sizes `M_1 >= M_2 >= ... >= M_L >= 1` of a degenerate Jordan
/// structure. Serialized as a plain JSON integer array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartitionSpec {
    parts: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(invalid("partition needs at least one part"));
        }
        if parts.contains(&0) {
            return Err(invalid("partition parts must be positive"));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(invalid(format!(
                "partition parts must be non-increasing, got {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    /// Single block of size `k`.
    pub fn single(k: usize) -> Result<Self> {
        Self::new(vec![k])
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Matrix dimension `K`.
    pub fn k(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Geometric multiplicity `L`.
    pub fn l(&self) -> usize {
        self.parts.len()
    }

    pub fn largest(&self) -> usize {
        self.parts[0]
    }

    /// Offset of each block's first row.
    pub fn offsets(&self) -> Vec<usize> {
        self.parts
            .iter()
            .scan(0, |acc, &m| {
                let o = *acc;
                *acc += m;
                Some(o)
            })
            .collect()
    }

    /// `dim ker (J - ηI)^k` for `k = 1..=largest` of the canonical form.
    pub fn kernel_dims(&self) -> Vec<usize> {
        (1..=self.largest())
            .map(|k| self.parts.iter().map(|&m| m.min(k)).sum())
            .collect()
    }

    /// Partition from kernel dimensions `d_1, d_2, ...` (with `d_0 = 0`).
    pub fn from_kernel_dims(dims: &[usize]) -> Result<Self> {
        let mut ge = Vec::with_capacity(dims.len());
        let mut prev = 0;
        for &d in dims {
            if d < prev {
                return Err(invalid(format!(
                    "kernel dimensions must be non-decreasing: {dims:?}"
                )));
            }
            ge.push(d - prev);
            prev = d;
        }
        let mut parts = Vec::new();
        for size in (1..=ge.len()).rev() {
            let at_least = ge[size - 1];
            let longer = ge.get(size).copied().unwrap_or(0);
            if at_least < longer {
                return Err(invalid(format!("inconsistent kernel dimensions {dims:?}")));
            }
            parts.extend(std::iter::repeat(size).take(at_least - longer));
        }
        Self::new(parts)
    }
}

impl TryFrom<Vec<usize>> for PartitionSpec {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<PartitionSpec> for Vec<usize> {
    fn from(p: PartitionSpec) -> Self {
        p.parts
    }
}

impl FromStr for PartitionSpec {
    type Err = Error;

    /// Parses `"3,2"` or `"3+2"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split([',', '+'])
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| invalid(format!("bad partition `{s}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "{}", s.join("+"))
    }
}

/// Partition plus the degenerate eigenvalue η.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanSpec {
    pub partition: PartitionSpec,
    pub eta: Complex64,
}

/// `m x m` block with `eta` on the diagonal and ones on the superdiagonal.
pub fn jordan_block<T: Ring>(m: usize, eta: T) -> Matrix<T> {
    Matrix::from_fn(m, m, |i, j| {
        if i == j {
            eta.clone()
        } else if j == i + 1 {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Block-diagonal `J^(M_1)(η) ⊕ ... ⊕ J^(M_L)(η)` in partition order.
pub fn jordan_direct_sum<T: Ring>(partition: &PartitionSpec, eta: T) -> Matrix<T> {
    let blocks: Vec<_> = partition
        .parts()
        .iter()
        .map(|&m| jordan_block(m, eta.clone()))
        .collect();
    Matrix::direct_sum(&blocks)
}

/// `n x n` matrix with ones on the subdiagonal.
pub fn shift_matrix<T: Ring>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, n, |i, j| if i == j + 1 { T::one() } else { T::zero() })
}

/// Column `(1, 0, ..., 0)^T`.
pub fn first_basis_vector<T: Ring>(n: usize) -> Matrix<T> {
    Matrix::from_fn(n, 1, |i, _| if i == 0 { T::one() } else { T::zero() })
}

fn fro<F: Real>(a: &Matrix<Complex<F>>) -> F {
    a.data().iter().map(|z| z.norm_sqr()).sum::<F>().sqrt()
}

/// Kernel bases of `(H - ηI)^k`, `k = 1, 2, ...`, stopping once the kernel is
/// the whole space or `k` reaches `K`.
///
/// Power `k` is rank-tested against the threshold `rank_tol * ||H - ηI||_F^k`.
fn kernel_ladder<F: Real>(
    h: &Matrix<Complex<F>>,
    eta: Complex<F>,
    rank_tol: f64,
) -> Result<(Matrix<Complex<F>>, Vec<Option<Matrix<Complex<F>>>>)> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch {
            op: "jordan structure",
            left: h.shape(),
            right: h.shape(),
        });
    }
    let n = h.rows();
    let shifted = h.shift_diagonal(&eta);
    let scale = fro(&shifted);
    let mut power = Matrix::<Complex<F>>::identity(n);
    let mut kernels = Vec::new();
    for k in 1..=n {
        power = &power * &shifted;
        let threshold = F::lit(rank_tol) * scale.powi(k as i32);
        let qr = PivotedQr::new(&power, threshold);
        let full = qr.rank() == 0;
        kernels.push(qr.kernel());
        if full {
            break;
        }
    }
    Ok((shifted, kernels))
}

fn dims_of<F: Real>(kernels: &[Option<Matrix<Complex<F>>>]) -> Vec<usize> {
    kernels
        .iter()
        .map(|k| k.as_ref().map_or(0, Matrix::cols))
        .collect()
}

/// Infers the partition from `d_k = dim ker (H - ηI)^k`.
///
/// Fails with [`Error::NotSingleEigenvalue`] when the generalized eigenspace
/// of η is not the whole space.
pub fn detect_jordan_structure<F: Real>(
    h: &Matrix<Complex<F>>,
    eta: Complex<F>,
    rank_tol: f64,
) -> Result<PartitionSpec> {
    let (_, kernels) = kernel_ladder(h, eta, rank_tol)?;
    let dims = dims_of(&kernels);
    if dims.last().copied() != Some(h.rows()) {
        return Err(Error::NotSingleEigenvalue {
            eta: format!("{:?}", eta),
            detected: dims,
        });
    }
    PartitionSpec::from_kernel_dims(&dims)
}

/// Scales `v` to unit norm with its first non-negligible component real
/// positive.
fn normalize_gauge<F: Real>(v: &mut [Complex<F>]) {
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<F>().sqrt();
    if nrm == F::zero() {
        return;
    }
    let cutoff = nrm * F::lit(1e-8);
    let phase = v
        .iter()
        .find(|z| z.norm() > cutoff)
        .map(|z| z.conj() / z.norm())
        .unwrap_or_else(Complex::one);
    for z in v.iter_mut() {
        *z = *z * phase / nrm;
    }
}

fn apply<F: Real>(a: &Matrix<Complex<F>>, v: &[Complex<F>]) -> Vec<Complex<F>> {
    (0..a.rows())
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .fold(Complex::zero(), |acc, (x, y)| acc + *x * *y)
        })
        .collect()
}

/// Invertible `Q` with `H Q = Q 𝒥` whose columns are Jordan chains.
///
/// For block `j` of size `m` the columns are `q_1, ..., q_m` with
/// `(H - ηI) q_1 = 0` and `(H - ηI) q_{i+1} = q_i`. Heads `q_m` are chosen
/// longest block first, unit norm, first significant component real positive.
pub fn transition_matrix<F: Real>(
    h: &Matrix<Complex<F>>,
    partition: &PartitionSpec,
    eta: Complex<F>,
    rank_tol: f64,
) -> Result<Matrix<Complex<F>>> {
    let n = h.rows();
    if !h.is_square() || n != partition.k() {
        return Err(Error::DimensionMismatch {
            op: "transition_matrix",
            left: h.shape(),
            right: (partition.k(), partition.k()),
        });
    }
    let (shifted, kernels) = kernel_ladder(h, eta, rank_tol)?;
    let detected = dims_of(&kernels);
    let expected = partition.kernel_dims();
    if detected != expected {
        return Err(Error::StructureMismatch { expected, detected });
    }
    let kernel_cols = |k: usize| -> Vec<Vec<Complex<F>>> {
        match k {
            0 => Vec::new(),
            _ => kernels[k - 1]
                .as_ref()
                .map(|b| (0..b.cols()).map(|j| b.col(j)).collect())
                .unwrap_or_default(),
        }
    };
    let indep_tol = F::lit(rank_tol.sqrt());
    // chains[j] = (length, head)
    let mut chains: Vec<(usize, Vec<Complex<F>>)> = Vec::new();
    let m1 = partition.largest();
    for len in (1..=m1).rev() {
        let wanted = partition.parts().iter().filter(|&&m| m == len).count();
        if wanted == 0 {
            continue;
        }
        // Span to stay independent of: ker N^{len-1} plus images of longer heads.
        let mut span: Vec<Vec<Complex<F>>> = Vec::new();
        let mut seed: Vec<Vec<Complex<F>>> = kernel_cols(len - 1);
        for (j, head) in &chains {
            let mut v = head.clone();
            for _ in 0..(j - len) {
                v = apply(&shifted, &v);
            }
            seed.push(v);
        }
        for mut v in seed {
            if let Some(u) = residual_against(&span, &mut v, F::lit(1e-300)) {
                span.push(u);
            }
        }
        let mut found = 0;
        for mut cand in kernel_cols(len) {
            if found == wanted {
                break;
            }
            if let Some(u) = residual_against(&span, &mut cand, indep_tol) {
                let mut head = u.clone();
                normalize_gauge(&mut head);
                span.push(u);
                chains.push((len, head));
                found += 1;
            }
        }
        if found < wanted {
            return Err(Error::StructureMismatch { expected, detected });
        }
    }

    let mut q = Matrix::zeros(n, n);
    let mut col = 0;
    for (len, head) in &chains {
        let mut vecs = vec![head.clone()];
        for _ in 1..*len {
            let next = apply(&shifted, vecs.last().unwrap());
            vecs.push(next);
        }
        // vecs = [q_m, q_{m-1}, ..., q_1]
        for v in vecs.iter().rev() {
            q.set_col(col, v);
            col += 1;
        }
    }
    Ok(q)
}

/// `||H Q - Q 𝒥||_F`.
pub fn transition_residual<F: Real>(
    h: &Matrix<Complex<F>>,
    q: &Matrix<Complex<F>>,
    partition: &PartitionSpec,
    eta: Complex<F>,
) -> F {
    let j = jordan_direct_sum(partition, eta);
    fro(&(&(h * q) - &(q * &j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{linalg, Tolerances};
    use num_complex::Complex64 as Z;

    fn z(x: f64) -> Z {
        Z::new(x, 0.0)
    }

    #[test]
    fn block_examples() {
        assert_eq!(
            jordan_block(1, z(2.5)),
            Matrix::from_fn(1, 1, |_, _| z(2.5))
        );
        let b = jordan_block(2, z(5.0));
        assert_eq!(
            b,
            Matrix::from_rows(vec![vec![z(5.0), z(1.0)], vec![z(0.0), z(5.0)]]).unwrap()
        );
        let n3 = jordan_block(3, z(0.0));
        assert!(n3.pow(3).is_zero());
        assert!(!n3.pow(2).is_zero());
    }

    #[test]
    fn direct_sum_examples() {
        let p = PartitionSpec::single(4).unwrap();
        assert_eq!(jordan_direct_sum(&p, z(1.0)), jordan_block(4, z(1.0)));
        let p22: PartitionSpec = "2,2".parse().unwrap();
        let j = jordan_direct_sum(&p22, z(0.0));
        assert_eq!(j[(0, 1)], z(1.0));
        assert_eq!(j[(1, 2)], z(0.0));
        assert_eq!(j[(2, 3)], z(1.0));
        let p32: PartitionSpec = "3,2".parse().unwrap();
        let shifted = jordan_direct_sum(&p32, z(1.0)).shift_diagonal(&z(1.0));
        assert_eq!(linalg::rank(&shifted, 1e-12), 3);
    }

    #[test]
    fn shift_and_basis() {
        let pi = shift_matrix::<Z>(2);
        assert_eq!(
            pi,
            Matrix::from_rows(vec![vec![z(0.0), z(0.0)], vec![z(1.0), z(0.0)]]).unwrap()
        );
        assert!(shift_matrix::<Z>(4).pow(4).is_zero());
        let e = first_basis_vector::<Z>(4);
        assert_eq!(e.data(), &[z(1.0), z(0.0), z(0.0), z(0.0)]);
        let pe = &shift_matrix::<Z>(4) * &e;
        assert_eq!(pe.data(), &[z(0.0), z(1.0), z(0.0), z(0.0)]);
        assert_eq!(first_basis_vector::<Z>(1).frobenius_norm(), 1.0);
    }

    #[test]
    fn partition_validation_and_serde() {
        assert!(PartitionSpec::new(vec![2, 3]).is_err());
        assert!(PartitionSpec::new(vec![]).is_err());
        let p: PartitionSpec = serde_json::from_str("[3,2]").unwrap();
        assert_eq!(p.k(), 5);
        assert_eq!(p.l(), 2);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[3,2]");
        assert!(serde_json::from_str::<PartitionSpec>("[1,2]").is_err());
        assert_eq!(p.to_string(), "3+2");
    }

    #[test]
    fn kernel_dims_roundtrip() {
        let p = PartitionSpec::new(vec![4, 2, 2, 1]).unwrap();
        assert_eq!(p.kernel_dims(), vec![4, 7, 8, 9]);
        assert_eq!(
            PartitionSpec::from_kernel_dims(&p.kernel_dims()).unwrap(),
            p
        );
    }

    #[test]
    fn detect_canonical() {
        let p = PartitionSpec::new(vec![3, 2]).unwrap();
        let j = jordan_direct_sum(&p, z(0.0));
        assert_eq!(detect_jordan_structure(&j, z(0.0), 1e-8).unwrap(), p);
    }

    #[test]
    fn detect_rejects_other_eigenvalues() {
        let d = Matrix::diagonal(vec![z(0.0), z(1.0)]);
        assert!(matches!(
            detect_jordan_structure(&d, z(0.0), 1e-8),
            Err(Error::NotSingleEigenvalue { .. })
        ));
    }

    #[test]
    fn canonical_input_gives_identity() {
        let p = PartitionSpec::new(vec![3, 2]).unwrap();
        let j = jordan_direct_sum(&p, z(0.7));
        let q = transition_matrix(&j, &p, z(0.7), 1e-8).unwrap();
        assert!(linalg::mat_inv(&q, &Tolerances::default()).is_ok());
        assert_eq!(transition_residual(&j, &q, &p, z(0.7)), 0.0);
    }

    #[test]
    fn structure_mismatch_reports_ranks() {
        let p = PartitionSpec::new(vec![2, 2]).unwrap();
        let j = jordan_direct_sum(&PartitionSpec::single(4).unwrap(), z(0.0));
        match transition_matrix(&j, &p, z(0.0), 1e-8) {
            Err(Error::StructureMismatch { expected, detected }) => {
                assert_eq!(expected, vec![2, 4]);
                assert_eq!(detected, vec![1, 2, 3, 4]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
