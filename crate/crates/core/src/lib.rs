//! Perturbation theory near exceptional points of non-Hermitian matrices.
//!
//! The crate covers canonical Jordan structures and transition matrices, the
//! catalog of degenerate EP partitionings, series solvers for perturbed
//! Jordan blocks (single block and partitioned), leading-order secular
//! spectra, admissible perturbation scalings, and the two-mode Bose-Hubbard
//! reference model. Everything is cross-checked against a brute-force
//! eigenvalue oracle in [`numkit`].

pub mod bosehubbard;
pub mod cli;
pub mod error;
pub mod jordan;
pub mod l1;
pub mod lgeq2;
pub mod numkit;
pub mod partitions;
pub mod scalar;

pub use error::{Error, Result};
pub use numkit::{Matrix, Polynomial, SpectrumReport, Tolerances};
pub use scalar::{ExactComplex, Real, Ring, Scalar};

pub use num_complex::Complex64;

/// Double-precision complex matrix.
pub type CMatrix = Matrix<Complex64>;
/// Double-precision complex polynomial.
pub type CPoly = Polynomial<Complex64>;
/// Matrix over exact Gaussian rationals.
pub type ExactMatrix = Matrix<ExactComplex>;
/// Matrix whose entries are polynomials in one variable.
pub type PolyMatrix<T = Complex64> = Matrix<Polynomial<T>>;
