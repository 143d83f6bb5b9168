//! Dense complex matrices, polynomials, root finding and the brute-force
//! eigenvalue oracle every perturbative result is checked against.

pub mod charpoly;
pub mod json;
pub mod linalg;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod spectrum;
pub mod tolerances;

pub use charpoly::{char_poly, MAX_ORACLE_DIM};
pub use json::{matrix_from_json, matrix_to_json, read_matrix, MatrixJson};
pub use linalg::{det, mat_inv, rank, solve, Lu, PivotedQr};
pub use matrix::{approx_eq, mat_mul, Matrix};
pub use poly::Polynomial;
pub use roots::poly_roots;
pub use spectrum::{
    eig_oracle, is_real, quasi_hermiticity_residual, Provenance, RootEntry, SpectrumReport,
};
pub use tolerances::Tolerances;
