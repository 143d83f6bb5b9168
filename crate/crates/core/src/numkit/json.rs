//! Matrix JSON interchange: `{"rows": R, "cols": C, "data": [[re, im], ...]}`,
//! row-major.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&Matrix<Complex64>> for MatrixJson {
    fn from(m: &Matrix<Complex64>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Serialize for Matrix<Complex64> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl TryFrom<MatrixJson> for Matrix<Complex64> {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("matrix data"));
        }
        if j.data.len() != j.rows * j.cols {
            return Err(invalid(format!(
                "matrix JSON declares {}x{} but carries {} entries",
                j.rows,
                j.cols,
                j.data.len()
            )));
        }
        Matrix::new(
            j.rows,
            j.cols,
            j.data
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

pub fn matrix_from_json(s: &str) -> Result<Matrix<Complex64>> {
    serde_json::from_str::<MatrixJson>(s)?.try_into()
}

pub fn matrix_to_json(m: &Matrix<Complex64>) -> String {
    serde_json::to_string(&MatrixJson::from(m)).expect("matrix JSON serialization cannot fail")
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix<Complex64>> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}
