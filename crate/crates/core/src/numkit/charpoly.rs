use super::matrix::Matrix;
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest dimension accepted by the desk-scale oracle routines.
pub const MAX_ORACLE_DIM: usize = 16;

/// `det(x I - a)` by the Faddeev–LeVerrier recursion.
///
/// Works over any [`Scalar`]; with `ExactComplex` entries the coefficients are
/// exact.
pub fn char_poly<T: Scalar>(a: &Matrix<T>) -> Result<Polynomial<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            op: "char_poly",
            left: a.shape(),
            right: a.shape(),
        });
    }
    let n = a.rows();
    if n > MAX_ORACLE_DIM {
        return Err(Error::TooLarge {
            dim: n,
            max: MAX_ORACLE_DIM,
        });
    }
    // coeffs[n - k] = c_{n-k}; c_n = 1.
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let mut m = Matrix::<T>::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        m = (a * &m).shift_diagonal(&-coeffs[n - k + 1].clone());
        let am = a * &m;
        coeffs[n - k] = -am.trace() / T::from_i64(k as i64);
    }
    Ok(Polynomial::new(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactComplex;
    use num_complex::{Complex, Complex64 as Z};

    fn z(re: f64) -> Z {
        Z::new(re, 0.0)
    }

    #[test]
    fn nilpotent_block() {
        let j = Matrix::from_fn(3, 3, |i, k| if k == i + 1 { z(1.0) } else { z(0.0) });
        let p = char_poly(&j).unwrap();
        assert_eq!(p, Polynomial::monomial(z(1.0), 3));
    }

    #[test]
    fn diagonal_two() {
        let d = Matrix::diagonal(vec![z(1.0), z(2.0)]);
        assert_eq!(
            char_poly(&d).unwrap(),
            Polynomial::new(vec![z(2.0), z(-3.0), z(1.0)])
        );
    }

    #[test]
    fn exact_and_f32_agree_with_f64() {
        let a = Matrix::from_fn(4, 4, |i, j| {
            Z::new(
                (i * 3 + j) as f64 * 0.25 - 1.0,
                (i as f64) - (j as f64) * 0.5,
            )
        });
        let p64 = char_poly(&a).unwrap();
        let pex = char_poly(&Matrix::<ExactComplex>::from_c64(&a))
            .unwrap()
            .to_c64();
        let p32 = char_poly(&a.map(|x| Complex::<f32>::new(x.re as f32, x.im as f32)))
            .unwrap()
            .to_c64();
        for k in 0..=4 {
            assert!((p64.coeff(k) - pex.coeff(k)).norm() < 1e-10);
            assert!((p32.coeff(k) - pex.coeff(k)).norm() < 1e-3 * (1.0 + pex.coeff(k).norm()));
        }
    }

    #[test]
    fn rejects_oversized() {
        let a = Matrix::<Z>::identity(17);
        assert!(matches!(
            char_poly(&a),
            Err(Error::TooLarge { dim: 17, .. })
        ));
    }
}
