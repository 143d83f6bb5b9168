//! Scalar abstractions.
//!
//! Two layers are used throughout the crate:
//!
//! * [`Ring`] / [`Scalar`]: exact algebra (matrix products, polynomial
//!   arithmetic, Faddeev–LeVerrier). Implemented for `Complex<f64>`,
//!   `Complex<f32>` and the exact `Complex<BigRational>`; `Ring` is also
//!   satisfied by [`crate::Polynomial`] so polynomial matrices come for free.
//! * [`Real`]: floating-point real parts for algorithms that need pivoting,
//!   norms or iteration (inverse, QR, Aberth, Newton).

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, One, ToPrimitive, Zero};

/// Commutative ring with identity. Blanket-implemented.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Complex field element with a lossy view into `Complex64`.
pub trait Scalar: Ring + Div<Output = Self> {
    fn from_c64(z: Complex64) -> Self;

    fn from_i64(n: i64) -> Self;

    fn to_c64(&self) -> Complex64;

    fn conj(&self) -> Self;

    /// Embeds a real parameter. Exact types take the shortest rational that
    /// rounds to `x`, so decimal inputs like `0.99` become `99/100`.
    fn from_real_param(x: f64) -> Self {
        Self::from_c64(Complex64::new(x, 0.0))
    }

    /// Modulus as `f64`; exact types round.
    fn modulus(&self) -> f64 {
        self.to_c64().norm()
    }
}

/// Floating-point real type used by iterative and pivoting algorithms.
pub trait Real: Float + FloatConst + Debug + Sum + Send + Sync + 'static {
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl<F: Real> Scalar for Complex<F> {
    fn from_c64(z: Complex64) -> Self {
        Complex::new(F::lit(z.re), F::lit(z.im))
    }

    fn from_i64(n: i64) -> Self {
        Complex::new(F::lit(n as f64), F::zero())
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.as_f64(), self.im.as_f64())
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

/// Exact complex rational.
pub type ExactComplex = Complex<BigRational>;

/// Shortest-denominator rational whose nearest `f64` is `x`, found by walking
/// the continued-fraction convergents.
pub fn shortest_rational(x: f64) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    let exact = rational_from_f64(x);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rest = exact.clone();
    for _ in 0..64 {
        let a = rest.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        let cand = BigRational::new(h2.clone(), k2.clone());
        if cand.to_f64() == Some(x) {
            return cand;
        }
        let frac = &rest - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
    }
    exact
}

/// Converts a finite `f64` to the exact binary rational it denotes.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

impl Scalar for ExactComplex {
    fn from_c64(z: Complex64) -> Self {
        Complex::new(rational_from_f64(z.re), rational_from_f64(z.im))
    }

    fn from_real_param(x: f64) -> Self {
        Complex::new(shortest_rational(x), BigRational::zero())
    }

    fn from_i64(n: i64) -> Self {
        Complex::new(
            BigRational::from_integer(BigInt::from(n)),
            BigRational::zero(),
        )
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
}
