//! Scalar abstraction for the numeric core.
//!
//! All physics code is generic over [`Real`], which combines nalgebra's
//! `RealField` (linear algebra, transcendentals) with the handful of
//! operations nalgebra does not provide (`erf`, `exp_m1`, conversions).
//! `f64` is the working type; `f32` is supported for quick low-precision
//! sweeps.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::FromPrimitive;

pub trait Real: RealField + FromPrimitive + Default + Copy {
    /// Lossy conversion from `f64` (panics only on NaN inputs for `f32`/`f64` this is total).
    fn of(x: f64) -> Self;
    fn as_f64(self) -> f64;
    fn erf(self) -> Self;
    /// Euclidean remainder, result in `[0, modulus)`.
    fn rem_euclid(self, modulus: Self) -> Self;
    fn is_finite(self) -> bool;
    /// Baseline tolerance for iterative solvers and orthonormality checks.
    fn tol() -> Self;
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
    fn erf(self) -> Self {
        libm::erf(self)
    }
    fn rem_euclid(self, modulus: Self) -> Self {
        f64::rem_euclid(self, modulus)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
    fn erf(self) -> Self {
        libm::erff(self)
    }
    fn rem_euclid(self, modulus: Self) -> Self {
        f32::rem_euclid(self, modulus)
    }
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    fn tol() -> Self {
        1e-5
    }
}

/// Complex number from `f64` parts.
pub fn cplx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// `sin(x)/x`, with the analytic limit at `x = 0`.
pub fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::of(1e-6) {
        let x2 = x * x;
        T::one() - x2 / T::of(6.0) + x2 * x2 / T::of(120.0)
    } else {
        x.sin() / x
    }
}
