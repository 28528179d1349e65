//! Small conversion helpers. All frequencies in the library are angular
//! (rad/s); magnetic fields are Tesla.

use crate::scalar::Real;

pub fn two_pi_hz<T: Real>(f: f64) -> T {
    T::two_pi() * T::of(f)
}

pub fn two_pi_khz<T: Real>(f: f64) -> T {
    two_pi_hz(f * 1e3)
}

pub fn two_pi_mhz<T: Real>(f: f64) -> T {
    two_pi_hz(f * 1e6)
}

pub fn two_pi_ghz<T: Real>(f: f64) -> T {
    two_pi_hz(f * 1e9)
}

/// 1 G = 1e-4 T.
pub fn gauss<T: Real>(b: f64) -> T {
    T::of(b * 1e-4)
}
