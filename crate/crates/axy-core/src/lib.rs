//! Compilation and simulation of adaptive-XY decoupling gates on an
//! NV-center nuclear-spin register.
//!
//! The crate covers the full pipeline:
//!
//! - [`register`]: spin register definition and per-nucleus rotating frames;
//! - [`pulses`]: composite-pulse layout solving and schedule compilation;
//! - [`dynamics`]: unitary and dissipative (GKSL) propagation through
//!   schedules, with static control errors;
//! - [`gates`]: target gates, fidelity, analytic decoupling-efficiency
//!   predictions, and time-optimal sequence selection;
//! - [`qec`]: the 2+1-qubit phase-error repetition code built from the
//!   conditional gates;
//! - [`analysis`]: filter functions, Gaussian soft-control profiles, and
//!   coupling-abundance estimates.
//!
//! All numeric code is generic over the scalar type through [`scalar::Real`]
//! (`f64` or `f32`); the `*64` aliases below are the working defaults.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod pulses;
pub mod qec;
pub mod register;
pub mod scalar;
pub mod units;

pub use error::{CoreError, CoreResult};
pub use nalgebra;
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type Matrix64 = linalg::CMatrix<f64>;
pub type Operator64 = linalg::OperatorMatrix<f64>;
pub type Register64 = register::SpinRegister<f64>;
pub type Frame64 = register::NuclearFrame<f64>;
pub type Layout64 = pulses::CompositePulseLayout<f64>;
pub type SequenceSpec64 = pulses::AxySequenceSpec<f64>;
pub type Schedule64 = pulses::PulseSchedule<f64>;
pub type Errors64 = dynamics::ControlErrorModel<f64>;
pub type Noise64 = dynamics::NoiseModel<f64>;
pub type GateSpec64 = gates::GateSpec<f64>;
