//! Supporting analytics: filter functions of pulse schedules, Gaussian
//! soft-control profiles, and statistical coupling-abundance estimates.

use num_complex::Complex;

use crate::error::{CoreError, CoreResult};
use crate::pulses::{coefficient_bound, PulseSchedule};
use crate::register::PhysicalConstants;
use crate::scalar::Real;

/// Accumulated filter integrals at one (ω, t) query point.
#[derive(Clone, Copy, Debug)]
pub struct FilterResult<T: Real> {
    pub phi_x: T,
    pub phi_y: T,
    pub phi_tot: T,
}

/// χ(t) = ∫₀ᵗ F(s) e^{iωs} ds evaluated in closed form per constant-sign
/// segment; Φx = Re χ, Φy = Im χ, Φtot = |χ|.
pub fn filter_function<T: Real>(
    schedule: &PulseSchedule<T>,
    omega: T,
    t: T,
) -> CoreResult<FilterResult<T>> {
    if t < T::zero() || t > schedule.total_duration {
        return Err(CoreError::OutOfSchedule {
            t_s: t.as_f64(),
            total_s: schedule.total_duration.as_f64(),
        });
    }
    let mut chi = Complex::new(T::zero(), T::zero());
    let mut sign = T::one();
    let mut cursor = T::zero();
    let mut flips: Vec<T> = schedule.pulses.iter().map(|p| p.center()).collect();
    flips.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for flip in flips {
        if flip >= t {
            break;
        }
        chi += segment_integral(omega, cursor, flip) * Complex::new(sign, T::zero());
        cursor = flip;
        sign = -sign;
    }
    chi += segment_integral(omega, cursor, t) * Complex::new(sign, T::zero());
    Ok(FilterResult {
        phi_x: chi.re,
        phi_y: chi.im,
        phi_tot: (chi.re * chi.re + chi.im * chi.im).sqrt(),
    })
}

/// ∫_a^b e^{iωs} ds.
fn segment_integral<T: Real>(omega: T, a: T, b: T) -> Complex<T> {
    if omega.abs() * (b - a) < T::of(1e-9) {
        // expand to avoid cancellation at small phase advance
        let mid = (a + b) / T::of(2.0);
        let len = b - a;
        let phase = omega * mid;
        return Complex::new(phase.cos(), phase.sin()) * Complex::new(len, T::zero());
    }
    let upper = Complex::new((omega * b).cos(), (omega * b).sin());
    let lower = Complex::new((omega * a).cos(), (omega * a).sin());
    (upper - lower) / Complex::new(T::zero(), omega)
}

/// Time grid used to discretize a soft-control envelope, in units of the
/// sequence period τ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SoftSampling {
    Continuous,
    /// Δt = 4τ, one full AXY-8 repetition.
    FullRepetition,
    /// Δt = 2τ, an AXY-4 block.
    HalfRepetition,
    /// Δt = τ, a composite X-Y pair.
    CompositePair,
    /// Δt = τ/2, a single composite pulse.
    SingleComposite,
}

impl SoftSampling {
    /// Bin width as a multiple of τ.
    pub fn bin_fraction<T: Real>(self) -> Option<T> {
        match self {
            SoftSampling::Continuous => None,
            SoftSampling::FullRepetition => Some(T::of(4.0)),
            SoftSampling::HalfRepetition => Some(T::of(2.0)),
            SoftSampling::CompositePair => Some(T::one()),
            SoftSampling::SingleComposite => Some(T::of(0.5)),
        }
    }
}

/// Gaussian amplitude modulation of the sequence coefficient.
#[derive(Clone, Debug)]
pub struct SoftControlProfile<T: Real> {
    /// Target rotation angle (rad).
    pub theta: T,
    /// Sequence length T (s).
    pub total: T,
    /// Gaussian width σ (s).
    pub sigma: T,
    /// Peak coefficient f0.
    pub f0: T,
    pub sampling: SoftSampling,
    /// Per-bin coefficients (empty in continuous mode), renormalized so the
    /// discrete rotation angle equals θ exactly.
    pub coefficients: Vec<T>,
}

impl<T: Real> SoftControlProfile<T> {
    /// Envelope value f(t) of the continuous profile.
    pub fn envelope(&self, t: T) -> T {
        let arg = (t - self.total / T::of(2.0)) / self.sigma;
        self.f0 * (-arg * arg / T::of(2.0)).exp()
    }
}

/// Computes the Gaussian profile realizing rotation angle θ over duration
/// `total` with width σ at coupling rate `c_n` (rad/s per unit coefficient):
/// f0 = θ / (√(2π) σ c_n erf(T/(√8 σ))).
///
/// In a sampled grid, bins hold the interval averages of f(t), rescaled so
/// that Σ c_i Δt c_n = θ exactly.
pub fn soft_control_profile<T: Real>(
    theta: T,
    total: T,
    sigma: T,
    c_n: T,
    tau: T,
    sampling: SoftSampling,
) -> CoreResult<SoftControlProfile<T>> {
    if !(total > T::zero()) || !(sigma > T::zero()) || !(tau > T::zero()) {
        return Err(CoreError::InvalidInput(
            "soft control needs positive duration, width, and period".into(),
        ));
    }
    let sqrt_2pi = (T::two_pi()).sqrt();
    let erf_arg = total / (T::of(8.0).sqrt() * sigma);
    let f0 = theta / (sqrt_2pi * sigma * c_n * erf_arg.erf());
    let bound = coefficient_bound::<T>();
    if f0.abs() >= bound {
        return Err(CoreError::AmplitudeBound {
            f0: f0.as_f64(),
            bound: bound.as_f64(),
        });
    }

    let coefficients = match sampling.bin_fraction::<T>() {
        None => vec![],
        Some(mult) => {
            let dt = mult * tau;
            let n_bins = (total / dt).round();
            if ((total / dt) - n_bins).abs() > T::of(1e-9) {
                return Err(CoreError::InvalidInput(
                    "sequence length is not a whole number of sampling bins".into(),
                ));
            }
            let n_bins = n_bins.as_f64() as usize;
            // interval average of the Gaussian:
            // (f0 σ √(π/2) [erf(β) − erf(α)]) / Δt
            let mut coeffs = Vec::with_capacity(n_bins);
            let sqrt2 = T::of(2.0).sqrt();
            for i in 0..n_bins {
                let a = dt * T::of(i as f64) - total / T::of(2.0);
                let b = a + dt;
                let integral = f0
                    * sigma
                    * (T::pi() / T::of(2.0)).sqrt()
                    * ((b / (sqrt2 * sigma)).erf() - (a / (sqrt2 * sigma)).erf());
                coeffs.push(integral / dt);
            }
            // renormalize the discrete rotation angle to θ
            let achieved: T = coeffs
                .iter()
                .fold(T::zero(), |acc, &c| acc + c * dt * c_n);
            if achieved.abs() > T::zero() {
                let scale = theta / achieved;
                for c in coeffs.iter_mut() {
                    *c *= scale;
                }
            }
            coeffs
        }
    };

    Ok(SoftControlProfile {
        theta,
        total,
        sigma,
        f0,
        sampling,
        coefficients,
    })
}

/// Decoupling efficiency of a spectator under an amplitude-modulated
/// sequence, by exact piecewise evolution of the conditional two-level
/// dynamics.
///
/// `vartheta` is the rescaled time Δ·T/2 of the spectator, `g_ratio` the
/// coupling ratio, `theta` the target rotation angle, `sigma_over_total`
/// the Gaussian width (None for a constant envelope), `bins` the number of
/// piecewise-constant steps.
pub fn soft_decoupling_efficiency<T: Real>(
    vartheta: T,
    g_ratio: T,
    theta: T,
    sigma_over_total: Option<T>,
    bins: usize,
) -> T {
    // dimensionless time: total = 1, detuning Δ = 2ϑ
    let delta = T::of(2.0) * vartheta;
    let n = bins.max(1);
    let dt = T::one() / T::of(n as f64);

    // spectator coupling envelope with ∫ g̃_n dt = θ
    let envelope: Box<dyn Fn(T, T) -> T> = match sigma_over_total {
        None => Box::new(move |_a: T, _b: T| theta),
        Some(r) => {
            let sigma = r;
            let sqrt_2pi = T::two_pi().sqrt();
            let erf_arg = T::one() / (T::of(8.0).sqrt() * sigma);
            let f0 = theta / (sqrt_2pi * sigma * erf_arg.erf());
            let sqrt2 = T::of(2.0).sqrt();
            Box::new(move |a: T, b: T| {
                // average over [a, b] times total duration 1
                let integral = f0
                    * sigma
                    * (T::pi() / T::of(2.0)).sqrt()
                    * (((b - T::of(0.5)) / (sqrt2 * sigma)).erf()
                        - ((a - T::of(0.5)) / (sqrt2 * sigma)).erf());
                integral / (b - a)
            })
        }
    };

    // per-bin exact propagator in the detuning-rotating frame:
    // U(a→b) = e^{+iΔb I_z} e^{-i dt (g̃ I_x − Δ I_z)} e^{-iΔa I_z}
    let mut u = crate::linalg::identity::<T>(2);
    for i in 0..n {
        let a = dt * T::of(i as f64);
        let b = a + dt;
        let g_bar = envelope(a, b) * g_ratio;
        let hx = g_bar * dt / T::of(2.0);
        let hz = -delta * dt / T::of(2.0);
        let angle = (hx * hx + hz * hz).sqrt();
        let (nx, nz) = if angle > T::zero() {
            (hx / angle, hz / angle)
        } else {
            (T::zero(), T::one())
        };
        // exp(-i angle n̂·σ)
        let cos_a = angle.cos();
        let sin_a = angle.sin();
        let mut step = crate::linalg::identity::<T>(2) * Complex::new(cos_a, T::zero());
        step += crate::linalg::pauli_x::<T>() * Complex::new(T::zero(), -sin_a * nx);
        step += crate::linalg::pauli_z::<T>() * Complex::new(T::zero(), -sin_a * nz);
        // detuning frame U_Δ(t) = exp(−i Δ t I_z)
        let rot = |t: T| {
            let half = delta * t / T::of(2.0);
            crate::linalg::identity::<T>(2) * Complex::new(half.cos(), T::zero())
                + crate::linalg::pauli_z::<T>() * Complex::new(T::zero(), -half.sin())
        };
        u = rot(b) * step * rot(a).adjoint() * u;
    }
    let tr = u.trace();
    (tr.re * tr.re + tr.im * tr.im).sqrt() / T::of(2.0)
}

/// Diamond conventional-cell edge (m).
pub const DIAMOND_LATTICE_CONSTANT: f64 = 3.567e-10;

/// Expected number of bath nuclei with hyperfine magnitude at least
/// `a_threshold` (rad/s), for a 13C fraction `p13c`.
///
/// The dipolar scale is α = (μ0/4π) ħ |γ_e| γ_C and the carbon density
/// ρ = 8/a³; the tail count follows the 1/Ã power law. The prefactor is
/// calibrated to reproduce reported occurrence numbers for published
/// register couplings.
pub fn coupling_abundance<T: Real>(
    a_threshold: T,
    p13c: T,
    constants: &PhysicalConstants<T>,
) -> CoreResult<T> {
    if !(a_threshold > T::zero()) {
        return Err(CoreError::InvalidInput(
            "coupling threshold must be positive".into(),
        ));
    }
    let alpha = constants.mu_0 / (T::of(4.0) * T::pi())
        * constants.hbar
        * constants.gamma_e.abs()
        * constants.gamma_c13;
    let density = T::of(8.0) / T::of(DIAMOND_LATTICE_CONSTANT).powi(3);
    Ok(T::of(4.0 / 3.0) * density * p13c * alpha / a_threshold)
}

/// Probability of finding at least one bath spin above each of two
/// thresholds, as a product of independent Poisson tails P(N ≥ 1).
pub fn joint_detection_probability<T: Real>(n1: T, n2: T) -> T {
    (-(-n1).exp_m1()) * (-(-n2).exp_m1())
}
