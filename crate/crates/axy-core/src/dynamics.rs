//! Propagation of the register through pulse schedules.
//!
//! The simulation frame rotates at the microwave drive frequency with the
//! rotating-wave approximation applied to the drive. Hamiltonians are
//! piecewise constant on pulse/gap segments: gaps carry the secular register
//! Hamiltonian plus the static detuning term, pulses add the drive with its
//! phase. Unitary segments are exponentiated through the Hermitian
//! eigendecomposition; dissipative segments exponentiate the vectorized
//! Liouvillian (GKSL form) with scaling and squaring.

use std::collections::HashMap;

use num_complex::Complex;

use crate::error::{CoreError, CoreResult};
use crate::linalg::{
    embed_qubit_op, expm, expm_hermitian, identity, min_eigenvalue_hermitian, pauli_phi,
    superop_conjugation, superop_sandwich, unvectorize, vectorize, CMatrix, OperatorKind,
    OperatorMatrix,
};
use crate::pulses::PulseSchedule;
use crate::register::{electron_s_phi, electron_sz, hamiltonian_lab_secular, SpinRegister};
use crate::scalar::{cplx, Real};

/// Static microwave control errors.
#[derive(Clone, Copy, Debug)]
pub struct ControlErrorModel<T: Real> {
    /// Static drive detuning Δ_MW (rad/s).
    pub detuning: T,
    /// Multiplicative Rabi frequency error R_rfe (dimensionless).
    pub rabi_error: T,
}

impl<T: Real> Default for ControlErrorModel<T> {
    fn default() -> Self {
        Self {
            detuning: T::zero(),
            rabi_error: T::zero(),
        }
    }
}

impl<T: Real> ControlErrorModel<T> {
    pub fn new(detuning: T, rabi_error: T) -> CoreResult<Self> {
        if !detuning.is_finite() || !rabi_error.is_finite() {
            return Err(CoreError::InvalidInput("control errors must be finite".into()));
        }
        Ok(Self { detuning, rabi_error })
    }
}

/// Longitudinal electron relaxation model: photon-number-weighted raising
/// and lowering dissipators calibrated against a target T1.
#[derive(Clone, Copy, Debug)]
pub struct NoiseModel<T: Real> {
    /// Target longitudinal relaxation time (s).
    pub t1: T,
    /// Bath temperature (K).
    pub temperature: T,
    /// Electron transition frequency (rad/s).
    pub omega_nv: T,
    /// Mean photon number ⟨n(ω, T)⟩.
    pub n_mean: T,
    /// Coupling rate λ with λ·⟨n⟩ = 1/T1 (rad/s).
    pub lambda: T,
}

/// Bose-Einstein occupation 1/(exp(ħω/k_B T) − 1).
pub fn bose_einstein<T: Real>(omega: T, temperature: T, hbar: T, k_b: T) -> T {
    T::one() / (hbar * omega / (k_b * temperature)).exp_m1()
}

/// Fits λ so that λ·⟨n(ω_NV, T)⟩ = 1/T1.
pub fn calibrate_noise<T: Real>(
    t1: T,
    temperature: T,
    omega_nv: T,
    hbar: T,
    k_b: T,
) -> CoreResult<NoiseModel<T>> {
    if !(t1 > T::zero()) {
        return Err(CoreError::Uncalibratable("T1 must be positive".into()));
    }
    if !(temperature > T::zero()) {
        return Err(CoreError::Uncalibratable(
            "temperature must be positive; at T = 0 the photon occupation vanishes".into(),
        ));
    }
    if !(omega_nv > T::zero()) {
        return Err(CoreError::Uncalibratable("transition frequency must be positive".into()));
    }
    let n_mean = bose_einstein(omega_nv, temperature, hbar, k_b);
    if !(n_mean > T::zero()) || !n_mean.is_finite() {
        return Err(CoreError::Uncalibratable(format!(
            "mean photon number {} is not usable",
            n_mean.as_f64()
        )));
    }
    Ok(NoiseModel {
        t1,
        temperature,
        omega_nv,
        n_mean,
        lambda: T::one() / (t1 * n_mean),
    })
}

/// One piecewise-constant stretch of the control timeline.
#[derive(Clone, Copy, Debug)]
pub enum Segment<T: Real> {
    /// Free evolution under the register Hamiltonian (plus detuning).
    Free { duration: T },
    /// Rectangular drive pulse.
    Pulse { duration: T, phase: T, amplitude: T },
    /// Idealized zero-width π rotation at the given phase.
    InstantPi { phase: T },
}

impl<T: Real> Segment<T> {
    pub fn duration(&self) -> T {
        match self {
            Segment::Free { duration } | Segment::Pulse { duration, .. } => *duration,
            Segment::InstantPi { .. } => T::zero(),
        }
    }
}

/// Expands a pulse schedule into a contiguous segment stream over
/// [0, total_duration].
pub fn schedule_segments<T: Real>(schedule: &PulseSchedule<T>) -> CoreResult<Vec<Segment<T>>> {
    let mut segments = Vec::with_capacity(2 * schedule.pulses.len() + 1);
    let mut cursor = T::zero();
    let slack = T::of(1e-15) * schedule.total_duration.max(T::one());
    for p in &schedule.pulses {
        let gap = p.start - cursor;
        if gap < -slack {
            return Err(CoreError::InvalidInput(format!(
                "pulse at {} s starts before the previous one ends",
                p.start.as_f64()
            )));
        }
        if gap > T::zero() {
            segments.push(Segment::Free { duration: gap });
        }
        if p.duration > T::zero() {
            segments.push(Segment::Pulse {
                duration: p.duration,
                phase: p.phase,
                amplitude: p.amplitude,
            });
        } else {
            segments.push(Segment::InstantPi { phase: p.phase });
        }
        cursor = p.start + p.duration;
    }
    let tail = schedule.total_duration - cursor;
    if tail > T::zero() {
        segments.push(Segment::Free { duration: tail });
    }
    Ok(segments)
}

pub fn segments_duration<T: Real>(segments: &[Segment<T>]) -> T {
    segments
        .iter()
        .fold(T::zero(), |acc, s| acc + s.duration())
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum SegmentKey {
    Free { dt: u64 },
    Pulse { dt: u64, phase: u64, amp: u64 },
    Instant { phase: u64 },
}

fn key_of<T: Real>(seg: &Segment<T>) -> SegmentKey {
    match seg {
        Segment::Free { duration } => SegmentKey::Free {
            dt: duration.as_f64().to_bits(),
        },
        Segment::Pulse {
            duration,
            phase,
            amplitude,
        } => SegmentKey::Pulse {
            dt: duration.as_f64().to_bits(),
            phase: phase.as_f64().to_bits(),
            amp: amplitude.as_f64().to_bits(),
        },
        Segment::InstantPi { phase } => SegmentKey::Instant {
            phase: phase.as_f64().to_bits(),
        },
    }
}

/// Piecewise-constant propagator with per-segment caching.
///
/// A single instance is single-threaded and deterministic; independent
/// parameter points build independent propagators.
pub struct Propagator<T: Real> {
    dim: usize,
    /// Register Hamiltonian plus the static detuning term.
    h_free: CMatrix<T>,
    s_phi_parts: (CMatrix<T>, CMatrix<T>),
    unitary_cache: HashMap<SegmentKey, CMatrix<T>>,
    superop_cache: HashMap<SegmentKey, CMatrix<T>>,
    dissipators: Vec<(T, CMatrix<T>)>,
}

impl<T: Real> Propagator<T> {
    pub fn new(register: &SpinRegister<T>, errors: &ControlErrorModel<T>) -> Self {
        let dim = register.dim();
        let sz = electron_sz(register);
        let mut h_free = hamiltonian_lab_secular(register);
        h_free += &sz * cplx::<T>(0.5, 0.0)
            * Complex::new(register.m_s_sign() * errors.detuning, T::zero());
        // cos/sin quadratures of the drive operator, reassembled per phase
        let sx = electron_s_phi(register, T::zero());
        let sy = electron_s_phi(register, T::frac_pi_2());
        Self {
            dim,
            h_free,
            s_phi_parts: (sx, sy),
            unitary_cache: HashMap::new(),
            superop_cache: HashMap::new(),
            dissipators: Vec::new(),
        }
    }

    /// Adds the T1 dissipator pair: decay at λ(1+⟨n⟩), excitation at λ⟨n⟩.
    pub fn with_noise(mut self, register: &SpinRegister<T>, noise: &NoiseModel<T>) -> Self {
        let n_slots = 1 + register.num_nuclei();
        let mut lower = CMatrix::<T>::zeros(2, 2);
        lower[(0, 1)] = Complex::new(T::one(), T::zero());
        let lower_full = embed_qubit_op(&lower, 0, n_slots);
        let raise_full = lower_full.adjoint();
        self.dissipators = vec![
            (noise.lambda * (T::one() + noise.n_mean), lower_full),
            (noise.lambda * noise.n_mean, raise_full),
        ];
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn has_noise(&self) -> bool {
        !self.dissipators.is_empty()
    }

    fn segment_hamiltonian(&self, seg: &Segment<T>) -> CMatrix<T> {
        match seg {
            Segment::Free { .. } => self.h_free.clone(),
            Segment::Pulse {
                phase, amplitude, ..
            } => {
                let (sx, sy) = &self.s_phi_parts;
                let drive = sx * Complex::new(*amplitude * phase.cos(), T::zero())
                    + sy * Complex::new(*amplitude * phase.sin(), T::zero());
                &self.h_free + drive
            }
            Segment::InstantPi { .. } => unreachable!("instant pulses have no Hamiltonian"),
        }
    }

    fn instant_unitary(&self, phase: T) -> CMatrix<T> {
        // exp(-i (π/2) σ_φ) = -i σ_φ on the electron
        let op = pauli_phi(phase) * cplx::<T>(0.0, -1.0);
        embed_qubit_op(&op, 0, self.dim.trailing_zeros() as usize)
    }

    /// Unitary for one segment (cached).
    pub fn segment_unitary(&mut self, seg: &Segment<T>) -> CMatrix<T> {
        let key = key_of(seg);
        if let Some(u) = self.unitary_cache.get(&key) {
            return u.clone();
        }
        let u = match seg {
            Segment::InstantPi { phase } => self.instant_unitary(*phase),
            _ => {
                let h = self.segment_hamiltonian(seg);
                expm_hermitian(&h, Complex::new(T::zero(), -seg.duration()))
            }
        };
        self.unitary_cache.insert(key, u.clone());
        u
    }

    fn liouvillian(&self, h: &CMatrix<T>) -> CMatrix<T> {
        let d = self.dim;
        let id = identity::<T>(d);
        let minus_i = cplx::<T>(0.0, -1.0);
        let mut l = (superop_sandwich(h, &id) - superop_sandwich(&id, h)) * minus_i;
        for (rate, op) in &self.dissipators {
            let rate_c = Complex::new(*rate, T::zero());
            let op_dag = op.adjoint();
            let op_dag_op = &op_dag * op;
            l += superop_sandwich(op, &op_dag) * rate_c;
            l -= (superop_sandwich(&op_dag_op, &id) + superop_sandwich(&id, &op_dag_op))
                * (rate_c * cplx::<T>(0.5, 0.0));
        }
        l
    }

    /// Superoperator for one segment (cached); unitary conjugation when the
    /// model has no dissipators.
    pub fn segment_superop(&mut self, seg: &Segment<T>) -> CMatrix<T> {
        let key = key_of(seg);
        if let Some(s) = self.superop_cache.get(&key) {
            return s.clone();
        }
        let s = match seg {
            Segment::InstantPi { phase } => superop_conjugation(&self.instant_unitary(*phase)),
            _ if self.dissipators.is_empty() => superop_conjugation(&self.segment_unitary(seg)),
            _ => {
                let h = self.segment_hamiltonian(seg);
                let l = self.liouvillian(&h) * Complex::new(seg.duration(), T::zero());
                expm(&l)
            }
        };
        self.superop_cache.insert(key, s.clone());
        s
    }
}

/// Total evolution operator of a segment stream: the time-ordered product
/// of segment exponentials.
pub fn propagate_segments_unitary<T: Real>(
    register: &SpinRegister<T>,
    errors: &ControlErrorModel<T>,
    segments: &[Segment<T>],
) -> CoreResult<OperatorMatrix<T>> {
    let mut prop = Propagator::new(register, errors);
    let mut u = identity::<T>(prop.dim());
    for seg in segments {
        u = prop.segment_unitary(seg) * u;
    }
    OperatorMatrix::unitary(u, T::of(1e-9) * T::of(register.dim() as f64))
}

/// Total evolution operator of a full schedule.
pub fn propagate_unitary<T: Real>(
    register: &SpinRegister<T>,
    schedule: &PulseSchedule<T>,
    errors: &ControlErrorModel<T>,
) -> CoreResult<OperatorMatrix<T>> {
    let segments = schedule_segments(schedule)?;
    propagate_segments_unitary(register, errors, &segments)
}

/// Result of a dissipative propagation, with positivity/trace diagnostics.
#[derive(Clone, Debug)]
pub struct LindbladOutcome<T: Real> {
    pub rho: OperatorMatrix<T>,
    pub trace_deviation: T,
    pub min_eigenvalue: T,
}

impl<T: Real> LindbladOutcome<T> {
    /// Non-`None` when the output state has an eigenvalue below `-tol`.
    pub fn positivity_violation(&self, tol: T) -> Option<T> {
        if self.min_eigenvalue < -tol {
            Some(self.min_eigenvalue)
        } else {
            None
        }
    }
}

/// Evolves `rho0` dissipatively through the schedule:
/// dρ/dt = −i[H(t), ρ] + D₋(ρ) + D₊(ρ).
pub fn propagate_lindblad<T: Real>(
    register: &SpinRegister<T>,
    schedule: &PulseSchedule<T>,
    errors: &ControlErrorModel<T>,
    noise: &NoiseModel<T>,
    rho0: &OperatorMatrix<T>,
) -> CoreResult<LindbladOutcome<T>> {
    let segments = schedule_segments(schedule)?;
    propagate_segments_lindblad(register, errors, Some(noise), &segments, rho0)
}

/// Segment-stream variant of [`propagate_lindblad`]; with `noise = None`
/// this reduces to unitary conjugation of the density matrix.
pub fn propagate_segments_lindblad<T: Real>(
    register: &SpinRegister<T>,
    errors: &ControlErrorModel<T>,
    noise: Option<&NoiseModel<T>>,
    segments: &[Segment<T>],
    rho0: &OperatorMatrix<T>,
) -> CoreResult<LindbladOutcome<T>> {
    if rho0.kind != OperatorKind::Density {
        return Err(CoreError::NotDensity {
            reason: "input is not tagged as a density operator".into(),
        });
    }
    if rho0.dim() != register.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "state dim {} vs register dim {}",
            rho0.dim(),
            register.dim()
        )));
    }
    let tr = rho0.matrix.trace();
    if (tr.re - T::one()).abs() > T::of(1e-9) || tr.im.abs() > T::of(1e-9) {
        return Err(CoreError::NotDensity {
            reason: format!("input trace = {}", tr.re.as_f64()),
        });
    }

    let mut prop = Propagator::new(register, errors);
    if let Some(n) = noise {
        prop = prop.with_noise(register, n);
    }
    let mut v = vectorize(&rho0.matrix);
    for seg in segments {
        v = prop.segment_superop(seg) * v;
    }
    let rho = unvectorize(&v, register.dim());
    finalize_density(rho)
}

pub(crate) fn finalize_density<T: Real>(rho: CMatrix<T>) -> CoreResult<LindbladOutcome<T>> {
    let tr = rho.trace();
    let trace_deviation =
        ((tr.re - T::one()) * (tr.re - T::one()) + tr.im * tr.im).sqrt();
    let herm = (&rho + rho.adjoint()) * cplx::<T>(0.5, 0.0);
    let min_eigenvalue = min_eigenvalue_hermitian(&herm);
    Ok(LindbladOutcome {
        rho: OperatorMatrix::new_unchecked(rho, OperatorKind::Density),
        trace_deviation,
        min_eigenvalue,
    })
}

/// Expectation-value trace at segment boundaries, for trajectory dumps.
pub fn lindblad_trajectory<T: Real>(
    register: &SpinRegister<T>,
    errors: &ControlErrorModel<T>,
    noise: Option<&NoiseModel<T>>,
    segments: &[Segment<T>],
    rho0: &OperatorMatrix<T>,
    observables: &[CMatrix<T>],
) -> CoreResult<Vec<(T, Vec<T>)>> {
    let mut prop = Propagator::new(register, errors);
    if let Some(n) = noise {
        prop = prop.with_noise(register, n);
    }
    let record = |t: T, v: &crate::linalg::CVector<T>| -> (T, Vec<T>) {
        let rho = unvectorize(v, register.dim());
        let vals = observables
            .iter()
            .map(|o| (o * &rho).trace().re)
            .collect();
        (t, vals)
    };
    let mut v = vectorize(&rho0.matrix);
    let mut t = T::zero();
    let mut out = Vec::with_capacity(segments.len() + 1);
    out.push(record(t, &v));
    for seg in segments {
        v = prop.segment_superop(seg) * v;
        t += seg.duration();
        out.push(record(t, &v));
    }
    Ok(out)
}
