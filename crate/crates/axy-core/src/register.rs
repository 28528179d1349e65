//! Spin register definition and per-nucleus rotating frames.
//!
//! The register is an NV-center electron spin treated as an effective
//! two-level system (basis `|0⟩`, `|m_s⟩`), coupled to a set of nuclear
//! spins by secular hyperfine vectors. Everything downstream (pulse
//! compilation, propagation, gate construction) works off the derived
//! [`NuclearFrame`] data: effective Larmor vector ω⃗_j, the rotated
//! orthonormal basis (x̂_j, ŷ_j, ẑ_j), and the orthogonal/parallel coupling
//! components g_j, c_j.
//!
//! Basis ordering for all dense operators: electron first (most significant
//! qubit), then the nuclei in register order. The electron operator used in
//! conditional couplings is `σ_z = |1⟩⟨1| − |0⟩⟨0|` with `|1⟩ ≡ |m_s⟩`.

use nalgebra::Vector3;
use num_complex::Complex;

use crate::error::{CoreError, CoreResult};
use crate::linalg::{
    embed_qubit_op, identity, pauli_dot, pauli_x, pauli_y, pauli_z, CMatrix, OperatorKind,
    OperatorMatrix,
};
use crate::scalar::Real;

/// Default cap on the register size (Hilbert dimension 2^(1+n)).
pub const DEFAULT_MAX_NUCLEI: usize = 6;

/// Physical constants for the NV system, SI units, frequencies angular.
#[derive(Clone, Debug)]
pub struct PhysicalConstants<T: Real> {
    /// Electron gyromagnetic ratio (rad/s per Tesla); negative.
    pub gamma_e: T,
    /// 13C gyromagnetic ratio (rad/s per Tesla).
    pub gamma_c13: T,
    /// Zero-field splitting D (rad/s).
    pub zero_field_splitting: T,
    /// Reduced Planck constant (J s).
    pub hbar: T,
    /// Boltzmann constant (J/K).
    pub k_b: T,
    /// Vacuum permeability (T m / A).
    pub mu_0: T,
    /// Temperature slope of the zero-field splitting (rad/s per K).
    pub dd_dt: T,
}

impl<T: Real> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self {
            gamma_e: T::two_pi() * T::of(-28.024e9),
            gamma_c13: T::two_pi() * T::of(10.7084e6),
            zero_field_splitting: T::two_pi() * T::of(2.87e9),
            hbar: T::of(1.054_571_817e-34),
            k_b: T::of(1.380_649e-23),
            mu_0: T::of(1.256_637_062_12e-6),
            dd_dt: T::two_pi() * T::of(-74.2e3),
        }
    }
}

/// One nuclear spin-1/2 with its secular hyperfine vector.
#[derive(Clone, Debug)]
pub struct NuclearSpin<T: Real> {
    pub label: String,
    /// Hyperfine vector A⃗_j (rad/s) in the NV frame.
    pub hyperfine: Vector3<T>,
    /// Gyromagnetic ratio (rad/s per Tesla).
    pub gamma: T,
}

impl<T: Real> NuclearSpin<T> {
    pub fn new(label: impl Into<String>, hyperfine: Vector3<T>, gamma: T) -> Self {
        Self {
            label: label.into(),
            hyperfine,
            gamma,
        }
    }

    /// Builds the vector (A⊥, 0, A∥); the azimuth is unobservable for a
    /// single NV axis, so perpendicular/parallel components suffice.
    pub fn from_components(label: impl Into<String>, a_perp: T, a_par: T, gamma: T) -> Self {
        Self::new(label, Vector3::new(a_perp, T::zero(), a_par), gamma)
    }
}

/// Secular internuclear coupling between a pair of register nuclei,
/// b_jk (3 I_j^z I_k^z − I⃗_j·I⃗_k).
#[derive(Clone, Debug)]
pub struct InternuclearCoupling<T: Real> {
    pub first: usize,
    pub second: usize,
    /// Coupling constant b_jk (rad/s).
    pub strength: T,
}

/// The full spin register: electron manifold choice, static field, nuclei.
///
/// Immutable after construction; all operations on it are pure.
#[derive(Clone, Debug)]
pub struct SpinRegister<T: Real> {
    pub constants: PhysicalConstants<T>,
    /// Static field along the NV axis ẑ (Tesla).
    pub b_field: T,
    /// Electron manifold used as the qubit, +1 or −1.
    pub m_s: i8,
    pub nuclei: Vec<NuclearSpin<T>>,
    pub internuclear: Vec<InternuclearCoupling<T>>,
    max_nuclei: usize,
}

impl<T: Real> SpinRegister<T> {
    pub fn new(
        constants: PhysicalConstants<T>,
        b_field: T,
        m_s: i8,
        nuclei: Vec<NuclearSpin<T>>,
        internuclear: Vec<InternuclearCoupling<T>>,
    ) -> CoreResult<Self> {
        Self::with_max_nuclei(constants, b_field, m_s, nuclei, internuclear, DEFAULT_MAX_NUCLEI)
    }

    pub fn with_max_nuclei(
        constants: PhysicalConstants<T>,
        b_field: T,
        m_s: i8,
        nuclei: Vec<NuclearSpin<T>>,
        internuclear: Vec<InternuclearCoupling<T>>,
        max_nuclei: usize,
    ) -> CoreResult<Self> {
        if !(b_field > T::zero()) {
            return Err(CoreError::InvalidRegister("b_field must be positive".into()));
        }
        if m_s != 1 && m_s != -1 {
            return Err(CoreError::InvalidRegister(format!(
                "m_s must be +1 or -1, got {m_s}"
            )));
        }
        if nuclei.len() > max_nuclei {
            return Err(CoreError::DimensionOverflow {
                nuclei: nuclei.len(),
                max: max_nuclei,
            });
        }
        for n in &nuclei {
            if !(n.hyperfine.x.is_finite() && n.hyperfine.y.is_finite() && n.hyperfine.z.is_finite())
            {
                return Err(CoreError::InvalidRegister(format!(
                    "non-finite hyperfine vector on '{}'",
                    n.label
                )));
            }
            if !n.gamma.is_finite() || n.gamma == T::zero() {
                return Err(CoreError::InvalidRegister(format!(
                    "invalid gyromagnetic ratio on '{}'",
                    n.label
                )));
            }
        }
        for c in &internuclear {
            if c.first >= nuclei.len() || c.second >= nuclei.len() || c.first == c.second {
                return Err(CoreError::InvalidRegister(format!(
                    "internuclear pair ({}, {}) out of range",
                    c.first, c.second
                )));
            }
        }
        Ok(Self {
            constants,
            b_field,
            m_s,
            nuclei,
            internuclear,
            max_nuclei,
        })
    }

    pub fn num_nuclei(&self) -> usize {
        self.nuclei.len()
    }

    /// Hilbert-space dimension 2^(1 + number of nuclei).
    pub fn dim(&self) -> usize {
        1 << (1 + self.nuclei.len())
    }

    pub fn max_nuclei(&self) -> usize {
        self.max_nuclei
    }

    pub fn m_s_sign(&self) -> T {
        T::of(self.m_s as f64)
    }

    /// Electron transition frequency |D − m_s γ_e B| of the qubit manifold (rad/s).
    pub fn nv_transition_frequency(&self) -> T {
        (self.constants.zero_field_splitting - self.m_s_sign() * self.constants.gamma_e * self.b_field)
            .abs()
    }

    /// Static detuning produced by a temperature offset through the
    /// zero-field-splitting slope: Δ = (dD/dT)·δT (rad/s, signed).
    pub fn detuning_from_temperature_offset(&self, delta_t_kelvin: T) -> T {
        self.constants.dd_dt * delta_t_kelvin
    }
}

/// Derived rotating-frame data for one nucleus.
#[derive(Clone, Debug)]
pub struct NuclearFrame<T: Real> {
    /// ω⃗_j = γ_j B ẑ − m_s A⃗_j / 2 (rad/s).
    pub omega_vec: Vector3<T>,
    /// |ω⃗_j| (rad/s).
    pub omega: T,
    pub x_axis: Vector3<T>,
    pub y_axis: Vector3<T>,
    /// ẑ_j = ω̂_j.
    pub z_axis: Vector3<T>,
    /// Orthogonal hyperfine coupling g_j = |A⃗_j − (A⃗_j·ω̂_j) ω̂_j| (rad/s).
    pub g: T,
    /// Parallel component c_j = A⃗_j·ω̂_j (rad/s).
    pub c: T,
}

/// Relative threshold below which the orthogonal coupling makes a spin
/// unaddressable (frame undefined).
const UNADDRESSABLE_REL: f64 = 1e-9;

/// Builds one [`NuclearFrame`] per register nucleus.
pub fn derive_frames<T: Real>(register: &SpinRegister<T>) -> CoreResult<Vec<NuclearFrame<T>>> {
    let ms = register.m_s_sign();
    let half = T::of(0.5);
    register
        .nuclei
        .iter()
        .map(|n| {
            let a = n.hyperfine;
            let omega_vec =
                Vector3::new(T::zero(), T::zero(), n.gamma * register.b_field) - a * (ms * half);
            let omega = omega_vec.norm();
            if omega == T::zero() {
                return Err(CoreError::InvalidRegister(format!(
                    "vanishing effective Larmor vector on '{}'",
                    n.label
                )));
            }
            let z_axis = omega_vec / omega;
            let c = a.dot(&z_axis);
            let x_vec = a - z_axis * c;
            let g = x_vec.norm();
            if g < omega * T::of(UNADDRESSABLE_REL) {
                return Err(CoreError::UnaddressableSpin {
                    label: n.label.clone(),
                    g_rad_s: g.as_f64(),
                });
            }
            let y_vec = z_axis.cross(&a);
            Ok(NuclearFrame {
                omega_vec,
                omega,
                x_axis: x_vec / g,
                y_axis: y_vec / g,
                z_axis,
                g,
                c,
            })
        })
        .collect()
}

/// Spin-1/2 operator (σ/2) for nucleus `j` along a lab-frame direction,
/// embedded in the full register space.
pub fn nuclear_spin_op<T: Real>(
    register: &SpinRegister<T>,
    j: usize,
    direction: &Vector3<T>,
) -> CMatrix<T> {
    let op = pauli_dot(direction) * Complex::new(T::of(0.5), T::zero());
    embed_qubit_op(&op, j + 1, 1 + register.num_nuclei())
}

fn nuclear_cartesian_op<T: Real>(register: &SpinRegister<T>, j: usize, axis: usize) -> CMatrix<T> {
    let p = match axis {
        0 => pauli_x::<T>(),
        1 => pauli_y::<T>(),
        _ => pauli_z::<T>(),
    };
    embed_qubit_op(
        &(p * Complex::new(T::of(0.5), T::zero())),
        j + 1,
        1 + register.num_nuclei(),
    )
}

/// Electron σ_z = |1⟩⟨1| − |0⟩⟨0| on the full register space.
pub fn electron_sz<T: Real>(register: &SpinRegister<T>) -> CMatrix<T> {
    let sz = pauli_z::<T>() * Complex::new(-T::one(), T::zero());
    embed_qubit_op(&sz, 0, 1 + register.num_nuclei())
}

/// Electron in-plane spin operator S_φ = (cos φ σ_x + sin φ σ_y)/2.
pub fn electron_s_phi<T: Real>(register: &SpinRegister<T>, phi: T) -> CMatrix<T> {
    let op = crate::linalg::pauli_phi(phi) * Complex::new(T::of(0.5), T::zero());
    embed_qubit_op(&op, 0, 1 + register.num_nuclei())
}

/// Secular register Hamiltonian in the frame rotating at the drive
/// frequency: nuclear Zeeman, electron-conditioned hyperfine (with the
/// electron reduced to the `{|0⟩, |m_s⟩}` pseudo-qubit), and the optional
/// secular internuclear coupling. The electron's own splitting is absorbed
/// by the frame.
pub fn hamiltonian_lab_secular<T: Real>(register: &SpinRegister<T>) -> CMatrix<T> {
    let dim = register.dim();
    let mut h = CMatrix::<T>::zeros(dim, dim);
    let ms = register.m_s_sign();
    let half = Complex::new(T::of(0.5), T::zero());

    // (m_s/2)(σ_z + 1) ⊗ A⃗_j·I⃗_j − γ_j B I_j^z
    let sz_plus_one = electron_sz(register) + identity::<T>(dim);
    for (j, nuc) in register.nuclei.iter().enumerate() {
        let a_dot_i = nuclear_spin_op(register, j, &nuc.hyperfine);
        h += (&sz_plus_one * &a_dot_i) * (half * Complex::new(ms, T::zero()));
        h -= nuclear_cartesian_op(register, j, 2) * Complex::new(nuc.gamma * register.b_field, T::zero());
    }

    for pair in &register.internuclear {
        let (j, k) = (pair.first, pair.second);
        let zz = nuclear_cartesian_op(register, j, 2) * nuclear_cartesian_op(register, k, 2);
        let mut dot = CMatrix::<T>::zeros(dim, dim);
        for axis in 0..3 {
            dot += nuclear_cartesian_op(register, j, axis) * nuclear_cartesian_op(register, k, axis);
        }
        h += (zz * Complex::new(T::of(3.0), T::zero()) - dot)
            * Complex::new(pair.strength, T::zero());
    }
    h
}

/// Electron-independent drift: Σ_j −ω⃗_j·I⃗_j. This is the free evolution
/// removed when expressing gates in the nuclear interaction frame; the
/// internuclear coupling and control errors are deliberately excluded.
pub fn hamiltonian_drift<T: Real>(
    register: &SpinRegister<T>,
    frames: &[NuclearFrame<T>],
) -> CMatrix<T> {
    let dim = register.dim();
    let mut h = CMatrix::<T>::zeros(dim, dim);
    for (j, f) in frames.iter().enumerate() {
        h -= nuclear_spin_op(register, j, &f.omega_vec);
    }
    h
}

/// Frame selector for [`build_hamiltonian`].
#[derive(Clone, Copy, Debug)]
pub enum HamiltonianFrame<T: Real> {
    /// Static secular Hamiltonian (rotating at the drive frequency).
    LabSecular,
    /// Interaction picture with respect to the nuclear drift, evaluated at
    /// time `t` with the modulation function value `modulation` (±1).
    NuclearInteraction { t: T, modulation: T },
}

/// Interaction-picture coupling Hamiltonian at time `t`:
/// (m_s/2)·F·σ_z ⊗ Σ_j [ g_j m̂_j(t)·I⃗_j + c_j I_j^{z_j} ],
/// with m̂_j(t) = cos(ω_j t) x̂_j + sin(ω_j t) ŷ_j.
pub fn hamiltonian_nuclear_interaction<T: Real>(
    register: &SpinRegister<T>,
    frames: &[NuclearFrame<T>],
    t: T,
    modulation: T,
) -> CMatrix<T> {
    let dim = register.dim();
    let mut coupling = CMatrix::<T>::zeros(dim, dim);
    for (j, f) in frames.iter().enumerate() {
        let phase = f.omega * t;
        let m_t = f.x_axis * phase.cos() + f.y_axis * phase.sin();
        let dir = m_t * f.g + f.z_axis * f.c;
        coupling += nuclear_spin_op(register, j, &dir);
    }
    let scale = Complex::new(register.m_s_sign() * T::of(0.5) * modulation, T::zero());
    electron_sz(register) * coupling * scale
}

/// Builds the register Hamiltonian in the requested frame.
pub fn build_hamiltonian<T: Real>(
    register: &SpinRegister<T>,
    frame: HamiltonianFrame<T>,
) -> CoreResult<OperatorMatrix<T>> {
    let m = match frame {
        HamiltonianFrame::LabSecular => hamiltonian_lab_secular(register),
        HamiltonianFrame::NuclearInteraction { t, modulation } => {
            let frames = derive_frames(register)?;
            hamiltonian_nuclear_interaction(register, &frames, t, modulation)
        }
    };
    Ok(OperatorMatrix::new_unchecked(m, OperatorKind::Hermitian))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, max_abs_entry};
    use crate::units::{gauss, two_pi_khz};

    fn two_carbon_register() -> SpinRegister<f64> {
        let constants = PhysicalConstants::<f64>::default();
        let gamma = constants.gamma_c13;
        SpinRegister::new(
            constants,
            gauss(600.0),
            -1,
            vec![
                NuclearSpin::from_components("C1", two_pi_khz(45.8), two_pi_khz(93.5), gamma),
                NuclearSpin::from_components("C2", two_pi_khz(35.3), two_pi_khz(49.5), gamma),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn default_constants_satisfy_sign_conventions() {
        let c = PhysicalConstants::<f64>::default();
        assert!(c.gamma_e < 0.0);
        assert!(c.gamma_c13 > 0.0);
        assert!(c.zero_field_splitting > 0.0);
        assert!((c.dd_dt - (-2.0 * std::f64::consts::PI * 74.2e3)).abs() < 1e-6);
    }

    #[test]
    fn frame_vector_matches_three_vector_arithmetic() {
        let reg = two_carbon_register();
        let frames = derive_frames(&reg).unwrap();
        // m_s = −1: ω⃗ = γB ẑ + A⃗/2
        let gamma_b = reg.constants.gamma_c13 * reg.b_field;
        let expect_x = two_pi_khz::<f64>(45.8) / 2.0;
        let expect_z = gamma_b + two_pi_khz::<f64>(93.5) / 2.0;
        assert!((frames[0].omega_vec.x - expect_x).abs() < 1e-6);
        assert!((frames[0].omega_vec.z - expect_z).abs() < 1e-6);
        let expect_mag = (expect_x * expect_x + expect_z * expect_z).sqrt();
        assert!((frames[0].omega - expect_mag).abs() < 1e-6);
        // magnitude lands near 2π·689 kHz for these couplings
        assert!((frames[0].omega / (2.0 * std::f64::consts::PI) - 689.6e3).abs() < 1.0e3);
    }

    #[test]
    fn frames_are_orthonormal_right_handed() {
        let reg = two_carbon_register();
        for f in derive_frames(&reg).unwrap() {
            assert!(f.x_axis.dot(&f.y_axis).abs() < 1e-12);
            assert!(f.x_axis.dot(&f.z_axis).abs() < 1e-12);
            assert!(f.y_axis.dot(&f.z_axis).abs() < 1e-12);
            assert!((f.x_axis.norm() - 1.0).abs() < 1e-12);
            assert!((f.x_axis.cross(&f.y_axis) - f.z_axis).norm() < 1e-12);
            assert!(f.g >= 0.0 && f.omega > 0.0);
        }
    }

    #[test]
    fn zero_hyperfine_is_unaddressable() {
        let constants = PhysicalConstants::<f64>::default();
        let gamma = constants.gamma_c13;
        let reg = SpinRegister::new(
            constants,
            gauss(600.0),
            -1,
            vec![NuclearSpin::from_components("dead", 0.0, 0.0, gamma)],
            vec![],
        )
        .unwrap();
        match derive_frames(&reg) {
            Err(CoreError::UnaddressableSpin { label, .. }) => assert_eq!(label, "dead"),
            other => panic!("expected unaddressable spin, got {other:?}"),
        }
    }

    #[test]
    fn empty_register_hamiltonian_is_two_by_two_diagonal() {
        let reg = SpinRegister::new(PhysicalConstants::<f64>::default(), gauss(600.0), -1, vec![], vec![])
            .unwrap();
        let h = hamiltonian_lab_secular(&reg);
        assert_eq!(h.nrows(), 2);
        assert!(h[(0, 1)].norm_sqr() == 0.0 && h[(1, 0)].norm_sqr() == 0.0);
    }

    #[test]
    fn secular_hamiltonian_is_hermitian() {
        let reg = two_carbon_register();
        let h = hamiltonian_lab_secular(&reg);
        assert_eq!(h.nrows(), 8);
        assert!(hermiticity_defect(&h) < 1e-12);
    }

    #[test]
    fn dimension_guard_rejects_oversized_registers() {
        let constants = PhysicalConstants::<f64>::default();
        let gamma = constants.gamma_c13;
        let nuclei: Vec<_> = (0..7)
            .map(|i| NuclearSpin::from_components(format!("C{i}"), two_pi_khz(10.0), two_pi_khz(5.0), gamma))
            .collect();
        match SpinRegister::new(constants, gauss(600.0), -1, nuclei, vec![]) {
            Err(CoreError::DimensionOverflow { nuclei: 7, max: 6 }) => {}
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn interaction_picture_matches_drift_conjugation() {
        use crate::linalg::expm_hermitian;
        use crate::scalar::cplx;
        let reg = two_carbon_register();
        let frames = derive_frames(&reg).unwrap();
        let t = 0.37e-6;
        // H''(t) must equal U_0†(t) · [(m_s/2) σ_z ⊗ Σ A⃗·I⃗] · U_0(t) with
        // U_0 = exp(−i H_drift t).
        let drift = hamiltonian_drift(&reg, &frames);
        let u0 = expm_hermitian(&drift, cplx::<f64>(0.0, -t));
        let mut bare = CMatrix::<f64>::zeros(8, 8);
        for (j, nuc) in reg.nuclei.iter().enumerate() {
            bare += nuclear_spin_op(&reg, j, &nuc.hyperfine);
        }
        let cond = electron_sz(&reg) * bare * cplx::<f64>(-0.5, 0.0);
        let expected = u0.adjoint() * cond * &u0;
        let direct = hamiltonian_nuclear_interaction(&reg, &frames, t, 1.0);
        assert!(max_abs_entry(&(expected - direct)) < 1e-9);
    }
}
