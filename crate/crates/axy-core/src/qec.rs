//! The 2+1-qubit phase-error repetition code.
//!
//! Two register nuclei protect the electron qubit against single phase
//! errors. Encoding uses conditional x-rotations only; readout swaps each
//! nucleus onto the electron with composed iSWAP gates and projectively
//! measures the electron between swaps. The syndrome table is derived by
//! brute-force conjugation of the error operators through the circuit, and
//! the recovery map is read off from it.
//!
//! Qubit order: 0 = electron, 1..2 = nuclei. Nuclear "computational" states
//! are the per-nucleus frame basis (spin up along ω̂_j), so the same code
//! path runs with exact gates or with compiled AXY schedules.

use std::collections::HashMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::dynamics::{
    ControlErrorModel, NoiseModel, Propagator, Segment,
};
use crate::error::{CoreError, CoreResult};
use crate::gates::{gate_fidelity, ideal_gate, GateAxis, GateSpec};
use crate::linalg::{
    embed_qubit_op, expm_hermitian, identity, partial_trace_rest, pauli_dot, pauli_phi,
    pauli_x, pauli_y, pauli_z, superop_sandwich, unvectorize, vectorize, CMatrix, CVector,
    OperatorKind, OperatorMatrix,
};
use crate::pulses::{AxySequenceSpec, AxyVariant};
use crate::register::{derive_frames, NuclearFrame, SpinRegister};
use crate::scalar::{cplx, Real};

/// Independent per-qubit dephasing probability.
#[derive(Clone, Copy, Debug)]
pub struct ErrorChannel<T: Real> {
    pub p: T,
}

impl<T: Real> ErrorChannel<T> {
    pub fn new(p: T) -> CoreResult<Self> {
        if !(p >= T::zero() && p <= T::of(0.5)) {
            return Err(CoreError::InvalidInput(format!(
                "error probability {} outside [0, 1/2]",
                p.as_f64()
            )));
        }
        Ok(Self { p })
    }

    /// p = (1 − e^{−γ t})/2 for a dephasing rate γ acting for time t.
    pub fn from_rate(gamma: T, t: T) -> CoreResult<Self> {
        Self::new(-(-(gamma * t)).exp_m1() / T::of(2.0))
    }
}

/// Probability that exactly one of the three qubits dephases: 3p(1−p)².
pub fn single_error_probability<T: Real>(p: T) -> T {
    T::of(3.0) * p * (T::one() - p) * (T::one() - p)
}

/// Applies Λ_j(ρ) = (1−p) ρ + p Z_j ρ Z_j sequentially for j = 0, 1, 2 in
/// the computational basis of a 3-qubit state.
pub fn apply_error_channel<T: Real>(rho: &CMatrix<T>, p: T) -> CoreResult<CMatrix<T>> {
    if rho.nrows() != 8 || rho.ncols() != 8 {
        return Err(CoreError::DimensionMismatch(format!(
            "expected an 8x8 three-qubit state, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    if !(p >= T::zero() && p <= T::one()) {
        return Err(CoreError::InvalidInput(format!(
            "error probability {} outside [0, 1]",
            p.as_f64()
        )));
    }
    let mut out = rho.clone();
    for q in 0..3 {
        let z = embed_qubit_op(&pauli_z::<T>(), q, 3);
        let flipped = &z * &out * &z;
        out = out * Complex::new(T::one() - p, T::zero())
            + flipped * Complex::new(p, T::zero());
    }
    Ok(out)
}

/// How the two-qubit gates of the protocol are realized.
#[derive(Clone, Debug)]
pub enum GateMode<T: Real> {
    /// Exact conditional rotations and electron rotations.
    Ideal,
    /// Compiled AXY schedules propagated through the register dynamics.
    Simulated(SimulatedGates<T>),
}

/// Sequence parameters for the compiled-gate mode.
#[derive(Clone, Debug)]
pub struct SimulatedGates<T: Real> {
    pub variant: AxyVariant,
    pub k_dd: u32,
    /// Microwave Rabi frequency (rad/s).
    pub rabi: T,
    pub errors: ControlErrorModel<T>,
    /// AXY repetitions per target nucleus.
    pub repetitions: [u32; 2],
}

/// Averaging strategy for the retrieval fidelity.
#[derive(Clone, Copy, Debug)]
pub enum Averaging {
    /// Exact average over the six eigenstates of σx, σy, σz (a 2-design;
    /// exact because the integrand is quadratic in the input projector).
    TwoDesignExact,
    /// Haar-random sampling with a reported standard error.
    HaarMonteCarlo { samples: usize, seed: u64 },
}

/// Pauli type corrected by the code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorType {
    Phase,
    Flip,
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig<T: Real> {
    pub gate_mode: GateMode<T>,
    pub error_probability: T,
    pub noise: Option<NoiseModel<T>>,
    pub averaging: Averaging,
    pub error_type: ErrorType,
}

/// Deterministic error injected in place of the stochastic channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InjectedError {
    None,
    Z(usize),
    X(usize),
}

/// One row of the derived syndrome table.
#[derive(Clone, Debug)]
pub struct SyndromeEntry {
    pub error: String,
    /// Pauli string of the decoded operator (conjugated through the circuit).
    pub decoded: String,
    pub syndrome: (u8, u8),
    pub recovery: String,
}

/// Syndrome-to-recovery map derived by brute force.
#[derive(Clone, Debug)]
pub struct SyndromeTable<T: Real> {
    pub entries: Vec<SyndromeEntry>,
    recoveries: HashMap<(u8, u8), CMatrix<T>>,
}

impl<T: Real> SyndromeTable<T> {
    pub fn recovery(&self, syndrome: (u8, u8)) -> Option<&CMatrix<T>> {
        self.recoveries.get(&syndrome)
    }
}

/// Outcome of a single protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolOutcome<T: Real> {
    /// Recovered electron state (2x2).
    pub rho_out: OperatorMatrix<T>,
    /// Probability of each (s1, s2) syndrome branch.
    pub syndrome_probabilities: Vec<((u8, u8), T)>,
    /// Overlap ⟨ψ|ρ_out|ψ⟩ with the input state.
    pub fidelity: T,
}

/// Averaged retrieval fidelity.
#[derive(Clone, Debug)]
pub struct AverageOutcome<T: Real> {
    pub fidelity: T,
    /// Standard error of the mean (Monte-Carlo mode only).
    pub std_error: Option<T>,
    /// Per-input-state fidelities (2-design mode: the six axis states).
    pub per_state: Vec<(String, T)>,
}

/// The repetition-code engine for one register.
pub struct RepetitionCode<T: Real> {
    register: SpinRegister<T>,
    frames: Vec<NuclearFrame<T>>,
}

const N_QUBITS: usize = 3;

impl<T: Real> RepetitionCode<T> {
    pub fn new(register: SpinRegister<T>) -> CoreResult<Self> {
        if register.num_nuclei() != 2 {
            return Err(CoreError::InvalidRegister(format!(
                "the 2+1 repetition code needs exactly 2 nuclei, got {}",
                register.num_nuclei()
            )));
        }
        let frames = derive_frames(&register)?;
        Ok(Self { register, frames })
    }

    pub fn register(&self) -> &SpinRegister<T> {
        &self.register
    }

    pub fn frames(&self) -> &[NuclearFrame<T>] {
        &self.frames
    }

    /// Logical Pauli on one qubit: electron uses the computational basis,
    /// nuclei use their frame axes.
    fn logical_pauli(&self, qubit: usize, which: char) -> CMatrix<T> {
        if qubit == 0 {
            let op = match which {
                'x' => pauli_x::<T>(),
                'y' => pauli_y::<T>(),
                _ => pauli_z::<T>(),
            };
            embed_qubit_op(&op, 0, N_QUBITS)
        } else {
            let f = &self.frames[qubit - 1];
            let axis = match which {
                'x' => f.x_axis,
                'y' => f.y_axis,
                _ => f.z_axis,
            };
            embed_qubit_op(&pauli_dot(&axis), qubit, N_QUBITS)
        }
    }

    /// Electron rotation exp(−i(angle/2)(cos φ σx + sin φ σy)) on the full space.
    fn electron_rotation(&self, phase: T, angle: T) -> CMatrix<T> {
        let h = pauli_phi(phase) * Complex::new(T::of(0.5), T::zero());
        let u = expm_hermitian(&h, Complex::new(T::zero(), -angle));
        embed_qubit_op(&u, 0, N_QUBITS)
    }

    /// Ideal encoding A^x_2(π/2) · A^x_1(π/2).
    pub fn build_encoding_ideal(&self) -> CoreResult<OperatorMatrix<T>> {
        let a1 = ideal_gate(
            &self.register,
            &self.frames,
            &GateSpec::new(0, GateAxis::X, T::frac_pi_2()),
        )?;
        let a2 = ideal_gate(
            &self.register,
            &self.frames,
            &GateSpec::new(1, GateAxis::X, T::frac_pi_2()),
        )?;
        OperatorMatrix::unitary(a2.matrix * a1.matrix, T::of(1e-9))
    }

    /// Ideal composed iSWAP between the electron and nucleus `j`:
    /// Y_{π/2} A^x_j(π/2) Y†_{π/2} X†_{π/2} A^y_j(π/2) X_{π/2}.
    pub fn compose_iswap_ideal(&self, j: usize) -> CoreResult<OperatorMatrix<T>> {
        if j >= 2 {
            return Err(CoreError::InvalidInput(format!("nuclear index {j} out of range")));
        }
        let pi_2 = T::frac_pi_2();
        let ax = ideal_gate(&self.register, &self.frames, &GateSpec::new(j, GateAxis::X, pi_2))?;
        let ay = ideal_gate(&self.register, &self.frames, &GateSpec::new(j, GateAxis::Y, pi_2))?;
        let x_pos = self.electron_rotation(T::zero(), pi_2);
        let x_neg = self.electron_rotation(T::zero(), -pi_2);
        let y_pos = self.electron_rotation(T::frac_pi_2(), pi_2);
        let y_neg = self.electron_rotation(T::frac_pi_2(), -pi_2);
        let u = y_pos * ax.matrix * y_neg * x_neg * ay.matrix * x_pos;
        OperatorMatrix::unitary(u, T::of(1e-9))
    }

    /// Direct exponential exp(i(π/4)(σx σx + σy σy)) on the electron and
    /// nucleus `j` (frame axes), identity on the spectator.
    pub fn iswap_reference(&self, j: usize) -> CMatrix<T> {
        let xx = embed_qubit_op(&pauli_x::<T>(), 0, N_QUBITS) * self.logical_pauli(j + 1, 'x');
        let yy = embed_qubit_op(&pauli_y::<T>(), 0, N_QUBITS) * self.logical_pauli(j + 1, 'y');
        expm_hermitian(&(xx + yy), Complex::new(T::zero(), T::frac_pi_4()))
    }

    /// Nuclear frame-basis "up" state for nucleus `j`.
    fn nuclear_up(&self, j: usize) -> CVector<T> {
        spin_up_state(&self.frames[j].z_axis)
    }

    /// Initial register state |ψ⟩ ⊗ |0⟩ ⊗ |0⟩ as a density matrix.
    fn initial_state(&self, psi: &CVector<T>) -> CMatrix<T> {
        let mut full = psi.clone();
        for j in 0..2 {
            full = kron_vec(&full, &self.nuclear_up(j));
        }
        &full * full.adjoint()
    }

    /// Derives the syndrome table by conjugating each channel error through
    /// the decode circuit and reading off nuclear flips and the residual
    /// electron operator. Fails if two branches with different recoveries
    /// share a syndrome.
    pub fn derive_syndrome_table(&self, error_type: ErrorType) -> CoreResult<SyndromeTable<T>> {
        let enc = self.build_encoding_ideal()?.matrix;
        let v = self.electron_rotation(T::frac_pi_2(), T::frac_pi_2());
        let labels: [(String, Option<usize>); 4] = match error_type {
            ErrorType::Phase => [
                ("1".into(), None),
                ("Z0".into(), Some(0)),
                ("Z1".into(), Some(1)),
                ("Z2".into(), Some(2)),
            ],
            ErrorType::Flip => [
                ("1".into(), None),
                ("X0".into(), Some(0)),
                ("X1".into(), Some(1)),
                ("X2".into(), Some(2)),
            ],
        };

        let mut entries = Vec::new();
        let mut recoveries: HashMap<(u8, u8), (String, CMatrix<T>)> = HashMap::new();
        for (name, qubit) in labels {
            let error_op = match qubit {
                None => identity::<T>(8),
                Some(q) => match error_type {
                    ErrorType::Phase => self.logical_pauli(q, 'z'),
                    ErrorType::Flip => self.logical_pauli(q, 'x'),
                },
            };
            // decoded operator: U_enc† V† E V U_enc, with the flip variant
            // conjugated into the phase frame by the basis change
            let basis_change = self.flip_basis_change(error_type);
            let dressed = &basis_change.adjoint() * &error_op * &basis_change;
            let decoded = enc.adjoint() * v.adjoint() * dressed * &v * &enc;

            let (pauli_string, syndrome, recovery_label, recovery_op) =
                self.classify_decoded(&decoded)?;
            match recoveries.get(&syndrome) {
                Some((existing, _)) if *existing != recovery_label => {
                    return Err(CoreError::DegenerateCode { syndrome });
                }
                _ => {
                    recoveries.insert(syndrome, (recovery_label.clone(), recovery_op));
                }
            }
            entries.push(SyndromeEntry {
                error: name,
                decoded: pauli_string,
                syndrome,
                recovery: recovery_label,
            });
        }

        // unseen syndromes act as identity
        let mut map: HashMap<(u8, u8), CMatrix<T>> = recoveries
            .into_iter()
            .map(|(s, (_, op))| (s, op))
            .collect();
        for s1 in 0..2u8 {
            for s2 in 0..2u8 {
                map.entry((s1, s2)).or_insert_with(|| identity::<T>(8));
            }
        }
        Ok(SyndromeTable {
            entries,
            recoveries: map,
        })
    }

    /// Per-qubit basis rotation that maps flip errors onto phase errors;
    /// identity in the phase configuration.
    fn flip_basis_change(&self, error_type: ErrorType) -> CMatrix<T> {
        match error_type {
            ErrorType::Phase => identity::<T>(8),
            ErrorType::Flip => {
                // e^{−iπ/4 Y_q} per qubit: conjugation sends X to Z
                let mut u = identity::<T>(8);
                for q in 0..N_QUBITS {
                    let y = self.logical_pauli(q, 'y');
                    u = expm_hermitian(&y, Complex::new(T::zero(), -T::frac_pi_4())) * u;
                }
                u
            }
        }
    }

    /// Identifies a (phase × Pauli-string) operator: per-qubit labels, the
    /// nuclear flip syndrome, and the electron recovery undoing it.
    fn classify_decoded(
        &self,
        decoded: &CMatrix<T>,
    ) -> CoreResult<(String, (u8, u8), String, CMatrix<T>)> {
        let names = ['1', 'x', 'y', 'z'];
        let mut best: Option<(f64, [usize; 3])> = None;
        for c0 in 0..4 {
            for c1 in 0..4 {
                for c2 in 0..4 {
                    let combo = [c0, c1, c2];
                    let mut op = identity::<T>(8);
                    for (q, &c) in combo.iter().enumerate() {
                        if c > 0 {
                            op = op * self.logical_pauli(q, names[c]);
                        }
                    }
                    let overlap = (op.adjoint() * decoded).trace();
                    let mag = (overlap.re * overlap.re + overlap.im * overlap.im)
                        .sqrt()
                        .as_f64()
                        / 8.0;
                    if best.map_or(true, |(m, _)| mag > m) {
                        best = Some((mag, combo));
                    }
                }
            }
        }
        let (mag, combo) = best.unwrap();
        if (mag - 1.0).abs() > 1e-9 {
            return Err(CoreError::InvalidInput(format!(
                "decoded operator is not a Pauli string (best overlap {mag:.6})"
            )));
        }
        let string: String = combo
            .iter()
            .enumerate()
            .map(|(q, &c)| format!("{}{}", names[c], q))
            .collect::<Vec<_>>()
            .join(" ");
        let syndrome = (
            u8::from(combo[1] == 1 || combo[1] == 2),
            u8::from(combo[2] == 1 || combo[2] == 2),
        );
        // the electron factor moves the stored state; undo it exactly
        let recovery_label = names[combo[0]].to_string();
        let recovery = if combo[0] == 0 {
            identity::<T>(8)
        } else {
            self.logical_pauli(0, names[combo[0]])
        };
        Ok((string, syndrome, recovery_label, recovery))
    }

    fn compile(
        &self,
        config: &ProtocolConfig<T>,
        injected: InjectedError,
    ) -> CoreResult<CompiledProtocol<T>> {
        let table = self.derive_syndrome_table(config.error_type)?;
        let mut pieces = Vec::new();
        let pi_2 = T::frac_pi_2();

        match &config.gate_mode {
            GateMode::Ideal => {
                let enc = self.build_encoding_ideal()?.matrix;
                let v = self.electron_rotation(T::frac_pi_2(), pi_2);
                let bc = self.flip_basis_change(config.error_type);
                pieces.push(Piece::Unitary(&bc.adjoint() * &v * &enc));
                self.push_channel(&mut pieces, config, injected)?;
                pieces.push(Piece::Unitary(enc.adjoint() * v.adjoint() * bc));
                let iswap1 = self.compose_iswap_ideal(0)?.matrix;
                let iswap2 = self.compose_iswap_ideal(1)?.matrix;
                pieces.push(Piece::Unitary(iswap1.clone()));
                pieces.push(Piece::Measure);
                pieces.push(Piece::Unitary(&iswap2 * iswap1.adjoint()));
                pieces.push(Piece::Measure);
                pieces.push(Piece::Unitary(iswap2.adjoint()));
            }
            GateMode::Simulated(sim) => {
                let mut builder = TrainBuilder::new(self, sim);
                builder.axy_gate(0, GateAxis::X, pi_2)?;
                builder.axy_gate(1, GateAxis::X, pi_2)?;
                builder.electron_rotation(T::frac_pi_2(), pi_2); // V
                let head = builder.take_segments();
                pieces.push(self.compile_segments(head, sim, config.noise.as_ref())?);
                if config.error_type == ErrorType::Flip {
                    let bc = self.flip_basis_change(config.error_type);
                    pieces.push(Piece::Unitary(bc.adjoint()));
                    self.push_channel(&mut pieces, config, injected)?;
                    pieces.push(Piece::Unitary(bc));
                } else {
                    self.push_channel(&mut pieces, config, injected)?;
                }
                builder.electron_rotation(T::frac_pi_2(), -pi_2); // V†
                builder.axy_gate(1, GateAxis::X, -pi_2)?;
                builder.axy_gate(0, GateAxis::X, -pi_2)?;
                builder.iswap(0, false)?;
                let to_first_measure = builder.take_segments();
                pieces.push(self.compile_segments(to_first_measure, sim, config.noise.as_ref())?);
                pieces.push(Piece::Measure);
                builder.iswap(0, true)?;
                builder.iswap(1, false)?;
                let mid = builder.take_segments();
                pieces.push(self.compile_segments(mid, sim, config.noise.as_ref())?);
                pieces.push(Piece::Measure);
                builder.iswap(1, true)?;
                let tail = builder.take_segments();
                pieces.push(self.compile_segments(tail, sim, config.noise.as_ref())?);
            }
        }

        Ok(CompiledProtocol {
            pieces,
            table,
        })
    }

    fn push_channel(
        &self,
        pieces: &mut Vec<Piece<T>>,
        config: &ProtocolConfig<T>,
        injected: InjectedError,
    ) -> CoreResult<()> {
        match injected {
            InjectedError::None => {
                let p = config.error_probability;
                if !(p >= T::zero() && p <= T::of(0.5)) {
                    return Err(CoreError::InvalidInput(format!(
                        "error probability {} outside [0, 1/2]",
                        p.as_f64()
                    )));
                }
                let mut superop = identity::<T>(64);
                for q in 0..N_QUBITS {
                    let z = self.logical_pauli(q, 'z');
                    let dephase = identity::<T>(64) * Complex::new(T::one() - p, T::zero())
                        + superop_sandwich(&z, &z) * Complex::new(p, T::zero());
                    superop = dephase * superop;
                }
                pieces.push(Piece::Superop(superop));
            }
            InjectedError::Z(q) => pieces.push(Piece::Unitary(self.logical_pauli(q, 'z'))),
            InjectedError::X(q) => pieces.push(Piece::Unitary(self.logical_pauli(q, 'x'))),
        }
        Ok(())
    }

    fn compile_segments(
        &self,
        segments: Vec<Segment<T>>,
        sim: &SimulatedGates<T>,
        noise: Option<&NoiseModel<T>>,
    ) -> CoreResult<Piece<T>> {
        let mut prop = Propagator::new(&self.register, &sim.errors);
        if let Some(n) = noise {
            prop = prop.with_noise(&self.register, n);
        }
        if noise.is_some() {
            let mut s = identity::<T>(64);
            for seg in &segments {
                s = prop.segment_superop(seg) * s;
            }
            Ok(Piece::Superop(s))
        } else {
            let mut u = identity::<T>(8);
            for seg in &segments {
                u = prop.segment_unitary(seg) * u;
            }
            Ok(Piece::Unitary(u))
        }
    }

    /// Runs the protocol for one input state.
    pub fn run_protocol(
        &self,
        config: &ProtocolConfig<T>,
        psi_in: &CVector<T>,
    ) -> CoreResult<ProtocolOutcome<T>> {
        self.run_with_injection(config, InjectedError::None, psi_in)
    }

    /// Runs the protocol with a deterministic error in place of the channel.
    pub fn run_with_injection(
        &self,
        config: &ProtocolConfig<T>,
        injected: InjectedError,
        psi_in: &CVector<T>,
    ) -> CoreResult<ProtocolOutcome<T>> {
        let compiled = self.compile(config, injected)?;
        self.execute(&compiled, psi_in)
    }

    fn execute(
        &self,
        compiled: &CompiledProtocol<T>,
        psi_in: &CVector<T>,
    ) -> CoreResult<ProtocolOutcome<T>> {
        let norm = psi_in.norm();
        if (norm - T::one()).abs() > T::of(1e-9) {
            return Err(CoreError::InvalidInput(format!(
                "input state norm {} is not 1",
                norm.as_f64()
            )));
        }
        let rho0 = self.initial_state(psi_in);

        // branch enumeration over the electron measurements
        let p0 = electron_projector::<T>(0);
        let p1 = electron_projector::<T>(1);
        let mut branches: Vec<(Vec<u8>, CMatrix<T>)> = vec![(vec![], rho0)];
        for piece in &compiled.pieces {
            match piece {
                Piece::Unitary(u) => {
                    for (_, rho) in branches.iter_mut() {
                        *rho = u * rho.clone() * u.adjoint();
                    }
                }
                Piece::Superop(s) => {
                    for (_, rho) in branches.iter_mut() {
                        *rho = unvectorize(&(s * vectorize(rho)), 8);
                    }
                }
                Piece::Measure => {
                    let taken = std::mem::take(&mut branches);
                    let mut next = Vec::with_capacity(taken.len() * 2);
                    for (bits, rho) in taken {
                        for (bit, proj) in [(0u8, &p0), (1u8, &p1)] {
                            let projected = proj * &rho * proj;
                            let weight = projected.trace().re;
                            if weight > T::of(1e-15) {
                                let mut b = bits.clone();
                                b.push(bit);
                                next.push((b, projected));
                            }
                        }
                    }
                    branches = next;
                }
            }
        }

        let mut rho_out = CMatrix::<T>::zeros(2, 2);
        let mut syndrome_probabilities = Vec::with_capacity(branches.len());
        for (bits, rho) in branches {
            let syndrome = (bits[0], bits[1]);
            let weight = rho.trace().re;
            let recovery = compiled
                .table
                .recovery(syndrome)
                .expect("all syndromes mapped");
            let recovered = recovery * rho * recovery.adjoint();
            rho_out += partial_trace_rest(&recovered, 2);
            syndrome_probabilities.push((syndrome, weight));
        }
        syndrome_probabilities.sort_by_key(|(s, _)| (s.0, s.1));

        let fidelity = (psi_in.adjoint() * &rho_out * psi_in)[(0, 0)].re;
        let rho_out = OperatorMatrix::new_unchecked(rho_out, OperatorKind::Density);
        Ok(ProtocolOutcome {
            rho_out,
            syndrome_probabilities,
            fidelity,
        })
    }

    /// Average retrieval fidelity over input states.
    pub fn average_correction_fidelity(
        &self,
        config: &ProtocolConfig<T>,
    ) -> CoreResult<AverageOutcome<T>> {
        let compiled = self.compile(config, InjectedError::None)?;
        match config.averaging {
            Averaging::TwoDesignExact => {
                let states = axis_states::<T>();
                let mut per_state = Vec::with_capacity(6);
                let mut sum = T::zero();
                for (name, psi) in states {
                    let f = self.execute(&compiled, &psi)?.fidelity;
                    sum += f;
                    per_state.push((name, f));
                }
                Ok(AverageOutcome {
                    fidelity: sum / T::of(6.0),
                    std_error: None,
                    per_state,
                })
            }
            Averaging::HaarMonteCarlo { samples, seed } => {
                if samples < 2 {
                    return Err(CoreError::InvalidInput(
                        "Monte-Carlo averaging needs at least 2 samples".into(),
                    ));
                }
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                let mut sum = T::zero();
                let mut sum_sq = T::zero();
                for _ in 0..samples {
                    let psi = haar_state(&mut rng);
                    let f = self.execute(&compiled, &psi)?.fidelity;
                    sum += f;
                    sum_sq += f * f;
                }
                let n = T::of(samples as f64);
                let mean = sum / n;
                let var = (sum_sq / n - mean * mean).max(T::zero());
                let std_error = (var / (n - T::one())).sqrt();
                Ok(AverageOutcome {
                    fidelity: mean,
                    std_error: Some(std_error),
                    per_state: vec![],
                })
            }
        }
    }

    /// Simulated encoding (interaction-frame unitary), for direct
    /// comparison with [`build_encoding_ideal`].
    pub fn build_encoding_simulated(
        &self,
        sim: &SimulatedGates<T>,
    ) -> CoreResult<OperatorMatrix<T>> {
        let mut builder = TrainBuilder::new(self, sim);
        builder.axy_gate(0, GateAxis::X, T::frac_pi_2())?;
        builder.axy_gate(1, GateAxis::X, T::frac_pi_2())?;
        let total = builder.cursor;
        let segments = builder.take_segments();
        let u = crate::dynamics::propagate_segments_unitary(&self.register, &sim.errors, &segments)?;
        crate::gates::to_interaction_frame(&self.register, &self.frames, &u.matrix, total)
    }

    /// Simulated composed iSWAP (interaction frame), for comparison with
    /// [`iswap_reference`].
    pub fn compose_iswap_simulated(
        &self,
        j: usize,
        sim: &SimulatedGates<T>,
    ) -> CoreResult<OperatorMatrix<T>> {
        let mut builder = TrainBuilder::new(self, sim);
        builder.iswap(j, false)?;
        let total = builder.cursor;
        let segments = builder.take_segments();
        let u = crate::dynamics::propagate_segments_unitary(&self.register, &sim.errors, &segments)?;
        crate::gates::to_interaction_frame(&self.register, &self.frames, &u.matrix, total)
    }

    /// Fidelity of the composed ideal iSWAP against the direct exponential.
    pub fn iswap_identity_fidelity(&self, j: usize) -> CoreResult<T> {
        let composed = self.compose_iswap_ideal(j)?;
        gate_fidelity(&composed.matrix, &self.iswap_reference(j))
    }
}

enum Piece<T: Real> {
    Unitary(CMatrix<T>),
    Superop(CMatrix<T>),
    Measure,
}

struct CompiledProtocol<T: Real> {
    pieces: Vec<Piece<T>>,
    table: SyndromeTable<T>,
}

/// Builds the physical segment train for the simulated protocol: gates are
/// phase-aligned to their target's precession, electron rotations are finite
/// pulses at the configured Rabi frequency.
struct TrainBuilder<'a, T: Real> {
    code: &'a RepetitionCode<T>,
    sim: &'a SimulatedGates<T>,
    segments: Vec<Segment<T>>,
    cursor: T,
}

impl<'a, T: Real> TrainBuilder<'a, T> {
    fn new(code: &'a RepetitionCode<T>, sim: &'a SimulatedGates<T>) -> Self {
        Self {
            code,
            sim,
            segments: Vec::new(),
            cursor: T::zero(),
        }
    }

    fn take_segments(&mut self) -> Vec<Segment<T>> {
        std::mem::take(&mut self.segments)
    }

    fn electron_rotation(&mut self, phase: T, angle: T) {
        let effective = self.sim.rabi * (T::one() + self.sim.errors.rabi_error);
        // negative angles rotate about the opposite in-plane axis
        let (phase, angle) = if angle < T::zero() {
            (phase + T::pi(), -angle)
        } else {
            (phase, angle)
        };
        let duration = angle / effective;
        self.segments.push(Segment::Pulse {
            duration,
            phase,
            amplitude: effective,
        });
        self.cursor += duration;
    }

    /// Aligns the target's precession phase to a multiple of 2π with a
    /// fully decoupled bridge: a single f = 0 AXY-4 repetition whose period
    /// is tuned to the required duration. Bare idle time would expose the
    /// conditional hyperfine coupling; the bridge refocuses it along with
    /// the static detuning.
    fn phase_bridge(&mut self, target: usize) -> CoreResult<()> {
        let omega = self.code.frames[target].omega;
        let phase = (omega * self.cursor).rem_euclid(T::two_pi());
        if phase < T::of(1e-9) || T::two_pi() - phase < T::of(1e-9) {
            return Ok(());
        }
        let period = T::two_pi() / omega;
        let mut duration = (T::two_pi() - phase) / omega;

        let layout = crate::pulses::solve_axy_positions(T::zero(), 1, crate::pulses::Parity::Even)?;
        let effective = self.sim.rabi * (T::one() + self.sim.errors.rabi_error);
        let width = T::pi() / effective;
        // bridge τ must keep every inter-pulse gap clear of the pulse width
        let tau_min = width * T::of(1.2) / crate::pulses::min_gap_fraction(&layout);
        while duration < T::of(2.0) * tau_min {
            duration += period;
        }
        let seq = AxySequenceSpec::solve(
            AxyVariant::Axy4,
            1,
            duration / T::of(2.0),
            1,
            crate::pulses::Parity::Even,
            T::zero(),
            Some(self.sim.rabi),
        )?;
        let schedule = crate::pulses::build_schedule(&seq, &self.sim.errors)?;
        let inner = crate::dynamics::schedule_segments(&schedule)?;
        self.segments.extend_from_slice(&inner);
        self.cursor += schedule.total_duration;
        Ok(())
    }

    /// Appends an AXY gate starting at the current cursor, phase-bridged so
    /// the gate's effective axis lands on the requested frame axis.
    fn axy_gate(&mut self, target: usize, axis: GateAxis, angle: T) -> CoreResult<()> {
        self.phase_bridge(target)?;
        let reps = self.sim.repetitions[target];
        let frames = &self.code.frames;
        let tau = crate::gates::resonant_tau(frames, target, self.sim.k_dd);
        let total = tau
            * T::of(self.sim.variant.periods_per_repetition() as f64)
            * T::of(reps as f64);
        let f = crate::gates::required_coefficient(
            &self.code.register,
            frames[target].g,
            angle,
            total,
        );
        let seq = AxySequenceSpec::solve(
            self.sim.variant,
            reps,
            tau,
            self.sim.k_dd,
            axis.parity(),
            f,
            Some(self.sim.rabi),
        )?;
        let schedule = crate::pulses::build_schedule(&seq, &self.sim.errors)?;
        let inner = crate::dynamics::schedule_segments(&schedule)?;
        self.segments.extend_from_slice(&inner);
        self.cursor += schedule.total_duration;
        Ok(())
    }

    /// Composed iSWAP (or its inverse) between the electron and nucleus `j`.
    fn iswap(&mut self, j: usize, inverse: bool) -> CoreResult<()> {
        let pi_2 = T::frac_pi_2();
        let x = T::zero();
        let y = T::frac_pi_2();
        if !inverse {
            self.electron_rotation(x, pi_2);
            self.axy_gate(j, GateAxis::Y, pi_2)?;
            self.electron_rotation(x, -pi_2);
            self.electron_rotation(y, -pi_2);
            self.axy_gate(j, GateAxis::X, pi_2)?;
            self.electron_rotation(y, pi_2);
        } else {
            self.electron_rotation(y, -pi_2);
            self.axy_gate(j, GateAxis::X, -pi_2)?;
            self.electron_rotation(y, pi_2);
            self.electron_rotation(x, pi_2);
            self.axy_gate(j, GateAxis::Y, -pi_2)?;
            self.electron_rotation(x, -pi_2);
        }
        Ok(())
    }
}

fn electron_projector<T: Real>(bit: usize) -> CMatrix<T> {
    let mut p = CMatrix::<T>::zeros(2, 2);
    p[(bit, bit)] = Complex::new(T::one(), T::zero());
    embed_qubit_op(&p, 0, N_QUBITS)
}

fn kron_vec<T: Real>(a: &CVector<T>, b: &CVector<T>) -> CVector<T> {
    let mut out = CVector::<T>::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            out[i * b.len() + j] = a[i] * b[j];
        }
    }
    out
}

/// +1 eigenstate of n̂·σ.
pub fn spin_up_state<T: Real>(axis: &nalgebra::Vector3<T>) -> CVector<T> {
    let theta = axis.z.min(T::one()).max(-T::one()).acos();
    let phi = axis.y.atan2(axis.x);
    let mut v = CVector::<T>::zeros(2);
    let half = theta / T::of(2.0);
    v[0] = Complex::new(half.cos(), T::zero());
    v[1] = Complex::new(phi.cos(), phi.sin()) * Complex::new(half.sin(), T::zero());
    v
}

/// The six eigenstates of the electron Pauli operators.
pub fn axis_states<T: Real>() -> Vec<(String, CVector<T>)> {
    let s = T::of(std::f64::consts::FRAC_1_SQRT_2);
    let mk = |a: Complex<T>, b: Complex<T>| {
        let mut v = CVector::<T>::zeros(2);
        v[0] = a;
        v[1] = b;
        v
    };
    vec![
        ("+z".into(), mk(cplx(1.0, 0.0), cplx(0.0, 0.0))),
        ("-z".into(), mk(cplx(0.0, 0.0), cplx(1.0, 0.0))),
        (
            "+x".into(),
            mk(Complex::new(s, T::zero()), Complex::new(s, T::zero())),
        ),
        (
            "-x".into(),
            mk(Complex::new(s, T::zero()), Complex::new(-s, T::zero())),
        ),
        (
            "+y".into(),
            mk(Complex::new(s, T::zero()), Complex::new(T::zero(), s)),
        ),
        (
            "-y".into(),
            mk(Complex::new(s, T::zero()), Complex::new(T::zero(), -s)),
        ),
    ]
}

/// Haar-random single-qubit pure state (Gaussian method).
pub fn haar_state<T: Real>(rng: &mut ChaCha12Rng) -> CVector<T> {
    let mut gauss = || {
        // Box-Muller
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let raw = [gauss(), gauss(), gauss(), gauss()];
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v = CVector::<T>::zeros(2);
    v[0] = cplx(raw[0] / norm, raw[1] / norm);
    v[1] = cplx(raw[2] / norm, raw[3] / norm);
    v
}
