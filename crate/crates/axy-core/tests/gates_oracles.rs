//! Gate-level checks: decoupling-efficiency oracle agreement, manifold
//! reflection invariance, prediction-vs-simulation tracking.

mod common;

use axy_core::dynamics::ControlErrorModel;
use axy_core::gates::{
    decoupling_efficiency, gate_fidelity, ideal_gate, predicted_fidelity, simulate_gate, GateAxis,
    GateSpec,
};
use axy_core::linalg::{expm, pauli_x, pauli_z};
use axy_core::pulses::AxyVariant;
use axy_core::register::derive_frames;
use axy_core::scalar::cplx;
use axy_core::units::{two_pi_hz, two_pi_mhz};
use common::{
    decoupling_efficiency_oracle, decoupling_efficiency_trotter, two_carbon_register,
};

#[test]
fn efficiency_matches_conditional_propagator_oracle() {
    // deterministic pseudo-random grid
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..200 {
        let vartheta = (next() - 0.5) * 20.0;
        let g_ratio = next() * 2.0;
        let phi = next() * std::f64::consts::PI;
        let closed = decoupling_efficiency(vartheta, g_ratio, phi);
        let oracle = decoupling_efficiency_oracle(vartheta, g_ratio, phi);
        assert!(
            (closed - oracle).abs() < 1e-9,
            "ϑ={vartheta}, g={g_ratio}, φ={phi}: {closed} vs {oracle}"
        );
    }
}

#[test]
fn rotating_frame_factorization_matches_time_ordering() {
    for &(v, g, p) in &[(1.7f64, 0.9f64, 1.2f64), (-3.1, 0.4, 2.4), (0.6, 1.5, 0.5)] {
        let factorized = decoupling_efficiency_oracle(v, g, p);
        let trotter = decoupling_efficiency_trotter(v, g, p, 200_000);
        assert!(
            (factorized - trotter).abs() < 1e-6,
            "{factorized} vs {trotter}"
        );
    }
}

#[test]
fn efficiency_invariant_under_manifold_reflection() {
    // the conditional propagators of the two electron branches share the
    // same |trace|: r⃗ = (g̃, 0, −Δ) versus s⃗ = (−g̃, 0, −Δ)
    for &(v, g, p) in &[(0.8f64, 0.7f64, 1.9f64), (2.2, 1.1, 0.9), (-1.4, 0.3, 2.8)] {
        let delta = 2.0 * v;
        let coupling = g * p;
        let trace_mag = |gx: f64| {
            let h_rot = pauli_x::<f64>() * cplx::<f64>(gx / 2.0, 0.0)
                - pauli_z::<f64>() * cplx::<f64>(delta / 2.0, 0.0);
            let frame = pauli_z::<f64>() * cplx::<f64>(delta / 2.0, 0.0);
            let u = expm(&(frame * cplx::<f64>(0.0, -1.0))) * expm(&(h_rot * cplx::<f64>(0.0, -1.0)));
            let tr = u.trace();
            (tr.re * tr.re + tr.im * tr.im).sqrt() / 2.0
        };
        let d0 = trace_mag(coupling);
        let d1 = trace_mag(-coupling);
        assert!((d0 - d1).abs() < 1e-12);
    }
}

#[test]
fn prediction_tracks_simulation_on_the_two_carbon_register() {
    let reg = two_carbon_register(600.0);
    let frames = derive_frames(&reg).unwrap();
    let spec = GateSpec::new(0, GateAxis::X, std::f64::consts::FRAC_PI_2);
    let ideal = ideal_gate(&reg, &frames, &spec).unwrap();
    let errors = ControlErrorModel::new(two_pi_hz(350.0), 0.0025).unwrap();
    for n in [7u32, 12, 18, 25] {
        let sim = simulate_gate(
            &reg,
            &spec,
            AxyVariant::Axy8,
            1,
            n,
            Some(two_pi_mhz(20.0)),
            &errors,
        )
        .unwrap();
        let simulated = gate_fidelity(&sim.unitary.matrix, &ideal.matrix).unwrap();
        let predicted = predicted_fidelity(&reg, &spec, AxyVariant::Axy8, 1, n, sim.spec.tau).unwrap();
        assert!(
            (simulated - predicted).abs() < 2e-3,
            "N={n}: sim {simulated} vs pred {predicted}"
        );
        assert!(predicted <= 1.0 + 1e-12);
    }
}

#[test]
fn y_gate_simulates_to_its_ideal_form() {
    let reg = two_carbon_register(600.0);
    let frames = derive_frames(&reg).unwrap();
    let spec = GateSpec::new(1, GateAxis::Y, std::f64::consts::FRAC_PI_2);
    let ideal = ideal_gate(&reg, &frames, &spec).unwrap();
    let sim = simulate_gate(
        &reg,
        &spec,
        AxyVariant::Axy8,
        1,
        30,
        Some(two_pi_mhz(20.0)),
        &ControlErrorModel::default(),
    )
    .unwrap();
    let f = gate_fidelity(&sim.unitary.matrix, &ideal.matrix).unwrap();
    assert!(f > 0.999, "y-gate fidelity {f}");
}

#[test]
fn axy4_variant_also_realizes_the_gate() {
    let reg = two_carbon_register(600.0);
    let frames = derive_frames(&reg).unwrap();
    let spec = GateSpec::new(0, GateAxis::X, std::f64::consts::FRAC_PI_2);
    let ideal = ideal_gate(&reg, &frames, &spec).unwrap();
    let sim = simulate_gate(
        &reg,
        &spec,
        AxyVariant::Axy4,
        1,
        30,
        Some(two_pi_mhz(20.0)),
        &ControlErrorModel::default(),
    )
    .unwrap();
    let f = gate_fidelity(&sim.unitary.matrix, &ideal.matrix).unwrap();
    assert!(f > 0.995, "AXY-4 gate fidelity {f}");
}
