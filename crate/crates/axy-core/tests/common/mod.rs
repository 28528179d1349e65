//! Shared fixtures and independent oracles for the integration suites.
//!
//! Oracles here deliberately avoid the library's closed-form paths: Fourier
//! coefficients come from Gauss-Legendre quadrature of the modulation
//! function, Hamiltonian spectra from a bit-pattern matrix construction.

#![allow(dead_code)]

use axy_core::linalg::CMatrix;
use axy_core::register::{NuclearSpin, PhysicalConstants, SpinRegister};
use axy_core::scalar::cplx;
use axy_core::units::{gauss, two_pi_khz};

/// Two-carbon register with the experimentally motivated couplings used
/// throughout the suites.
pub fn two_carbon_register(field_gauss: f64) -> SpinRegister<f64> {
    let constants = PhysicalConstants::<f64>::default();
    let gamma = constants.gamma_c13;
    SpinRegister::new(
        constants,
        gauss(field_gauss),
        -1,
        vec![
            NuclearSpin::from_components("C1", two_pi_khz(45.8), two_pi_khz(93.5), gamma),
            NuclearSpin::from_components("C2", two_pi_khz(35.3), two_pi_khz(49.5), gamma),
        ],
        vec![],
    )
    .unwrap()
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Fourier coefficient (a_k, b_k) of the ±1 modulation defined by flip
/// positions on the unit period, by segment-wise quadrature of
/// 2 ∫ F(t) cos/sin(2πkt) dt. Independent of the closed-form sums.
pub fn fourier_by_quadrature(positions: &[f64], k: usize) -> (f64, f64) {
    let (nodes, weights) = gauss_legendre(24);
    let mut boundaries = vec![0.0];
    boundaries.extend_from_slice(positions);
    boundaries.push(1.0);
    let mut a = 0.0;
    let mut b = 0.0;
    let mut sign = 1.0;
    for w in boundaries.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi > lo {
            let half = (hi - lo) / 2.0;
            let mid = (hi + lo) / 2.0;
            for (x, wt) in nodes.iter().zip(&weights) {
                let t = mid + half * x;
                let arg = std::f64::consts::TAU * k as f64 * t;
                a += sign * wt * half * arg.cos();
                b += sign * wt * half * arg.sin();
            }
        }
        sign = -sign;
    }
    if k == 0 {
        (a, 0.0) // mean carries no factor of 2
    } else {
        (2.0 * a, 2.0 * b)
    }
}

/// Register Hamiltonian assembled from per-basis-state matrix elements
/// (bit arithmetic), independent of the Kronecker-product construction.
pub fn hamiltonian_by_matrix_elements(register: &SpinRegister<f64>) -> CMatrix<f64> {
    let n = register.num_nuclei();
    let dim = register.dim();
    let ms = register.m_s as f64;
    let mut h = CMatrix::<f64>::zeros(dim, dim);
    // bit 0 of the index is the last nucleus; the electron is the top bit
    let spin_z = |state: usize, qubit: usize| -> f64 {
        let shift = n - qubit; // qubit 0 = electron
        if (state >> shift) & 1 == 0 {
            0.5
        } else {
            -0.5
        }
    };
    for row in 0..dim {
        for col in 0..dim {
            let mut elem = cplx::<f64>(0.0, 0.0);
            if row == col {
                for j in 0..n {
                    elem += cplx::<f64>(
                        -register.nuclei[j].gamma * register.b_field * spin_z(row, j + 1),
                        0.0,
                    );
                }
            }
            // hyperfine acts only in the electron |1⟩ manifold:
            // (m_s/2)(σ_z + 1) = m_s on |1⟩, 0 on |0⟩
            let e_row = (row >> n) & 1;
            let e_col = (col >> n) & 1;
            if e_row == 1 && e_col == 1 {
                for j in 0..n {
                    let a = register.nuclei[j].hyperfine;
                    let shift = n - (j + 1);
                    let others = (row & !(1 << shift), col & !(1 << shift));
                    if others.0 != others.1 {
                        continue;
                    }
                    let bit_row = (row >> shift) & 1;
                    let bit_col = (col >> shift) & 1;
                    if bit_row == bit_col {
                        elem += cplx::<f64>(ms * a.z * spin_z(row, j + 1), 0.0);
                    } else if bit_row == 1 {
                        // ⟨down| (A_x I_x + A_y I_y) |up⟩ = (A_x + i A_y)/2
                        elem += cplx::<f64>(ms * a.x / 2.0, ms * a.y / 2.0);
                    } else {
                        elem += cplx::<f64>(ms * a.x / 2.0, -ms * a.y / 2.0);
                    }
                }
            }
            h[(row, col)] = elem;
        }
    }
    h
}

/// |Tr U|/2 for the conditional spectator evolution, by direct numerical
/// 2×2 exponentiation of the rotating-frame factors (no trigonometric
/// closed form).
pub fn decoupling_efficiency_oracle(vartheta: f64, g_ratio: f64, phi: f64) -> f64 {
    use axy_core::linalg::{expm, pauli_x, pauli_z};
    // dimensionless: t = 1, Δ = 2ϑ, g̃ = g_ratio·φ
    let delta = 2.0 * vartheta;
    let g = g_ratio * phi;
    let h_rot = pauli_x::<f64>() * cplx::<f64>(g / 2.0, 0.0)
        - pauli_z::<f64>() * cplx::<f64>(delta / 2.0, 0.0);
    let frame = pauli_z::<f64>() * cplx::<f64>(delta / 2.0, 0.0);
    let u = expm(&(frame * cplx::<f64>(0.0, -1.0))) * expm(&(h_rot * cplx::<f64>(0.0, -1.0)));
    let tr = u.trace();
    (tr.re * tr.re + tr.im * tr.im).sqrt() / 2.0
}

/// Same quantity by literal time-ordered integration of the oscillating
/// conditional Hamiltonian, second-order midpoint stepping.
pub fn decoupling_efficiency_trotter(vartheta: f64, g_ratio: f64, phi: f64, steps: usize) -> f64 {
    use axy_core::linalg::{identity, pauli_x, pauli_y};
    let delta = 2.0 * vartheta;
    let g = g_ratio * phi;
    let dt = 1.0 / steps as f64;
    let mut u = identity::<f64>(2);
    for i in 0..steps {
        let t = (i as f64 + 0.5) * dt;
        let h = pauli_x::<f64>() * cplx::<f64>(g / 2.0 * (delta * t).cos(), 0.0)
            + pauli_y::<f64>() * cplx::<f64>(g / 2.0 * (delta * t).sin(), 0.0);
        // exact step for the instantaneous Hamiltonian
        let norm = (h.adjoint().clone() * &h).trace().re.sqrt() / std::f64::consts::SQRT_2;
        let step = if norm > 0.0 {
            identity::<f64>(2) * cplx::<f64>((norm * dt).cos(), 0.0)
                + &h * cplx::<f64>(0.0, -(norm * dt).sin() / norm)
        } else {
            identity::<f64>(2)
        };
        u = step * u;
    }
    let tr = u.trace();
    (tr.re * tr.re + tr.im * tr.im).sqrt() / 2.0
}
