//! Property-based invariants.

mod common;

use axy_core::gates::decoupling_efficiency;
use axy_core::pulses::{fourier_coefficients, solve_axy_positions, Parity};
use axy_core::register::{derive_frames, NuclearSpin, PhysicalConstants, SpinRegister};
use axy_core::units::{gauss, two_pi_khz};
use nalgebra::Vector3;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn solver_round_trip_even(f in -1.1f64..1.1) {
        let layout = solve_axy_positions::<f64>(f, 1, Parity::Even).unwrap();
        let fc = fourier_coefficients(&layout.period_positions(), 8).unwrap();
        prop_assert!((fc.a[1] - f).abs() < 1e-9);
        for k in [0usize, 2, 3, 4] {
            prop_assert!(fc.a[k].abs() < 1e-9);
        }
        for k in 1..=8usize {
            prop_assert!(fc.b[k].abs() < 1e-9);
        }
    }

    #[test]
    fn solver_round_trip_odd(f in -1.1f64..1.1) {
        let layout = solve_axy_positions::<f64>(f, 1, Parity::Odd).unwrap();
        let fc = fourier_coefficients(&layout.period_positions(), 8).unwrap();
        prop_assert!((fc.b[1] - f).abs() < 1e-9);
        for k in 0..=8usize {
            prop_assert!(fc.a[k].abs() < 1e-9);
        }
        for k in [2usize, 3, 4] {
            prop_assert!(fc.b[k].abs() < 1e-9);
        }
    }

    #[test]
    fn half_period_shift_negates_odd_cosines(
        raw in proptest::collection::vec(0.0f64..0.499, 4)
    ) {
        // positions confined to the first half-period; their half-shifted
        // copy is again a valid sorted list, and odd cosine harmonics flip
        let mut p = raw.clone();
        p.sort_by(|a, b| a.partial_cmp(b).unwrap());
        p.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        prop_assume!(p.len() % 2 == 0 && !p.is_empty());
        let q: Vec<f64> = p.iter().map(|x| x + 0.5).collect();
        let fp = fourier_coefficients(&p, 7).unwrap();
        let fq = fourier_coefficients(&q, 7).unwrap();
        for k in (1..=7usize).step_by(2) {
            prop_assert!((fq.a[k] + fp.a[k]).abs() < 1e-9);
        }
        for k in (2..=6usize).step_by(2) {
            prop_assert!((fq.a[k] - fp.a[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn efficiency_is_even_and_bounded(
        v in -30.0f64..30.0,
        g in 0.0f64..3.0,
        phi in 0.0f64..3.2,
    ) {
        let d = decoupling_efficiency(v, g, phi);
        prop_assert!(d >= 0.0 && d <= 1.0 + 1e-12);
        prop_assert!((d - decoupling_efficiency(-v, g, phi)).abs() < 1e-12);
    }

    #[test]
    fn frames_invariant_under_azimuthal_rotation(
        chi in 0.0f64..6.28,
        a_perp in 1.0f64..80.0,
        a_par in -80.0f64..80.0,
    ) {
        let constants = PhysicalConstants::<f64>::default();
        let gamma = constants.gamma_c13;
        let base = SpinRegister::new(
            constants.clone(),
            gauss(600.0),
            -1,
            vec![NuclearSpin::from_components("C", two_pi_khz(a_perp), two_pi_khz(a_par), gamma)],
            vec![],
        ).unwrap();
        // rotate the hyperfine vector about ẑ
        let a = Vector3::new(
            two_pi_khz::<f64>(a_perp) * chi.cos(),
            two_pi_khz::<f64>(a_perp) * chi.sin(),
            two_pi_khz::<f64>(a_par),
        );
        let rotated = SpinRegister::new(
            constants,
            gauss(600.0),
            -1,
            vec![NuclearSpin::new("C", a, gamma)],
            vec![],
        ).unwrap();

        let f0 = &derive_frames(&base).unwrap()[0];
        let f1 = &derive_frames(&rotated).unwrap()[0];
        prop_assert!((f0.omega - f1.omega).abs() < 1e-6 * f0.omega.max(1.0));
        prop_assert!((f0.g - f1.g).abs() < 1e-6 * f0.g.max(1.0));
        prop_assert!((f0.c - f1.c).abs() < 1e-6 * f0.g.max(1.0));
        // x̂ rotates by the same azimuth
        let rot_x = Vector3::new(
            f0.x_axis.x * chi.cos() - f0.x_axis.y * chi.sin(),
            f0.x_axis.x * chi.sin() + f0.x_axis.y * chi.cos(),
            f0.x_axis.z,
        );
        prop_assert!((rot_x - f1.x_axis).norm() < 1e-9);
    }

    #[test]
    fn weak_coupling_larmor_limit(a_scale in 0.01f64..1.0) {
        // |A| → 0: ω approaches |γB| to first order in |A|/(γB)
        let constants = PhysicalConstants::<f64>::default();
        let gamma = constants.gamma_c13;
        let a_perp = two_pi_khz::<f64>(0.5) * a_scale;
        let a_par = two_pi_khz::<f64>(0.8) * a_scale;
        let reg = SpinRegister::new(
            constants,
            gauss(600.0),
            -1,
            vec![NuclearSpin::from_components("C", a_perp, a_par, gamma)],
            vec![],
        ).unwrap();
        let f = &derive_frames(&reg).unwrap()[0];
        let gamma_b = reg.constants.gamma_c13 * reg.b_field;
        let a_mag = (a_perp * a_perp + a_par * a_par).sqrt();
        prop_assert!((f.omega - gamma_b).abs() <= a_mag);
    }
}
