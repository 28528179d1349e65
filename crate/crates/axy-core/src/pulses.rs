//! AXY composite-pulse layout solving and schedule compilation.
//!
//! An AXY sequence is an XY-type decoupling train in which every π-pulse is
//! replaced by a five-pulse Knill composite. The five sub-pulse positions
//! inside each composite are free parameters; they set the Fourier
//! coefficients of the ±1 modulation function F(t) and therefore the
//! effective electron-nuclear coupling of the sequence.
//!
//! Layout conventions, with positions as fractions of the period τ:
//! the first composite occupies (0, 1/2) with sub-pulses symmetric about
//! 1/4, the second composite is the first shifted by 1/2. That structure
//! makes F even with only odd cosine harmonics; the two remaining degrees
//! of freedom (x₁, x₂) are solved for the target coefficient and the
//! vanishing of the other odd harmonic. Odd-parity (sine) layouts are the
//! same train advanced by a quarter period, which converts the cosine
//! series into a pure sine series.

use crate::error::{CoreError, CoreResult};
use crate::scalar::Real;

/// Attainable open bound for the first-harmonic coefficient:
/// (8 cos(π/9) − 4)/π.
pub fn coefficient_bound<T: Real>() -> T {
    (T::of(8.0) * (T::pi() / T::of(9.0)).cos() - T::of(4.0)) / T::pi()
}

/// Gate parity: even modulation drives σ_z⊗I_x, odd drives σ_z⊗I_y.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Sequence family. AXY-8 repeats X-Y-X-Y-Y-X-Y-X composites (4τ per
/// repetition); AXY-4 repeats X-Y-X-Y (2τ per repetition).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxyVariant {
    Axy4,
    Axy8,
}

impl AxyVariant {
    pub fn composites_per_repetition(self) -> usize {
        match self {
            AxyVariant::Axy4 => 4,
            AxyVariant::Axy8 => 8,
        }
    }

    /// Repetition length in units of τ.
    pub fn periods_per_repetition(self) -> usize {
        self.composites_per_repetition() / 2
    }

    /// Base phases of the composite train (X = 0, Y = π/2).
    fn base_phases<T: Real>(self) -> Vec<T> {
        let x = T::zero();
        let y = T::frac_pi_2();
        match self {
            AxyVariant::Axy4 => vec![x, y, x, y],
            AxyVariant::Axy8 => vec![x, y, x, y, y, x, y, x],
        }
    }
}

/// Knill composite sub-pulse phase offsets, applied on top of the composite
/// base phase.
pub fn knill_phase_offsets<T: Real>() -> [T; 5] {
    let pi = T::pi();
    [pi / T::of(6.0), T::zero(), pi / T::of(2.0), T::zero(), pi / T::of(6.0)]
}

/// Positions of the five sub-pulses of the first composite, as fractions of
/// the period τ, strictly increasing in (0, 1/2) and symmetric about 1/4.
#[derive(Clone, Debug)]
pub struct CompositePulseLayout<T: Real> {
    positions: [T; 5],
    parity: Parity,
    harmonic: u32,
    /// Coefficient achieved at the resonant harmonic.
    target: T,
}

impl<T: Real> CompositePulseLayout<T> {
    pub fn positions(&self) -> [T; 5] {
        self.positions
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn harmonic(&self) -> u32 {
        self.harmonic
    }

    pub fn target_coefficient(&self) -> T {
        self.target
    }

    /// The ten flip positions within one period, in (0, 1].
    ///
    /// For even parity this is the composite and its half-period copy. For
    /// odd parity the whole train is advanced by a quarter period and
    /// wrapped, which puts one flip exactly at the period boundary.
    pub fn period_positions(&self) -> Vec<T> {
        let half = T::of(0.5);
        let mut pos: Vec<T> = self
            .positions
            .iter()
            .flat_map(|&x| [x, x + half])
            .collect();
        if self.parity == Parity::Odd {
            let quarter = T::of(0.25);
            let one = T::one();
            for p in pos.iter_mut() {
                let shifted = *p + quarter;
                *p = if shifted > one { shifted - one } else { shifted };
            }
        }
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pos
    }
}

/// Fourier coefficients of the modulation function defined by flip
/// positions on the unit period: `a[k]`, `b[k]` for k ≤ k_max, with
/// `a[0]` the mean of F and `b[0] = 0`.
#[derive(Clone, Debug)]
pub struct FourierCoefficients<T: Real> {
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// Evaluates the Fourier series of F(t) = ±1 with F(0) = 1 and sign flips
/// at the given positions (fractions of the period, sorted, in [0, 1]).
///
/// a_k = (2/πk) Σ_i (−1)^{i+1} sin(2πk x_i),
/// b_k = (2/πk) Σ_i (−1)^i cos(2πk x_i), with an even number of flips.
/// An empty list is F ≡ 1.
pub fn fourier_coefficients<T: Real>(
    positions: &[T],
    k_max: usize,
) -> CoreResult<FourierCoefficients<T>> {
    if positions.len() % 2 != 0 {
        return Err(CoreError::InvalidInput(format!(
            "modulation needs an even number of sign flips per period, got {}",
            positions.len()
        )));
    }
    let mut prev = T::zero();
    for &p in positions {
        if p < prev || p > T::one() {
            return Err(CoreError::InvalidInput(
                "positions must be sorted within [0, 1]".into(),
            ));
        }
        prev = p;
    }

    let mut a = vec![T::zero(); k_max + 1];
    let mut b = vec![T::zero(); k_max + 1];

    // mean of F: 1 + 2 Σ (−1)^{i+1} x_i for an even flip count
    let mut mean = T::one();
    for (i, &x) in positions.iter().enumerate() {
        let sign = if i % 2 == 0 { T::of(2.0) } else { T::of(-2.0) };
        mean += sign * x;
    }
    a[0] = mean;

    for k in 1..=k_max {
        let kk = T::of(k as f64);
        let mut sa = T::zero();
        let mut sb = T::zero();
        for (i, &x) in positions.iter().enumerate() {
            let arg = T::two_pi() * kk * x;
            if i % 2 == 0 {
                sa += arg.sin();
                sb -= arg.cos();
            } else {
                sa -= arg.sin();
                sb += arg.cos();
            }
        }
        let scale = T::of(2.0) / (T::pi() * kk);
        a[k] = scale * sa;
        b[k] = scale * sb;
    }
    Ok(FourierCoefficients { a, b })
}

/// Residual system for the symmetric composite: unknowns (x₁, x₂),
/// positions (x₁, x₂, 1/4, 1/2−x₂, 1/2−x₁) plus the half-period copy.
/// For odd harmonics the coefficient reduces to
/// a_k = (4/πk) [2 sin(2πk x₁) − 2 sin(2πk x₂) + sin(πk/2)].
fn harmonic_of_symmetric<T: Real>(k: u32, x1: T, x2: T) -> T {
    let kk = T::of(k as f64);
    let two_pi_k = T::two_pi() * kk;
    let centre = (T::pi() * kk / T::of(2.0)).sin();
    T::of(4.0) / (T::pi() * kk)
        * (T::of(2.0) * (two_pi_k * x1).sin() - T::of(2.0) * (two_pi_k * x2).sin() + centre)
}

fn harmonic_gradient<T: Real>(k: u32, x1: T, x2: T) -> (T, T) {
    let kk = T::of(k as f64);
    let two_pi_k = T::two_pi() * kk;
    let scale = T::of(8.0) / (T::pi() * kk) * two_pi_k;
    (scale * (two_pi_k * x1).cos(), -(scale * (two_pi_k * x2).cos()))
}

/// Solves for the composite layout producing `target_f` at harmonic `k_dd`
/// while the other odd harmonic in {1, 3} vanishes. Even harmonics and all
/// opposite-parity coefficients vanish by construction.
pub fn solve_axy_positions<T: Real>(
    target_f: T,
    k_dd: u32,
    parity: Parity,
) -> CoreResult<CompositePulseLayout<T>> {
    if k_dd == 0 || k_dd % 2 == 0 || k_dd > 3 {
        return Err(CoreError::UnsupportedHarmonic(k_dd));
    }
    let bound = coefficient_bound::<T>();
    if k_dd == 1 && target_f.abs() >= bound {
        return Err(CoreError::UnreachableCoefficient {
            requested: target_f.as_f64(),
            bound: bound.as_f64(),
            harmonic: k_dd,
        });
    }
    let suppressed = if k_dd == 1 { 3 } else { 1 };

    let quarter = T::of(0.25);
    let max_iter = 64;
    let tol = T::tol();
    let mut best_residual = T::of(f64::INFINITY);

    // deterministic multi-start grid inside 0 < x1 < x2 < 1/4
    let starts: [(f64, f64); 8] = [
        (0.05, 0.15),
        (0.04, 0.20),
        (0.08, 0.16),
        (0.02, 0.12),
        (0.10, 0.20),
        (0.06, 0.22),
        (0.12, 0.23),
        (0.01, 0.08),
    ];

    for &(s1, s2) in &starts {
        let mut x1 = T::of(s1);
        let mut x2 = T::of(s2);
        for _ in 0..max_iter {
            let r1 = harmonic_of_symmetric(k_dd, x1, x2) - target_f;
            let r2 = harmonic_of_symmetric(suppressed, x1, x2);
            let res = (r1 * r1 + r2 * r2).sqrt();
            if res < tol {
                let layout = CompositePulseLayout {
                    positions: [x1, x2, quarter, T::of(0.5) - x2, T::of(0.5) - x1],
                    parity,
                    harmonic: k_dd,
                    target: target_f,
                };
                if layout_is_ordered(&layout) {
                    return Ok(layout);
                }
                break;
            }
            let (j11, j12) = harmonic_gradient(k_dd, x1, x2);
            let (j21, j22) = harmonic_gradient(suppressed, x1, x2);
            let det = j11 * j22 - j12 * j21;
            if det.abs() < T::of(1e-300) {
                break;
            }
            let dx1 = (r1 * j22 - r2 * j12) / det;
            let dx2 = (r2 * j11 - r1 * j21) / det;

            // damped step with backtracking, keeping iterates in the box
            let mut step = T::one();
            let mut advanced = false;
            for _ in 0..30 {
                let n1 = x1 - step * dx1;
                let n2 = x2 - step * dx2;
                if n1 > T::zero() && n1 < n2 && n2 < quarter {
                    let t1 = harmonic_of_symmetric(k_dd, n1, n2) - target_f;
                    let t2 = harmonic_of_symmetric(suppressed, n1, n2);
                    if (t1 * t1 + t2 * t2).sqrt() < res {
                        x1 = n1;
                        x2 = n2;
                        advanced = true;
                        break;
                    }
                }
                step /= T::of(2.0);
            }
            if !advanced {
                if res < best_residual {
                    best_residual = res;
                }
                break;
            }
        }
        let r1 = harmonic_of_symmetric(k_dd, x1, x2) - target_f;
        let r2 = harmonic_of_symmetric(suppressed, x1, x2);
        let res = (r1 * r1 + r2 * r2).sqrt();
        if res < best_residual {
            best_residual = res;
        }
    }

    if k_dd != 1 && best_residual > T::of(1e-3) {
        // the harmonic-3 window is narrower than the analytic k=1 bound
        return Err(CoreError::UnreachableCoefficient {
            requested: target_f.as_f64(),
            bound: f64::NAN,
            harmonic: k_dd,
        });
    }
    Err(CoreError::SolverFailed {
        residual: best_residual.as_f64(),
        iterations: max_iter,
    })
}

fn layout_is_ordered<T: Real>(layout: &CompositePulseLayout<T>) -> bool {
    let p = layout.positions;
    let mut ok = p[0] > T::zero();
    for i in 0..4 {
        ok &= p[i] < p[i + 1];
    }
    ok && p[4] < T::of(0.5)
}

/// Full sequence specification for one AXY gate.
#[derive(Clone, Debug)]
pub struct AxySequenceSpec<T: Real> {
    pub variant: AxyVariant,
    /// Number of sequence repetitions.
    pub repetitions: u32,
    /// Period τ (s).
    pub tau: T,
    /// Resonant harmonic index.
    pub k_dd: u32,
    pub parity: Parity,
    /// Target Fourier coefficient at `k_dd`.
    pub target_f: T,
    pub layout: CompositePulseLayout<T>,
    /// Microwave Rabi frequency (rad/s); `None` compiles idealized
    /// zero-width pulses.
    pub rabi: Option<T>,
}

impl<T: Real> AxySequenceSpec<T> {
    /// Solves the layout and assembles the spec.
    pub fn solve(
        variant: AxyVariant,
        repetitions: u32,
        tau: T,
        k_dd: u32,
        parity: Parity,
        target_f: T,
        rabi: Option<T>,
    ) -> CoreResult<Self> {
        if repetitions == 0 {
            return Err(CoreError::InvalidInput("repetitions must be positive".into()));
        }
        if !(tau > T::zero()) {
            return Err(CoreError::InvalidInput("tau must be positive".into()));
        }
        let layout = solve_axy_positions(target_f, k_dd, parity)?;
        Ok(Self {
            variant,
            repetitions,
            tau,
            k_dd,
            parity,
            target_f,
            layout,
            rabi,
        })
    }

    /// Total sequence duration: τ · periods-per-repetition · N.
    pub fn total_duration(&self) -> T {
        self.tau
            * T::of(self.variant.periods_per_repetition() as f64)
            * T::of(self.repetitions as f64)
    }
}

/// One rectangular microwave pulse.
#[derive(Clone, Copy, Debug)]
pub struct Pulse<T: Real> {
    /// Start time (s).
    pub start: T,
    /// Duration (s); zero in the idealized limit.
    pub duration: T,
    /// Drive phase (rad).
    pub phase: T,
    /// Drive amplitude (rad/s); zero in the idealized limit, where the
    /// pulse stands for an exact π rotation.
    pub amplitude: T,
}

impl<T: Real> Pulse<T> {
    pub fn center(&self) -> T {
        self.start + self.duration / T::of(2.0)
    }
}

/// A compiled, timed pulse train.
#[derive(Clone, Debug)]
pub struct PulseSchedule<T: Real> {
    pub pulses: Vec<Pulse<T>>,
    pub total_duration: T,
    /// True when pulses are compiled as instantaneous π rotations.
    pub idealized: bool,
}

/// Fraction of a pulse width required as extra clearance between pulses.
const GAP_MARGIN: f64 = 0.1;

/// Compiles the timed schedule for a sequence spec.
///
/// Pulse centers realize the layout's flip positions. With a finite Rabi
/// frequency each π pulse has width π/(Ω(1+R_rfe)) and amplitude
/// Ω(1+R_rfe); consecutive centers must clear 1.1 pulse widths.
pub fn build_schedule<T: Real>(
    spec: &AxySequenceSpec<T>,
    errors: &crate::dynamics::ControlErrorModel<T>,
) -> CoreResult<PulseSchedule<T>> {
    build_schedule_shifted(spec, errors, T::zero())
}

/// [`build_schedule`] with an extra rigid shift of the pulse train by
/// `shift_fraction`·τ (wrapped at the schedule boundary). Shifting advances
/// the effective rotation axis of the gate by ω_n·shift, which lets a
/// compiler start a gate at an arbitrary point of the target's precession
/// without inserting undecoupled idle time.
pub fn build_schedule_shifted<T: Real>(
    spec: &AxySequenceSpec<T>,
    errors: &crate::dynamics::ControlErrorModel<T>,
    shift_fraction: T,
) -> CoreResult<PulseSchedule<T>> {
    let periods = spec.variant.periods_per_repetition() * spec.repetitions as usize;
    let total = spec.total_duration();
    let base_phases = spec.variant.base_phases::<T>();
    let knill = knill_phase_offsets::<T>();

    // (center, phase) for the whole train; composites are laid out on the
    // even-parity grid and the odd-parity quarter-period shift is applied
    // afterwards so every pulse keeps its composite phase.
    let mut centers: Vec<(T, T)> = Vec::with_capacity(periods * 10);
    let composites_per_rep = spec.variant.composites_per_repetition();
    for rep in 0..spec.repetitions as usize {
        let rep_t0 = T::of(rep as f64)
            * T::of(spec.variant.periods_per_repetition() as f64)
            * spec.tau;
        for c in 0..composites_per_rep {
            let base = base_phases[c];
            let comp_t0 = rep_t0 + T::of(c as f64) * spec.tau / T::of(2.0);
            for (i, &x) in spec.layout.positions.iter().enumerate() {
                // composite c occupies the half-period slot starting at
                // c·τ/2; sub-pulse fractions are measured in units of τ
                let t = comp_t0 + x * spec.tau;
                centers.push((t, base + knill[i]));
            }
        }
    }

    let parity_fraction = match spec.parity {
        Parity::Even => T::zero(),
        Parity::Odd => T::of(0.25),
    };
    let fraction = (parity_fraction + shift_fraction).rem_euclid(T::one());
    if fraction > T::zero() {
        let shift = spec.tau * fraction;
        for (t, _) in centers.iter_mut() {
            *t += shift;
            if *t > total {
                *t -= total;
            }
        }
        centers.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }

    let (width, amplitude) = match spec.rabi {
        Some(omega) => {
            let effective = omega * (T::one() + errors.rabi_error);
            (T::pi() / effective, effective)
        }
        None => (T::zero(), T::zero()),
    };

    if spec.rabi.is_some() {
        // a boundary flip (odd parity puts one at the period end) is nudged
        // inward so the full pulse area fits inside the schedule
        let half_w = width / T::of(2.0);
        if let Some(first) = centers.first_mut() {
            if first.0 < half_w {
                first.0 = half_w;
            }
        }
        if let Some(last) = centers.last_mut() {
            if last.0 + half_w > total {
                last.0 = total - half_w;
            }
        }
        let required = width * T::of(1.0 + GAP_MARGIN);
        for w in centers.windows(2) {
            let gap = w[1].0 - w[0].0;
            if gap < required {
                return Err(CoreError::PulseOverlap {
                    first_s: w[0].0.as_f64(),
                    second_s: w[1].0.as_f64(),
                    gap_s: gap.as_f64(),
                    required_s: required.as_f64(),
                });
            }
        }
    }

    let pulses = centers
        .into_iter()
        .map(|(c, phase)| Pulse {
            start: c - width / T::of(2.0),
            duration: width,
            phase,
            amplitude,
        })
        .collect();

    Ok(PulseSchedule {
        pulses,
        total_duration: total,
        idealized: spec.rabi.is_none(),
    })
}

/// Smallest distance between consecutive flip positions of a layout,
/// including the wrap from the last flip of one period to the first of the
/// next (fraction of τ).
pub fn min_gap_fraction<T: Real>(layout: &CompositePulseLayout<T>) -> T {
    let pos = layout.period_positions();
    let mut min = pos[0] + T::one() - pos[pos.len() - 1];
    for w in pos.windows(2) {
        let gap = w[1] - w[0];
        if gap < min {
            min = gap;
        }
    }
    min
}

/// The modulation function F(t) of an idealized schedule: +1 at t = 0,
/// a sign flip at every pulse center.
pub fn modulation_function<T: Real>(schedule: &PulseSchedule<T>, t: T) -> CoreResult<T> {
    if t < T::zero() || t > schedule.total_duration {
        return Err(CoreError::OutOfSchedule {
            t_s: t.as_f64(),
            total_s: schedule.total_duration.as_f64(),
        });
    }
    let mut flips = 0usize;
    for p in &schedule.pulses {
        if p.center() <= t {
            flips += 1;
        }
    }
    Ok(if flips % 2 == 0 { T::one() } else { -T::one() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ControlErrorModel;

    #[test]
    fn coefficient_bound_value() {
        let b: f64 = coefficient_bound();
        let direct = (8.0 * (std::f64::consts::PI / 9.0).cos() - 4.0) / std::f64::consts::PI;
        assert!((b - direct).abs() < 1e-15);
        assert!((b - 1.1197).abs() < 1e-4);
    }

    #[test]
    fn no_pulses_is_constant_modulation() {
        let fc = fourier_coefficients::<f64>(&[], 8).unwrap();
        assert_eq!(fc.a[0], 1.0);
        for k in 1..=8 {
            assert_eq!(fc.a[k], 0.0);
            assert_eq!(fc.b[k], 0.0);
        }
    }

    #[test]
    fn cpmg_positions_first_harmonic() {
        let fc = fourier_coefficients(&[0.25, 0.75], 4).unwrap();
        assert!((fc.a[1] - 4.0 / std::f64::consts::PI).abs() < 1e-14);
        assert!(fc.a[0].abs() < 1e-14);
    }

    #[test]
    fn odd_flip_count_is_rejected() {
        assert!(fourier_coefficients::<f64>(&[0.2, 0.4, 0.6], 2).is_err());
    }

    #[test]
    fn solver_hits_target_and_suppresses_others() {
        for &f in &[0.0, 0.3, -0.6, 1.0, -1.1, 1.1] {
            let layout = solve_axy_positions::<f64>(f, 1, Parity::Even).unwrap();
            let fc = fourier_coefficients(&layout.period_positions(), 8).unwrap();
            assert!((fc.a[1] - f).abs() < 1e-9, "f = {f}: got {}", fc.a[1]);
            for k in [0usize, 2, 3, 4] {
                assert!(fc.a[k].abs() < 1e-9, "f = {f}, a[{k}] = {}", fc.a[k]);
            }
            for k in 1..=8 {
                assert!(fc.b[k].abs() < 1e-9, "f = {f}, b[{k}] = {}", fc.b[k]);
            }
        }
    }

    #[test]
    fn odd_parity_gives_pure_sine_series() {
        let layout = solve_axy_positions::<f64>(0.7, 1, Parity::Odd).unwrap();
        let fc = fourier_coefficients(&layout.period_positions(), 8).unwrap();
        assert!((fc.b[1] - 0.7).abs() < 1e-9);
        for k in 0..=8 {
            assert!(fc.a[k].abs() < 1e-9, "a[{k}] = {}", fc.a[k]);
        }
        for k in [2usize, 3, 4] {
            assert!(fc.b[k].abs() < 1e-9);
        }
    }

    #[test]
    fn out_of_range_coefficient_is_unreachable() {
        match solve_axy_positions::<f64>(1.15, 1, Parity::Even) {
            Err(CoreError::UnreachableCoefficient { .. }) => {}
            other => panic!("expected unreachable coefficient, got {other:?}"),
        }
    }

    #[test]
    fn even_harmonic_is_unsupported() {
        assert!(matches!(
            solve_axy_positions::<f64>(0.5, 2, Parity::Even),
            Err(CoreError::UnsupportedHarmonic(2))
        ));
    }

    #[test]
    fn third_harmonic_layouts_solve() {
        let layout = solve_axy_positions::<f64>(0.4, 3, Parity::Even).unwrap();
        let fc = fourier_coefficients(&layout.period_positions(), 8).unwrap();
        assert!((fc.a[3] - 0.4).abs() < 1e-9);
        assert!(fc.a[1].abs() < 1e-9);
    }

    #[test]
    fn idealized_axy8_has_forty_pulses_per_repetition() {
        let spec = AxySequenceSpec::<f64>::solve(
            AxyVariant::Axy8,
            1,
            1.45e-6,
            1,
            Parity::Even,
            0.5,
            None,
        )
        .unwrap();
        let schedule = build_schedule(&spec, &ControlErrorModel::default()).unwrap();
        assert_eq!(schedule.pulses.len(), 40);
        assert!(schedule.idealized);
        for p in &schedule.pulses {
            assert_eq!(p.duration, 0.0);
            assert_eq!(p.amplitude, 0.0);
        }
        assert!((schedule.total_duration - 4.0 * 1.45e-6).abs() < 1e-18);
    }

    #[test]
    fn finite_width_schedule_clears_gaps_at_high_rabi() {
        let spec = AxySequenceSpec::<f64>::solve(
            AxyVariant::Axy8,
            2,
            1.45e-6,
            1,
            Parity::Even,
            1.0,
            Some(2.0 * std::f64::consts::PI * 20.0e6),
        )
        .unwrap();
        let schedule = build_schedule(&spec, &ControlErrorModel::default()).unwrap();
        assert_eq!(schedule.pulses.len(), 80);
        // every pulse carries area π
        for p in &schedule.pulses {
            assert!((p.duration * p.amplitude - std::f64::consts::PI).abs() < 1e-9);
        }
    }

    #[test]
    fn low_rabi_near_bound_overlaps() {
        let spec = AxySequenceSpec::<f64>::solve(
            AxyVariant::Axy8,
            1,
            1.45e-6,
            1,
            Parity::Even,
            1.115,
            Some(2.0 * std::f64::consts::PI * 1.0e6),
        )
        .unwrap();
        match build_schedule(&spec, &ControlErrorModel::default()) {
            Err(CoreError::PulseOverlap { .. }) => {}
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn modulation_starts_positive_and_flips() {
        let spec = AxySequenceSpec::<f64>::solve(
            AxyVariant::Axy8,
            1,
            1.0,
            1,
            Parity::Even,
            0.4,
            None,
        )
        .unwrap();
        let schedule = build_schedule(&spec, &ControlErrorModel::default()).unwrap();
        assert_eq!(modulation_function(&schedule, 0.0).unwrap(), 1.0);
        let first = schedule.pulses[0].center();
        assert_eq!(modulation_function(&schedule, first + 1e-9).unwrap(), -1.0);
        assert!(modulation_function(&schedule, 4.5).is_err());
    }
}
