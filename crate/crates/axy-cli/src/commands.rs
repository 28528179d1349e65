//! One function per subcommand; all of them validate their inputs fully
//! before any numerics and emit CSV/JSON through [`OutputWriter`].

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use serde::Serialize;

use axy_core::analysis::{
    coupling_abundance, filter_function, joint_detection_probability, soft_control_profile,
    soft_decoupling_efficiency,
};
use axy_core::dynamics::{calibrate_noise, NoiseModel};
use axy_core::gates::{
    gate_fidelity, ideal_gate, minimal_gate_time, optimize_gate_time, predicted_fidelity,
    required_coefficient, resonant_tau, simulate_gate, GateSpec,
};
use axy_core::pulses::{build_schedule, fourier_coefficients, AxySequenceSpec};
use axy_core::qec::{
    axis_states, Averaging, GateMode, ProtocolConfig, RepetitionCode, SimulatedGates,
};
use axy_core::register::derive_frames;

use crate::config::{
    AveragingConfig, ExperimentConfig, GateModeConfig, QecConfig, SamplingConfig,
};
use crate::output::{Cell, OutputWriter};

fn resolve_target_f(
    config: &ExperimentConfig,
    register: &axy_core::Register64,
    frames: &[axy_core::Frame64],
    tau: f64,
) -> Result<f64> {
    let seq = config.sequence()?;
    match (seq.target_f, &seq.angle) {
        (Some(f), _) => Ok(f),
        (None, Some(angle)) => {
            let total = tau
                * seq.variant.to_core().periods_per_repetition() as f64
                * seq.repetitions.unwrap_or(1) as f64;
            Ok(required_coefficient(
                register,
                frames[seq.target].g,
                angle.radians()?,
                total,
            ))
        }
        (None, None) => bail!("sequence needs either target_f or angle"),
    }
}

pub fn solve_pulses(config: &ExperimentConfig, out: &mut OutputWriter) -> Result<()> {
    let register = config.build_register()?;
    let errors = config.build_errors()?;
    let frames = derive_frames(&register)?;
    let seq = config.sequence()?;
    if seq.target >= frames.len() {
        bail!("sequence.target {} out of range", seq.target);
    }
    let tau = resonant_tau(&frames, seq.target, seq.k_dd);
    let repetitions = seq.repetitions.unwrap_or(1);
    let target_f = resolve_target_f(config, &register, &frames, tau)?;
    let rabi = seq
        .rabi
        .as_ref()
        .map(|q| q.angular_frequency())
        .transpose()?;
    let spec = AxySequenceSpec::solve(
        seq.variant.to_core(),
        repetitions,
        tau,
        seq.k_dd,
        seq.axis.to_core().parity(),
        target_f,
        rabi,
    )?;
    let schedule = build_schedule(&spec, &errors)?;

    let rows: Vec<Vec<Cell>> = schedule
        .pulses
        .iter()
        .map(|p| {
            vec![
                Cell::Num(p.start),
                Cell::Num(p.duration),
                Cell::Num(p.phase),
                Cell::Num(p.amplitude),
            ]
        })
        .collect();
    out.write_csv(
        "schedule.csv",
        &["start_s", "duration_s", "phase_rad", "amplitude_rad_per_s"],
        &rows,
    )?;

    let coeffs = fourier_coefficients(&spec.layout.period_positions(), 8)?;
    let suppressed: f64 = coeffs
        .a
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != seq.k_dd as usize && *k <= 4)
        .map(|(_, a)| a.abs())
        .chain(coeffs.b.iter().map(|b| b.abs()))
        .fold(0.0, f64::max);

    #[derive(Serialize)]
    struct PulseReport {
        variant: String,
        k_dd: u32,
        parity: String,
        target_f: f64,
        achieved_f: f64,
        residual_max: f64,
        tau_s: f64,
        repetitions: u32,
        total_duration_s: f64,
        pulse_count: usize,
        idealized: bool,
        composite_positions: Vec<f64>,
        fourier_a: Vec<f64>,
        fourier_b: Vec<f64>,
    }
    let achieved = match seq.axis.to_core().parity() {
        axy_core::pulses::Parity::Even => coeffs.a[seq.k_dd as usize],
        axy_core::pulses::Parity::Odd => coeffs.b[seq.k_dd as usize],
    };
    out.write_json(
        "pulse_report.json",
        &PulseReport {
            variant: format!("{:?}", spec.variant),
            k_dd: seq.k_dd,
            parity: format!("{:?}", spec.parity),
            target_f,
            achieved_f: achieved,
            residual_max: suppressed.max((achieved - target_f).abs()),
            tau_s: tau,
            repetitions,
            total_duration_s: schedule.total_duration,
            pulse_count: schedule.pulses.len(),
            idealized: schedule.idealized,
            composite_positions: spec.layout.positions().to_vec(),
            fourier_a: coeffs.a.clone(),
            fourier_b: coeffs.b.clone(),
        },
    )?;
    println!(
        "solve-pulses: {} pulses, residual {:.3e}",
        schedule.pulses.len(),
        suppressed.max((achieved - target_f).abs())
    );
    Ok(())
}

pub fn gate_scan(config: &ExperimentConfig, out: &mut OutputWriter) -> Result<()> {
    let register = config.build_register()?;
    let errors = config.build_errors()?;
    let frames = derive_frames(&register)?;
    let seq = config.sequence()?;
    let scan = config
        .scan
        .as_ref()
        .ok_or_else(|| anyhow!("missing [scan] block"))?;
    let angle = seq
        .angle
        .as_ref()
        .ok_or_else(|| anyhow!("sequence.angle is required for gate-scan"))?
        .radians()?;
    let spec = GateSpec::new(seq.target, seq.axis.to_core(), angle);
    let variant = seq.variant.to_core();
    let rabi = seq
        .rabi
        .as_ref()
        .map(|q| q.angular_frequency())
        .transpose()?;
    let ideal = ideal_gate(&register, &frames, &spec)?;

    if let (Some(omega_min), Some(omega_max)) = (&scan.omega_min, &scan.omega_max) {
        // decoupling-frequency sweep at fixed repetitions
        let points = scan.omega_points.unwrap_or(101);
        let repetitions = seq
            .repetitions
            .ok_or_else(|| anyhow!("sequence.repetitions is required for an omega sweep"))?;
        let lo = omega_min.angular_frequency()?;
        let hi = omega_max.angular_frequency()?;
        if !(hi > lo) {
            bail!("empty omega sweep range");
        }
        let results: Vec<Result<Vec<Cell>>> = (0..points)
            .into_par_iter()
            .map(|i| {
                let omega_dd = lo + (hi - lo) * i as f64 / (points - 1) as f64;
                let tau = std::f64::consts::TAU / omega_dd;
                let total = tau * variant.periods_per_repetition() as f64 * repetitions as f64;
                let f = required_coefficient(&register, frames[seq.target].g, angle, total);
                let seq_spec = AxySequenceSpec::solve(
                    variant,
                    repetitions,
                    tau,
                    seq.k_dd,
                    seq.axis.to_core().parity(),
                    f,
                    rabi,
                )?;
                let schedule = build_schedule(&seq_spec, &errors)?;
                let physical =
                    axy_core::dynamics::propagate_unitary(&register, &schedule, &errors)?;
                let logical = axy_core::gates::to_interaction_frame(
                    &register,
                    &frames,
                    &physical.matrix,
                    schedule.total_duration,
                )?;
                let fidelity = gate_fidelity(&logical.matrix, &ideal.matrix)?;
                Ok(vec![
                    Cell::Num(omega_dd),
                    Cell::Num(tau),
                    Cell::Num(f),
                    Cell::Num(fidelity),
                    Cell::Num(1.0 - fidelity),
                ])
            })
            .collect();
        let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
        out.write_csv(
            "gate_scan.csv",
            &["omega_dd_rad_per_s", "tau_s", "f_kdd", "simulated_fidelity", "infidelity"],
            &rows,
        )?;
        return Ok(());
    }

    let ns: Vec<u32> = (scan.n_min..=scan.n_max).collect();
    if ns.is_empty() {
        bail!("empty scan range");
    }
    let results: Vec<(u32, axy_core::CoreResult<Vec<Cell>>)> = ns
        .par_iter()
        .map(|&n| {
            let row = simulate_gate(&register, &spec, variant, seq.k_dd, n, rabi, &errors)
                .and_then(|sim| {
                    let simulated = gate_fidelity(&sim.unitary.matrix, &ideal.matrix)?;
                    let predicted =
                        predicted_fidelity(&register, &spec, variant, seq.k_dd, n, sim.spec.tau)?;
                    Ok(vec![
                        Cell::Int(n as i64),
                        Cell::Num(sim.spec.tau),
                        Cell::Num(sim.spec.target_f),
                        Cell::Num(predicted),
                        Cell::Num(simulated),
                        Cell::Num(1.0 - simulated),
                    ])
                });
            (n, row)
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for (n, row) in results {
        match row {
            Ok(r) => rows.push(r),
            // points too short for the requested angle drop out of the scan
            Err(
                e @ (axy_core::CoreError::UnreachableCoefficient { .. }
                | axy_core::CoreError::PulseOverlap { .. }),
            ) => eprintln!("gate-scan: skipping N = {n}: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    if rows.is_empty() {
        bail!("no scan point was compilable");
    }
    let best = rows
        .iter()
        .map(|r| match r[5] {
            Cell::Num(v) => v,
            _ => f64::NAN,
        })
        .fold(f64::INFINITY, f64::min);
    out.write_csv(
        "gate_scan.csv",
        &[
            "n",
            "tau_s",
            "f_kdd",
            "predicted_fidelity",
            "simulated_fidelity",
            "infidelity",
        ],
        &rows,
    )?;
    println!("gate-scan: best infidelity {best:.3e}");
    Ok(())
}

pub fn optimize_time(config: &ExperimentConfig, out: &mut OutputWriter) -> Result<()> {
    let register = config.build_register()?;
    let errors = config.build_errors()?;
    let frames = derive_frames(&register)?;
    let seq = config.sequence()?;
    let opt = config
        .optimize
        .as_ref()
        .ok_or_else(|| anyhow!("missing [optimize] block"))?;
    let angle = seq
        .angle
        .as_ref()
        .ok_or_else(|| anyhow!("sequence.angle is required for optimize-time"))?
        .radians()?;
    let spec = GateSpec::new(seq.target, seq.axis.to_core(), angle);
    let variant = seq.variant.to_core();
    let result = optimize_gate_time(
        &register,
        &spec,
        variant,
        seq.k_dd,
        opt.fidelity_target,
        opt.n_max,
    )?;
    let t_min = minimal_gate_time(&frames, seq.target, angle);

    let simulated_fidelity = if opt.simulate {
        let rabi = seq
            .rabi
            .as_ref()
            .map(|q| q.angular_frequency())
            .transpose()?;
        let sim = simulate_gate(
            &register,
            &spec,
            variant,
            seq.k_dd,
            result.repetitions,
            rabi,
            &errors,
        )?;
        let ideal = ideal_gate(&register, &frames, &spec)?;
        Some(gate_fidelity(&sim.unitary.matrix, &ideal.matrix)?)
    } else {
        None
    };

    #[derive(Serialize)]
    struct OptimizeReport {
        fidelity_target: f64,
        repetitions: u32,
        tau_s: f64,
        f_kdd: f64,
        predicted_fidelity: f64,
        total_duration_s: f64,
        minimal_duration_s: f64,
        time_ratio: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        simulated_fidelity: Option<f64>,
    }
    let report = OptimizeReport {
        fidelity_target: opt.fidelity_target,
        repetitions: result.repetitions,
        tau_s: result.tau,
        f_kdd: result.f_kdd,
        predicted_fidelity: result.predicted_fidelity,
        total_duration_s: result.total_duration,
        minimal_duration_s: t_min,
        time_ratio: result.total_duration / t_min,
        simulated_fidelity,
    };
    out.write_json("optimize_report.json", &report)?;
    println!(
        "optimize-time: N = {}, T = {:.4e} s, T/T_min = {:.3}",
        result.repetitions, result.total_duration, report.time_ratio
    );
    Ok(())
}

fn qec_noise(config: &ExperimentConfig) -> Result<Option<NoiseModel<f64>>> {
    match &config.noise {
        None => Ok(None),
        Some(n) => {
            let register = config.build_register()?;
            let c = &register.constants;
            Ok(Some(calibrate_noise(
                n.t1.seconds()?,
                n.temperature.kelvin()?,
                register.nv_transition_frequency(),
                c.hbar,
                c.k_b,
            )?))
        }
    }
}

fn qec_gate_mode(
    config: &ExperimentConfig,
    qec: &QecConfig,
    code: &RepetitionCode<f64>,
    length_factor: f64,
) -> Result<GateMode<f64>> {
    match qec.gate_mode {
        GateModeConfig::Ideal => Ok(GateMode::Ideal),
        GateModeConfig::Simulated => {
            let seq = config.sequence()?;
            let rabi = seq
                .rabi
                .as_ref()
                .ok_or_else(|| anyhow!("sequence.rabi is required for simulated gates"))?
                .angular_frequency()?;
            let errors = config.build_errors()?;
            let variant = seq.variant.to_core();
            let base = match qec.repetitions {
                Some(reps) => reps,
                None => {
                    // speed-optimized: smallest N per nucleus meeting the
                    // analytic per-gate fidelity target
                    let mut reps = [0u32; 2];
                    for target in 0..2 {
                        let spec = GateSpec::new(
                            target,
                            axy_core::gates::GateAxis::X,
                            std::f64::consts::FRAC_PI_2,
                        );
                        let opt = optimize_gate_time(
                            code.register(),
                            &spec,
                            variant,
                            seq.k_dd,
                            qec.gate_fidelity_target,
                            400,
                        )?;
                        reps[target] = opt.repetitions;
                    }
                    reps
                }
            };
            let scaled = [
                ((base[0] as f64 * length_factor).round() as u32).max(1),
                ((base[1] as f64 * length_factor).round() as u32).max(1),
            ];
            Ok(GateMode::Simulated(SimulatedGates {
                variant,
                k_dd: seq.k_dd,
                rabi,
                errors,
                repetitions: scaled,
            }))
        }
    }
}

pub fn qec(config: &ExperimentConfig, out: &mut OutputWriter, seed: u64) -> Result<()> {
    let register = config.build_register()?;
    let qec_cfg = config
        .qec
        .as_ref()
        .ok_or_else(|| anyhow!("missing [qec] block"))?;
    let code = RepetitionCode::new(register)?;
    let noise = qec_noise(config)?;
    let error_type = qec_cfg.error_type.to_core();

    let averaging = match qec_cfg.averaging {
        AveragingConfig::TwoDesign => Averaging::TwoDesignExact,
        AveragingConfig::MonteCarlo => Averaging::HaarMonteCarlo {
            samples: qec_cfg.samples,
            seed,
        },
    };
    let gate_mode = qec_gate_mode(config, qec_cfg, &code, 1.0)?;
    let protocol = ProtocolConfig {
        gate_mode,
        error_probability: qec_cfg.error_probability,
        noise,
        averaging,
        error_type,
    };

    let average = code.average_correction_fidelity(&protocol)?;
    let table = code.derive_syndrome_table(error_type)?;

    // per-input-state syndrome statistics for the report
    let mut states = Vec::new();
    if matches!(qec_cfg.averaging, AveragingConfig::TwoDesign) {
        for (name, psi) in axis_states::<f64>() {
            let outcome = code.run_protocol(&protocol, &psi)?;
            states.push(StateReport {
                state: name,
                fidelity: outcome.fidelity,
                syndrome_probabilities: outcome
                    .syndrome_probabilities
                    .iter()
                    .map(|((s1, s2), p)| SyndromeProb {
                        syndrome: format!("{s1}{s2}"),
                        probability: *p,
                    })
                    .collect(),
            });
        }
    }

    #[derive(Serialize)]
    struct SyndromeProb {
        syndrome: String,
        probability: f64,
    }
    #[derive(Serialize)]
    struct StateReport {
        state: String,
        fidelity: f64,
        syndrome_probabilities: Vec<SyndromeProb>,
    }
    #[derive(Serialize)]
    struct TableRow {
        error: String,
        decoded: String,
        syndrome: String,
        recovery: String,
    }
    #[derive(Serialize)]
    struct NoiseReport {
        t1_s: f64,
        temperature_k: f64,
        omega_nv_rad_per_s: f64,
        mean_photon_number: f64,
        lambda_rad_per_s: f64,
    }
    #[derive(Serialize)]
    struct QecReport {
        error_probability: f64,
        gate_mode: String,
        error_type: String,
        averaging: String,
        average_fidelity: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        std_error: Option<f64>,
        single_error_probability: f64,
        syndrome_table: Vec<TableRow>,
        #[serde(skip_serializing_if = "Option::is_none")]
        noise: Option<NoiseReport>,
        states: Vec<StateReport>,
    }

    let report = QecReport {
        error_probability: qec_cfg.error_probability,
        gate_mode: format!("{:?}", qec_cfg.gate_mode),
        error_type: format!("{:?}", qec_cfg.error_type),
        averaging: format!("{:?}", qec_cfg.averaging),
        average_fidelity: average.fidelity,
        std_error: average.std_error,
        single_error_probability: axy_core::qec::single_error_probability(
            qec_cfg.error_probability,
        ),
        syndrome_table: table
            .entries
            .iter()
            .map(|e| TableRow {
                error: e.error.clone(),
                decoded: e.decoded.clone(),
                syndrome: format!("{}{}", e.syndrome.0, e.syndrome.1),
                recovery: e.recovery.clone(),
            })
            .collect(),
        noise: noise.map(|n| NoiseReport {
            t1_s: n.t1,
            temperature_k: n.temperature,
            omega_nv_rad_per_s: n.omega_nv,
            mean_photon_number: n.n_mean,
            lambda_rad_per_s: n.lambda,
        }),
        states,
    };
    out.write_json("qec_report.json", &report)?;

    // optional sweep over error probability and protocol length
    let probabilities = if qec_cfg.sweep_probabilities.is_empty() {
        vec![qec_cfg.error_probability]
    } else {
        qec_cfg.sweep_probabilities.clone()
    };
    let factors = if qec_cfg.length_factors.is_empty() {
        vec![1.0]
    } else {
        qec_cfg.length_factors.clone()
    };
    if probabilities.len() > 1 || factors.len() > 1 {
        let mut rows = Vec::new();
        for &factor in &factors {
            let gate_mode = qec_gate_mode(config, qec_cfg, &code, factor)?;
            let reps = match &gate_mode {
                GateMode::Simulated(s) => s.repetitions,
                GateMode::Ideal => [0, 0],
            };
            for &p in &probabilities {
                let protocol = ProtocolConfig {
                    gate_mode: gate_mode.clone(),
                    error_probability: p,
                    noise,
                    averaging,
                    error_type,
                };
                let avg = code.average_correction_fidelity(&protocol)?;
                rows.push(vec![
                    Cell::Num(p),
                    Cell::Num(factor),
                    Cell::Int(reps[0] as i64),
                    Cell::Int(reps[1] as i64),
                    Cell::Num(avg.fidelity),
                    Cell::Num(avg.std_error.unwrap_or(0.0)),
                ]);
            }
        }
        out.write_csv(
            "qec_sweep.csv",
            &[
                "p",
                "length_factor",
                "reps_nucleus_1",
                "reps_nucleus_2",
                "average_fidelity",
                "std_error",
            ],
            &rows,
        )?;
    }
    println!("qec: average correction fidelity {:.6}", average.fidelity);
    Ok(())
}

pub fn filter(config: &ExperimentConfig, out: &mut OutputWriter) -> Result<()> {
    let register = config.build_register()?;
    let errors = config.build_errors()?;
    let frames = derive_frames(&register)?;
    let seq = config.sequence()?;
    let filter_cfg = config
        .filter
        .as_ref()
        .ok_or_else(|| anyhow!("missing [filter] block"))?;
    let tau = resonant_tau(&frames, seq.target, seq.k_dd);
    let target_f = resolve_target_f(config, &register, &frames, tau)?;
    let spec = AxySequenceSpec::solve(
        seq.variant.to_core(),
        seq.repetitions.unwrap_or(1),
        tau,
        seq.k_dd,
        seq.axis.to_core().parity(),
        target_f,
        None,
    )?;
    let schedule = build_schedule(&spec, &errors)?;
    let t = schedule.total_duration;
    let lo = filter_cfg.omega_min.angular_frequency()?;
    let hi = filter_cfg.omega_max.angular_frequency()?;
    if !(hi > lo) {
        bail!("empty filter frequency range");
    }
    let mut rows = Vec::with_capacity(filter_cfg.points);
    for i in 0..filter_cfg.points {
        let omega = lo + (hi - lo) * i as f64 / (filter_cfg.points - 1) as f64;
        let r = filter_function(&schedule, omega, t)?;
        rows.push(vec![
            Cell::Num(omega),
            Cell::Num(r.phi_x),
            Cell::Num(r.phi_y),
            Cell::Num(r.phi_tot),
        ]);
    }
    out.write_csv(
        "filter.csv",
        &["omega_rad_per_s", "phi_x_s", "phi_y_s", "phi_tot_s"],
        &rows,
    )?;
    Ok(())
}

pub fn soft_control(config: &ExperimentConfig, out: &mut OutputWriter) -> Result<()> {
    let register = config.build_register()?;
    let frames = derive_frames(&register)?;
    let seq = config.sequence()?;
    let soft = config
        .soft_control
        .as_ref()
        .ok_or_else(|| anyhow!("missing [soft_control] block"))?;
    let angle = seq
        .angle
        .as_ref()
        .ok_or_else(|| anyhow!("sequence.angle is required for soft-control"))?
        .radians()?;
    let repetitions = seq
        .repetitions
        .ok_or_else(|| anyhow!("sequence.repetitions is required for soft-control"))?;
    let tau = resonant_tau(&frames, seq.target, seq.k_dd);
    let periods = seq.variant.to_core().periods_per_repetition() as f64;
    let total = tau * periods * repetitions as f64;
    let sigma = soft.sigma_over_total * total;
    // rotation rate per unit coefficient: |m_s| g_n / 4
    let c_n = frames[seq.target].g / 4.0;
    let profile = soft_control_profile(angle, total, sigma, c_n, tau, soft.sampling.to_core())?;

    #[derive(Serialize)]
    struct SoftReport {
        theta_rad: f64,
        total_s: f64,
        sigma_s: f64,
        f0: f64,
        sampling: String,
        coefficients: Vec<f64>,
    }
    out.write_json(
        "soft_profile.json",
        &SoftReport {
            theta_rad: profile.theta,
            total_s: profile.total,
            sigma_s: profile.sigma,
            f0: profile.f0,
            sampling: format!("{:?}", profile.sampling),
            coefficients: profile.coefficients.clone(),
        },
    )?;

    // decoupling-efficiency product over spectators, constant vs soft
    let target_frame = &frames[seq.target];
    let mut rows = Vec::new();
    for n in soft.n_min..=soft.n_max {
        let t_n = tau * periods * n as f64;
        let bins = match soft.sampling {
            SamplingConfig::Continuous => 512,
            s => {
                let frac: f64 = s
                    .to_core()
                    .bin_fraction::<f64>()
                    .expect("non-continuous sampling");
                ((periods * n as f64) / frac).round() as usize
            }
        };
        let mut d_const = 1.0;
        let mut d_soft = 1.0;
        for (j, f) in frames.iter().enumerate() {
            if j == seq.target {
                continue;
            }
            let vartheta = (f.omega - target_frame.omega) * t_n / 2.0;
            let g_ratio = f.g / target_frame.g;
            d_const *= soft_decoupling_efficiency(vartheta, g_ratio, angle, None, 1);
            d_soft *= soft_decoupling_efficiency(
                vartheta,
                g_ratio,
                angle,
                Some(soft.sigma_over_total),
                bins,
            );
        }
        rows.push(vec![
            Cell::Int(n as i64),
            Cell::Num(t_n),
            Cell::Num(d_const),
            Cell::Num(d_soft),
        ]);
    }
    out.write_csv(
        "soft_control.csv",
        &["n", "total_s", "d_constant", "d_soft"],
        &rows,
    )?;
    Ok(())
}

pub fn abundance(config: &ExperimentConfig, out: &mut OutputWriter) -> Result<()> {
    let register = config.build_register()?;
    let abundance_cfg = config
        .abundance
        .as_ref()
        .ok_or_else(|| anyhow!("missing [abundance] block"))?;
    let thresholds: Vec<f64> = if abundance_cfg.thresholds.is_empty() {
        register
            .nuclei
            .iter()
            .map(|n| n.hyperfine.norm())
            .collect()
    } else {
        abundance_cfg
            .thresholds
            .iter()
            .map(|q| q.angular_frequency())
            .collect::<Result<Vec<_>>>()?
    };
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    for &a in &thresholds {
        let n = coupling_abundance(a, abundance_cfg.p13c, &register.constants)?;
        counts.push(n);
        rows.push(vec![
            Cell::Num(a),
            Cell::Num(a / (std::f64::consts::TAU * 1e3)),
            Cell::Num(n),
        ]);
    }
    out.write_csv(
        "abundance.csv",
        &["a_threshold_rad_per_s", "a_threshold_2pi_khz", "expected_count"],
        &rows,
    )?;
    #[derive(Serialize)]
    struct AbundanceReport {
        p13c: f64,
        expected_counts: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        joint_detection_probability: Option<f64>,
    }
    out.write_json(
        "abundance_report.json",
        &AbundanceReport {
            p13c: abundance_cfg.p13c,
            expected_counts: counts.clone(),
            joint_detection_probability: (counts.len() >= 2)
                .then(|| joint_detection_probability(counts[0], counts[1])),
        },
    )?;
    Ok(())
}
