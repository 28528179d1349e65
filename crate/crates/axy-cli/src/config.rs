//! Declarative experiment configuration: TOML with explicit units,
//! schema-validated with unknown keys rejected.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use axy_core::dynamics::ControlErrorModel;
use axy_core::pulses::AxyVariant;
use axy_core::register::{
    InternuclearCoupling, NuclearSpin, PhysicalConstants, SpinRegister, DEFAULT_MAX_NUCLEI,
};

/// A dimensioned value; every physical number in a config carries its unit.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub enum Unit {
    #[serde(rename = "rad/s")]
    RadPerS,
    #[serde(rename = "2pi_Hz")]
    TwoPiHz,
    #[serde(rename = "2pi_kHz")]
    TwoPiKHz,
    #[serde(rename = "2pi_MHz")]
    TwoPiMHz,
    #[serde(rename = "2pi_GHz")]
    TwoPiGHz,
    #[serde(rename = "T")]
    Tesla,
    #[serde(rename = "mT")]
    MilliTesla,
    #[serde(rename = "G")]
    Gauss,
    #[serde(rename = "s")]
    Second,
    #[serde(rename = "ms")]
    MilliSecond,
    #[serde(rename = "us")]
    MicroSecond,
    #[serde(rename = "ns")]
    NanoSecond,
    #[serde(rename = "rad")]
    Radian,
    #[serde(rename = "pi_rad")]
    PiRadian,
    #[serde(rename = "deg")]
    Degree,
    #[serde(rename = "K")]
    Kelvin,
}

impl Quantity {
    pub fn angular_frequency(&self) -> Result<f64> {
        let two_pi = std::f64::consts::TAU;
        Ok(match self.unit {
            Unit::RadPerS => self.value,
            Unit::TwoPiHz => two_pi * self.value,
            Unit::TwoPiKHz => two_pi * self.value * 1e3,
            Unit::TwoPiMHz => two_pi * self.value * 1e6,
            Unit::TwoPiGHz => two_pi * self.value * 1e9,
            other => bail!("expected a frequency unit, got {other:?}"),
        })
    }

    pub fn tesla(&self) -> Result<f64> {
        Ok(match self.unit {
            Unit::Tesla => self.value,
            Unit::MilliTesla => self.value * 1e-3,
            Unit::Gauss => self.value * 1e-4,
            other => bail!("expected a field unit, got {other:?}"),
        })
    }

    pub fn seconds(&self) -> Result<f64> {
        Ok(match self.unit {
            Unit::Second => self.value,
            Unit::MilliSecond => self.value * 1e-3,
            Unit::MicroSecond => self.value * 1e-6,
            Unit::NanoSecond => self.value * 1e-9,
            other => bail!("expected a time unit, got {other:?}"),
        })
    }

    pub fn radians(&self) -> Result<f64> {
        Ok(match self.unit {
            Unit::Radian => self.value,
            Unit::PiRadian => self.value * std::f64::consts::PI,
            Unit::Degree => self.value.to_radians(),
            other => bail!("expected an angle unit, got {other:?}"),
        })
    }

    pub fn kelvin(&self) -> Result<f64> {
        match self.unit {
            Unit::Kelvin => Ok(self.value),
            other => bail!("expected a temperature unit, got {other:?}"),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub register: RegisterConfig,
    #[serde(default)]
    pub sequence: Option<SequenceConfig>,
    #[serde(default)]
    pub errors: Option<ErrorConfig>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub qec: Option<QecConfig>,
    #[serde(default)]
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub optimize: Option<OptimizeConfig>,
    #[serde(default)]
    pub filter: Option<FilterConfig>,
    #[serde(default)]
    pub soft_control: Option<SoftControlConfig>,
    #[serde(default)]
    pub abundance: Option<AbundanceConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegisterConfig {
    pub field: Quantity,
    #[serde(default = "default_ms")]
    pub m_s: i8,
    #[serde(default)]
    pub max_nuclei: Option<usize>,
    pub nuclei: Vec<NucleusConfig>,
    #[serde(default)]
    pub internuclear: Vec<InternuclearConfig>,
}

fn default_ms() -> i8 {
    -1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NucleusConfig {
    pub label: String,
    /// Either (a_perp, a_par) or the full (ax, ay, az) vector.
    #[serde(default)]
    pub a_perp: Option<Quantity>,
    #[serde(default)]
    pub a_par: Option<Quantity>,
    #[serde(default)]
    pub ax: Option<Quantity>,
    #[serde(default)]
    pub ay: Option<Quantity>,
    #[serde(default)]
    pub az: Option<Quantity>,
    /// Defaults to the 13C gyromagnetic ratio.
    #[serde(default)]
    pub gamma: Option<Quantity>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InternuclearConfig {
    pub first: usize,
    pub second: usize,
    pub strength: Quantity,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceConfig {
    #[serde(default = "default_variant")]
    pub variant: VariantConfig,
    #[serde(default = "default_kdd")]
    pub k_dd: u32,
    #[serde(default)]
    pub target: usize,
    #[serde(default = "default_axis")]
    pub axis: AxisConfig,
    #[serde(default)]
    pub angle: Option<Quantity>,
    #[serde(default)]
    pub repetitions: Option<u32>,
    #[serde(default)]
    pub rabi: Option<Quantity>,
    /// Direct coefficient target for solve-pulses/filter; otherwise derived
    /// from angle and repetitions.
    #[serde(default)]
    pub target_f: Option<f64>,
}

fn default_variant() -> VariantConfig {
    VariantConfig::Axy8
}

fn default_kdd() -> u32 {
    1
}

fn default_axis() -> AxisConfig {
    AxisConfig::X
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub enum VariantConfig {
    #[serde(rename = "axy4")]
    Axy4,
    #[serde(rename = "axy8")]
    Axy8,
}

impl VariantConfig {
    pub fn to_core(self) -> AxyVariant {
        match self {
            VariantConfig::Axy4 => AxyVariant::Axy4,
            VariantConfig::Axy8 => AxyVariant::Axy8,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub enum AxisConfig {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

impl AxisConfig {
    pub fn to_core(self) -> axy_core::gates::GateAxis {
        match self {
            AxisConfig::X => axy_core::gates::GateAxis::X,
            AxisConfig::Y => axy_core::gates::GateAxis::Y,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorConfig {
    #[serde(default)]
    pub detuning: Option<Quantity>,
    #[serde(default)]
    pub rabi_error: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub t1: Quantity,
    pub temperature: Quantity,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QecConfig {
    #[serde(default)]
    pub error_probability: f64,
    #[serde(default = "default_gate_mode")]
    pub gate_mode: GateModeConfig,
    #[serde(default = "default_averaging")]
    pub averaging: AveragingConfig,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Per-gate analytic fidelity target used to pick repetition numbers in
    /// simulated mode.
    #[serde(default = "default_gate_fidelity_target")]
    pub gate_fidelity_target: f64,
    /// Explicit per-nucleus repetition override.
    #[serde(default)]
    pub repetitions: Option<[u32; 2]>,
    #[serde(default = "default_error_type")]
    pub error_type: ErrorTypeConfig,
    /// Optional sweep over error probabilities.
    #[serde(default)]
    pub sweep_probabilities: Vec<f64>,
    /// Optional sweep over protocol length (multipliers on the repetition
    /// numbers).
    #[serde(default)]
    pub length_factors: Vec<f64>,
}

fn default_gate_mode() -> GateModeConfig {
    GateModeConfig::Ideal
}

fn default_averaging() -> AveragingConfig {
    AveragingConfig::TwoDesign
}

fn default_samples() -> usize {
    10_000
}

fn default_gate_fidelity_target() -> f64 {
    0.999
}

fn default_error_type() -> ErrorTypeConfig {
    ErrorTypeConfig::Phase
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub enum GateModeConfig {
    #[serde(rename = "ideal")]
    Ideal,
    #[serde(rename = "simulated")]
    Simulated,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub enum AveragingConfig {
    #[serde(rename = "two_design")]
    TwoDesign,
    #[serde(rename = "monte_carlo")]
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub enum ErrorTypeConfig {
    #[serde(rename = "phase")]
    Phase,
    #[serde(rename = "flip")]
    Flip,
}

impl ErrorTypeConfig {
    pub fn to_core(self) -> axy_core::qec::ErrorType {
        match self {
            ErrorTypeConfig::Phase => axy_core::qec::ErrorType::Phase,
            ErrorTypeConfig::Flip => axy_core::qec::ErrorType::Flip,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub n_min: u32,
    pub n_max: u32,
    /// Optional decoupling-frequency sweep at fixed repetitions.
    #[serde(default)]
    pub omega_min: Option<Quantity>,
    #[serde(default)]
    pub omega_max: Option<Quantity>,
    #[serde(default)]
    pub omega_points: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub fidelity_target: f64,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    /// Also simulate the selected point for a cross-check.
    #[serde(default)]
    pub simulate: bool,
}

fn default_n_max() -> u32 {
    400
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub omega_min: Quantity,
    pub omega_max: Quantity,
    pub points: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoftControlConfig {
    pub sigma_over_total: f64,
    #[serde(default = "default_sampling")]
    pub sampling: SamplingConfig,
    pub n_min: u32,
    pub n_max: u32,
}

fn default_sampling() -> SamplingConfig {
    SamplingConfig::Continuous
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
pub enum SamplingConfig {
    #[serde(rename = "continuous")]
    Continuous,
    #[serde(rename = "4tau")]
    FourTau,
    #[serde(rename = "2tau")]
    TwoTau,
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "tau_half")]
    TauHalf,
}

impl SamplingConfig {
    pub fn to_core(self) -> axy_core::analysis::SoftSampling {
        use axy_core::analysis::SoftSampling::*;
        match self {
            SamplingConfig::Continuous => Continuous,
            SamplingConfig::FourTau => FullRepetition,
            SamplingConfig::TwoTau => HalfRepetition,
            SamplingConfig::Tau => CompositePair,
            SamplingConfig::TauHalf => SingleComposite,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbundanceConfig {
    #[serde(default = "default_p13c")]
    pub p13c: f64,
    /// Thresholds to tabulate; defaults to the register's hyperfine
    /// magnitudes when empty.
    #[serde(default)]
    pub thresholds: Vec<Quantity>,
}

fn default_p13c() -> f64 {
    0.011
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub directory: Option<String>,
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.register.nuclei.is_empty() {
            bail!("register.nuclei must not be empty");
        }
        for (i, n) in self.register.nuclei.iter().enumerate() {
            let has_components = n.a_perp.is_some() && n.a_par.is_some();
            let has_vector = n.ax.is_some() && n.ay.is_some() && n.az.is_some();
            if !(has_components || has_vector) {
                bail!(
                    "register.nuclei[{i}] ('{}') needs either (a_perp, a_par) or (ax, ay, az)",
                    n.label
                );
            }
            if has_components && (n.ax.is_some() || n.ay.is_some() || n.az.is_some()) {
                bail!(
                    "register.nuclei[{i}] ('{}') mixes component and vector hyperfine forms",
                    n.label
                );
            }
        }
        if let Some(scan) = &self.scan {
            if scan.n_max < scan.n_min || scan.n_min == 0 {
                bail!("scan range [{}, {}] is empty or invalid", scan.n_min, scan.n_max);
            }
        }
        if let Some(q) = &self.qec {
            if !(0.0..=0.5).contains(&q.error_probability) {
                bail!("qec.error_probability must lie in [0, 0.5]");
            }
            for p in &q.sweep_probabilities {
                if !(0.0..=0.5).contains(p) {
                    bail!("qec.sweep_probabilities entry {p} outside [0, 0.5]");
                }
            }
        }
        if let Some(s) = &self.soft_control {
            if s.n_max < s.n_min || s.n_min == 0 {
                bail!("soft_control range [{}, {}] is empty or invalid", s.n_min, s.n_max);
            }
            if s.sigma_over_total <= 0.0 {
                bail!("soft_control.sigma_over_total must be positive");
            }
        }
        if let Some(f) = &self.filter {
            if f.points < 2 {
                bail!("filter.points must be at least 2");
            }
        }
        Ok(())
    }

    pub fn build_register(&self) -> Result<SpinRegister<f64>> {
        let constants = PhysicalConstants::<f64>::default();
        let default_gamma = constants.gamma_c13;
        let mut nuclei = Vec::with_capacity(self.register.nuclei.len());
        for n in &self.register.nuclei {
            let gamma = match &n.gamma {
                Some(g) => g.angular_frequency()?,
                None => default_gamma,
            };
            let spin = if let (Some(perp), Some(par)) = (&n.a_perp, &n.a_par) {
                NuclearSpin::from_components(
                    n.label.clone(),
                    perp.angular_frequency()?,
                    par.angular_frequency()?,
                    gamma,
                )
            } else {
                NuclearSpin::new(
                    n.label.clone(),
                    axy_core::nalgebra::Vector3::new(
                        n.ax.as_ref().unwrap().angular_frequency()?,
                        n.ay.as_ref().unwrap().angular_frequency()?,
                        n.az.as_ref().unwrap().angular_frequency()?,
                    ),
                    gamma,
                )
            };
            nuclei.push(spin);
        }
        let internuclear = self
            .register
            .internuclear
            .iter()
            .map(|c| {
                Ok(InternuclearCoupling {
                    first: c.first,
                    second: c.second,
                    strength: c.strength.angular_frequency()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SpinRegister::with_max_nuclei(
            constants,
            self.register.field.tesla()?,
            self.register.m_s,
            nuclei,
            internuclear,
            self.register.max_nuclei.unwrap_or(DEFAULT_MAX_NUCLEI),
        )
        .map_err(|e| anyhow!(e))
    }

    pub fn build_errors(&self) -> Result<ControlErrorModel<f64>> {
        match &self.errors {
            None => Ok(ControlErrorModel::default()),
            Some(e) => {
                let detuning = match &e.detuning {
                    Some(q) => q.angular_frequency()?,
                    None => 0.0,
                };
                ControlErrorModel::new(detuning, e.rabi_error.unwrap_or(0.0)).map_err(|e| anyhow!(e))
            }
        }
    }

    pub fn sequence(&self) -> Result<&SequenceConfig> {
        self.sequence
            .as_ref()
            .ok_or_else(|| anyhow!("missing [sequence] block"))
    }
}
