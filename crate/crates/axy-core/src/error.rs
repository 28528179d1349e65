use thiserror::Error;

/// Errors produced by the compilation and simulation core.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("unaddressable spin '{label}': hyperfine vector is parallel to the effective Larmor axis (orthogonal coupling {g_rad_s:.3e} rad/s below tolerance)")]
    UnaddressableSpin { label: String, g_rad_s: f64 },

    #[error("register too large: {nuclei} nuclei exceeds the configured maximum of {max}")]
    DimensionOverflow { nuclei: usize, max: usize },

    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unreachable coefficient: |f| = {requested:.6} is outside the attainable open interval (-{bound:.6}, {bound:.6}) for harmonic {harmonic}")]
    UnreachableCoefficient {
        requested: f64,
        bound: f64,
        harmonic: u32,
    },

    #[error("unsupported harmonic k = {0}: this composite structure pumps harmonics 1 and 3 only (even harmonics vanish identically)")]
    UnsupportedHarmonic(u32),

    #[error("solver failed: best residual {residual:.3e} after {iterations} iterations from all starting points")]
    SolverFailed { residual: f64, iterations: usize },

    #[error("pulse overlap: centers at {first_s:.6e} s and {second_s:.6e} s are {gap_s:.3e} s apart but {required_s:.3e} s is required at this Rabi frequency")]
    PulseOverlap {
        first_s: f64,
        second_s: f64,
        gap_s: f64,
        required_s: f64,
    },

    #[error("time {t_s:.6e} s outside the schedule domain [0, {total_s:.6e}] s")]
    OutOfSchedule { t_s: f64, total_s: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not Hermitian")]
    NotHermitian,

    #[error("matrix is not a density operator: {reason}")]
    NotDensity { reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("resonance mismatch: harmonic {harmonic} of the sequence does not hit the target Larmor frequency; required tau = {required_tau_s:.9e} s, got {actual_tau_s:.9e} s")]
    ResonanceMismatch {
        harmonic: u32,
        required_tau_s: f64,
        actual_tau_s: f64,
    },

    #[error("uncalibratable noise model: {0}")]
    Uncalibratable(String),

    #[error("infeasible target: no repetition count up to {n_max} reaches the requested fidelity; best {best:.6} at N = {best_n}")]
    InfeasibleTarget { n_max: u32, best: f64, best_n: u32 },

    #[error("amplitude bound exceeded: |f0| = {f0:.6} is not below {bound:.6}")]
    AmplitudeBound { f0: f64, bound: f64 },

    #[error("degenerate code: syndrome {syndrome:?} is shared by branches requiring distinct recoveries")]
    DegenerateCode { syndrome: (u8, u8) },
}

pub type CoreResult<V> = Result<V, CoreError>;
