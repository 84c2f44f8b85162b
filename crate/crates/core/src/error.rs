use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("coefficients are not Hermitian in x (defect {defect:.3e}); cannot produce a real field")]
    NotHermitian { defect: f64 },

    #[error("unsupported derivative order {0} (expected 1, 2 or 3)")]
    UnsupportedOrder(u32),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("invalid time step {0}")]
    InvalidStep(f64),

    #[error("non-finite forcing sample at t = {t}")]
    NonFiniteForcing { t: f64 },

    #[error("non-finite grid values in {context}")]
    NonFinite { context: &'static str },

    #[error(
        "numerical blowup at t = {time}: L2 norm {norm:.3e} exceeds guard {guard:.3e} \
         (solutions are global; reduce dt)"
    )]
    Blowup { time: f64, norm: f64, guard: f64 },

    #[error(
        "contraction failed on [0, {t0}] after {iterations} iterations \
         (last ratio {last_ratio:.3e}); reduce t0"
    )]
    ContractionFailed {
        t0: f64,
        iterations: usize,
        last_ratio: f64,
    },

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("trajectory has {0} samples; at least 2 steps are required")]
    TrajectoryTooShort(usize),

    #[error("identity `{identity}` needs {needed} diagnostics, trajectory was recorded at {found}")]
    MissingDiagnostics {
        identity: String,
        needed: String,
        found: String,
    },

    #[error("invalid norm specification: {0}")]
    InvalidNorm(String),

    #[error("invalid interpolation parameters: {0}")]
    InvalidInterpolation(String),

    #[error("norm underflow at t = {t}")]
    NormUnderflow { t: f64 },

    #[error("too few samples in fit window: {found} (need {required})")]
    TooFewSamples { found: usize, required: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
