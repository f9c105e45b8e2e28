use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter-domain constraint failed. The message names the violated inequality.
    #[error("invalid parameters: {0}")]
    Validation(String),

    #[error("wave vector (0, 0) is excluded from the zero-mean lattice")]
    ZeroMode,

    #[error("grid resolution {n_g} cannot represent modes up to radius {radius} (need {required})")]
    ResolutionTooSmall {
        n_g: usize,
        radius: u32,
        required: usize,
    },

    #[error("grid resolution mismatch: expected {expected}, got {found}")]
    ResolutionMismatch { expected: usize, found: usize },

    #[error("grid resolution {0} is not a power of two >= 4")]
    BadResolution(usize),

    #[error("fields live on different mode sets")]
    ModeSetMismatch,

    #[error("scale window k <= {k_max} exceeds what resolution {n_g} supports (k_max <= {limit})")]
    ScaleWindow {
        k_max: u32,
        n_g: usize,
        limit: u32,
    },

    #[error("need at least {required} usable scales, have {found}")]
    InsufficientScales { required: usize, found: usize },

    #[error("need at least {required} samples, have {found}")]
    TooFewSamples { required: usize, found: usize },

    #[error("kernel parameter n = {n} exceeds the resolution limit n_max = {n_max:.3e}")]
    KernelTooNarrow { n: f64, n_max: f64 },

    #[error("energy exponent gamma = {0} must satisfy 0 < gamma < 2")]
    EnergyExponent(f64),

    #[error("solver unstable at t = {t:.4e}: L2 norm {norm:.3e} exceeded guard {guard:.3e} (dt = {dt:.3e})")]
    Instability {
        t: f64,
        dt: f64,
        norm: f64,
        guard: f64,
    },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 validation, 2 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::ZeroMode
            | Error::Parse(_)
            | Error::MissingInput(_)
            | Error::EnergyExponent(_)
            | Error::BadResolution(_)
            | Error::ResolutionTooSmall { .. }
            | Error::ResolutionMismatch { .. }
            | Error::ModeSetMismatch
            | Error::ScaleWindow { .. }
            | Error::KernelTooNarrow { .. } => 1,
            _ => 2,
        }
    }
}
