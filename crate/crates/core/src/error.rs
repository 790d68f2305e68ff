use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("alpha*tau = {product} must be < 1 for the approximating equations (alpha = {alpha}, tau = {tau})")]
    GainDelayTooLarge { alpha: f64, tau: f64, product: f64 },

    #[error("delay tau = {tau} is not an integer multiple of the step h = {h}")]
    DelayMisaligned { tau: f64, h: f64 },

    #[error("controlled SDDE with tau > 0 requires the delayed state")]
    MissingDelayedState,

    #[error("delayed state supplied to a system that has no delay")]
    UnexpectedDelayedState,

    #[error("stationary density requires constant isotropic diffusion")]
    RequiresConstantDiffusion,

    #[error("non-finite state at step {step} (seed {seed})")]
    NonFinite { step: usize, seed: u64 },

    #[error("{aborted} of {total} trajectories aborted (limit is 1%)")]
    EnsembleFailed { aborted: usize, total: usize },

    #[error("integration domain too small: boundary density still {ratio:e} of peak after {expansions} expansions")]
    DomainTooSmall { ratio: f64, expansions: usize },

    #[error("balls of radius {epsilon} around xa and xb overlap")]
    OverlappingBalls { epsilon: f64 },

    #[error("ensemble holds no samples")]
    EmptyEnsemble,

    #[error("all {0} samples fall outside the histogram domain")]
    NoSamplesInDomain(usize),

    #[error("no samples near the desirable state; control failure")]
    ZeroOccupancy,

    #[error("histogram is identically zero")]
    DegenerateHistogram,

    #[error("convergence study needs at least 3 step sizes, got {0}")]
    TooFewStepSizes(usize),

    #[error("density grid has no analytic source to re-evaluate")]
    NotAnalytic,

    #[error("unknown figure id {0:?} (expected fig3, fig4, fig6 or fig7)")]
    UnknownFigure(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit code: 1 for configuration problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. }
            | Error::EnsembleFailed { .. }
            | Error::DomainTooSmall { .. }
            | Error::NoSamplesInDomain(_)
            | Error::ZeroOccupancy
            | Error::DegenerateHistogram
            | Error::EmptyEnsemble
            | Error::Io(_) => 2,
            _ => 1,
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
