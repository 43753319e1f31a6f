use thiserror::Error;

pub type Result<T, E = EitError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum EitError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("susceptibility denominator vanishes (Ω_c = Δ = γ21 = 0 with γ31 = 0)")]
    Singular,

    #[error(
        "|χ| = {magnitude:.4} ≥ 1 at pixel (ix={ix}, iy={iy}); outside the dilute-medium regime"
    )]
    OutOfRegime {
        ix: usize,
        iy: usize,
        magnitude: f64,
    },

    #[error("no positive cell thickness: {0}")]
    NoSolution(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unresolvable pattern: {0}")]
    Unresolved(String),

    #[error("beam is under-resolved or clipped: {0}")]
    BeamSampling(String),

    #[error("field has zero power")]
    ZeroField,

    #[error("phase undefined on circle r={radius:e}: |E| fell to {amplitude:e} (floor {floor:e})")]
    AmplitudeFloor {
        radius: f64,
        amplitude: f64,
        floor: f64,
    },

    #[error("window exceeds grid: {0}")]
    WindowOutOfGrid(String),

    #[error("diffraction order poorly isolated: window holds {0:.3} of local power")]
    PoorIsolation(f64),

    #[error("switching infeasible: {0}")]
    Infeasible(String),

    #[error("too many oracle probe frequencies: {0} (limit 10000)")]
    TooManyProbes(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed field-grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error classes, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
    Io,
}

impl EitError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            EitError::Config(_) => ErrorKind::Config,
            EitError::Io(_) | EitError::Format(_) => ErrorKind::Io,
            _ => ErrorKind::Numeric,
        }
    }
}

impl From<csv::Error> for EitError {
    fn from(e: csv::Error) -> Self {
        EitError::Io(std::io::Error::other(e))
    }
}

impl From<image::ImageError> for EitError {
    fn from(e: image::ImageError) -> Self {
        EitError::Io(std::io::Error::other(e))
    }
}
