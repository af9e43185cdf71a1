use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("rotation is not proper orthogonal (deviation {deviation:.3e})")]
    NotOrthogonal { deviation: f64 },

    #[error("matrix is singular to working tolerance (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("QR iteration failed to converge after {iterations} sweeps ({unconverged} eigenvalues left, last subdiagonal {subdiagonal:.3e})")]
    NoConvergence {
        iterations: usize,
        unconverged: usize,
        subdiagonal: f64,
    },

    #[error("requested tolerance {requested:.3e} needs degree above cap {cap}; achievable tolerance is {achievable:.3e}")]
    ToleranceUnreachable {
        requested: f64,
        cap: u64,
        achievable: f64,
    },

    #[error("quadrature did not reach tolerance {requested:.3e}: achieved {achieved:.3e} ({reason})")]
    QuadratureFailure {
        requested: f64,
        achieved: f64,
        reason: String,
    },

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("inadmissible bound parameters: {0}")]
    Inadmissible(String),

    #[error("configuration has coincident points {0} and {1}; logarithmic energy is infinite")]
    InfiniteEnergy(usize, usize),

    #[error("sampler stalled: {0}")]
    SamplerStall(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
