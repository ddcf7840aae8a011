use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient dimension must be at least 2, got {0}")]
    BadDimension(usize),
    #[error("a closed curve needs at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("coordinate buffer of length {len} is not a multiple of dimension {dim}")]
    Ragged { len: usize, dim: usize },
    #[error("non-finite coordinate at sample {0}")]
    NonFinite(usize),
    #[error("degenerate segment between samples {0} and {1}")]
    DegenerateSegment(usize, usize),
    #[error("planar curve is self-intersecting")]
    SelfIntersecting,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("flow lost discrete immersion at step {step} (t = {t})")]
    ImmersionLost { step: u64, t: f64 },
    #[error("graph branch extraction failed: {0}")]
    Branch(String),
    #[error("barrier hypothesis violated: {0}")]
    Barrier(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("snapshot format: {0}")]
    Snapshot(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
