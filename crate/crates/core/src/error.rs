use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree overflow: degree {degree} exceeds ambient dimension {n}")]
    DegreeOverflow { degree: usize, n: usize },

    #[error("wrong degree: expected {expected}, found {found}")]
    WrongDegree { expected: String, found: usize },

    #[error("dimension {n} outside supported range {min}..={max}")]
    DimensionOutOfRange { n: usize, min: usize, max: usize },

    #[error("group {group} is not defined in dimension {n}")]
    IncompatibleGroup { group: String, n: usize },

    #[error("zero spinor has no isotropy algebra")]
    ZeroSpinor,

    #[error("cost guard: {what} has size {size}, limit is {limit}")]
    CostGuard { what: String, size: usize, limit: usize },

    #[error("point is closer than {margin} to the boundary of the chart domain")]
    DomainMargin { margin: f64 },

    #[error("metric is not positive definite at the evaluation point")]
    NonPositiveMetric,

    #[error("orthonormal frame degenerates at the evaluation point")]
    FrameDegenerate,

    #[error("unknown {kind} `{name}`; available: {}", available.join(", "))]
    UnknownName {
        kind: &'static str,
        name: String,
        available: Vec<String>,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error("serialization: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
