use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("layer {layer}: expected {expected} inputs from the previous layer, found {found} weight columns")]
    DimensionChain {
        layer: usize,
        expected: usize,
        found: usize,
    },

    #[error("layer {layer}: {what}")]
    LayerShape { layer: usize, what: String },

    #[error("layer {layer}: non-finite value in {field}")]
    NonFinite { layer: usize, field: &'static str },

    #[error("unknown activation `{0}` (supported: relu, logistic, tanh, linear, elu)")]
    UnknownActivation(String),

    #[error("invalid activation parameter: {0}")]
    InvalidActivation(String),

    #[error("network has no layers")]
    EmptyNetwork,

    #[error("unsupported network document version {0}")]
    UnsupportedVersion(u32),

    #[error("malformed network document: {0}")]
    Malformed(String),

    #[error("radius must be finite and {requirement}, got {value}")]
    InvalidDelta {
        requirement: &'static str,
        value: f64,
    },

    #[error("invalid box in dimension {dim}: lower {lower} / upper {upper}")]
    InvalidBox { dim: usize, lower: f64, upper: f64 },

    #[error("invalid safety interval on output {dim}: {reason}")]
    InvalidSpec { dim: usize, reason: String },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("sample {index} is not contained in the reach estimate")]
    NotContained { index: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed tube table at line {line}: {reason}")]
    MalformedTubes { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
