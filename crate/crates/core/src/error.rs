use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sequence")]
    EmptySequence,

    #[error("duplicate node index {0}")]
    DuplicateIndex(i64),

    #[error("non-finite coordinate at node {0}")]
    NonFinite(i64),

    #[error("nodes {0} and {1} coincide (zero separation)")]
    CoincidentNodes(i64, i64),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("exponent p = {0} outside (1, inf); for p = inf or 0 < p <= 1 there are no complete interpolating sequences")]
    InvalidExponent(f64),

    #[error("generating function overflowed at z = {re}{im:+}i despite rescaling")]
    Overflow { re: f64, im: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("square Q_{j} centred at {center} with half-side {r} contains no node")]
    EmptySquare { j: i64, center: f64, r: f64 },

    #[error("no circle point brackets |S'(gamma_{j})| = {target:.6e}: circle min {min:.6e}, max {max:.6e}")]
    Bracketing {
        j: i64,
        min: f64,
        max: f64,
        target: f64,
    },

    #[error("unknown node index {0}")]
    UnknownIndex(i64),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("data norm is zero")]
    ZeroDataNorm,

    #[error("nonpositive or non-finite weight {value} at position {pos}")]
    BadWeight { pos: usize, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the input data rather than by how the
    /// toolkit was invoked.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::EmptySequence
                | Error::DuplicateIndex(_)
                | Error::NonFinite(_)
                | Error::CoincidentNodes(..)
                | Error::UnknownIndex(_)
                | Error::Parse(_)
                | Error::Csv(_)
                | Error::BadWeight { .. }
                | Error::ZeroDataNorm
        )
    }
}
