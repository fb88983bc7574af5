use thiserror::Error;

/// Grid location attached to pointwise failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(i={}, j={}, u={:.6}, v={:.6})", self.i, self.j, self.u, self.v)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid field `{name}`: {reason}")]
    InvalidField { name: String, reason: String },
    #[error("grid index ({i}, {j}) out of range")]
    IndexOutOfRange { i: usize, j: usize },
    #[error("operation requires case {expected}, got {got}")]
    WrongCase { expected: String, got: String },
    #[error("case {0} is not supported by this construction")]
    UnsupportedCase(String),
    #[error("degenerate Delta at {at}: |Delta| = {value:e}")]
    DegenerateDelta { at: Location, value: f64 },
    #[error("hypothesis `{hypothesis}` violated at {at}: residual {residual:e}")]
    HypothesisViolated {
        hypothesis: String,
        at: Location,
        residual: f64,
    },
    #[error("f/L0 must be positive, got {value:e} at {at}")]
    SignMismatch { at: Location, value: f64 },
    #[error("P_v - Q_u = {residual:e} at {at}")]
    IncompatiblePair { at: Location, residual: f64 },
    #[error("initial frame fails normalization: max residual {residual:e}")]
    InvalidInitialFrame { residual: f64 },
    #[error("non-finite frame state at {at}")]
    NonFiniteState { at: Location },
    #[error("degenerate frame at {at}: e^(2 lambda) = {value:e}")]
    DegenerateFrame { at: Location, value: f64 },
    #[error("Liouville residual {residual:e} at {at}")]
    LiouvilleViolated { at: Location, residual: f64 },
    #[error("grid reaches the singular circle at {at}")]
    DomainViolation { at: Location },
    #[error("matrix does not preserve the Minkowski form: residual {residual:e}")]
    NonLorentz { residual: f64 },
    #[error("connection form fails the required symmetries: residual {residual:e}")]
    SymmetryViolated { residual: f64 },
    #[error("p vanishes at {at}; the isotropy relation cannot be tested there")]
    TotallyGeodesicRegion { at: Location },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
