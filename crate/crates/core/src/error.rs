use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {x} lies outside the domain [0, 1]")]
    Domain { x: f64 },

    #[error("element index {element} out of range (mesh has {count} elements)")]
    ElementOutOfRange { element: usize, count: usize },

    #[error("moment order {requested} exceeds supported maximum {max}")]
    UnsupportedMomentOrder { requested: usize, max: usize },

    #[error("stiffness rule {rule} under-integrates degree {degree}; pass the unsafe-rule flag to allow it")]
    UnderIntegratedStiffness { rule: String, degree: usize },

    #[error("matrix is not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dense materialization of dimension {dim} exceeds limit {max}")]
    Oversize { dim: usize, max: usize },

    #[error("mass symbol is not positive at wavenumber {theta}")]
    SymbolDegenerate { theta: f64 },

    #[error("no dispersion root in (0, pi) for Lambda = {lambda}")]
    OutOfBand { lambda: f64 },

    #[error("degenerate stencil symbol: {0}")]
    DegenerateSymbol(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("closed-form mismatch for {rule}: computed {computed}, published {published}")]
    ClosedFormMismatch {
        rule: String,
        computed: String,
        published: String,
    },

    #[error("mode {mode} cannot be resolved with {dofs} degrees of freedom")]
    UnresolvableMode { mode: usize, dofs: usize },

    #[error("order fit needs at least 3 rows, got {0}")]
    TooFewRows(usize),

    #[error("eigenpair refinement failed: {0}")]
    Refinement(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotPositiveDefinite { .. }
            | Error::SymbolDegenerate { .. }
            | Error::OutOfBand { .. }
            | Error::DegenerateSymbol(_)
            | Error::NoSolution(_)
            | Error::Refinement(_) => 3,
            Error::ClosedFormMismatch { .. } => 4,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
