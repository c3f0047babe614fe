use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate cut in cell {cell}: {reason}")]
    DegenerateCut { cell: usize, reason: String },

    #[error("ghost-face path assumption violated: {0}")]
    PathAssumption(String),

    #[error("invalid quadrature request: {0}")]
    InvalidQuadrature(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: String, message: String },

    #[error("final time {t_final} is not an integer multiple of the step {k}")]
    NonIntegerSteps { t_final: f64, k: f64 },

    #[error("refinement levels are not nested: {0}")]
    NonNestedLevels(String),

    #[error("matrix is singular at pivot {0}")]
    SingularMatrix(usize),

    #[error("linear solve residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    SolveResidual { residual: f64, tolerance: f64 },

    #[error("displacement/velocity constraint violated: residual {residual:.3e} at step {step}")]
    ConstraintViolation { step: usize, residual: f64 },

    #[error("problem too large: {0} (pass the override flag to proceed)")]
    TooLarge(String),

    #[error("unknown {kind} `{name}`; known: {known}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("sparse backend failure: {0}")]
    Backend(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
