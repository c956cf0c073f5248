use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vertex {0} has zero degree; normalized shift operators need positive degrees")]
    IsolatedVertex(usize),
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("matrix is numerically singular (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error(
        "perturbation achieved operator norm {achieved:e}, not within 10% of target {target:e}"
    )]
    NormTargetInfeasible { target: f64, achieved: f64 },
    #[error("perturbation norm {0:e} is not below 1")]
    PerturbationTooLarge(f64),
    #[error(
        "perturbation mode {0} needs the source graph weights, but the shift operator has none"
    )]
    MissingWeights(&'static str),
    #[error("per-index filters have no scalar response")]
    NoScalarResponse,
    #[error("per-index filters have no spatial form")]
    NoSpatialForm,
    #[error("rational denominator vanishes at lambda = {0}")]
    PoleAtLambda(f64),
    #[error("rational denominator vanishes at eigenvalue {0}")]
    PoleAtEigenvalue(f64),
    #[error("denominator polynomial of the shift operator is singular")]
    SingularDenominator,
    #[error("operation requires a {expected} filter")]
    WrongVariant { expected: &'static str },
    #[error("scalar response does not declare a continuous limit at infinity")]
    DecayFlagMissing,
    #[error(
        "quadrature under-resolved: {points} points for order {order} (need at least 8 per order)"
    )]
    QuadratureUnderResolved { points: usize, order: usize },
    #[error("could not construct a near-degenerate instance: {0}")]
    DegeneracyConstructionFailed(String),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("asymmetric input: {0}")]
    AsymmetricInput(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable name of the variant, printed by the CLI on numerical failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::IsolatedVertex(_) => "IsolatedVertex",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularMatrix { .. } => "SingularMatrix",
            Error::NormTargetInfeasible { .. } => "NormTargetInfeasible",
            Error::PerturbationTooLarge(_) => "PerturbationTooLarge",
            Error::MissingWeights(_) => "MissingWeights",
            Error::NoScalarResponse => "NoScalarResponse",
            Error::NoSpatialForm => "NoSpatialForm",
            Error::PoleAtLambda(_) => "PoleAtLambda",
            Error::PoleAtEigenvalue(_) => "PoleAtEigenvalue",
            Error::SingularDenominator => "SingularDenominator",
            Error::WrongVariant { .. } => "WrongVariant",
            Error::DecayFlagMissing => "DecayFlagMissing",
            Error::QuadratureUnderResolved { .. } => "QuadratureUnderResolved",
            Error::DegeneracyConstructionFailed(_) => "DegeneracyConstructionFailed",
            Error::MalformedRow { .. } => "MalformedRow",
            Error::DuplicateEdge(..) => "DuplicateEdge",
            Error::AsymmetricInput(_) => "AsymmetricInput",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
