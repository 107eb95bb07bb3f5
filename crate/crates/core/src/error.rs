use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // geometry
    #[error("input region is unbounded")]
    UnboundedInput,
    #[error("input is not full-dimensional: {0}")]
    DegenerateInput(String),
    #[error("inconsistent polytope input: {0}")]
    InconsistentInput(String),
    #[error("point {0:?} is not on the boundary")]
    PointNotOnBoundary(Vec<f64>),

    // normalize
    #[error("matrix is not symmetric positive definite (min eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("cone has fewer than two facets")]
    DegenerateCone,
    #[error("point {0:?} is not on the (n-2)-skeleton")]
    NotOnSkeleton(Vec<f64>),
    #[error("mu = {0} is outside (0, 1)")]
    MuOutOfRange(f64),
    #[error("empty skeleton sample")]
    EmptySample,

    // spectral
    #[error("arc opening {0} is outside (0, 2pi)")]
    OpeningOutOfRange(f64),
    #[error("mesh construction failed: {0}")]
    MeshFailure(String),
    #[error("eigen iteration did not converge after {0} steps")]
    NonConvergedEigenSolve(usize),

    // solver
    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),
    #[error("boundary data admits no convex extension: {0}")]
    NonConvexData(String),
    #[error("pin shooting failed to bracket: {0}")]
    PinInfeasible(String),
    #[error("point {0:?} is outside the probe-able domain")]
    OutOfDomain(Vec<f64>),
    #[error("invalid solver parameters: {0}")]
    InvalidParams(String),

    // asymptotics
    #[error("the mixed-derivative quadratic has no real root")]
    NoRealRoot,
    #[error("leading coefficient of the mixed-derivative quadratic is positive ({0:e})")]
    WrongSignQuadratic(f64),
    #[error("fit window too small: {0}")]
    WindowTooSmall(String),
    #[error("least-squares fit is ill-conditioned (condition {0:e})")]
    FitIllConditioned(f64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    // constructions
    #[error("A-condition check failed: {0}")]
    ACheckFailed(String),
    #[error("C0 too small: {0}")]
    C0TooSmall(String),
    #[error("construction is not convex: {0}")]
    NotConvex(String),
    #[error("boundary domination failed at {0:?}")]
    BoundaryDominationFailed(Vec<f64>),
    #[error("determinant domination failed at {0:?}")]
    DeterminantDominationFailed(Vec<f64>),

    // harness
    #[error("expression error: {0}")]
    Expr(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("series {0} is missing from the result")]
    SeriesMissing(String),
    #[error("incomplete jets: {0}")]
    IncompleteJets(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("in experiment {id}: {source}")]
    Experiment { id: String, source: Box<Error> },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
