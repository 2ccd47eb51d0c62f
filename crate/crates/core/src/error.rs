use thiserror::Error;

/// Errors surfaced by the model's geometry, solvers and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a (near-)zero vector, norm = {norm}")]
    ZeroVector { norm: f64 },

    #[error("distance vector undefined for (near-)antipodal points, dot = {dot}")]
    AntipodalSingularity { dot: f64 },

    #[error("final-spin combination is degenerate, norm = {norm}")]
    DegenerateCombination { norm: f64 },

    #[error("no consistent outcome pair to resolve")]
    EmptySet,

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("outside the supported regime: {0}")]
    RegimeViolation(String),

    #[error("unsupported domain: {0}")]
    DomainError(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("Picard iteration did not converge after {iters} iterations, residual = {residual}")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("converged trajectory realizes ({realized_a},{realized_b}) instead of the seeded outcome")]
    SeedInconsistent { realized_a: i8, realized_b: i8 },

    #[error("decomposition basis is (near-)degenerate, det = {det}")]
    DegenerateBasis { det: f64 },

    #[error("no samples fell into the conditioning bin")]
    EmptyBin,

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
