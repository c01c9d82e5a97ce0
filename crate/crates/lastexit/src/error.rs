use thiserror::Error;

/// Errors shared by all numerical layers of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model parameters violate a family invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// The model does not satisfy a side condition of a formula,
    /// e.g. the sign of the mean drift per unit time.
    #[error("model condition not satisfied: {0}")]
    ModelCondition(String),

    /// A stated precondition of an operation is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The bracketed root finder ran out of iterations; signals a
    /// malformed model rather than a tolerance issue.
    #[error("root finder failed to converge: {0}")]
    Convergence(String),

    /// Numerical Laplace inversion did not stabilise.
    #[error("laplace inversion failed: {0}")]
    Inversion(String),

    /// Adaptive quadrature exceeded its panel budget.
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, Error>;
