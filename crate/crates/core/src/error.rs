use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// Evaluation requested at a point where the integrand is singular.
    #[error("evaluation at a singular point: {0}")]
    SingularPoint(String),

    /// A quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {value}, error bound {error_bound}, requested {requested}")]
    NonConvergence {
        value: f64,
        error_bound: f64,
        requested: f64,
    },

    /// The model/parameter combination fails the existence criteria.
    #[error("existence precondition violated: {0}")]
    ExistencePrecondition(String),

    /// A simulation scheme was asked to handle a model it cannot represent.
    #[error("unsupported model for this scheme: {0}")]
    UnsupportedModel(String),

    /// Covariance factorization failed even after regularization.
    #[error("covariance matrix is not numerically positive definite")]
    NotPositiveDefinite,

    /// A probe time is absent from the ensemble grid.
    #[error("time {0} is not on the ensemble grid")]
    TimeNotOnGrid(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
