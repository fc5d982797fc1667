//! Error types shared across the solver.

use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SmpError>;

/// Everything that can go wrong while building or solving a model.
#[derive(Debug, Error)]
pub enum SmpError {
    /// A distribution was constructed with invalid parameters.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// An argument was outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is not defined for this distribution kind.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// Model validation failed; every violation found is listed.
    #[error("model validation failed ({} violation(s)):\n  {}", violations.len(), violations.join("\n  "))]
    Validation { violations: Vec<String> },

    /// Adaptive quadrature ran out of budget before reaching its tolerance.
    #[error("quadrature did not converge: achieved error {achieved:.3e}, target {target:.3e}")]
    QuadratureNonConvergence { achieved: f64, target: f64 },

    /// A numeric computation produced non-finite or out-of-range values.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A linear system was singular to working precision.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// The conditional hazard is undefined because the target is unreachable.
    #[error("hazard undefined: {0}")]
    UndefinedHazard(String),

    /// Asymptotic probabilities are undefined (e.g. infinite transition mean).
    #[error("asymptotic probabilities undefined: {0}")]
    UndefinedAsymptotics(String),

    /// A state label did not match any state of the model.
    #[error("unknown state `{0}`")]
    UnknownState(String),

    /// A solver or inversion configuration was rejected.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// An evaluator failed at a specific time point and transform node.
    #[error("evaluation failed at t={t}, node s={node}: {source}")]
    EvaluationFailed {
        t: f64,
        node: Complex64,
        #[source]
        source: Box<SmpError>,
    },
}

impl SmpError {
    /// Wrap an error with the time point and transform node it occurred at.
    pub fn at_node(self, t: f64, node: Complex64) -> Self {
        SmpError::EvaluationFailed {
            t,
            node,
            source: Box::new(self),
        }
    }
}
