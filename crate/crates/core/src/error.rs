use thiserror::Error;

/// Errors produced by the model and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SirError {
    /// A constructor argument violated its domain (sign, finiteness).
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// `x + y` vanished where the incidence term `b x y / (x + y)` is needed.
    #[error("degenerate denominator: x + y = 0")]
    DegenerateDenominator,

    /// The implicit solve of the reference discrete scheme hit a zero pivot.
    #[error("division by zero in flawed scheme at step {step}: (1 + c)(x + y) - b x = 0")]
    DivisionByZero { step: usize },

    /// A closed form was asked for parameters it does not cover.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The requested scheme cannot be used in this context.
    #[error("scheme error: {0}")]
    Scheme(String),

    /// Adaptive quadrature ran out of its subdivision budget.
    #[error("quadrature did not converge to {tol:e} within {budget} subdivisions")]
    QuadratureNonconvergence { tol: f64, budget: usize },

    /// An iterative limit computation hit its iteration cap.
    #[error("no convergence after {iterations} iterations (last deficit {deficit:e})")]
    Nonconvergence { iterations: usize, deficit: f64 },
}

pub type Result<T> = std::result::Result<T, SirError>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> SirError {
    SirError::InvalidInput { field, reason: reason.into() }
}
