//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors produced by construction, analysis, and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand dimensions are incompatible (e.g. matrix product shapes).
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A matrix does not have the shape or symmetry an operation requires.
    #[error("shape error: {0}")]
    Shape(String),
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The iterative root finder hit its iteration cap.
    #[error("root finder did not converge within {0} iterations")]
    Convergence(usize),
    /// Two values that must share provenance (inertia, orbital rate) do not.
    #[error("inconsistent inputs: {0}")]
    Consistency(String),
    /// A formula was requested outside the conditions under which it holds.
    #[error("not applicable: {0}")]
    NotApplicable(String),
    /// The solution-family parameter constraint is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),
    /// The inertia ratios are degenerate for the requested construction.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    /// Integration step size fails the resolution guard.
    #[error("step size error: {0}")]
    StepSize(String),
    /// The simulated state became non-finite.
    #[error("state diverged at t = {time} s")]
    Divergence { time: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
