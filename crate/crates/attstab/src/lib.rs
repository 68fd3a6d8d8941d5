//! Stability analysis for the linearized gravity-gradient spacecraft
//! attitude system.
//!
//! The toolkit builds the 6x6 state-space model from principal moments of
//! inertia and an orbital rate, decides polynomial and Lyapunov stability
//! through closed-form inequalities in the inertia ratios, cross-checks the
//! verdicts with an eigenvalue-plus-rank numeric classifier, constructs the
//! full parametric family of solutions to A^T P + P A = 0, and simulates
//! the system under saturated energy-based feedback.
//!
//! Modules:
//! - [`smallmat`]: dense fixed-size linear algebra and polynomial roots
//! - [`model`]: inertia ratios, orbital rate, system/transform/block matrices
//! - [`stability`]: predicates, closed-form eigenvalues, numeric classifier
//! - [`lyapunov`]: the solution family and the positive-definite search
//! - [`control`]: RK4 simulation with saturated feedback
//! - [`cli`]: the `attstab` command-line front end

pub mod cli;
pub mod control;
pub mod error;
pub mod lyapunov;
pub mod model;
pub mod smallmat;
pub mod stability;

pub use error::{Error, Result};
