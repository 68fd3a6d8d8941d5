//! Self-contained dense linear algebra and polynomial-root kernel.
//!
//! Everything here is sized for the 6x6 systems this toolkit works with:
//! row-major dense storage, Gaussian elimination with partial pivoting,
//! Cholesky for definiteness tests, Faddeev-LeVerrier characteristic
//! polynomials, and a Durand-Kerner root finder. No external numerical
//! dependencies.

mod complex;
mod matrix;
mod poly;

pub use complex::Complex;
pub use matrix::{ComplexMatrix, Matrix};
pub use poly::{poly_roots, solve_quadratic, PolyCoeffs};
