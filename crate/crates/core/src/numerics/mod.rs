//! Numerical substrate: time grids, complex ODE integration and small dense
//! Hermitian linear algebra.

mod grid;
mod linalg;
mod ode;

pub use grid::TimeGrid;
pub use linalg::{
    hermitian_eigen, hermitian_eigenvalues, hermiticity_deviation, trace_distance, CMatrix,
    DensityMatrix, EIGEN_OFFDIAG_THRESHOLD, HERMITIAN_TOL, STATE_EIG_TOL, STATE_TRACE_TOL,
};
pub use ode::{integrate_ode, Solver, DEFAULT_TOL};

pub use num_complex::Complex64 as C64;

/// Ordered sequence of complex amplitudes.
pub type ComplexVector = Vec<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
