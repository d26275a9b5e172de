//! Small dense solvers used by the diagnostics and the estimator.

mod feasibility;
mod frank_wolfe;
mod matrix;

pub use feasibility::{
    solve_feasibility, FeasibilityResult, FeasibilityStatus, LinearFeasibilityProblem,
    SolverConfig, CERTIFICATE_GAP, FEASIBILITY_TOL, NONNEG_TOL,
};
pub use frank_wolfe::{nnls_simplex, nnls_simplex_with, NnlsOptions, NnlsResult, StopReason};
pub use matrix::{dot, norm2, solve_dense, DenseMatrix};
