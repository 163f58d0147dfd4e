//! Dense linear algebra and linear programming used by every other module.

mod general_eigen;
mod matrix;
mod simplex;
mod sym_eigen;

pub use general_eigen::{general_eigenvalues, max_real_part};
pub use matrix::{Matrix, SymMatrix};
pub use simplex::{solve_lp, Constraint, LinearProgram, LpSolution, LpStatus, Relation, VarBounds};
pub use sym_eigen::{lambda_max, symmetric_eigen, Spectrum};
