//! Linear programming kernel.

mod model;
pub(crate) mod simplex;

pub use model::{ConstraintSense, Direction, LinearConstraint, LpModel, VarBounds};
pub use simplex::{lp_dual_objective, solve_lp, LpSolution, LpStatus};
