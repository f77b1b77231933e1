//! Interval min-max regret solvers for binary integer programs.
//!
//! The crate bundles everything needed to study the min-max regret version
//! of a binary program whose objective coefficients are only known to lie
//! in integer intervals `[c_lo, c_hi]`:
//!
//! * [`lp`] and [`milp`]: a bounded-variable simplex and a branch-and-bound
//!   with lazy constraints, so no external solver is needed;
//! * [`mmr`]: scenario construction, exact max-regret evaluation, the
//!   fixed-scenario heuristic, dual substitution (DS), iterated dual
//!   substitution with Hamming or best-scenario exclusion cuts (iDS), and a
//!   Benders branch-and-cut;
//! * [`problems`] and [`instances`]: knapsack, multidimensional knapsack,
//!   set covering and generalized assignment encoders, benchmark parsers,
//!   seeded generators and the native text format;
//! * [`oracle`]: exhaustive reference solver for small instances;
//! * [`bench`]: run records, gap accounting and table aggregation used by
//!   the `regret-forge` binary.

pub mod bench;
pub mod error;
pub mod instances;
pub mod lp;
pub mod milp;
pub mod mmr;
pub mod oracle;
pub mod problems;
pub mod tolerance;

pub use error::{MmrError, SolverError};
pub use lp::{ConstraintSense, Direction};
pub use mmr::{
    AlgorithmKind, AlgorithmReport, BinarySolution, BipInstance, BipRow, CutFlavor, IdsConfig,
    RegretEvaluation, ReportStatus, Scenario,
};
pub use tolerance::{TimeBudget, ToleranceSet};
