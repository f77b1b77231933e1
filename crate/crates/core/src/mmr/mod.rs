//! Interval min-max regret algorithms.
//!
//! For a feasible `x` the maximum regret is attained at the extreme scenario
//! [`worst_scenario`] and is computed exactly by [`evaluate_max_regret`]. The
//! algorithms all return an [`AlgorithmReport`]; running out of budget or
//! meeting an empty feasible region is expressed through
//! [`ReportStatus`], while invalid input and solver failures are errors.

mod bc;
mod ds;
mod fixed;
mod ids;
mod regret;
mod scenario;
mod types;

pub use bc::{branch_and_cut, local_exact_refine, ShellSearch};
pub use ds::{build_ds_model, dual_substitution, DsLayout};
pub use fixed::fixed_scenario;
pub use ids::iterated_ds;
pub use regret::{evaluate_max_regret, slave_problem};
pub use scenario::{
    best_scenario, best_scenario_cut, dominance_holds, hamming_cut, worst_scenario,
};
pub use types::{
    AlgorithmKind, AlgorithmReport, BinarySolution, BipInstance, BipRow, CutFlavor, IdsConfig,
    RegretEvaluation, ReportStatus, Scenario, TraceEntry,
};

use crate::error::MmrError;
use crate::tolerance::TimeBudget;

/// Settings shared by [`run_algorithm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub budget: TimeBudget,
    /// Hamming radius for `ids-h`.
    pub d: u32,
    pub local_exact: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            budget: TimeBudget::unlimited(),
            d: 1,
            local_exact: false,
        }
    }
}

/// Dispatches to the algorithm named by `kind`.
pub fn run_algorithm(
    inst: &BipInstance,
    kind: AlgorithmKind,
    opts: &RunOptions,
) -> Result<AlgorithmReport, MmrError> {
    match kind {
        AlgorithmKind::Fix => fixed_scenario(inst, &opts.budget),
        AlgorithmKind::Ds => dual_substitution(inst, &opts.budget),
        AlgorithmKind::IdsH => iterated_ds(
            inst,
            &IdsConfig::hamming(opts.d)
                .with_local_exact(opts.local_exact)
                .with_budget(opts.budget),
        ),
        AlgorithmKind::IdsB => {
            iterated_ds(inst, &IdsConfig::best_scenario().with_budget(opts.budget))
        }
        AlgorithmKind::Bc => branch_and_cut(inst, &opts.budget),
        AlgorithmKind::Oracle => crate::oracle::brute_force_mmr(inst),
    }
}
