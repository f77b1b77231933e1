use std::time::Instant;

use crate::error::MmrError;
use crate::tolerance::TimeBudget;

use super::regret::{evaluate_max_regret, solve_classical, ClassicalSolve};
use super::types::{AlgorithmKind, AlgorithmReport, BipInstance, ReportStatus, TraceEntry};

/// Costs of the median scenario, doubled so they stay integral.
pub(crate) fn doubled_median(inst: &BipInstance) -> Vec<i64> {
    inst.lower()
        .iter()
        .zip(inst.upper())
        .map(|(l, h)| l + h)
        .collect()
}

/// Solves the classical problem under the median scenario.
pub(crate) fn median_solve(
    inst: &BipInstance,
    budget: &TimeBudget,
) -> Result<ClassicalSolve, MmrError> {
    solve_classical(inst, &doubled_median(inst), budget)
}

/// Fixed-scenario heuristic with the median scenario.
///
/// The returned solution is within a factor two of the optimal max regret, so
/// `ceil(regret / 2)` is reported as lower bound whenever the median problem
/// was solved to optimality.
pub fn fixed_scenario(
    inst: &BipInstance,
    budget: &TimeBudget,
) -> Result<AlgorithmReport, MmrError> {
    let start = Instant::now();
    let median = match median_solve(inst, budget) {
        Ok(m) => m,
        Err(MmrError::Infeasible) => {
            return Ok(AlgorithmReport::empty(
                AlgorithmKind::Fix,
                ReportStatus::Infeasible,
                start.elapsed(),
            ))
        }
        Err(MmrError::TimeLimit) => {
            return Ok(AlgorithmReport::empty(
                AlgorithmKind::Fix,
                ReportStatus::TimeLimit,
                start.elapsed(),
            ))
        }
        Err(e) => return Err(e),
    };
    let ev = evaluate_max_regret(inst, &median.solution, &TimeBudget::unlimited())?;
    let regret = ev.max_regret;
    let (lower_bound, status) = if median.exact {
        let lb = (regret + 1) / 2;
        let status = if lb == regret {
            ReportStatus::Optimal
        } else {
            ReportStatus::Feasible
        };
        (lb, status)
    } else {
        (0, ReportStatus::TimeLimit)
    };
    Ok(AlgorithmReport {
        algorithm: AlgorithmKind::Fix,
        incumbent: Some(median.solution),
        max_regret: Some(regret),
        lower_bound,
        iterations: 1,
        best_iteration: 1,
        elapsed: start.elapsed(),
        status,
        trace: vec![TraceEntry {
            iteration: 1,
            candidate_regret: regret,
            model_objective: median.value as f64 / 2.0,
        }],
    })
}
