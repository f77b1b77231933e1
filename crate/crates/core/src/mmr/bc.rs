use std::time::Instant;

use crate::error::{MmrError, SolverError};
use crate::lp::{ConstraintSense, Direction, LinearConstraint, LpModel, VarBounds};
use crate::milp::{solve_milp, LazyDecision, MilpModel, MilpStatus};
use crate::tolerance::{TimeBudget, ToleranceSet};

use super::fixed::median_solve;
use super::regret::{evaluate_max_regret, slave_problem};
use super::types::{
    AlgorithmKind, AlgorithmReport, BinarySolution, BipInstance, BipRow, RegretEvaluation,
    ReportStatus, TraceEntry,
};

/// Benders cut induced by the rival solution `y`.
///
/// Maximization: `lambda + sum_j (c_hi_j - c_lo_j) y_j x_j >= sum_j c_hi_j y_j`.
/// Minimization: `mu - sum_j (c_hi_j - c_lo_j) y_j x_j <= sum_j c_lo_j y_j`.
fn benders_cut(inst: &BipInstance, y: &BinarySolution) -> LinearConstraint {
    let n = inst.num_vars();
    let (lo, hi) = (inst.lower(), inst.upper());
    let sign = match inst.direction() {
        Direction::Max => 1.0,
        Direction::Min => -1.0,
    };
    let mut coeffs = vec![(n, 1.0)];
    coeffs.extend(
        y.ones()
            .filter(|&j| hi[j] != lo[j])
            .map(|j| (j, sign * (hi[j] - lo[j]) as f64)),
    );
    match inst.direction() {
        Direction::Max => {
            let rhs: i64 = y.ones().map(|j| hi[j]).sum();
            LinearConstraint::new(coeffs, ConstraintSense::Ge, rhs as f64)
        }
        Direction::Min => {
            let rhs: i64 = y.ones().map(|j| lo[j]).sum();
            LinearConstraint::new(coeffs, ConstraintSense::Le, rhs as f64)
        }
    }
}

/// Master problem over `x` and the value variable at index `n`.
fn master_model(
    inst: &BipInstance,
    restrict: &[BipRow],
    seeds: &[BinarySolution],
) -> Result<MilpModel, MmrError> {
    let n = inst.num_vars();
    let mut lp = LpModel::new(Direction::Min);
    for j in 0..n {
        let cost = match inst.direction() {
            Direction::Max => -inst.lower()[j],
            Direction::Min => inst.upper()[j],
        };
        lp.add_var(cost as f64, VarBounds::BINARY);
    }
    let value_cost = match inst.direction() {
        Direction::Max => 1.0,
        Direction::Min => -1.0,
    };
    lp.add_var(value_cost, VarBounds::FREE);
    for r in inst.rows().iter().chain(restrict) {
        lp.add_constraint(r.to_linear())?;
    }
    for y in seeds {
        lp.add_constraint(benders_cut(inst, y))?;
    }
    Ok(MilpModel::new(lp, 0..n)?.with_integral_objective())
}

pub(crate) struct MasterRun {
    /// Best exactly evaluated candidate seen by the lazy callback.
    pub best: Option<RegretEvaluation>,
    pub best_round: usize,
    pub status: MilpStatus,
    /// Lower bound on the optimal max regret over the restricted region.
    pub bound: f64,
    pub rounds: usize,
    pub trace: Vec<TraceEntry>,
}

/// Runs the branch-and-cut on `X0` intersected with `restrict`.
pub(crate) fn run_master(
    inst: &BipInstance,
    restrict: &[BipRow],
    seeds: &[BinarySolution],
    budget: &TimeBudget,
) -> Result<MasterRun, MmrError> {
    let n = inst.num_vars();
    let tol = ToleranceSet::default();
    let model = master_model(inst, restrict, seeds)?;
    let mut best: Option<RegretEvaluation> = None;
    let mut best_round = 0;
    let mut trace = Vec::new();
    let mut rounds = 0usize;
    let mut failure: Option<MmrError> = None;
    let objective = model.base().objective().to_vec();

    let mut provider = |cand: &[f64]| -> LazyDecision {
        rounds += 1;
        let x = BinarySolution::from_f64(cand, n);
        let (y, q) = match slave_problem(inst, &x, budget) {
            Ok(r) => r,
            Err(MmrError::TimeLimit) => return LazyDecision::Abort,
            Err(e) => {
                failure = Some(e);
                return LazyDecision::Abort;
            }
        };
        let ev = match evaluate_from_slave(inst, &x, &y, q) {
            Ok(ev) => ev,
            Err(e) => {
                failure = Some(e);
                return LazyDecision::Abort;
            }
        };
        trace.push(TraceEntry {
            iteration: rounds,
            candidate_regret: ev.max_regret,
            model_objective: objective.iter().zip(cand).map(|(c, v)| c * v).sum(),
        });
        if best.as_ref().is_none_or(|b| ev.max_regret < b.max_regret) {
            best = Some(ev);
            best_round = rounds;
        }
        let cut = benders_cut(inst, &y);
        if cut.violation(cand) > tol.feas(cut.rhs) {
            LazyDecision::Cut(cut)
        } else {
            LazyDecision::Accept
        }
    };
    let out = solve_milp(&model, Some(&mut provider), budget, &tol)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(MasterRun {
        best,
        best_round,
        status: out.status,
        bound: out.best_bound,
        rounds,
        trace,
    })
}

/// Rebuilds the full evaluation record from a slave solution.
fn evaluate_from_slave(
    inst: &BipInstance,
    x: &BinarySolution,
    y: &BinarySolution,
    q: i64,
) -> Result<RegretEvaluation, MmrError> {
    let worst = super::scenario::worst_scenario(inst, x)?;
    let own_value = worst.value(x);
    let max_regret = match inst.direction() {
        Direction::Max => q - own_value,
        Direction::Min => own_value - q,
    };
    Ok(RegretEvaluation {
        solution: x.clone(),
        worst_scenario: worst,
        inner_optimum: q,
        inner_solution: y.clone(),
        own_value,
        max_regret,
        exact: true,
    })
}

fn ceil_bound(bound: f64) -> i64 {
    if bound.is_finite() {
        (bound - 1e-6 * (1.0 + bound.abs())).ceil() as i64
    } else {
        0
    }
}

/// Exact min-max regret by branch-and-cut on the Benders reformulation.
///
/// The master is seeded with the cut of the median-scenario solution. If the
/// slave solve inside the callback runs out of time the candidate is neither
/// accepted nor cut and the search stops with the best evaluated candidate.
pub fn branch_and_cut(
    inst: &BipInstance,
    budget: &TimeBudget,
) -> Result<AlgorithmReport, MmrError> {
    let start = Instant::now();
    let median = match median_solve(inst, budget) {
        Ok(m) => m,
        Err(MmrError::Infeasible) => {
            return Ok(AlgorithmReport::empty(
                AlgorithmKind::Bc,
                ReportStatus::Infeasible,
                start.elapsed(),
            ))
        }
        Err(MmrError::TimeLimit) => {
            return Ok(AlgorithmReport::empty(
                AlgorithmKind::Bc,
                ReportStatus::TimeLimit,
                start.elapsed(),
            ))
        }
        Err(e) => return Err(e),
    };
    let seed = median.solution.clone();
    let run = run_master(inst, &[], std::slice::from_ref(&seed), budget)?;

    let mut best = run.best;
    let mut best_round = run.best_round;
    let mut lower_bound = ceil_bound(run.bound).max(0);
    let status = match run.status {
        MilpStatus::Optimal => ReportStatus::Optimal,
        MilpStatus::Feasible | MilpStatus::TimeLimit => ReportStatus::TimeLimit,
        MilpStatus::Infeasible => {
            return Err(SolverError::NumericalBreakdown(
                "master problem lost the seeded solution".into(),
            )
            .into())
        }
    };
    if status != ReportStatus::Optimal {
        let ev = evaluate_max_regret(inst, &seed, &TimeBudget::unlimited())?;
        if median.exact && ev.exact {
            lower_bound = lower_bound.max((ev.max_regret + 1) / 2);
        }
        if best.as_ref().is_none_or(|b| ev.max_regret < b.max_regret) {
            best = Some(ev);
            best_round = 0;
        }
    }
    let regret = best.as_ref().map(|b| b.max_regret);
    if let Some(r) = regret {
        lower_bound = lower_bound.min(r);
    }
    if status == ReportStatus::Optimal {
        lower_bound = regret.unwrap_or(lower_bound);
    }
    Ok(AlgorithmReport {
        algorithm: AlgorithmKind::Bc,
        incumbent: best.map(|b| b.solution),
        max_regret: regret,
        lower_bound,
        iterations: run.rounds,
        best_iteration: best_round,
        elapsed: start.elapsed(),
        status,
        trace: run.trace,
    })
}

/// Result of the exact search around one solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShellSearch {
    /// Best solution in the shell, or `None` if the shell holds no feasible
    /// solution (or none was reached before the budget expired).
    pub best: Option<RegretEvaluation>,
    /// True when the whole shell was searched.
    pub complete: bool,
}

/// Exact min-max regret restricted to solutions at Hamming distance
/// `1..=d-1` from `x_hat`, solved by branch-and-cut.
pub fn local_exact_refine(
    inst: &BipInstance,
    x_hat: &BinarySolution,
    d: u32,
    budget: &TimeBudget,
) -> Result<ShellSearch, MmrError> {
    if d < 2 {
        return Err(MmrError::InvalidParameter(
            "the local exact search needs d >= 2".into(),
        ));
    }
    inst.check_feasible(x_hat)?;
    let ones = x_hat.count_ones() as i64;
    let coeffs: Vec<(usize, i64)> = (0..x_hat.len())
        .map(|j| (j, if x_hat.get(j) { -1 } else { 1 }))
        .collect();
    let shell = [
        BipRow::new(coeffs.clone(), ConstraintSense::Ge, 1 - ones),
        BipRow::new(coeffs, ConstraintSense::Le, d as i64 - 1 - ones),
    ];
    let run = run_master(inst, &shell, std::slice::from_ref(x_hat), budget)?;
    Ok(match run.status {
        MilpStatus::Optimal => ShellSearch {
            best: run.best,
            complete: true,
        },
        MilpStatus::Infeasible => ShellSearch {
            best: None,
            complete: true,
        },
        MilpStatus::Feasible | MilpStatus::TimeLimit => ShellSearch {
            best: run.best,
            complete: false,
        },
    })
}
