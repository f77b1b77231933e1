use crate::error::{MmrError, SolverError};
use crate::lp::{Direction, LpModel, VarBounds};
use crate::milp::{solve_milp, MilpModel, MilpStatus};
use crate::tolerance::{TimeBudget, ToleranceSet};

use super::scenario::worst_scenario;
use super::types::{BinarySolution, BipInstance, RegretEvaluation};

/// Best solution of the classical problem under fixed integer costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ClassicalSolve {
    pub solution: BinarySolution,
    pub value: i64,
    /// False when the budget expired before optimality was proven.
    pub exact: bool,
}

pub(crate) fn classical_model(inst: &BipInstance, costs: &[i64]) -> Result<MilpModel, MmrError> {
    let mut lp = LpModel::new(inst.direction());
    for &c in costs {
        lp.add_var(c as f64, VarBounds::BINARY);
    }
    for r in inst.rows() {
        lp.add_constraint(r.to_linear())?;
    }
    Ok(MilpModel::new(lp, 0..inst.num_vars())?)
}

/// Optimizes `costs` over the feasible set of `inst` in its own direction.
///
/// Fails with `Infeasible` when the feasible set is empty and with
/// `TimeLimit` when the budget ran out before any solution was found.
pub(crate) fn solve_classical(
    inst: &BipInstance,
    costs: &[i64],
    budget: &TimeBudget,
) -> Result<ClassicalSolve, MmrError> {
    let model = classical_model(inst, costs)?;
    let out = solve_milp(&model, None, budget, &ToleranceSet::default())?;
    let exact = match out.status {
        MilpStatus::Optimal => true,
        MilpStatus::Feasible => false,
        MilpStatus::Infeasible => return Err(MmrError::Infeasible),
        MilpStatus::TimeLimit => return Err(MmrError::TimeLimit),
    };
    let x = out
        .incumbent
        .expect("optimal or feasible outcome carries an incumbent");
    let solution = BinarySolution::from_f64(&x, inst.num_vars());
    let value = solution.ones().map(|j| costs[j]).sum();
    Ok(ClassicalSolve {
        solution,
        value,
        exact,
    })
}

/// Evaluates `x` against the classical optimum under its worst scenario.
/// Shared by [`slave_problem`] and [`evaluate_max_regret`].
fn inner_solve(
    inst: &BipInstance,
    x: &BinarySolution,
    budget: &TimeBudget,
) -> Result<RegretEvaluation, MmrError> {
    inst.check_feasible(x)?;
    let worst = worst_scenario(inst, x)?;
    let inner = match solve_classical(inst, &worst.costs, budget) {
        Ok(s) => s,
        Err(MmrError::Infeasible) => {
            return Err(SolverError::NumericalBreakdown(
                "inner problem reported infeasible at a feasible point".into(),
            )
            .into())
        }
        Err(e) => return Err(e),
    };
    let own_value = worst.value(x);
    // x is a rival of itself: never report a regret below zero even when the
    // inner solve was cut short.
    let (inner_optimum, inner_solution) = match inst.direction() {
        Direction::Max if inner.value < own_value => (own_value, x.clone()),
        Direction::Min if inner.value > own_value => (own_value, x.clone()),
        _ => (inner.value, inner.solution),
    };
    let max_regret = match inst.direction() {
        Direction::Max => inner_optimum - own_value,
        Direction::Min => own_value - inner_optimum,
    };
    Ok(RegretEvaluation {
        solution: x.clone(),
        worst_scenario: worst,
        inner_optimum,
        inner_solution,
        own_value,
        max_regret,
        exact: inner.exact,
    })
}

/// Exact maximum regret of a feasible `x`.
///
/// When the budget cuts the inner solve short the returned evaluation has
/// `exact == false` and `max_regret` is a lower estimate. `TimeLimit` is
/// returned only if no inner solution was found at all.
pub fn evaluate_max_regret(
    inst: &BipInstance,
    x: &BinarySolution,
    budget: &TimeBudget,
) -> Result<RegretEvaluation, MmrError> {
    inner_solve(inst, x, budget)
}

/// Slave problem of the branch-and-cut: an optimal rival `y*` of `x` under
/// `x`'s worst scenario together with its value `q`.
pub fn slave_problem(
    inst: &BipInstance,
    x: &BinarySolution,
    budget: &TimeBudget,
) -> Result<(BinarySolution, i64), MmrError> {
    let ev = inner_solve(inst, x, budget)?;
    if !ev.exact {
        return Err(MmrError::TimeLimit);
    }
    Ok((ev.inner_solution, ev.inner_optimum))
}
