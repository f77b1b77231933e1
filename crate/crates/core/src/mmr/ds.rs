use std::time::Instant;

use crate::error::MmrError;
use crate::lp::{ConstraintSense, Direction, LinearConstraint, LpModel, VarBounds};
use crate::milp::{solve_milp, MilpModel, MilpOutcome, MilpStatus};
use crate::tolerance::{TimeBudget, ToleranceSet};

use super::regret::evaluate_max_regret;
use super::types::{
    AlgorithmKind, AlgorithmReport, BinarySolution, BipInstance, ReportStatus, TraceEntry,
};

/// Column positions in the dual-substitution model: `x` (binaries) first,
/// then one `u` per constraint row, then one `v` per variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DsLayout {
    pub n: usize,
    pub m: usize,
}

impl DsLayout {
    pub fn x(&self, j: usize) -> usize {
        j
    }

    pub fn u(&self, i: usize) -> usize {
        self.n + i
    }

    pub fn v(&self, j: usize) -> usize {
        self.n + self.m + j
    }

    pub fn num_columns(&self) -> usize {
        2 * self.n + self.m
    }
}

/// Single-level model obtained by replacing the inner problem of the max
/// regret by the dual of its LP relaxation.
///
/// For a maximization instance it reads
///
/// ```text
/// min  sum_i b_i u_i + sum_j v_j - sum_j c_lo_j x_j
/// s.t. sum_i a_ij u_i + v_j + (c_hi_j - c_lo_j) x_j >= c_hi_j   for all j
///      v >= 0, x in X0
/// ```
///
/// with `u_i >= 0` for LE rows, `u_i <= 0` for GE rows and `u_i` free for EQ
/// rows. A minimization instance gets the mirrored model
///
/// ```text
/// min  sum_j c_hi_j x_j - sum_i b_i u_i + sum_j v_j
/// s.t. sum_i a_ij u_i - v_j - (c_hi_j - c_lo_j) x_j <= c_lo_j   for all j
/// ```
///
/// with `u_i >= 0` for GE rows, `u_i <= 0` for LE rows. The model is always a
/// minimization and its optimum bounds the optimal max regret from above.
pub fn build_ds_model(inst: &BipInstance) -> Result<MilpModel, MmrError> {
    let n = inst.num_vars();
    let m = inst.num_constraints();
    let lay = DsLayout { n, m };
    let (lo, hi) = (inst.lower(), inst.upper());
    let dir = inst.direction();
    let mut lp = LpModel::new(Direction::Min);

    for j in 0..n {
        let cost = match dir {
            Direction::Max => -lo[j],
            Direction::Min => hi[j],
        };
        lp.add_var(cost as f64, VarBounds::BINARY);
    }
    for row in inst.rows() {
        let b = row.rhs as f64;
        let (cost, bounds) = match (dir, row.sense) {
            (_, ConstraintSense::Eq) => (b, VarBounds::FREE),
            (Direction::Max, ConstraintSense::Le) => (b, VarBounds::NONNEG),
            (Direction::Max, ConstraintSense::Ge) => (b, VarBounds::NONPOS),
            (Direction::Min, ConstraintSense::Ge) => (b, VarBounds::NONNEG),
            (Direction::Min, ConstraintSense::Le) => (b, VarBounds::NONPOS),
        };
        let cost = match dir {
            Direction::Max => cost,
            Direction::Min => -cost,
        };
        lp.add_var(cost, bounds);
    }
    for _ in 0..n {
        lp.add_var(1.0, VarBounds::NONNEG);
    }

    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in inst.rows().iter().enumerate() {
        for &(j, a) in &row.coeffs {
            columns[j].push((lay.u(i), a as f64));
        }
    }
    for (j, mut coeffs) in columns.into_iter().enumerate() {
        let spread = (hi[j] - lo[j]) as f64;
        let row = match dir {
            Direction::Max => {
                coeffs.push((lay.v(j), 1.0));
                coeffs.push((lay.x(j), spread));
                LinearConstraint::new(coeffs, ConstraintSense::Ge, hi[j] as f64)
            }
            Direction::Min => {
                coeffs.push((lay.v(j), -1.0));
                coeffs.push((lay.x(j), -spread));
                LinearConstraint::new(coeffs, ConstraintSense::Le, lo[j] as f64)
            }
        };
        lp.add_constraint(row)?;
    }
    for row in inst.rows() {
        lp.add_constraint(row.to_linear())?;
    }
    Ok(MilpModel::new(lp, 0..n)?)
}

pub(crate) fn solve_ds(model: &MilpModel, budget: &TimeBudget) -> Result<MilpOutcome, MmrError> {
    Ok(solve_milp(model, None, budget, &ToleranceSet::default())?)
}

/// Dual-substitution heuristic: solves the model of [`build_ds_model`] and
/// evaluates the exact max regret of its solution.
pub fn dual_substitution(
    inst: &BipInstance,
    budget: &TimeBudget,
) -> Result<AlgorithmReport, MmrError> {
    let start = Instant::now();
    let model = build_ds_model(inst)?;
    let out = solve_ds(&model, budget)?;
    let status = match out.status {
        MilpStatus::Infeasible | MilpStatus::TimeLimit => {
            let status = if out.status == MilpStatus::Infeasible {
                ReportStatus::Infeasible
            } else {
                ReportStatus::TimeLimit
            };
            return Ok(AlgorithmReport::empty(
                AlgorithmKind::Ds,
                status,
                start.elapsed(),
            ));
        }
        MilpStatus::Optimal => ReportStatus::Feasible,
        MilpStatus::Feasible => ReportStatus::TimeLimit,
    };
    let x = BinarySolution::from_f64(
        out.incumbent.as_ref().expect("incumbent present"),
        inst.num_vars(),
    );
    let ev = evaluate_max_regret(inst, &x, &TimeBudget::unlimited())?;
    let regret = ev.max_regret;
    let status = if regret == 0 {
        ReportStatus::Optimal
    } else {
        status
    };
    Ok(AlgorithmReport {
        algorithm: AlgorithmKind::Ds,
        incumbent: Some(x),
        max_regret: Some(regret),
        lower_bound: 0,
        iterations: 1,
        best_iteration: 1,
        elapsed: start.elapsed(),
        status,
        trace: vec![TraceEntry {
            iteration: 1,
            candidate_regret: regret,
            model_objective: out.objective_value.unwrap_or(f64::NAN),
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;
    use crate::mmr::BipRow;

    fn knapsack() -> BipInstance {
        let row = BipRow::new(vec![(0, 1), (1, 2), (2, 3)], ConstraintSense::Le, 5);
        BipInstance::new(
            "kp",
            Direction::Max,
            vec![5, 8, 10],
            vec![7, 12, 14],
            vec![row],
        )
        .unwrap()
    }

    #[test]
    fn dimensions() {
        let inst = knapsack();
        let model = build_ds_model(&inst).unwrap();
        let lp = model.base();
        assert_eq!(lp.num_vars(), 3 + 1 + 3);
        assert_eq!(lp.num_constraints(), 3 + 1);
        assert_eq!(model.num_binaries(), 3);
    }

    #[test]
    fn degenerate_intervals_on_unimodular_instance() {
        // Choose exactly one of three items: the LP relaxation is integral.
        let row = BipRow::new(vec![(0, 1), (1, 1), (2, 1)], ConstraintSense::Eq, 1);
        let inst =
            BipInstance::new("t", Direction::Max, vec![2, 5, 3], vec![2, 5, 3], vec![row]).unwrap();
        let model = build_ds_model(&inst).unwrap();
        let out = solve_ds(&model, &TimeBudget::unlimited()).unwrap();
        assert!(out.objective_value.unwrap().abs() < 1e-6);
        let r = dual_substitution(&inst, &TimeBudget::unlimited()).unwrap();
        assert_eq!(r.max_regret, Some(0));
        assert_eq!(r.status, ReportStatus::Optimal);
    }

    /// With x fixed, the DS model is the dual of the inner LP relaxation, so
    /// its optimum must equal the relaxation value minus x's worst value.
    #[test]
    fn fixed_x_matches_inner_relaxation() {
        for dir in [Direction::Max, Direction::Min] {
            let rows = vec![
                BipRow::new(vec![(0, 3), (1, 2), (2, 4)], ConstraintSense::Le, 7),
                BipRow::new(vec![(0, 1), (1, 1), (2, 1)], ConstraintSense::Ge, 1),
                BipRow::new(vec![(1, 1), (2, 1)], ConstraintSense::Eq, 1),
            ];
            let inst = BipInstance::new("t", dir, vec![3, 5, 6], vec![6, 9, 8], rows).unwrap();
            for mask in 0..8u64 {
                let x = BinarySolution::from_mask(mask, 3);
                if !inst.is_feasible(&x) {
                    continue;
                }
                let model = build_ds_model(&inst).unwrap();
                let mut lp = model.base().clone();
                for j in 0..3 {
                    let v = if x.get(j) { 1.0 } else { 0.0 };
                    lp.set_bounds(j, VarBounds::new(v, v));
                }
                let ds = solve_lp(&lp, &ToleranceSet::default()).unwrap();

                let worst = crate::mmr::worst_scenario(&inst, &x).unwrap();
                let mut inner = LpModel::new(dir);
                for &c in &worst.costs {
                    inner.add_var(c as f64, VarBounds::BINARY);
                }
                for r in inst.rows() {
                    inner.add_constraint(r.to_linear()).unwrap();
                }
                let relax = solve_lp(&inner, &ToleranceSet::default()).unwrap();
                let own = worst.value(&x) as f64;
                let expect = match dir {
                    Direction::Max => relax.objective_value - own,
                    Direction::Min => own - relax.objective_value,
                };
                assert!(
                    (ds.objective_value - expect).abs() < 1e-6,
                    "{dir} x={x}: {} vs {expect}",
                    ds.objective_value
                );
            }
        }
    }

    #[test]
    fn model_objective_bounds_evaluated_regret() {
        let inst = knapsack();
        let r = dual_substitution(&inst, &TimeBudget::unlimited()).unwrap();
        let t = r.trace[0];
        assert!(t.model_objective + 1e-6 >= t.candidate_regret as f64);
    }
}
