//! Branch-and-bound over LP relaxations with binary variables and lazy
//! constraints.
//!
//! Node selection is best-bound with depth-first dives: after branching the
//! solver keeps diving into the child on the rounding side of the branching
//! variable while the sibling waits in a priority queue ordered by its
//! parent's LP bound. One simplex tableau lives for the whole search, so a
//! child re-optimizes from its parent's basis with the dual simplex.
//!
//! Rows added with [`MilpModel::add_global_constraint`] are kept in a pool
//! and only enter the LP once some relaxation solution violates them. This
//! keeps the node LPs small when long exclusion-cut families accumulate
//! without changing the feasible set.

mod ranked;

pub use ranked::{RankedSolutions, RankedStep};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::SolverError;
use crate::lp::simplex::Tableau;
use crate::lp::{LinearConstraint, LpModel, LpStatus};
use crate::tolerance::{TimeBudget, ToleranceSet};

/// A linear model in which some variables are restricted to {0, 1}.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    base: LpModel,
    binary: Vec<bool>,
    global: Vec<LinearConstraint>,
    integral_hint: bool,
}

impl MilpModel {
    pub fn new(
        base: LpModel,
        binaries: impl IntoIterator<Item = usize>,
    ) -> Result<Self, SolverError> {
        base.validate()?;
        let mut binary = vec![false; base.num_vars()];
        for j in binaries {
            if j >= binary.len() {
                return Err(SolverError::InvalidModel(format!(
                    "binary index {j} out of range"
                )));
            }
            let b = base.bounds()[j];
            if b.lower < 0.0 || b.upper > 1.0 {
                return Err(SolverError::InvalidModel(format!(
                    "binary variable {j} has bounds [{}, {}] outside [0, 1]",
                    b.lower, b.upper
                )));
            }
            binary[j] = true;
        }
        Ok(MilpModel {
            base,
            binary,
            global: Vec::new(),
            integral_hint: false,
        })
    }

    pub fn base(&self) -> &LpModel {
        &self.base
    }

    pub fn is_binary(&self, j: usize) -> bool {
        self.binary[j]
    }

    pub fn num_binaries(&self) -> usize {
        self.binary.iter().filter(|&&b| b).count()
    }

    pub fn global_constraints(&self) -> &[LinearConstraint] {
        &self.global
    }

    /// Returns the model restricted to the intersection with `c`.
    pub fn add_global_constraint(mut self, c: LinearConstraint) -> Result<Self, SolverError> {
        self.push_global_constraint(c)?;
        Ok(self)
    }

    pub fn push_global_constraint(&mut self, c: LinearConstraint) -> Result<(), SolverError> {
        self.base.check_constraint(&c)?;
        self.global.push(c);
        Ok(())
    }

    /// Declares that every integer-feasible point has an integral optimal
    /// objective, even though continuous variables carry objective weight.
    /// Enables bound rounding during pruning.
    pub fn with_integral_objective(mut self) -> Self {
        self.integral_hint = true;
        self
    }

    /// True when pruning may round node bounds: either declared, or every
    /// variable with a nonzero objective coefficient is binary and all such
    /// coefficients are integers.
    pub fn objective_is_integral(&self) -> bool {
        self.integral_hint
            || self
                .base
                .objective()
                .iter()
                .enumerate()
                .all(|(j, &c)| c == 0.0 || (self.binary[j] && c.fract() == 0.0))
    }
}

/// Verdict of a [`LazyCutProvider`] on an integer-feasible candidate.
#[derive(Debug, Clone, PartialEq)]
pub enum LazyDecision {
    Accept,
    /// A constraint violated by the candidate; it is added to the model for
    /// every open and future node.
    Cut(LinearConstraint),
    /// The candidate could not be verified (e.g. the separation ran out of
    /// time). The search stops without accepting it.
    Abort,
}

/// Callback consulted at every integer-feasible node.
pub trait LazyCutProvider {
    fn check(&mut self, candidate: &[f64]) -> LazyDecision;
}

impl<F: FnMut(&[f64]) -> LazyDecision> LazyCutProvider for F {
    fn check(&mut self, candidate: &[f64]) -> LazyDecision {
        self(candidate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpOutcome {
    pub status: MilpStatus,
    pub incumbent: Option<Vec<f64>>,
    pub objective_value: Option<f64>,
    /// Bound on the optimum in the model's direction (a lower bound for
    /// minimization, an upper bound for maximization).
    pub best_bound: f64,
    pub nodes_explored: usize,
    pub cuts_added: usize,
    /// Candidates the lazy provider could neither accept nor cut.
    pub aborted_candidates: usize,
}

#[derive(Debug, Clone)]
struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    fixes: Vec<(usize, bool)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: the "greatest" node is the one with the
    // smallest bound, then the deepest, then the oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

struct Pruner {
    integral: bool,
    tol: ToleranceSet,
}

impl Pruner {
    /// Can a node with relaxation value `bound` (minimization form) still
    /// beat `incumbent`?
    fn dominated(&self, bound: f64, incumbent: Option<f64>) -> bool {
        let Some(inc) = incumbent else {
            return false;
        };
        if self.integral {
            let b = (bound - self.tol.integrality * (1.0 + bound.abs())).ceil();
            b >= inc - 0.5
        } else {
            bound >= inc - self.tol.dual(inc)
        }
    }

    fn effective(&self, bound: f64) -> f64 {
        if self.integral && bound.is_finite() {
            (bound - self.tol.integrality * (1.0 + bound.abs())).ceil()
        } else {
            bound
        }
    }
}

/// Solves `model` by branch and bound, consulting `lazy` whenever a node
/// relaxation is integral on every binary variable.
pub fn solve_milp(
    model: &MilpModel,
    mut lazy: Option<&mut dyn LazyCutProvider>,
    budget: &TimeBudget,
    tol: &ToleranceSet,
) -> Result<MilpOutcome, SolverError> {
    let base = &model.base;
    let n = base.num_vars();
    let sign = base.direction().min_sign();
    let pruner = Pruner {
        integral: model.objective_is_integral(),
        tol: *tol,
    };
    let mut tab = Tableau::new(base, *tol)?;
    let pool = &model.global;
    let mut pool_active = vec![false; pool.len()];

    let binaries: Vec<usize> = (0..n).filter(|&j| model.binary[j]).collect();
    let root_bounds: Vec<(f64, f64)> = (0..n).map(|j| tab.bounds_of(j)).collect();
    let mut applied: Vec<Option<bool>> = vec![None; n];

    let mut incumbent: Option<(Vec<f64>, f64)> = None;
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seq = 0usize;
    let mut dive = Some(Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq,
        fixes: Vec::new(),
    });
    let mut nodes = 0usize;
    let mut cuts_added = 0usize;
    let mut aborted = 0usize;
    let mut open_bounds: Vec<f64> = Vec::new();
    let mut stopped = false;

    'search: loop {
        let node = match dive.take() {
            Some(node) => node,
            None => match heap.pop() {
                Some(node) => node,
                None => break,
            },
        };
        if budget.expired() {
            open_bounds.push(node.bound);
            stopped = true;
            break;
        }
        let inc_val = incumbent.as_ref().map(|(_, v)| *v);
        if pruner.dominated(node.bound, inc_val) {
            continue;
        }

        let mut want: Vec<Option<bool>> = vec![None; n];
        for &(j, v) in &node.fixes {
            want[j] = Some(v);
        }
        for &j in &binaries {
            if want[j] != applied[j] {
                let (lo, hi) = match want[j] {
                    Some(true) => (1.0, 1.0),
                    Some(false) => (0.0, 0.0),
                    None => root_bounds[j],
                };
                tab.set_bounds(j, lo, hi);
                applied[j] = want[j];
            }
        }

        nodes += 1;
        loop {
            match tab.optimize(budget)? {
                LpStatus::Infeasible => continue 'search,
                LpStatus::Unbounded => return Err(SolverError::UnboundedRelaxation),
                LpStatus::Optimal => {}
            }

            let x = tab.primal();
            let mut violated: Vec<(f64, usize)> = pool
                .iter()
                .enumerate()
                .filter(|&(k, _)| !pool_active[k])
                .filter_map(|(k, c)| {
                    let v = c.violation(x);
                    (v > tol.feas(c.rhs)).then_some((v, k))
                })
                .collect();
            if !violated.is_empty() {
                violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                for &(_, k) in violated.iter().take(64) {
                    pool_active[k] = true;
                    tab.push_row(&pool[k]);
                }
                continue;
            }

            let z = tab.min_objective();
            let inc_val = incumbent.as_ref().map(|(_, v)| *v);
            if pruner.dominated(z, inc_val) {
                continue 'search;
            }

            let mut branch: Option<(usize, f64)> = None;
            let mut best_frac = tol.integrality;
            for &j in &binaries {
                let f = x[j] - x[j].floor();
                let frac = f.min(1.0 - f);
                if frac > best_frac {
                    best_frac = frac;
                    branch = Some((j, x[j]));
                }
            }

            if let Some((j, v)) = branch {
                let up_first = v - v.floor() >= 0.5;
                let mut mk = |val: bool| {
                    seq += 1;
                    let mut fixes = node.fixes.clone();
                    fixes.push((j, val));
                    Node {
                        bound: z,
                        depth: node.depth + 1,
                        seq,
                        fixes,
                    }
                };
                let (first, second) = (mk(up_first), mk(!up_first));
                heap.push(second);
                dive = Some(first);
                continue 'search;
            }

            let mut cand = x.to_vec();
            for &j in &binaries {
                cand[j] = cand[j].round();
            }
            let decision = match lazy.as_deref_mut() {
                Some(provider) => provider.check(&cand),
                None => LazyDecision::Accept,
            };
            match decision {
                LazyDecision::Accept => {
                    let val = sign * base.objective_value(&cand);
                    if inc_val.is_none_or(|best| val < best) {
                        incumbent = Some((cand, val));
                    }
                    continue 'search;
                }
                LazyDecision::Cut(c) => {
                    base.check_constraint(&c)?;
                    if c.violation(&cand) <= tol.feas(c.rhs) {
                        return Err(SolverError::InvalidLazyCut);
                    }
                    tab.push_row(&c);
                    cuts_added += 1;
                }
                LazyDecision::Abort => {
                    aborted += 1;
                    open_bounds.push(z);
                    stopped = true;
                    break 'search;
                }
            }
        }
    }

    if stopped {
        open_bounds.extend(heap.iter().map(|nd| nd.bound));
        if let Some(d) = &dive {
            open_bounds.push(d.bound);
        }
    }
    let inc_val = incumbent.as_ref().map(|(_, v)| *v);
    let open_min = open_bounds
        .iter()
        .map(|&b| pruner.effective(b))
        .fold(f64::INFINITY, f64::min);
    let bound_min = match inc_val {
        Some(v) => open_min.min(v),
        None => open_min,
    };
    let status = match (stopped, &incumbent) {
        (false, Some(_)) => MilpStatus::Optimal,
        (false, None) => MilpStatus::Infeasible,
        (true, Some(_)) => MilpStatus::Feasible,
        (true, None) => MilpStatus::TimeLimit,
    };
    let objective_value = inc_val.map(|v| sign * v);
    Ok(MilpOutcome {
        status,
        best_bound: if status == MilpStatus::Optimal {
            objective_value.unwrap_or(f64::NAN)
        } else {
            sign * bound_min
        },
        incumbent: incumbent.map(|(x, _)| x),
        objective_value,
        nodes_explored: nodes,
        cuts_added,
        aborted_candidates: aborted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{ConstraintSense, Direction, VarBounds};

    fn kp_model() -> MilpModel {
        let mut m = LpModel::new(Direction::Max);
        for c in [6.0, 10.0, 12.0] {
            m.add_var(c, VarBounds::BINARY);
        }
        m.add_constraint(LinearConstraint::new(
            vec![(0, 1.0), (1, 2.0), (2, 3.0)],
            ConstraintSense::Le,
            5.0,
        ))
        .unwrap();
        MilpModel::new(m, 0..3).unwrap()
    }

    /// Enumerates all binary vectors of a pure binary model.
    fn enumerate(model: &MilpModel) -> Option<(Vec<f64>, f64)> {
        let n = model.base().num_vars();
        let sign = model.base().direction().min_sign();
        let mut best: Option<(Vec<f64>, f64)> = None;
        for mask in 0u32..(1 << n) {
            let x: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
            let rows = model
                .base()
                .constraints()
                .iter()
                .chain(model.global_constraints());
            if rows.into_iter().any(|c| c.violation(&x) > 1e-9) {
                continue;
            }
            let v = sign * model.base().objective_value(&x);
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((x, v));
            }
        }
        best.map(|(x, v)| (x, sign * v))
    }

    #[test]
    fn knapsack_matches_enumeration() {
        let m = kp_model();
        let out = solve_milp(&m, None, &TimeBudget::unlimited(), &ToleranceSet::default()).unwrap();
        assert_eq!(out.status, MilpStatus::Optimal);
        assert_eq!(out.objective_value, Some(22.0));
        assert_eq!(out.incumbent.unwrap(), vec![0.0, 1.0, 1.0]);
        let (_, v) = enumerate(&m).unwrap();
        assert_eq!(v, 22.0);
    }

    #[test]
    fn integral_relaxation_solves_at_root() {
        // 2x2 assignment: totally unimodular
        let mut m = LpModel::new(Direction::Min);
        for c in [4.0, 1.0, 2.0, 5.0] {
            m.add_var(c, VarBounds::BINARY);
        }
        for (a, b) in [(0, 1), (2, 3), (0, 2), (1, 3)] {
            m.add_constraint(LinearConstraint::new(
                vec![(a, 1.0), (b, 1.0)],
                ConstraintSense::Eq,
                1.0,
            ))
            .unwrap();
        }
        let mm = MilpModel::new(m, 0..4).unwrap();
        let out = solve_milp(
            &mm,
            None,
            &TimeBudget::unlimited(),
            &ToleranceSet::default(),
        )
        .unwrap();
        assert_eq!(out.status, MilpStatus::Optimal);
        assert_eq!(out.objective_value, Some(3.0));
        assert_eq!(out.nodes_explored, 1);
    }

    #[test]
    fn rejecting_provider_exhausts_two_variables() {
        let mut m = LpModel::new(Direction::Max);
        m.add_var(1.0, VarBounds::BINARY);
        m.add_var(2.0, VarBounds::BINARY);
        let mm = MilpModel::new(m, 0..2).unwrap();
        let mut rejections = 0;
        let mut provider = |x: &[f64]| {
            rejections += 1;
            // Hamming cut of radius 1 around x
            let ones = x.iter().filter(|&&v| v > 0.5).count() as f64;
            let coeffs = x
                .iter()
                .enumerate()
                .map(|(j, &v)| (j, if v > 0.5 { -1.0 } else { 1.0 }))
                .collect();
            LazyDecision::Cut(LinearConstraint::new(
                coeffs,
                ConstraintSense::Ge,
                1.0 - ones,
            ))
        };
        let out = solve_milp(
            &mm,
            Some(&mut provider),
            &TimeBudget::unlimited(),
            &ToleranceSet::default(),
        )
        .unwrap();
        assert_eq!(out.status, MilpStatus::Infeasible);
        assert!(rejections <= 4, "{rejections} rejections");
        assert_eq!(out.cuts_added, rejections);
    }

    #[test]
    fn contradictory_global_row_is_infeasible() {
        let mut m = LpModel::new(Direction::Max);
        m.add_var(1.0, VarBounds::new(0.0, 0.0));
        let mm = MilpModel::new(m, [0])
            .unwrap()
            .add_global_constraint(LinearConstraint::new(
                vec![(0, 1.0)],
                ConstraintSense::Ge,
                1.0,
            ))
            .unwrap();
        let out = solve_milp(
            &mm,
            None,
            &TimeBudget::unlimited(),
            &ToleranceSet::default(),
        )
        .unwrap();
        assert_eq!(out.status, MilpStatus::Infeasible);
    }

    #[test]
    fn trivial_global_row_changes_nothing() {
        let mm = kp_model()
            .add_global_constraint(LinearConstraint::new(vec![], ConstraintSense::Le, 0.0))
            .unwrap();
        let out = solve_milp(
            &mm,
            None,
            &TimeBudget::unlimited(),
            &ToleranceSet::default(),
        )
        .unwrap();
        assert_eq!(out.objective_value, Some(22.0));
    }

    #[test]
    fn hamming_exclusion_of_the_optimum() {
        // exclude (0,1,1): x0 + (1-x1) + (1-x2) >= 1  <=>  x0 - x1 - x2 >= -1
        let mm = kp_model()
            .add_global_constraint(LinearConstraint::new(
                vec![(0, 1.0), (1, -1.0), (2, -1.0)],
                ConstraintSense::Ge,
                -1.0,
            ))
            .unwrap();
        let out = solve_milp(
            &mm,
            None,
            &TimeBudget::unlimited(),
            &ToleranceSet::default(),
        )
        .unwrap();
        let (x, v) = enumerate(&mm).unwrap();
        assert_eq!(v, 18.0);
        assert_eq!(out.objective_value, Some(18.0));
        assert_eq!(out.incumbent.unwrap(), x);
    }

    #[test]
    fn expired_budget_reports_time_limit() {
        let out = solve_milp(
            &kp_model(),
            None,
            &TimeBudget::new(std::time::Duration::ZERO),
            &ToleranceSet::default(),
        )
        .unwrap();
        assert_eq!(out.status, MilpStatus::TimeLimit);
        assert!(out.incumbent.is_none());
    }

    #[test]
    fn rejects_non_binary_bounds() {
        let mut m = LpModel::new(Direction::Max);
        m.add_var(1.0, VarBounds::new(0.0, 2.0));
        assert!(MilpModel::new(m, [0]).is_err());
    }
}
