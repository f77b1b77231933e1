//! Enumeration of the binary assignments of a model in order of objective.
//!
//! A single best-first search tree is kept between calls. When the node with
//! the smallest bound holds an integral relaxation, its binary assignment is
//! the next best one; the node is then split into subproblems covering all
//! of its other assignments (each child agrees with the emitted point on a
//! prefix of the free binaries and differs on the next one), so nothing is
//! re-proved from scratch.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::SolverError;
use crate::lp::simplex::Tableau;
use crate::lp::LpStatus;
use crate::tolerance::{TimeBudget, ToleranceSet};

use super::MilpModel;

/// One step of [`RankedSolutions::next_solution`].
#[derive(Debug, Clone, PartialEq)]
pub enum RankedStep {
    /// The best remaining assignment, with the optimal continuous part for
    /// it and the objective value in the model's direction.
    Solution {
        point: Vec<f64>,
        objective: f64,
    },
    Exhausted,
    TimeLimit,
}

#[derive(Debug, Clone)]
struct Entry {
    bound: f64,
    seq: usize,
    fixes: Vec<(usize, bool)>,
    point: Option<Vec<f64>>,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // Max-heap: smallest bound first, solved entries before open nodes at
    // the same bound, then the oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.point.is_some().cmp(&other.point.is_some()))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Lazily ranked binary assignments of a [`MilpModel`].
///
/// Rows from the model's constraint pool are honoured. Lazy cut providers
/// are not supported.
pub struct RankedSolutions<'a> {
    model: &'a MilpModel,
    tol: ToleranceSet,
    tab: Tableau,
    pool_active: Vec<bool>,
    binaries: Vec<usize>,
    root_bounds: Vec<(f64, f64)>,
    applied: Vec<Option<bool>>,
    heap: BinaryHeap<Entry>,
    seq: usize,
    nodes: usize,
}

impl<'a> RankedSolutions<'a> {
    pub fn new(model: &'a MilpModel, tol: &ToleranceSet) -> Result<Self, SolverError> {
        let n = model.base.num_vars();
        let tab = Tableau::new(&model.base, *tol)?;
        let root_bounds = (0..n).map(|j| tab.bounds_of(j)).collect();
        let mut heap = BinaryHeap::new();
        heap.push(Entry {
            bound: f64::NEG_INFINITY,
            seq: 0,
            fixes: Vec::new(),
            point: None,
        });
        Ok(RankedSolutions {
            model,
            tol: *tol,
            tab,
            pool_active: vec![false; model.global.len()],
            binaries: (0..n).filter(|&j| model.binary[j]).collect(),
            root_bounds,
            applied: vec![None; n],
            heap,
            seq: 0,
            nodes: 0,
        })
    }

    /// Node relaxations solved so far.
    pub fn nodes_explored(&self) -> usize {
        self.nodes
    }

    fn push(&mut self, bound: f64, fixes: Vec<(usize, bool)>, point: Option<Vec<f64>>) {
        self.seq += 1;
        self.heap.push(Entry {
            bound,
            seq: self.seq,
            fixes,
            point,
        });
    }

    fn apply(&mut self, fixes: &[(usize, bool)]) {
        let mut want = vec![None; self.applied.len()];
        for &(j, v) in fixes {
            want[j] = Some(v);
        }
        for &j in &self.binaries {
            if want[j] != self.applied[j] {
                let (lo, hi) = match want[j] {
                    Some(true) => (1.0, 1.0),
                    Some(false) => (0.0, 0.0),
                    None => self.root_bounds[j],
                };
                self.tab.set_bounds(j, lo, hi);
                self.applied[j] = want[j];
            }
        }
    }

    /// Solves the relaxation of an open node and queues its children, or
    /// queues it as solved when the relaxation is integral.
    fn expand(
        &mut self,
        fixes: Vec<(usize, bool)>,
        budget: &TimeBudget,
    ) -> Result<(), SolverError> {
        self.apply(&fixes);
        self.nodes += 1;
        loop {
            match self.tab.optimize(budget)? {
                LpStatus::Infeasible => return Ok(()),
                LpStatus::Unbounded => return Err(SolverError::UnboundedRelaxation),
                LpStatus::Optimal => {}
            }
            let x = self.tab.primal();
            let pool = &self.model.global;
            let violated: Vec<usize> = (0..pool.len())
                .filter(|&k| {
                    !self.pool_active[k] && pool[k].violation(x) > self.tol.feas(pool[k].rhs)
                })
                .collect();
            if violated.is_empty() {
                break;
            }
            for k in violated {
                self.pool_active[k] = true;
                self.tab.push_row(&pool[k]);
            }
        }
        let x = self.tab.primal();
        let z = self.tab.min_objective();
        let mut branch: Option<(usize, f64)> = None;
        let mut best_frac = self.tol.integrality;
        for &j in &self.binaries {
            let f = x[j] - x[j].floor();
            let frac = f.min(1.0 - f);
            if frac > best_frac {
                best_frac = frac;
                branch = Some((j, x[j]));
            }
        }
        match branch {
            Some((j, _)) => {
                for val in [false, true] {
                    let mut f = fixes.clone();
                    f.push((j, val));
                    self.push(z, f, None);
                }
            }
            None => {
                let mut point = x.to_vec();
                for &j in &self.binaries {
                    point[j] = point[j].round();
                }
                self.push(z, fixes, Some(point));
            }
        }
        Ok(())
    }

    /// Returns the best assignment not returned before.
    pub fn next_solution(&mut self, budget: &TimeBudget) -> Result<RankedStep, SolverError> {
        loop {
            if budget.expired() {
                return Ok(RankedStep::TimeLimit);
            }
            let Some(entry) = self.heap.pop() else {
                return Ok(RankedStep::Exhausted);
            };
            let Some(point) = entry.point else {
                self.expand(entry.fixes, budget)?;
                continue;
            };
            // Split off everything in the node except `point`.
            let mut fixed = vec![false; point.len()];
            for &(j, _) in &entry.fixes {
                fixed[j] = true;
            }
            let free: Vec<usize> = self
                .binaries
                .iter()
                .copied()
                .filter(|&j| !fixed[j])
                .collect();
            let mut prefix = entry.fixes.clone();
            for j in free {
                let v = point[j] > 0.5;
                let mut f = prefix.clone();
                f.push((j, !v));
                self.push(entry.bound, f, None);
                prefix.push((j, v));
            }
            let objective = self.model.base.objective_value(&point);
            return Ok(RankedStep::Solution { point, objective });
        }
    }
}
