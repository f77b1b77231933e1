//! Dense-tableau bounded-variable simplex.
//!
//! Every row `a·x <= / >= / = b` is stored as `a·x + s = 0` with a logical
//! column `s` whose bounds encode the sense, so the initial basis is the
//! identity and variable bounds never become rows. The tableau keeps
//! `B^-1 [A | I]` explicitly; it is rebuilt from the original rows every
//! [`REFACTOR_INTERVAL`] pivots.
//!
//! Cold solves use a composite primal simplex (phase 1 minimizes the sum of
//! infeasibilities). Warm solves after bound changes or added rows use the
//! dual simplex whenever the current basis is dual feasible.

use crate::error::SolverError;
use crate::tolerance::{TimeBudget, ToleranceSet};

use super::model::{ConstraintSense, LinearConstraint, LpModel};

const REFACTOR_INTERVAL: usize = 100;
const TIE_EPS: f64 = 1e-12;

/// Outcome classification of an LP solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_lp`].
///
/// `duals[i]` is the sensitivity of the optimal objective to `rhs[i]` and
/// `reduced_costs[j]` the sensitivity to the active bound of variable `j`,
/// both in the model's own direction. For a maximization with `<=` rows
/// the row duals are therefore non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective_value: f64,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free column resting at its current value.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Moved,
    Done,
    Infeasible,
    Unbounded,
}

/// Working state of the simplex. Kept alive across branch-and-bound nodes
/// so children can warm start from their parent's basis.
#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    n: usize,
    tol: ToleranceSet,
    rows: Vec<Vec<f64>>,
    orig: Vec<Vec<(usize, f64)>>,
    basis: Vec<usize>,
    state: Vec<ColState>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: Vec<f64>,
    cost: Vec<f64>,
    d: Vec<f64>,
    since_refactor: usize,
    bland: bool,
    degenerate_run: usize,
    pub(crate) pivots: usize,
}

impl Tableau {
    /// Builds the slack-basis tableau for `model` (objective converted to
    /// minimization).
    pub(crate) fn new(model: &LpModel, tol: ToleranceSet) -> Result<Self, SolverError> {
        model.validate()?;
        let n = model.num_vars();
        let sign = model.direction().min_sign();
        let mut t = Tableau {
            n,
            tol,
            rows: Vec::new(),
            orig: Vec::new(),
            basis: Vec::new(),
            state: Vec::with_capacity(n),
            lower: Vec::with_capacity(n),
            upper: Vec::with_capacity(n),
            value: Vec::with_capacity(n),
            cost: model.objective().iter().map(|c| sign * c).collect(),
            d: Vec::new(),
            since_refactor: 0,
            bland: false,
            degenerate_run: 0,
            pivots: 0,
        };
        for (j, b) in model.bounds().iter().enumerate() {
            t.lower.push(b.lower);
            t.upper.push(b.upper);
            t.state.push(ColState::Free);
            t.value.push(0.0);
            t.place_nonbasic(j);
        }
        t.d = t.cost.clone();
        for c in model.constraints() {
            t.push_row(c);
        }
        Ok(t)
    }

    fn ncols(&self) -> usize {
        self.lower.len()
    }

    /// Puts nonbasic column `j` at the bound favoured by its cost.
    fn place_nonbasic(&mut self, j: usize) {
        let (lo, hi) = (self.lower[j], self.upper[j]);
        let prefer_upper = self.cost.get(j).copied().unwrap_or(0.0) < 0.0;
        let (st, v) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) if prefer_upper => (ColState::AtUpper, hi),
            (true, _) => (ColState::AtLower, lo),
            (false, true) => (ColState::AtUpper, hi),
            (false, false) => (ColState::Free, 0.0),
        };
        self.state[j] = st;
        self.value[j] = v;
    }

    fn logical_bounds(sense: ConstraintSense, rhs: f64) -> (f64, f64) {
        match sense {
            ConstraintSense::Le => (-rhs, f64::INFINITY),
            ConstraintSense::Ge => (f64::NEG_INFINITY, -rhs),
            ConstraintSense::Eq => (-rhs, -rhs),
        }
    }

    /// Appends a row with its logical column basic, expressing it in terms
    /// of the current nonbasic columns.
    pub(crate) fn push_row(&mut self, c: &LinearConstraint) {
        let col = self.ncols();
        for r in &mut self.rows {
            r.push(0.0);
        }
        let (lo, hi) = Self::logical_bounds(c.sense, c.rhs);
        self.lower.push(lo);
        self.upper.push(hi);
        self.cost.push(0.0);
        self.d.push(0.0);
        self.state.push(ColState::Basic);

        let mut row = vec![0.0; col + 1];
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(c.coeffs.len());
        for &(j, a) in &c.coeffs {
            row[j] += a;
        }
        for (j, &a) in row.iter().enumerate().take(self.n) {
            if a != 0.0 {
                merged.push((j, a));
            }
        }
        row[col] = 1.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let f = row[b];
            if f != 0.0 {
                axpy(&mut row, -f, &self.rows[i]);
                row[b] = 0.0;
            }
        }
        let activity: f64 = merged.iter().map(|&(j, a)| a * self.value[j]).sum();
        self.value.push(-activity);
        self.rows.push(row);
        self.orig.push(merged);
        self.basis.push(col);
    }

    pub(crate) fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lower[j] = lo;
        self.upper[j] = hi;
        if self.state[j] == ColState::Basic {
            return;
        }
        let old = self.value[j];
        let (st, v) = if self.state[j] == ColState::AtUpper && hi.is_finite() {
            (ColState::AtUpper, hi)
        } else if lo.is_finite() {
            (ColState::AtLower, lo)
        } else if hi.is_finite() {
            (ColState::AtUpper, hi)
        } else {
            (ColState::Free, old)
        };
        self.state[j] = st;
        self.shift_nonbasic(j, v - old);
    }

    pub(crate) fn bounds_of(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    fn shift_nonbasic(&mut self, j: usize, delta: f64) {
        if delta == 0.0 {
            return;
        }
        for (i, r) in self.rows.iter().enumerate() {
            let a = r[j];
            if a != 0.0 {
                self.value[self.basis[i]] -= a * delta;
            }
        }
        self.value[j] += delta;
    }

    pub(crate) fn primal(&self) -> &[f64] {
        &self.value[..self.n]
    }

    /// Objective of the current point in minimization form.
    pub(crate) fn min_objective(&self) -> f64 {
        self.cost[..self.n]
            .iter()
            .zip(&self.value[..self.n])
            .map(|(c, v)| c * v)
            .sum()
    }

    fn infeasibility(&self, col: usize) -> f64 {
        let v = self.value[col];
        let (lo, hi) = (self.lower[col], self.upper[col]);
        if v < lo - self.tol.feas(lo) {
            lo - v
        } else if v > hi + self.tol.feas(hi) {
            v - hi
        } else {
            0.0
        }
    }

    fn primal_feasible(&self) -> bool {
        self.basis.iter().all(|&b| self.infeasibility(b) == 0.0)
    }

    fn dual_tol(&self, j: usize) -> f64 {
        self.tol.duality * (1.0 + self.cost[j].abs())
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lower[j] == self.upper[j]
    }

    fn dual_feasible(&self) -> bool {
        (0..self.ncols()).all(|j| {
            if self.is_fixed(j) {
                return true;
            }
            let t = self.dual_tol(j);
            match self.state[j] {
                ColState::Basic => true,
                ColState::AtLower => self.d[j] >= -t,
                ColState::AtUpper => self.d[j] <= t,
                ColState::Free => self.d[j].abs() <= t,
            }
        })
    }

    /// Moves boxed nonbasic columns to the bound their reduced cost prefers.
    fn flip_to_dual_feasible(&mut self) {
        for j in 0..self.ncols() {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if !(lo.is_finite() && hi.is_finite()) || lo == hi {
                continue;
            }
            let t = self.dual_tol(j);
            match self.state[j] {
                ColState::AtLower if self.d[j] < -t => {
                    self.state[j] = ColState::AtUpper;
                    self.shift_nonbasic(j, hi - self.value[j]);
                }
                ColState::AtUpper if self.d[j] > t => {
                    self.state[j] = ColState::AtLower;
                    self.shift_nonbasic(j, lo - self.value[j]);
                }
                _ => {}
            }
        }
    }

    fn recompute_values(&mut self) {
        for i in 0..self.rows.len() {
            let r = &self.rows[i];
            let mut s = 0.0;
            for (j, &a) in r.iter().enumerate() {
                if a != 0.0 && self.state[j] != ColState::Basic {
                    s += a * self.value[j];
                }
            }
            self.value[self.basis[i]] = -s;
        }
    }

    fn recompute_duals(&mut self) {
        let mut d = self.cost.clone();
        for (i, r) in self.rows.iter().enumerate() {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                axpy(&mut d, -cb, r);
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let mut prow = std::mem::take(&mut self.rows[r]);
        let p = prow[q];
        let inv = 1.0 / p;
        for v in prow.iter_mut() {
            *v *= inv;
        }
        prow[q] = 1.0;
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                axpy(row, -f, &prow);
                row[q] = 0.0;
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            axpy(&mut self.d, -f, &prow);
        }
        self.d[q] = 0.0;
        self.rows[r] = prow;
        self.basis[r] = q;
        self.state[q] = ColState::Basic;
        self.since_refactor += 1;
        self.pivots += 1;
    }

    /// Rebuilds `B^-1 [A | I]` from the original rows for the current basis.
    /// A numerically singular basis falls back to the slack basis.
    fn refactor(&mut self) {
        let m = self.rows.len();
        let ncols = self.ncols();
        let mut mat: Vec<Vec<f64>> = Vec::with_capacity(m);
        for (k, o) in self.orig.iter().enumerate() {
            let mut row = vec![0.0; ncols];
            for &(j, a) in o {
                row[j] = a;
            }
            row[self.n + k] = 1.0;
            mat.push(row);
        }
        let wanted: Vec<usize> = self.basis.clone();
        let mut assigned = vec![false; m];
        let mut new_basis = vec![usize::MAX; m];
        let mut ok = true;
        for &c in &wanted {
            let mut best = None;
            let mut best_abs = self.tol.pivot;
            for (i, row) in mat.iter().enumerate() {
                if !assigned[i] && row[c].abs() > best_abs {
                    best_abs = row[c].abs();
                    best = Some(i);
                }
            }
            let Some(r) = best else {
                ok = false;
                break;
            };
            let mut prow = std::mem::take(&mut mat[r]);
            let inv = 1.0 / prow[c];
            for v in prow.iter_mut() {
                *v *= inv;
            }
            prow[c] = 1.0;
            for (i, row) in mat.iter_mut().enumerate() {
                if i != r {
                    let f = row[c];
                    if f != 0.0 {
                        axpy(row, -f, &prow);
                        row[c] = 0.0;
                    }
                }
            }
            mat[r] = prow;
            assigned[r] = true;
            new_basis[r] = c;
        }
        if ok {
            self.rows = mat;
            self.basis = new_basis;
        } else {
            self.slack_basis();
        }
        self.recompute_values();
        self.recompute_duals();
        self.since_refactor = 0;
    }

    fn slack_basis(&mut self) {
        let m = self.rows.len();
        let ncols = self.ncols();
        self.rows = self
            .orig
            .iter()
            .enumerate()
            .map(|(k, o)| {
                let mut row = vec![0.0; ncols];
                for &(j, a) in o {
                    row[j] = a;
                }
                row[self.n + k] = 1.0;
                row
            })
            .collect();
        for j in 0..ncols {
            self.state[j] = ColState::Free;
        }
        self.basis = (0..m).map(|k| self.n + k).collect();
        for &b in &self.basis {
            self.state[b] = ColState::Basic;
        }
        for j in 0..ncols {
            if self.state[j] != ColState::Basic {
                self.place_nonbasic(j);
            }
        }
    }

    fn note_step(&mut self, degenerate: bool) {
        if degenerate {
            self.degenerate_run += 1;
            if self.degenerate_run > 2 * (self.rows.len() + self.ncols()) {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }
    }

    /// One primal simplex iteration. With `phase1` the objective is the sum
    /// of basic infeasibilities.
    fn primal_step(&mut self, phase1: bool) -> Result<Step, SolverError> {
        let ncols = self.ncols();
        let dd: Vec<f64> = if phase1 {
            let mut w = vec![0.0; ncols];
            for (i, r) in self.rows.iter().enumerate() {
                let b = self.basis[i];
                let v = self.value[b];
                let wi = if v < self.lower[b] - self.tol.feas(self.lower[b]) {
                    -1.0
                } else if v > self.upper[b] + self.tol.feas(self.upper[b]) {
                    1.0
                } else {
                    0.0
                };
                if wi != 0.0 {
                    axpy(&mut w, -wi, r);
                }
            }
            w
        } else {
            self.d.clone()
        };

        let mut entering: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        #[allow(clippy::needless_range_loop)]
        for j in 0..ncols {
            if self.state[j] == ColState::Basic || self.is_fixed(j) {
                continue;
            }
            let t = if phase1 {
                self.tol.duality
            } else {
                self.dual_tol(j)
            };
            let dj = dd[j];
            let dir = match self.state[j] {
                ColState::AtLower if dj < -t => 1.0,
                ColState::AtUpper if dj > t => -1.0,
                ColState::Free if dj.abs() > t => -dj.signum(),
                _ => continue,
            };
            if self.bland {
                entering = Some((j, dir));
                break;
            }
            if dj.abs() > best_score {
                best_score = dj.abs();
                entering = Some((j, dir));
            }
        }
        let Some((q, dir)) = entering else {
            return Ok(if phase1 { Step::Infeasible } else { Step::Done });
        };

        let mut step = if self.lower[q].is_finite() && self.upper[q].is_finite() {
            self.upper[q] - self.lower[q]
        } else {
            f64::INFINITY
        };
        let mut leave: Option<(usize, bool)> = None;
        let mut leave_abs = 0.0;
        for (i, r) in self.rows.iter().enumerate() {
            let a = r[q];
            if a.abs() <= self.tol.pivot {
                continue;
            }
            let rate = -a * dir;
            let b = self.basis[i];
            let (x, lo, hi) = (self.value[b], self.lower[b], self.upper[b]);
            let below = x < lo - self.tol.feas(lo);
            let above = x > hi + self.tol.feas(hi);
            let (limit, to_upper) = if phase1 && below {
                if rate > 0.0 {
                    ((lo - x) / rate, false)
                } else {
                    continue;
                }
            } else if phase1 && above {
                if rate < 0.0 {
                    ((x - hi) / -rate, true)
                } else {
                    continue;
                }
            } else if rate > 0.0 && hi.is_finite() {
                ((hi - x) / rate, true)
            } else if rate < 0.0 && lo.is_finite() {
                ((x - lo) / -rate, false)
            } else {
                continue;
            };
            let limit = limit.max(0.0);
            let better = match leave {
                None => limit < step || (limit <= step && step.is_infinite()),
                Some((li, _)) => {
                    if limit < step - TIE_EPS {
                        true
                    } else if limit <= step + TIE_EPS {
                        if self.bland {
                            b < self.basis[li]
                        } else {
                            a.abs() > leave_abs
                        }
                    } else {
                        false
                    }
                }
            };
            if better {
                step = limit.min(step);
                leave = Some((i, to_upper));
                leave_abs = a.abs();
            }
        }

        if step.is_infinite() {
            return if phase1 {
                Err(SolverError::NumericalBreakdown(
                    "unbounded ray while minimizing infeasibility".into(),
                ))
            } else {
                Ok(Step::Unbounded)
            };
        }

        let delta = dir * step;
        for (i, r) in self.rows.iter().enumerate() {
            let a = r[q];
            if a != 0.0 {
                self.value[self.basis[i]] -= a * delta;
            }
        }
        self.value[q] += delta;
        self.note_step(step <= TIE_EPS);

        match leave {
            None => {
                // bound flip
                if dir > 0.0 {
                    self.state[q] = ColState::AtUpper;
                    self.value[q] = self.upper[q];
                } else {
                    self.state[q] = ColState::AtLower;
                    self.value[q] = self.lower[q];
                }
            }
            Some((r, to_upper)) => {
                let b = self.basis[r];
                self.pivot(r, q);
                if to_upper {
                    self.state[b] = ColState::AtUpper;
                    self.value[b] = self.upper[b];
                } else {
                    self.state[b] = ColState::AtLower;
                    self.value[b] = self.lower[b];
                }
            }
        }
        Ok(Step::Moved)
    }

    /// One dual simplex iteration; requires a dual feasible basis.
    fn dual_step(&mut self) -> Step {
        let mut leave: Option<(usize, bool)> = None;
        let mut worst = 0.0;
        for (i, &b) in self.basis.iter().enumerate() {
            let inf = self.infeasibility(b);
            if inf <= 0.0 {
                continue;
            }
            let below = self.value[b] < self.lower[b];
            if self.bland {
                if leave.is_none_or(|(li, _)| b < self.basis[li]) {
                    leave = Some((i, below));
                }
            } else if inf > worst {
                worst = inf;
                leave = Some((i, below));
            }
        }
        let Some((r, increase)) = leave else {
            return Step::Done;
        };
        let p = self.basis[r];

        let row = &self.rows[r];
        let mut entering: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        let mut best_abs = 0.0;
        for (j, &a) in row.iter().enumerate() {
            if self.state[j] == ColState::Basic || self.is_fixed(j) || a.abs() <= self.tol.pivot {
                continue;
            }
            let ok = match self.state[j] {
                ColState::AtLower => (a < 0.0) == increase,
                ColState::AtUpper => (a > 0.0) == increase,
                ColState::Free => true,
                ColState::Basic => false,
            };
            if !ok {
                continue;
            }
            let ratio = self.d[j].abs() / a.abs();
            let better = if ratio < best_ratio - TIE_EPS {
                true
            } else if ratio <= best_ratio + TIE_EPS {
                if self.bland {
                    false
                } else {
                    a.abs() > best_abs
                }
            } else {
                false
            };
            if better {
                best_ratio = ratio;
                best_abs = a.abs();
                entering = Some(j);
            }
        }
        let Some(q) = entering else {
            return Step::Infeasible;
        };

        let target = if increase {
            self.lower[p]
        } else {
            self.upper[p]
        };
        let dq = -(target - self.value[p]) / self.rows[r][q];
        for (i, row) in self.rows.iter().enumerate() {
            let a = row[q];
            if a != 0.0 {
                self.value[self.basis[i]] -= a * dq;
            }
        }
        self.value[q] += dq;
        self.pivot(r, q);
        self.state[p] = if increase {
            ColState::AtLower
        } else {
            ColState::AtUpper
        };
        self.value[p] = target;
        self.note_step(best_ratio <= TIE_EPS);
        Step::Moved
    }

    /// Re-optimizes from the current basis.
    pub(crate) fn optimize(&mut self, budget: &TimeBudget) -> Result<LpStatus, SolverError> {
        self.bland = false;
        self.degenerate_run = 0;
        let limit = 50_000 + 50 * (self.rows.len() + self.ncols());
        let mut iters = 0usize;
        let mut repairs = 0;
        let mut confirmed_infeasible = false;

        self.flip_to_dual_feasible();
        let mut use_dual = !self.primal_feasible() && self.dual_feasible();

        loop {
            iters += 1;
            if iters > limit {
                return Err(SolverError::NumericalBreakdown(format!(
                    "simplex exceeded {limit} iterations"
                )));
            }
            if iters.is_multiple_of(256) && budget.expired() && self.n > 0 {
                // Budgets are enforced between node solves; a single LP is
                // only cut short when it is pathologically long.
                if iters > 20 * (self.rows.len() + self.ncols()) {
                    return Err(SolverError::NumericalBreakdown(
                        "LP did not converge within the time budget".into(),
                    ));
                }
            }
            if self.since_refactor >= REFACTOR_INTERVAL {
                self.refactor();
                if use_dual && !self.dual_feasible() {
                    use_dual = false;
                }
            }
            let step = if use_dual {
                match self.dual_step() {
                    Step::Done => {
                        use_dual = false;
                        continue;
                    }
                    s => s,
                }
            } else {
                let phase1 = !self.primal_feasible();
                self.primal_step(phase1)?
            };
            match step {
                Step::Moved => {}
                Step::Infeasible => {
                    if use_dual {
                        // confirm with the primal phase 1
                        use_dual = false;
                        continue;
                    }
                    if !confirmed_infeasible {
                        confirmed_infeasible = true;
                        self.refactor();
                        continue;
                    }
                    return Ok(LpStatus::Infeasible);
                }
                Step::Unbounded => return Ok(LpStatus::Unbounded),
                Step::Done => {
                    self.refactor();
                    if self.primal_feasible() && self.dual_feasible() {
                        return Ok(LpStatus::Optimal);
                    }
                    repairs += 1;
                    if repairs > 5 {
                        return Err(SolverError::NumericalBreakdown(
                            "could not restore feasibility after refactorization".into(),
                        ));
                    }
                    use_dual = !self.primal_feasible() && self.dual_feasible();
                }
            }
        }
    }

    /// Row duals in minimization form, one per row.
    fn row_duals_min(&self) -> Vec<f64> {
        (0..self.rows.len()).map(|k| -self.d[self.n + k]).collect()
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Solves `model` from scratch.
pub fn solve_lp(model: &LpModel, tol: &ToleranceSet) -> Result<LpSolution, SolverError> {
    let mut t = Tableau::new(model, *tol)?;
    let status = t.optimize(&TimeBudget::unlimited())?;
    let sign = model.direction().min_sign();
    let n = model.num_vars();
    let primal = t.primal().to_vec();
    let (objective_value, duals, reduced_costs) = match status {
        LpStatus::Optimal => (
            model.objective_value(&primal),
            t.row_duals_min().into_iter().map(|y| sign * y).collect(),
            t.d[..n].iter().map(|d| sign * d).collect(),
        ),
        _ => (f64::NAN, vec![0.0; model.num_constraints()], vec![0.0; n]),
    };
    Ok(LpSolution {
        status,
        primal,
        objective_value,
        duals,
        reduced_costs,
        iterations: t.pivots,
    })
}

/// Objective of the dual LP evaluated at the duals carried by `sol`:
/// `sum_i rhs_i * dual_i + sum_j reduced_cost_j * (active bound of j)`.
///
/// For `max c·y, A y <= b, 0 <= y <= 1` this is `sum b_i u_i + sum v_j`,
/// where `v_j` is the dual of the upper bound of `y_j`.
pub fn lp_dual_objective(sol: &LpSolution, model: &LpModel) -> Result<f64, SolverError> {
    if sol.status != LpStatus::Optimal {
        return Err(SolverError::NotOptimal);
    }
    let sign = model.direction().min_sign();
    let tol = ToleranceSet::default();
    let mut total = 0.0;
    for (c, &y) in model.constraints().iter().zip(&sol.duals) {
        total += sign * y * c.rhs;
    }
    for (j, (&rc, b)) in sol.reduced_costs.iter().zip(model.bounds()).enumerate() {
        let rc_min = sign * rc;
        if rc_min.abs() <= tol.dual(model.objective()[j]) * 1e-3 {
            continue;
        }
        let bound = if rc_min > 0.0 { b.lower } else { b.upper };
        if !bound.is_finite() {
            return Err(SolverError::NumericalBreakdown(format!(
                "reduced cost {rc} on variable {j} points at an infinite bound"
            )));
        }
        total += rc_min * bound;
    }
    Ok(sign * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::model::{Direction, VarBounds};

    fn le(coeffs: &[(usize, f64)], rhs: f64) -> LinearConstraint {
        LinearConstraint::new(coeffs.to_vec(), ConstraintSense::Le, rhs)
    }

    fn kp_relaxation() -> LpModel {
        let mut m = LpModel::new(Direction::Max);
        for c in [6.0, 10.0, 12.0] {
            m.add_var(c, VarBounds::BINARY);
        }
        m.add_constraint(le(&[(0, 1.0), (1, 2.0), (2, 3.0)], 5.0))
            .unwrap();
        m
    }

    #[test]
    fn single_binding_row() {
        let mut m = LpModel::new(Direction::Max);
        m.add_var(1.0, VarBounds::BINARY);
        m.add_var(1.0, VarBounds::BINARY);
        m.add_constraint(le(&[(0, 1.0), (1, 1.0)], 1.0)).unwrap();
        let s = solve_lp(&m, &ToleranceSet::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_objective_without_rows() {
        let mut m = LpModel::new(Direction::Max);
        m.add_var(0.0, VarBounds::BINARY);
        let s = solve_lp(&m, &ToleranceSet::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective_value, 0.0);
        assert_eq!(lp_dual_objective(&s, &m).unwrap(), 0.0);
    }

    #[test]
    fn knapsack_relaxation_value_and_duals() {
        // Hand enumeration of the basic solutions: by ratio order 6/1, 10/2,
        // 12/3 the greedy fill is (1, 1, 2/3) with value 6 + 10 + 8 = 24.
        let m = kp_relaxation();
        let s = solve_lp(&m, &ToleranceSet::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 24.0).abs() < 1e-9);
        let expect = [1.0, 1.0, 2.0 / 3.0];
        for (v, e) in s.primal.iter().zip(expect) {
            assert!((v - e).abs() < 1e-9, "{:?}", s.primal);
        }
        // capacity dual = 12/3 = 4, v = (6-4, 10-8, 0)
        assert!((s.duals[0] - 4.0).abs() < 1e-9);
        assert!((lp_dual_objective(&s, &m).unwrap() - 24.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded_are_classified() {
        let mut m = LpModel::new(Direction::Min);
        m.add_var(1.0, VarBounds::BINARY);
        m.add_constraint(LinearConstraint::new(
            vec![(0, 1.0)],
            ConstraintSense::Ge,
            2.0,
        ))
        .unwrap();
        let s = solve_lp(&m, &ToleranceSet::default()).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        assert_eq!(lp_dual_objective(&s, &m), Err(SolverError::NotOptimal));

        let mut u = LpModel::new(Direction::Max);
        u.add_var(1.0, VarBounds::NONNEG);
        u.add_var(0.0, VarBounds::NONNEG);
        u.add_constraint(le(&[(0, 1.0), (1, -1.0)], 3.0)).unwrap();
        let s = solve_lp(&u, &ToleranceSet::default()).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min x + y  s.t. x - y = 1, x + y >= 3, x, y free  -> x = 2, y = 1
        let mut m = LpModel::new(Direction::Min);
        m.add_var(1.0, VarBounds::FREE);
        m.add_var(1.0, VarBounds::FREE);
        m.add_constraint(LinearConstraint::new(
            vec![(0, 1.0), (1, -1.0)],
            ConstraintSense::Eq,
            1.0,
        ))
        .unwrap();
        m.add_constraint(LinearConstraint::new(
            vec![(0, 1.0), (1, 1.0)],
            ConstraintSense::Ge,
            3.0,
        ))
        .unwrap();
        let s = solve_lp(&m, &ToleranceSet::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 3.0).abs() < 1e-9);
        assert!((lp_dual_objective(&s, &m).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range_rows() {
        let mut m = LpModel::new(Direction::Min);
        m.add_var(1.0, VarBounds::BINARY);
        assert!(m.add_constraint(le(&[(3, 1.0)], 1.0)).is_err());
    }

    #[test]
    fn warm_start_after_added_row_and_bound_change() {
        let m = kp_relaxation();
        let mut t = Tableau::new(&m, ToleranceSet::default()).unwrap();
        let b = TimeBudget::unlimited();
        assert_eq!(t.optimize(&b).unwrap(), LpStatus::Optimal);
        assert!((-t.min_objective() - 24.0).abs() < 1e-9);
        t.set_bounds(2, 0.0, 0.0);
        assert_eq!(t.optimize(&b).unwrap(), LpStatus::Optimal);
        assert!((-t.min_objective() - 16.0).abs() < 1e-9);
        t.set_bounds(2, 0.0, 1.0);
        t.push_row(&le(&[(0, 1.0), (2, 1.0)], 1.0));
        assert_eq!(t.optimize(&b).unwrap(), LpStatus::Optimal);
        // x0 + x2 <= 1 with 1x0+2x1+3x2<=5: best is x1=1, x2=1 -> 22
        assert!((-t.min_objective() - 22.0).abs() < 1e-9);
    }
}
