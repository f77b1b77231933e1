use std::fmt;

use crate::error::SolverError;

/// Optimization direction of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Min,
    Max,
}

impl Direction {
    /// +1 for minimization, -1 for maximization: multiplying an objective
    /// by this factor turns it into a minimization.
    pub fn min_sign(self) -> f64 {
        match self {
            Direction::Min => 1.0,
            Direction::Max => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Min => "MIN",
            Direction::Max => "MAX",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sense of a linear row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintSense {
    Le,
    Ge,
    Eq,
}

impl ConstraintSense {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintSense::Le => "LE",
            ConstraintSense::Ge => "GE",
            ConstraintSense::Eq => "EQ",
        }
    }

    /// Amount by which `activity` violates `rhs` under this sense (0 if satisfied).
    pub fn violation(self, activity: f64, rhs: f64) -> f64 {
        match self {
            ConstraintSense::Le => (activity - rhs).max(0.0),
            ConstraintSense::Ge => (rhs - activity).max(0.0),
            ConstraintSense::Eq => (activity - rhs).abs(),
        }
    }
}

impl fmt::Display for ConstraintSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A sparse row `sum coeffs[k].1 * x[coeffs[k].0]  <sense>  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<(usize, f64)>, sense: ConstraintSense, rhs: f64) -> Self {
        LinearConstraint { coeffs, sense, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        self.sense.violation(self.activity(x), self.rhs)
    }
}

/// Lower/upper bound pair; infinite values denote an open side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub const BINARY: VarBounds = VarBounds {
        lower: 0.0,
        upper: 1.0,
    };
    pub const NONNEG: VarBounds = VarBounds {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    pub const NONPOS: VarBounds = VarBounds {
        lower: f64::NEG_INFINITY,
        upper: 0.0,
    };
    pub const FREE: VarBounds = VarBounds {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };

    pub fn new(lower: f64, upper: f64) -> Self {
        VarBounds { lower, upper }
    }
}

/// A linear program over bounded variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    direction: Direction,
    objective: Vec<f64>,
    bounds: Vec<VarBounds>,
    constraints: Vec<LinearConstraint>,
}

impl LpModel {
    pub fn new(direction: Direction) -> Self {
        LpModel {
            direction,
            objective: Vec::new(),
            bounds: Vec::new(),
            constraints: Vec::new(),
        }
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, cost: f64, bounds: VarBounds) -> usize {
        self.objective.push(cost);
        self.bounds.push(bounds);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, c: LinearConstraint) -> Result<usize, SolverError> {
        self.check_constraint(&c)?;
        self.constraints.push(c);
        Ok(self.constraints.len() - 1)
    }

    pub(crate) fn check_constraint(&self, c: &LinearConstraint) -> Result<(), SolverError> {
        if !c.rhs.is_finite() {
            return Err(SolverError::InvalidModel(
                "non-finite right-hand side".into(),
            ));
        }
        for &(j, a) in &c.coeffs {
            if j >= self.num_vars() {
                return Err(SolverError::InvalidModel(format!(
                    "row references variable {j} but the model has {} variables",
                    self.num_vars()
                )));
            }
            if !a.is_finite() {
                return Err(SolverError::InvalidModel("non-finite coefficient".into()));
            }
        }
        Ok(())
    }

    pub fn set_bounds(&mut self, j: usize, bounds: VarBounds) {
        self.bounds[j] = bounds;
    }

    pub fn set_cost(&mut self, j: usize, cost: f64) {
        self.objective[j] = cost;
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn bounds(&self) -> &[VarBounds] {
        &self.bounds
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Checks the structural invariants (bounds ordered, rows in range).
    pub fn validate(&self) -> Result<(), SolverError> {
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower > b.upper {
                return Err(SolverError::InvalidModel(format!(
                    "variable {j} has bounds [{}, {}]",
                    b.lower, b.upper
                )));
            }
            if b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return Err(SolverError::InvalidModel(format!(
                    "variable {j} has an empty bound interval"
                )));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(SolverError::InvalidModel(
                "non-finite objective coefficient".into(),
            ));
        }
        for c in &self.constraints {
            self.check_constraint(c)?;
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`, scaled by `1 + |rhs|`.
    pub fn max_scaled_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.violation(x) / (1.0 + c.rhs.abs()));
        let bounds = self.bounds.iter().zip(x).map(|(b, &v)| {
            let lo = if v < b.lower {
                (b.lower - v) / (1.0 + b.lower.abs())
            } else {
                0.0
            };
            let hi = if v > b.upper {
                (v - b.upper) / (1.0 + b.upper.abs())
            } else {
                0.0
            };
            lo.max(hi)
        });
        rows.chain(bounds).fold(0.0, f64::max)
    }
}
