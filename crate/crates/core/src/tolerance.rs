use std::time::{Duration, Instant};

/// Numerical tolerances shared by the LP and MILP kernels.
///
/// Every tolerance is applied relative to `1 + |magnitude|` of the quantity
/// it guards (right-hand side, objective value, bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSet {
    pub feasibility: f64,
    pub duality: f64,
    pub pivot: f64,
    pub integrality: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        ToleranceSet {
            feasibility: 1e-6,
            duality: 1e-6,
            pivot: 1e-9,
            integrality: 1e-6,
        }
    }
}

impl ToleranceSet {
    /// Feasibility slack allowed for a value of the given magnitude.
    pub fn feas(&self, magnitude: f64) -> f64 {
        self.feasibility * (1.0 + magnitude.abs())
    }

    /// Duality slack allowed for an objective of the given magnitude.
    pub fn dual(&self, magnitude: f64) -> f64 {
        self.duality * (1.0 + magnitude.abs())
    }
}

/// Wall-clock budget. Cloning shares the same deadline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeBudget {
    deadline: Option<Instant>,
}

impl TimeBudget {
    pub fn unlimited() -> Self {
        TimeBudget { deadline: None }
    }

    pub fn from_secs_f64(secs: f64) -> Self {
        if !secs.is_finite() || secs > 1e9 {
            return Self::unlimited();
        }
        Self::new(Duration::from_secs_f64(secs.max(0.0)))
    }

    pub fn new(limit: Duration) -> Self {
        TimeBudget {
            deadline: Instant::now().checked_add(limit),
        }
    }

    pub fn is_unlimited(&self) -> bool {
        self.deadline.is_none()
    }

    pub fn expired(&self) -> bool {
        match self.deadline {
            Some(d) => Instant::now() >= d,
            None => false,
        }
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.deadline
            .map(|d| d.saturating_duration_since(Instant::now()))
    }
}

impl Default for TimeBudget {
    fn default() -> Self {
        Self::unlimited()
    }
}
