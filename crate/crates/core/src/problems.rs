//! Encoders from the four benchmark problems to [`BipInstance`].

use thiserror::Error;

use crate::error::MmrError;
use crate::lp::{ConstraintSense, Direction};
use crate::mmr::{BinarySolution, BipInstance, BipRow};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProblemError {
    #[error("invalid problem data: {0}")]
    InvalidSpec(String),
    #[error("row {row} cannot be covered by any column")]
    EmptyFeasibleRegion { row: usize },
    #[error(transparent)]
    Instance(#[from] MmrError),
}

fn check_intervals(lower: &[i64], upper: &[i64], n: usize) -> Result<(), ProblemError> {
    if lower.len() != n || upper.len() != n {
        return Err(ProblemError::InvalidSpec(format!(
            "expected {n} cost intervals, got {} lower and {} upper values",
            lower.len(),
            upper.len()
        )));
    }
    Ok(())
}

/// 0-1 knapsack with interval values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KpSpec {
    pub weights: Vec<i64>,
    pub capacity: i64,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

/// Multidimensional knapsack; `weights[i][j]` is the use of resource `i` by item `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MkpSpec {
    pub weights: Vec<Vec<i64>>,
    pub capacities: Vec<i64>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

/// Set covering; `covers[i]` lists the columns covering row `i` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScpSpec {
    pub num_columns: usize,
    pub covers: Vec<Vec<usize>>,
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
}

/// Generalized assignment of `n` jobs to `m` agents. Matrices are indexed
/// `[agent][job]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSpec {
    pub resources: Vec<Vec<i64>>,
    pub capacities: Vec<i64>,
    pub lower: Vec<Vec<i64>>,
    pub upper: Vec<Vec<i64>>,
}

impl GapSpec {
    pub fn agents(&self) -> usize {
        self.capacities.len()
    }

    pub fn jobs(&self) -> usize {
        self.resources.first().map_or(0, Vec::len)
    }

    /// Index of the binary variable assigning `job` to `agent`.
    pub fn var(&self, agent: usize, job: usize) -> usize {
        agent * self.jobs() + job
    }

    /// Agent of every job, or `None` if `x` is not a proper assignment.
    pub fn decode(&self, x: &BinarySolution) -> Option<Vec<usize>> {
        let (m, n) = (self.agents(), self.jobs());
        if x.len() != m * n {
            return None;
        }
        (0..n)
            .map(|j| {
                let mut agents = (0..m).filter(|&i| x.get(self.var(i, j)));
                match (agents.next(), agents.next()) {
                    (Some(i), None) => Some(i),
                    _ => None,
                }
            })
            .collect()
    }

    /// Total cost of an assignment under the `[agent][job]` cost matrix.
    pub fn assignment_cost(&self, assignment: &[usize], costs: &[Vec<i64>]) -> i64 {
        assignment
            .iter()
            .enumerate()
            .map(|(j, &i)| costs[i][j])
            .sum()
    }
}

pub fn encode_kp(name: &str, spec: &KpSpec) -> Result<BipInstance, ProblemError> {
    let n = spec.weights.len();
    check_intervals(&spec.lower, &spec.upper, n)?;
    if spec.weights.iter().any(|&a| a < 1) || spec.capacity < 0 {
        return Err(ProblemError::InvalidSpec(
            "knapsack weights must be positive and the capacity nonnegative".into(),
        ));
    }
    let row = BipRow::new(
        spec.weights.iter().copied().enumerate().collect(),
        ConstraintSense::Le,
        spec.capacity,
    );
    Ok(BipInstance::new(
        name,
        Direction::Max,
        spec.lower.clone(),
        spec.upper.clone(),
        vec![row],
    )?)
}

pub fn encode_mkp(name: &str, spec: &MkpSpec) -> Result<BipInstance, ProblemError> {
    let n = spec.lower.len();
    check_intervals(&spec.lower, &spec.upper, n)?;
    if spec.weights.len() != spec.capacities.len() {
        return Err(ProblemError::InvalidSpec(format!(
            "{} resource rows but {} capacities",
            spec.weights.len(),
            spec.capacities.len()
        )));
    }
    let mut rows = Vec::with_capacity(spec.weights.len());
    for (w, &b) in spec.weights.iter().zip(&spec.capacities) {
        if w.len() != n || w.iter().any(|&a| a < 0) || b < 0 {
            return Err(ProblemError::InvalidSpec(
                "resource rows must have n nonnegative entries and nonnegative capacity".into(),
            ));
        }
        let coeffs = w
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, a)| a != 0)
            .collect();
        rows.push(BipRow::new(coeffs, ConstraintSense::Le, b));
    }
    Ok(BipInstance::new(
        name,
        Direction::Max,
        spec.lower.clone(),
        spec.upper.clone(),
        rows,
    )?)
}

pub fn encode_scp(name: &str, spec: &ScpSpec) -> Result<BipInstance, ProblemError> {
    let n = spec.num_columns;
    check_intervals(&spec.lower, &spec.upper, n)?;
    let mut rows = Vec::with_capacity(spec.covers.len());
    for (i, cover) in spec.covers.iter().enumerate() {
        if cover.is_empty() {
            return Err(ProblemError::EmptyFeasibleRegion { row: i });
        }
        if let Some(&j) = cover.iter().find(|&&j| j >= n) {
            return Err(ProblemError::InvalidSpec(format!(
                "row {i} lists column {j} but there are {n} columns"
            )));
        }
        let mut cols = cover.clone();
        cols.sort_unstable();
        cols.dedup();
        rows.push(BipRow::new(
            cols.into_iter().map(|j| (j, 1)).collect(),
            ConstraintSense::Ge,
            1,
        ));
    }
    Ok(BipInstance::new(
        name,
        Direction::Min,
        spec.lower.clone(),
        spec.upper.clone(),
        rows,
    )?)
}

/// Variables are flattened as `agent * n + job`; the first `m` rows are the
/// capacities, the remaining `n` rows assign every job exactly once.
pub fn encode_gap(name: &str, spec: &GapSpec) -> Result<BipInstance, ProblemError> {
    let (m, n) = (spec.agents(), spec.jobs());
    let square = |mat: &Vec<Vec<i64>>| mat.len() == m && mat.iter().all(|r| r.len() == n);
    if m == 0 || n == 0 || !square(&spec.resources) || !square(&spec.lower) || !square(&spec.upper)
    {
        return Err(ProblemError::InvalidSpec(
            "GAP matrices must all be agents x jobs".into(),
        ));
    }
    if spec.resources.iter().flatten().any(|&a| a < 1) || spec.capacities.iter().any(|&b| b < 1) {
        return Err(ProblemError::InvalidSpec(
            "GAP resources and capacities must be positive".into(),
        ));
    }
    let mut rows = Vec::with_capacity(m + n);
    for i in 0..m {
        let coeffs = (0..n)
            .map(|j| (spec.var(i, j), spec.resources[i][j]))
            .collect();
        rows.push(BipRow::new(coeffs, ConstraintSense::Le, spec.capacities[i]));
    }
    for j in 0..n {
        let coeffs = (0..m).map(|i| (spec.var(i, j), 1)).collect();
        rows.push(BipRow::new(coeffs, ConstraintSense::Eq, 1));
    }
    Ok(BipInstance::new(
        name,
        Direction::Min,
        spec.lower.concat(),
        spec.upper.concat(),
        rows,
    )?)
}
