use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use crate::error::MmrError;
use crate::lp::{ConstraintSense, Direction, LinearConstraint};
use crate::tolerance::TimeBudget;

/// Integer row `sum coeffs * x  <sense>  rhs` over the binary variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipRow {
    pub coeffs: Vec<(usize, i64)>,
    pub sense: ConstraintSense,
    pub rhs: i64,
}

impl BipRow {
    pub fn new(coeffs: Vec<(usize, i64)>, sense: ConstraintSense, rhs: i64) -> Self {
        BipRow { coeffs, sense, rhs }
    }

    pub fn activity(&self, x: &BinarySolution) -> i64 {
        self.coeffs
            .iter()
            .filter(|&&(j, _)| x.get(j))
            .map(|&(_, a)| a)
            .sum()
    }

    pub fn is_satisfied(&self, x: &BinarySolution) -> bool {
        let a = self.activity(x);
        match self.sense {
            ConstraintSense::Le => a <= self.rhs,
            ConstraintSense::Ge => a >= self.rhs,
            ConstraintSense::Eq => a == self.rhs,
        }
    }

    pub fn to_linear(&self) -> LinearConstraint {
        LinearConstraint::new(
            self.coeffs.iter().map(|&(j, a)| (j, a as f64)).collect(),
            self.sense,
            self.rhs as f64,
        )
    }
}

/// A binary program whose objective coefficients lie in integer intervals
/// `[lower[j], upper[j]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipInstance {
    name: String,
    direction: Direction,
    lower: Vec<i64>,
    upper: Vec<i64>,
    rows: Vec<BipRow>,
}

impl BipInstance {
    pub fn new(
        name: impl Into<String>,
        direction: Direction,
        lower: Vec<i64>,
        upper: Vec<i64>,
        rows: Vec<BipRow>,
    ) -> Result<Self, MmrError> {
        let n = lower.len();
        if n == 0 {
            return Err(MmrError::InvalidInstance(
                "instance has no variables".into(),
            ));
        }
        if upper.len() != n {
            return Err(MmrError::InvalidInstance(format!(
                "{} lower bounds but {} upper bounds",
                n,
                upper.len()
            )));
        }
        if let Some(j) = (0..n).find(|&j| lower[j] > upper[j]) {
            return Err(MmrError::InvalidInstance(format!(
                "interval of variable {j} is empty: [{}, {}]",
                lower[j], upper[j]
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if let Some(&(j, _)) = r.coeffs.iter().find(|&&(j, _)| j >= n) {
                return Err(MmrError::InvalidInstance(format!(
                    "row {i} references variable {j} (n = {n})"
                )));
            }
        }
        let name = name.into();
        if name.chars().any(char::is_whitespace) || name.is_empty() {
            return Err(MmrError::InvalidInstance(format!(
                "instance name {name:?} must be a non-empty token without whitespace"
            )));
        }
        Ok(BipInstance {
            name,
            direction,
            lower,
            upper,
            rows,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn rows(&self) -> &[BipRow] {
        &self.rows
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Checks dimension and every row; reports the first violated row.
    pub fn check_feasible(&self, x: &BinarySolution) -> Result<(), MmrError> {
        if x.len() != self.num_vars() {
            return Err(MmrError::DimensionMismatch {
                expected: self.num_vars(),
                got: x.len(),
            });
        }
        match self.rows.iter().position(|r| !r.is_satisfied(x)) {
            Some(row) => Err(MmrError::InfeasibleSolution { row }),
            None => Ok(()),
        }
    }

    pub fn is_feasible(&self, x: &BinarySolution) -> bool {
        self.check_feasible(x).is_ok()
    }

    /// Copy with every interval endpoint multiplied by `k`.
    pub fn scaled(&self, k: i64) -> Self {
        BipInstance {
            name: self.name.clone(),
            direction: self.direction,
            lower: self.lower.iter().map(|c| c * k).collect(),
            upper: self.upper.iter().map(|c| c * k).collect(),
            rows: self.rows.clone(),
        }
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// True when every interval is a single point.
    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }
}

/// One realization of the objective coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    pub costs: Vec<i64>,
}

impl Scenario {
    pub fn new(costs: Vec<i64>) -> Self {
        Scenario { costs }
    }

    /// Objective value of `x` under this scenario.
    pub fn value(&self, x: &BinarySolution) -> i64 {
        x.ones().map(|j| self.costs[j]).sum()
    }

    pub fn within(&self, inst: &BipInstance) -> bool {
        self.costs.len() == inst.num_vars()
            && self
                .costs
                .iter()
                .zip(inst.lower().iter().zip(inst.upper()))
                .all(|(c, (lo, hi))| lo <= c && c <= hi)
    }
}

/// A 0/1 assignment of every variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySolution(Vec<bool>);

impl BinarySolution {
    pub fn new(bits: Vec<bool>) -> Self {
        BinarySolution(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BinarySolution(vec![false; n])
    }

    /// Rounds a (near-)integral vector; only the first `n` entries are used.
    pub fn from_f64(x: &[f64], n: usize) -> Self {
        BinarySolution(x[..n].iter().map(|&v| v > 0.5).collect())
    }

    pub fn from_mask(mask: u64, n: usize) -> Self {
        BinarySolution((0..n).map(|j| (mask >> j) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, j: usize) -> bool {
        self.0[j]
    }

    pub fn set(&mut self, j: usize, v: bool) {
        self.0[j] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| j)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &BinarySolution) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }
}

impl fmt::Display for BinarySolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinarySolution {
    type Err = MmrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(MmrError::InvalidParameter(format!(
                    "solution digit {other:?} is not 0 or 1"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BinarySolution)
    }
}

/// A solution with its exact maximum regret and the certifying data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegretEvaluation {
    pub solution: BinarySolution,
    pub worst_scenario: Scenario,
    /// Optimal value of the classical problem under `worst_scenario`.
    pub inner_optimum: i64,
    /// An optimal solution of that classical problem.
    pub inner_solution: BinarySolution,
    /// Value of `solution` under `worst_scenario`.
    pub own_value: i64,
    pub max_regret: i64,
    /// False when the inner solve was cut short; `max_regret` is then only a
    /// lower estimate.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmKind {
    Fix,
    Ds,
    IdsH,
    IdsB,
    Bc,
    Oracle,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 6] = [
        AlgorithmKind::Bc,
        AlgorithmKind::Fix,
        AlgorithmKind::Ds,
        AlgorithmKind::IdsH,
        AlgorithmKind::IdsB,
        AlgorithmKind::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmKind::Fix => "fix",
            AlgorithmKind::Ds => "ds",
            AlgorithmKind::IdsH => "ids-h",
            AlgorithmKind::IdsB => "ids-b",
            AlgorithmKind::Bc => "bc",
            AlgorithmKind::Oracle => "oracle",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgorithmKind {
    type Err = MmrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AlgorithmKind::ALL
            .into_iter()
            .find(|a| a.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| MmrError::InvalidParameter(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReportStatus {
    /// The returned regret is proven minimal.
    Optimal,
    /// The algorithm finished but gives no optimality proof.
    Feasible,
    /// The budget expired; the incumbent (if any) is the best found so far.
    TimeLimit,
    /// The instance has no feasible solution.
    Infeasible,
}

impl ReportStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportStatus::Optimal => "OPTIMAL",
            ReportStatus::Feasible => "FEASIBLE",
            ReportStatus::TimeLimit => "TIME_LIMIT",
            ReportStatus::Infeasible => "INFEASIBLE",
        }
    }
}

impl fmt::Display for ReportStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReportStatus {
    type Err = MmrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "OPTIMAL" => Ok(ReportStatus::Optimal),
            "FEASIBLE" => Ok(ReportStatus::Feasible),
            "TIME_LIMIT" => Ok(ReportStatus::TimeLimit),
            "INFEASIBLE" => Ok(ReportStatus::Infeasible),
            other => Err(MmrError::InvalidParameter(format!(
                "unknown status {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    /// Exact max regret of the candidate examined in this iteration.
    pub candidate_regret: i64,
    /// Objective of the model that produced the candidate.
    pub model_objective: f64,
}

/// Outcome of one algorithm run.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmReport {
    pub algorithm: AlgorithmKind,
    pub incumbent: Option<BinarySolution>,
    pub max_regret: Option<i64>,
    pub lower_bound: i64,
    /// Iterations (or lazy-callback rounds) performed.
    pub iterations: usize,
    /// Iteration at which the returned incumbent was first found.
    pub best_iteration: usize,
    pub elapsed: Duration,
    pub status: ReportStatus,
    pub trace: Vec<TraceEntry>,
}

impl AlgorithmReport {
    pub(crate) fn empty(algorithm: AlgorithmKind, status: ReportStatus, elapsed: Duration) -> Self {
        AlgorithmReport {
            algorithm,
            incumbent: None,
            max_regret: None,
            lower_bound: 0,
            iterations: 0,
            best_iteration: 0,
            elapsed,
            status,
            trace: Vec::new(),
        }
    }

    /// Running minimum of the candidate regrets in `trace`.
    pub fn best_so_far(&self) -> Vec<i64> {
        let mut best = i64::MAX;
        self.trace
            .iter()
            .map(|t| {
                best = best.min(t.candidate_regret);
                best
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutFlavor {
    Hamming,
    BestScenario,
}

impl FromStr for CutFlavor {
    type Err = MmrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hamming" => Ok(CutFlavor::Hamming),
            "best-scenario" | "best_scenario" => Ok(CutFlavor::BestScenario),
            other => Err(MmrError::InvalidParameter(format!(
                "unknown cut flavor {other:?}"
            ))),
        }
    }
}

/// Settings of [`iterated_ds`](super::iterated_ds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdsConfig {
    pub cut_flavor: CutFlavor,
    /// Hamming radius; ignored by best-scenario cuts.
    pub d: u32,
    /// Search the Hamming shell `1..d-1` exactly after every iteration.
    pub local_exact: bool,
    pub budget: TimeBudget,
}

impl IdsConfig {
    pub fn hamming(d: u32) -> Self {
        IdsConfig {
            cut_flavor: CutFlavor::Hamming,
            d,
            local_exact: false,
            budget: TimeBudget::unlimited(),
        }
    }

    pub fn best_scenario() -> Self {
        IdsConfig {
            cut_flavor: CutFlavor::BestScenario,
            d: 1,
            local_exact: false,
            budget: TimeBudget::unlimited(),
        }
    }

    pub fn with_local_exact(mut self, on: bool) -> Self {
        self.local_exact = on;
        self
    }

    pub fn with_budget(mut self, budget: TimeBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn validate(&self) -> Result<(), MmrError> {
        if self.d == 0 {
            return Err(MmrError::InvalidParameter(
                "Hamming radius d must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_instances() {
        assert!(BipInstance::new("a", Direction::Max, vec![], vec![], vec![]).is_err());
        assert!(BipInstance::new("a", Direction::Max, vec![3], vec![2], vec![]).is_err());
        assert!(BipInstance::new("a b", Direction::Max, vec![1], vec![2], vec![]).is_err());
        let row = BipRow::new(vec![(1, 1)], ConstraintSense::Le, 1);
        assert!(BipInstance::new("a", Direction::Max, vec![1], vec![2], vec![row]).is_err());
    }

    #[test]
    fn solution_text_round_trip() {
        let x: BinarySolution = "0110".parse().unwrap();
        assert_eq!(x.to_string(), "0110");
        assert_eq!(x.ones().collect::<Vec<_>>(), vec![1, 2]);
        assert!("01x".parse::<BinarySolution>().is_err());
    }

    #[test]
    fn algorithm_names_parse() {
        for a in AlgorithmKind::ALL {
            assert_eq!(a.as_str().parse::<AlgorithmKind>().unwrap(), a);
        }
        assert!("gurobi".parse::<AlgorithmKind>().is_err());
    }

    #[test]
    fn feasibility_reports_first_violated_row() {
        let rows = vec![
            BipRow::new(vec![(0, 1), (1, 1)], ConstraintSense::Le, 1),
            BipRow::new(vec![(0, 1)], ConstraintSense::Eq, 1),
        ];
        let inst = BipInstance::new("t", Direction::Max, vec![1, 1], vec![2, 2], rows).unwrap();
        assert_eq!(
            inst.check_feasible(&"11".parse().unwrap()),
            Err(MmrError::InfeasibleSolution { row: 0 })
        );
        assert_eq!(
            inst.check_feasible(&"01".parse().unwrap()),
            Err(MmrError::InfeasibleSolution { row: 1 })
        );
        assert!(inst.is_feasible(&"10".parse().unwrap()));
        assert!(matches!(
            inst.check_feasible(&"1".parse().unwrap()),
            Err(MmrError::DimensionMismatch { .. })
        ));
    }
}
