//! Exhaustive reference solver for small instances.
//!
//! Everything here is computed by plain enumeration of 0/1 vectors with
//! integer arithmetic; it deliberately shares no code with the LP/MILP based
//! algorithms it is used to check.

use std::time::Instant;

use crate::error::MmrError;
use crate::lp::{ConstraintSense, Direction};
use crate::mmr::{
    AlgorithmKind, AlgorithmReport, BinarySolution, BipInstance, RegretEvaluation, ReportStatus,
    Scenario, TraceEntry,
};

/// Variable limit of [`brute_force_max_regret`].
pub const MAX_REGRET_VARS: usize = 20;
/// Variable limit of [`brute_force_mmr`].
pub const MMR_VARS: usize = 14;

/// Precomputed subset sums over bit masks of the variables.
struct Tables {
    n: usize,
    feasible: Vec<u32>,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

impl Tables {
    fn new(inst: &BipInstance) -> Self {
        let n = inst.num_vars();
        let size = 1usize << n;
        let mut lo = vec![0i64; size];
        let mut hi = vec![0i64; size];
        for mask in 1..size {
            let j = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            lo[mask] = lo[rest] + inst.lower()[j];
            hi[mask] = hi[rest] + inst.upper()[j];
        }
        let feasible = (0..size as u32)
            .filter(|&mask| {
                inst.rows().iter().all(|r| {
                    let act: i64 = r
                        .coeffs
                        .iter()
                        .filter(|&&(j, _)| mask >> j & 1 == 1)
                        .map(|&(_, a)| a)
                        .sum();
                    match r.sense {
                        ConstraintSense::Le => act <= r.rhs,
                        ConstraintSense::Ge => act >= r.rhs,
                        ConstraintSense::Eq => act == r.rhs,
                    }
                })
            })
            .collect();
        Tables {
            n,
            feasible,
            lo,
            hi,
        }
    }

    /// Max regret of `x` together with a best rival.
    fn regret(&self, dir: Direction, x: u32) -> (i64, u32) {
        let (x, lo, hi) = (x as usize, &self.lo, &self.hi);
        match dir {
            // Rival y scores hi(y \ x) + lo(y & x); x scores lo(x).
            Direction::Max => {
                let (v, y) = self
                    .feasible
                    .iter()
                    .map(|&y| {
                        let y = y as usize;
                        (hi[y & !x] + lo[y & x], y)
                    })
                    .fold(
                        (i64::MIN, 0),
                        |best, cur| if cur.0 > best.0 { cur } else { best },
                    );
                (v - lo[x], y as u32)
            }
            // Rival y pays lo(y \ x) + hi(y & x); x pays hi(x).
            Direction::Min => {
                let (v, y) = self
                    .feasible
                    .iter()
                    .map(|&y| {
                        let y = y as usize;
                        (lo[y & !x] + hi[y & x], y)
                    })
                    .fold(
                        (i64::MAX, 0),
                        |best, cur| if cur.0 < best.0 { cur } else { best },
                    );
                (hi[x] - v, y as u32)
            }
        }
    }

    fn evaluation(&self, inst: &BipInstance, x: u32) -> RegretEvaluation {
        let n = self.n;
        let (max_regret, y) = self.regret(inst.direction(), x);
        let costs: Vec<i64> = (0..n)
            .map(|j| {
                let selected = x >> j & 1 == 1;
                match (inst.direction(), selected) {
                    (Direction::Max, true) | (Direction::Min, false) => inst.lower()[j],
                    _ => inst.upper()[j],
                }
            })
            .collect();
        let value = |m: u32| {
            (0..n)
                .filter(|j| m >> j & 1 == 1)
                .map(|j| costs[j])
                .sum::<i64>()
        };
        RegretEvaluation {
            solution: BinarySolution::from_mask(x as u64, n),
            worst_scenario: Scenario::new(costs.clone()),
            inner_optimum: value(y),
            inner_solution: BinarySolution::from_mask(y as u64, n),
            own_value: value(x),
            max_regret,
            exact: true,
        }
    }
}

fn mask_of(x: &BinarySolution) -> u32 {
    x.ones().fold(0u32, |m, j| m | 1 << j)
}

/// Max regret of `x` by enumerating every rival solution.
pub fn brute_force_max_regret(
    inst: &BipInstance,
    x: &BinarySolution,
) -> Result<RegretEvaluation, MmrError> {
    let n = inst.num_vars();
    if n > MAX_REGRET_VARS {
        return Err(MmrError::TooLarge {
            n,
            max: MAX_REGRET_VARS,
        });
    }
    inst.check_feasible(x)?;
    Ok(Tables::new(inst).evaluation(inst, mask_of(x)))
}

/// Optimal max regret by enumerating every pair of solutions.
///
/// Ties are broken towards the lexicographically smallest solution, reading
/// `x_0` as the most significant position.
pub fn brute_force_mmr(inst: &BipInstance) -> Result<AlgorithmReport, MmrError> {
    let n = inst.num_vars();
    if n > MMR_VARS {
        return Err(MmrError::TooLarge { n, max: MMR_VARS });
    }
    let start = Instant::now();
    let tables = Tables::new(inst);
    let lex_key = |m: u32| (0..n).fold(0u32, |k, j| k << 1 | (m >> j & 1));
    let best = tables
        .feasible
        .iter()
        .map(|&x| (tables.regret(inst.direction(), x).0, lex_key(x), x))
        .min();
    let Some((regret, _, x)) = best else {
        return Ok(AlgorithmReport {
            algorithm: AlgorithmKind::Oracle,
            incumbent: None,
            max_regret: None,
            lower_bound: 0,
            iterations: 0,
            best_iteration: 0,
            elapsed: start.elapsed(),
            status: ReportStatus::Infeasible,
            trace: Vec::new(),
        });
    };
    Ok(AlgorithmReport {
        algorithm: AlgorithmKind::Oracle,
        incumbent: Some(BinarySolution::from_mask(x as u64, n)),
        max_regret: Some(regret),
        lower_bound: regret,
        iterations: tables.feasible.len(),
        best_iteration: 1,
        elapsed: start.elapsed(),
        status: ReportStatus::Optimal,
        trace: vec![TraceEntry {
            iteration: 1,
            candidate_regret: regret,
            model_objective: regret as f64,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmr::BipRow;

    #[test]
    fn single_free_item_is_taken() {
        let inst = BipInstance::new("t", Direction::Max, vec![2], vec![4], vec![]).unwrap();
        let r = brute_force_mmr(&inst).unwrap();
        assert_eq!(r.max_regret, Some(0));
        assert_eq!(r.incumbent.unwrap().to_string(), "1");
    }

    #[test]
    fn two_item_example() {
        let row = BipRow::new(vec![(0, 1), (1, 1)], ConstraintSense::Le, 1);
        let inst =
            BipInstance::new("t", Direction::Max, vec![4, 4], vec![6, 6], vec![row]).unwrap();
        let r = brute_force_mmr(&inst).unwrap();
        assert_eq!(r.max_regret, Some(2));
        // 01 and 10 tie; the lexicographically smaller one wins.
        assert_eq!(r.incumbent.unwrap().to_string(), "01");
        let ev = brute_force_max_regret(&inst, &"10".parse().unwrap()).unwrap();
        assert_eq!((ev.inner_optimum, ev.own_value, ev.max_regret), (6, 4, 2));
        assert_eq!(ev.worst_scenario.costs, vec![4, 6]);
    }

    #[test]
    fn empty_region_and_guards() {
        let row = BipRow::new(vec![(0, 1)], ConstraintSense::Ge, 2);
        let inst = BipInstance::new("t", Direction::Min, vec![1], vec![2], vec![row]).unwrap();
        assert_eq!(
            brute_force_mmr(&inst).unwrap().status,
            ReportStatus::Infeasible
        );
        assert!(brute_force_max_regret(&inst, &"1".parse().unwrap()).is_err());

        let big = BipInstance::new("t", Direction::Max, vec![0; 21], vec![1; 21], vec![]).unwrap();
        assert_eq!(
            brute_force_max_regret(&big, &BinarySolution::zeros(21)),
            Err(MmrError::TooLarge { n: 21, max: 20 })
        );
        assert!(matches!(
            brute_force_mmr(&big),
            Err(MmrError::TooLarge { .. })
        ));
    }

    #[test]
    fn degenerate_optimum_has_zero_regret() {
        let row = BipRow::new(vec![(0, 2), (1, 3)], ConstraintSense::Le, 5);
        let inst =
            BipInstance::new("t", Direction::Max, vec![5, 7], vec![5, 7], vec![row]).unwrap();
        let ev = brute_force_max_regret(&inst, &"11".parse().unwrap()).unwrap();
        assert_eq!(ev.max_regret, 0);
    }
}
