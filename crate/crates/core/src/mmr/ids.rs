use std::time::Instant;

use crate::error::MmrError;
use crate::milp::{MilpStatus, RankedSolutions, RankedStep};
use crate::tolerance::{TimeBudget, ToleranceSet};

use super::bc::local_exact_refine;
use super::ds::{build_ds_model, solve_ds};
use super::regret::evaluate_max_regret;
use super::scenario::{best_scenario_cut, hamming_cut};
use super::types::{
    AlgorithmKind, AlgorithmReport, BinarySolution, BipInstance, CutFlavor, IdsConfig,
    RegretEvaluation, ReportStatus, TraceEntry,
};

/// Iterated dual substitution.
///
/// Each iteration solves the dual-substitution model restricted by the cuts
/// collected so far, evaluates the solution and excludes it (with a Hamming
/// ball of radius `d` or with every solution it dominates). The loop ends when
/// the model becomes infeasible, a zero-regret solution is found, or the
/// budget expires. An iteration that has produced a solution is always
/// allowed to finish its evaluation.
///
/// A Hamming cut of radius 1 excludes only the point itself, so in that case
/// the successive model optima are drawn from a single ranked enumeration
/// instead of re-solving the model after every cut.
pub fn iterated_ds(inst: &BipInstance, cfg: &IdsConfig) -> Result<AlgorithmReport, MmrError> {
    cfg.validate()?;
    let start = Instant::now();
    let algorithm = match cfg.cut_flavor {
        CutFlavor::Hamming => AlgorithmKind::IdsH,
        CutFlavor::BestScenario => AlgorithmKind::IdsB,
    };
    let budget = &cfg.budget;
    let use_local = cfg.cut_flavor == CutFlavor::Hamming && cfg.d >= 2 && cfg.local_exact;
    let mut model = build_ds_model(inst)?;
    let ranked = cfg.cut_flavor == CutFlavor::Hamming && cfg.d == 1;
    let frozen = ranked.then(|| model.clone());
    let mut stream = frozen
        .as_ref()
        .map(|m| RankedSolutions::new(m, &ToleranceSet::default()))
        .transpose()?;
    let mut best: Option<(RegretEvaluation, usize)> = None;
    let mut trace = Vec::new();
    let mut iteration = 0usize;
    let mut exhausted = false;
    let mut shells_complete = true;

    loop {
        if budget.expired() {
            break;
        }
        iteration += 1;
        let (status, point, objective) = match stream.as_mut() {
            Some(st) => match st.next_solution(budget)? {
                RankedStep::Solution { point, objective } => {
                    (MilpStatus::Optimal, Some(point), Some(objective))
                }
                RankedStep::Exhausted => (MilpStatus::Infeasible, None, None),
                RankedStep::TimeLimit => (MilpStatus::TimeLimit, None, None),
            },
            None => {
                let out = solve_ds(&model, budget)?;
                (out.status, out.incumbent, out.objective_value)
            }
        };
        match status {
            MilpStatus::Infeasible => {
                if iteration == 1 {
                    return Ok(AlgorithmReport::empty(
                        algorithm,
                        ReportStatus::Infeasible,
                        start.elapsed(),
                    ));
                }
                exhausted = true;
                break;
            }
            MilpStatus::TimeLimit => break,
            MilpStatus::Optimal | MilpStatus::Feasible => {}
        }
        let x_hat =
            BinarySolution::from_f64(point.as_ref().expect("incumbent present"), inst.num_vars());
        let ev = evaluate_max_regret(inst, &x_hat, &TimeBudget::unlimited())?;
        trace.push(TraceEntry {
            iteration,
            candidate_regret: ev.max_regret,
            model_objective: objective.unwrap_or(f64::NAN),
        });
        if best
            .as_ref()
            .is_none_or(|(b, _)| ev.max_regret < b.max_regret)
        {
            best = Some((ev, iteration));
        }
        if use_local {
            let shell = local_exact_refine(inst, &x_hat, cfg.d, budget)?;
            shells_complete &= shell.complete;
            if let Some(sev) = shell.best {
                if best
                    .as_ref()
                    .is_none_or(|(b, _)| sev.max_regret < b.max_regret)
                {
                    best = Some((sev, iteration));
                }
            }
        }
        if status == MilpStatus::Feasible {
            // The DS model itself was cut short; its solution may repeat.
            break;
        }
        if best.as_ref().is_some_and(|(b, _)| b.max_regret == 0) {
            break;
        }
        if ranked {
            continue;
        }
        let cut = match cfg.cut_flavor {
            CutFlavor::Hamming => hamming_cut(&x_hat, cfg.d)?,
            CutFlavor::BestScenario => best_scenario_cut(inst, &x_hat)?,
        };
        model.push_global_constraint(cut.to_linear())?;
    }

    let regret = best.as_ref().map(|(b, _)| b.max_regret);
    let proves_optimality = match cfg.cut_flavor {
        CutFlavor::BestScenario => true,
        CutFlavor::Hamming => cfg.d == 1 || (use_local && shells_complete),
    };
    let status = if regret == Some(0) || (exhausted && proves_optimality) {
        ReportStatus::Optimal
    } else if exhausted {
        ReportStatus::Feasible
    } else {
        ReportStatus::TimeLimit
    };
    let lower_bound = match status {
        ReportStatus::Optimal => regret.unwrap_or(0),
        _ => 0,
    };
    let best_iteration = best.as_ref().map_or(0, |(_, it)| *it);
    Ok(AlgorithmReport {
        algorithm,
        incumbent: best.map(|(b, _)| b.solution),
        max_regret: regret,
        lower_bound,
        iterations: iteration,
        best_iteration,
        elapsed: start.elapsed(),
        status,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{ConstraintSense, Direction};
    use crate::mmr::BipRow;

    fn knapsack() -> BipInstance {
        let row = BipRow::new(
            vec![(0, 3), (1, 4), (2, 5), (3, 6)],
            ConstraintSense::Le,
            10,
        );
        BipInstance::new(
            "kp",
            Direction::Max,
            vec![4, 5, 6, 6],
            vec![7, 9, 10, 11],
            vec![row],
        )
        .unwrap()
    }

    /// Exhaustive minimum of the max regret using the evaluator.
    fn exhaustive(inst: &BipInstance) -> i64 {
        let n = inst.num_vars();
        (0..(1u64 << n))
            .map(|m| BinarySolution::from_mask(m, n))
            .filter(|x| inst.is_feasible(x))
            .map(|x| {
                evaluate_max_regret(inst, &x, &TimeBudget::unlimited())
                    .unwrap()
                    .max_regret
            })
            .min()
            .unwrap()
    }

    #[test]
    fn exhaustive_variants_are_exact() {
        let inst = knapsack();
        let opt = exhaustive(&inst);
        for cfg in [
            IdsConfig::hamming(1),
            IdsConfig::best_scenario(),
            IdsConfig::hamming(2).with_local_exact(true),
            IdsConfig::hamming(3).with_local_exact(true),
        ] {
            let r = iterated_ds(&inst, &cfg).unwrap();
            assert_eq!(r.status, ReportStatus::Optimal, "{cfg:?}");
            assert_eq!(r.max_regret, Some(opt), "{cfg:?}");
            assert_eq!(r.lower_bound, opt);
        }
    }

    #[test]
    fn wide_hamming_without_local_search_is_heuristic() {
        let r = iterated_ds(&knapsack(), &IdsConfig::hamming(3)).unwrap();
        assert!(matches!(
            r.status,
            ReportStatus::Feasible | ReportStatus::Optimal
        ));
        assert!(r.max_regret.unwrap() >= exhaustive(&knapsack()));
    }

    #[test]
    fn degenerate_intervals_stop_in_first_iteration() {
        let row = BipRow::new(vec![(0, 1), (1, 1), (2, 1)], ConstraintSense::Eq, 1);
        let inst =
            BipInstance::new("t", Direction::Max, vec![2, 5, 3], vec![2, 5, 3], vec![row]).unwrap();
        let r = iterated_ds(&inst, &IdsConfig::best_scenario()).unwrap();
        assert_eq!((r.iterations, r.max_regret), (1, Some(0)));
        assert_eq!(r.status, ReportStatus::Optimal);
    }

    #[test]
    fn empty_region() {
        let row = BipRow::new(vec![(0, 1), (1, 1)], ConstraintSense::Ge, 3);
        let inst =
            BipInstance::new("t", Direction::Min, vec![1, 1], vec![2, 2], vec![row]).unwrap();
        let r = iterated_ds(&inst, &IdsConfig::hamming(1)).unwrap();
        assert_eq!(r.status, ReportStatus::Infeasible);
    }

    #[test]
    fn trace_best_so_far_is_monotone() {
        let r = iterated_ds(&knapsack(), &IdsConfig::hamming(1)).unwrap();
        let b = r.best_so_far();
        assert!(b.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(b.last().copied(), r.max_regret);
    }

    #[test]
    fn rejects_zero_radius() {
        assert!(iterated_ds(&knapsack(), &IdsConfig::hamming(0)).is_err());
    }
}
