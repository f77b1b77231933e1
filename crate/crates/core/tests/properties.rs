use proptest::prelude::*;

use regret_forge::bench::{aggregate, gap_percent, RunRecord, SCHEMA_VERSION};
use regret_forge::instances::{
    parse_chubeasley_mkp, parse_native, parse_orlib_gap, parse_orlib_gap_file, parse_orlib_scp,
    random_instance, serialize_native, RandomShape, SplitMix64,
};
use regret_forge::lp::{LpModel, VarBounds};
use regret_forge::milp::{solve_milp, MilpModel, MilpStatus, RankedSolutions, RankedStep};
use regret_forge::mmr::{
    best_scenario_cut, dominance_holds, evaluate_max_regret, fixed_scenario, iterated_ds,
};
use regret_forge::oracle::{brute_force_max_regret, brute_force_mmr};
use regret_forge::{
    BinarySolution, BipInstance, Direction, IdsConfig, Scenario, TimeBudget, ToleranceSet,
};

fn instance() -> impl Strategy<Value = BipInstance> {
    (
        any::<u64>(),
        2usize..=8,
        1usize..=3,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(seed, n, m, cover, wide)| {
            let shape = if cover {
                RandomShape::Covering
            } else {
                RandomShape::Knapsack
            };
            let delta = if wide { 0.3 } else { 0.1 };
            random_instance("p", shape, n, m, delta, &mut SplitMix64::new(seed)).unwrap()
        })
}

fn feasible(inst: &BipInstance) -> Vec<BinarySolution> {
    let n = inst.num_vars();
    (0..1u64 << n)
        .map(|m| BinarySolution::from_mask(m, n))
        .filter(|x| inst.is_feasible(x))
        .collect()
}

fn classical_model(inst: &BipInstance, costs: &[i64]) -> MilpModel {
    let mut lp = LpModel::new(inst.direction());
    for &c in costs {
        lp.add_var(c as f64, VarBounds::BINARY);
    }
    for row in inst.rows() {
        lp.add_constraint(row.to_linear()).unwrap();
    }
    MilpModel::new(lp, 0..costs.len()).unwrap()
}

fn better(dir: Direction, a: i64, b: i64) -> bool {
    match dir {
        Direction::Max => a > b,
        Direction::Min => a < b,
    }
}

fn scenario_in(inst: &BipInstance, seed: u64) -> Scenario {
    let mut rng = SplitMix64::new(seed);
    Scenario::new(
        inst.lower()
            .iter()
            .zip(inst.upper())
            .map(|(&l, &u)| rng.uniform(l, u))
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn milp_matches_enumeration(inst in instance(), seed in any::<u64>()) {
        let sc = scenario_in(&inst, seed);
        let model = classical_model(&inst, &sc.costs);
        let out = solve_milp(&model, None, &TimeBudget::unlimited(), &ToleranceSet::default()).unwrap();
        let pool = feasible(&inst);
        let best = pool.iter().map(|x| sc.value(x)).reduce(|a, b| if better(inst.direction(), b, a) { b } else { a });
        match best {
            Some(v) => {
                prop_assert_eq!(out.status, MilpStatus::Optimal);
                prop_assert!((out.objective_value.unwrap() - v as f64).abs() < 1e-6);
            }
            None => prop_assert_eq!(out.status, MilpStatus::Infeasible),
        }
    }

    #[test]
    fn ranked_enumeration_is_sorted_and_complete(inst in instance(), seed in any::<u64>()) {
        let sc = scenario_in(&inst, seed);
        let model = classical_model(&inst, &sc.costs);
        let mut ranked = RankedSolutions::new(&model, &ToleranceSet::default()).unwrap();
        let mut seen = Vec::new();
        while let RankedStep::Solution { point, objective } = ranked.next_solution(&TimeBudget::unlimited()).unwrap() {
            let x = BinarySolution::from_f64(&point, inst.num_vars());
            prop_assert!(inst.is_feasible(&x));
            prop_assert!((objective - sc.value(&x) as f64).abs() < 1e-6);
            let v = sc.value(&x);
            seen.push((x, v));
        }
        for w in seen.windows(2) {
            prop_assert!(!better(inst.direction(), w[1].1, w[0].1));
        }
        let mut pts: Vec<_> = seen.into_iter().map(|s| s.0).collect();
        pts.sort();
        pts.dedup();
        prop_assert_eq!(pts.len(), feasible(&inst).len());
    }

    #[test]
    fn evaluator_matches_oracle_and_dominates_every_scenario(inst in instance(), seed in any::<u64>()) {
        let pool = feasible(&inst);
        prop_assume!(!pool.is_empty());
        let x = &pool[(seed % pool.len() as u64) as usize];
        let ev = evaluate_max_regret(&inst, x, &TimeBudget::unlimited()).unwrap();
        prop_assert!(ev.exact);
        prop_assert!(ev.max_regret >= 0);
        prop_assert_eq!(ev.max_regret, brute_force_max_regret(&inst, x).unwrap().max_regret);
        let sc = scenario_in(&inst, seed.rotate_left(17));
        for y in &pool {
            let r = match inst.direction() {
                Direction::Max => sc.value(y) - sc.value(x),
                Direction::Min => sc.value(x) - sc.value(y),
            };
            prop_assert!(r <= ev.max_regret);
        }
    }

    #[test]
    fn dominated_points_never_have_smaller_regret(inst in instance(), a in any::<u64>(), b in any::<u64>()) {
        let pool = feasible(&inst);
        prop_assume!(!pool.is_empty());
        let x_bar = &pool[(a % pool.len() as u64) as usize];
        let x_hat = &pool[(b % pool.len() as u64) as usize];
        if dominance_holds(&inst, x_bar, x_hat).unwrap() {
            let rb = brute_force_max_regret(&inst, x_bar).unwrap().max_regret;
            let rh = brute_force_max_regret(&inst, x_hat).unwrap().max_regret;
            prop_assert!(rh <= rb);
        }
        prop_assert!(dominance_holds(&inst, x_bar, x_bar).unwrap());
    }

    #[test]
    fn cut_removes_exactly_the_dominated_set(inst in instance(), a in any::<u64>()) {
        let pool = feasible(&inst);
        prop_assume!(!pool.is_empty());
        let x_hat = &pool[(a % pool.len() as u64) as usize];
        let cut = best_scenario_cut(&inst, x_hat).unwrap();
        prop_assert!(!cut.is_satisfied(x_hat));
        for x in &pool {
            prop_assert_eq!(!cut.is_satisfied(x), dominance_holds(&inst, x, x_hat).unwrap());
        }
    }

    #[test]
    fn heuristics_bracket_the_optimum(inst in instance()) {
        let opt = brute_force_mmr(&inst).unwrap();
        prop_assume!(opt.max_regret.is_some());
        let opt = opt.max_regret.unwrap();
        let fix = fixed_scenario(&inst, &TimeBudget::unlimited()).unwrap();
        prop_assert!(fix.max_regret.unwrap() >= opt);
        prop_assert!(fix.max_regret.unwrap() <= 2 * opt);
        prop_assert!(fix.lower_bound <= opt);
        for cfg in [IdsConfig::hamming(1), IdsConfig::hamming(2), IdsConfig::best_scenario()] {
            let r = iterated_ds(&inst, &cfg).unwrap();
            prop_assert!(r.lower_bound <= opt);
            prop_assert!(r.max_regret.unwrap() >= opt);
        }
    }

    #[test]
    fn scaling_scales_regret(inst in instance(), k in 1i64..=7, seed in any::<u64>()) {
        let pool = feasible(&inst);
        prop_assume!(!pool.is_empty());
        let x = &pool[(seed % pool.len() as u64) as usize];
        let r = evaluate_max_regret(&inst, x, &TimeBudget::unlimited()).unwrap().max_regret;
        let rk = evaluate_max_regret(&inst.scaled(k), x, &TimeBudget::unlimited()).unwrap().max_regret;
        prop_assert_eq!(rk, k * r);
    }

    #[test]
    fn native_format_round_trips(inst in instance()) {
        let text = serialize_native(&inst);
        prop_assert_eq!(parse_native(&text).unwrap(), inst);
    }

    #[test]
    fn iterated_ds_is_deterministic(inst in instance()) {
        let a = iterated_ds(&inst, &IdsConfig::hamming(1)).unwrap();
        let b = iterated_ds(&inst, &IdsConfig::hamming(1)).unwrap();
        prop_assert_eq!(a.incumbent, b.incumbent);
        prop_assert_eq!(a.max_regret, b.max_regret);
        prop_assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn gap_is_a_percentage(obj in -1000i64..100_000, lb in -1000i64..200_000) {
        let g = gap_percent(obj, lb);
        prop_assert!((0.0..=100.0).contains(&g));
        if obj > 0 && lb >= obj {
            prop_assert_eq!(g, 0.0);
        }
    }

    #[test]
    fn parsers_never_panic(text in "[ 0-9a-z\\-\\.\n]{0,200}") {
        let _ = parse_native(&text);
        let _ = parse_orlib_scp(&text);
        let _ = parse_orlib_gap(&text);
        let _ = parse_orlib_gap_file(&text);
        let _ = parse_chubeasley_mkp(&text);
    }

    #[test]
    fn table_ignores_record_order(
        recs in proptest::collection::vec((0u8..3, 0u8..4, 0usize..5, proptest::option::of(0i64..50), 0i64..50, 0u32..40), 1..30),
        seed in any::<u64>(),
    ) {
        let algs = ["bc", "ds", "ids-h", "ids-b", "fix"];
        let records: Vec<RunRecord> = recs
            .iter()
            .map(|&(fam, inst, alg, obj, lb, t)| {
                let instance = format!("f{fam}-{inst}");
                RunRecord {
                    schema_version: SCHEMA_VERSION,
                    family: format!("f{fam}"),
                    instance,
                    algorithm: algs[alg].to_string(),
                    obj,
                    // Quarter seconds keep the averages exact whatever the order.
                    time_s: t as f64 / 4.0,
                    iterations: t as usize,
                    lower_bound: lb,
                    gap_percent: obj.map(|o| gap_percent(o, lb)),
                    status: "OPTIMAL".to_string(),
                }
            })
            .collect();
        let mut shuffled = records.clone();
        let mut rng = SplitMix64::new(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.uniform(0, i as i64) as usize);
        }
        prop_assert_eq!(aggregate(&records), aggregate(&shuffled));
    }
}
