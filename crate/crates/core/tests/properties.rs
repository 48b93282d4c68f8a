mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use retcache::baselines::{popular_plan, random_plan};
use retcache::model::relative_gap;
use retcache::{
    build_z_table, check_feasibility, emit_config, greedy_schedule, load_config, miss_probability,
    slot_cost, solve, total_cost, CachingPlan, DemandMatrix, DemandSpec, ScenarioConfig,
    StorageCostFn,
};

use common::{random_instance, rng, Instance};

fn small_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let contents = r.random_range(1..=5);
    let helpers = r.random_range(1..=5);
    let cache = r.random_range(1..=3);
    let slots = r.random_range(1..=5);
    random_instance(&mut r, contents, helpers, cache, slots)
}

fn random_plan_matrix(seed: u64, inst: &Instance) -> CachingPlan {
    let mut r = rng(seed);
    let h = inst.scenario.num_helpers;
    let rows = (0..inst.scenario.num_contents)
        .map(|_| (0..inst.scenario.num_slots).map(|_| r.random_range(0..=h)).collect())
        .collect();
    CachingPlan::from_rows(rows).unwrap()
}

/// Every nonincreasing sequence of `len` values starting at `first`.
fn nonincreasing_from(first: u32, len: usize) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, len: usize, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let top = *prefix.last().unwrap();
        for x in 0..=top {
            prefix.push(x);
            go(prefix, len, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut vec![first], len, &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn miss_probability_is_multiplicative(seed in any::<u64>(), a in 0u32..=5, b in 0u32..=5) {
        let mut inst = small_instance(seed);
        inst.scenario.num_helpers = 10;
        let s = &inst.scenario;
        let pa = miss_probability(a, s).unwrap();
        let pb = miss_probability(b, s).unwrap();
        let pab = miss_probability(a + b, s).unwrap();
        prop_assert!((pa * pb - pab).abs() <= 1e-12 * pab.max(1e-300));
        prop_assert_eq!(miss_probability(0, s).unwrap(), 1.0);
        prop_assert!(pab <= pa);
    }

    #[test]
    fn total_cost_is_sum_of_slot_costs(seed in any::<u64>()) {
        let inst = small_instance(seed);
        let plan = random_plan_matrix(seed ^ 0xabc, &inst);
        let cost = total_cost(&plan, &inst.scenario, &inst.demand).unwrap();
        let mut sum = 0.0;
        for c in 0..inst.scenario.num_contents {
            for t in 0..inst.scenario.num_slots {
                sum += slot_cost(c, t, plan.get(c, t), &inst.scenario, &inst.demand).unwrap();
            }
        }
        prop_assert!(relative_gap(cost.total, sum) <= 1e-12);
        prop_assert!(relative_gap(cost.download + cost.storage, cost.total) <= 1e-12);
    }

    #[test]
    fn greedy_beats_every_nonincreasing_schedule(seed in any::<u64>()) {
        let inst = small_instance(seed);
        let s = &inst.scenario;
        for c in 0..s.num_contents {
            for h in 0..=s.num_helpers {
                let (greedy, cost) = greedy_schedule(c, h, s, &inst.demand).unwrap();
                prop_assert_eq!(greedy.initial(), h);
                let mut best = f64::INFINITY;
                for seq in nonincreasing_from(h, s.num_slots) {
                    let z: f64 = seq
                        .iter()
                        .enumerate()
                        .map(|(t, &x)| slot_cost(c, t, x, s, &inst.demand).unwrap())
                        .sum();
                    best = best.min(z);
                }
                prop_assert!(cost <= best * (1.0 + 1e-12) + 1e-15, "greedy {} best {}", cost, best);
            }
        }
    }

    #[test]
    fn greedy_takes_capped_unconstrained_minimizer(seed in any::<u64>()) {
        let inst = small_instance(seed);
        let s = &inst.scenario;
        let z = build_z_table(s, &inst.demand).unwrap();
        for (c, pop) in inst.demand.popularity().into_iter().enumerate() {
            let (sched, _) = greedy_schedule(c, s.num_helpers, s, &inst.demand).unwrap();
            for t in 1..s.num_slots {
                let prev = sched.counts()[t - 1];
                let cost = |x: u32| slot_cost(c, t, x, s, &inst.demand).unwrap();
                let chosen = sched.counts()[t];
                prop_assert!(chosen <= prev);
                for x in 0..=prev {
                    prop_assert!(cost(chosen) <= cost(x));
                }
            }
            let expected = s.num_slots as f64 * pop;
            prop_assert!(relative_gap(z.get(c, 0), expected) <= 1e-12);
        }
    }

    #[test]
    fn download_cost_ignores_requester_order(seed in any::<u64>()) {
        let inst = small_instance(seed);
        let plan = random_plan_matrix(seed.wrapping_add(1), &inst);
        let mut rows = inst.demand.rows().to_vec();
        rows.shuffle(&mut rng(seed));
        let shuffled = DemandMatrix::new(rows).unwrap();
        let a = total_cost(&plan, &inst.scenario, &inst.demand).unwrap();
        let b = total_cost(&plan, &inst.scenario, &shuffled).unwrap();
        prop_assert!(relative_gap(a.download, b.download) <= 1e-12);
        prop_assert_eq!(a.storage, b.storage);
    }

    #[test]
    fn every_planner_is_feasible_and_monotone(seed in any::<u64>(), rseed in any::<u64>()) {
        let inst = small_instance(seed);
        let z = build_z_table(&inst.scenario, &inst.demand).unwrap();
        for c in 0..inst.scenario.num_contents {
            for h in 0..=inst.scenario.num_helpers {
                let counts = z.schedule(c, h).unwrap().counts();
                prop_assert!(counts.windows(2).all(|w| w[1] <= w[0]));
            }
        }
        let dp = solve(&z, &inst.scenario).unwrap().plan;
        let popular = popular_plan(&z, &inst.scenario, &inst.demand).unwrap();
        let random = random_plan(&z, &inst.scenario, &inst.demand, rseed).unwrap();
        let dp_cost = total_cost(&dp, &inst.scenario, &inst.demand).unwrap().total;
        for plan in [&dp, &popular, &random] {
            prop_assert!(check_feasibility(plan, &inst.scenario).is_feasible());
            prop_assert!(plan.has_nonincreasing_rows());
            let cost = total_cost(plan, &inst.scenario, &inst.demand).unwrap().total;
            prop_assert!(dp_cost <= cost * (1.0 + 1e-12));
        }
    }

    #[test]
    fn config_round_trips(
        contents in 1usize..50,
        helpers in 1u32..20,
        cache in 1u32..8,
        slots in 1usize..30,
        alpha in 0.0f64..1.0,
        gamma in 0.1f64..3.0,
        quadratic in any::<bool>(),
    ) {
        let config = ScenarioConfig {
            num_contents: contents,
            num_helpers: helpers,
            cache_size_per_helper: cache,
            num_slots: slots,
            storage_weight: alpha,
            storage_cost: if quadratic { StorageCostFn::Quadratic } else { StorageCostFn::Linear },
            demand: DemandSpec::Zipf { gamma },
            ..ScenarioConfig::default()
        };
        let back = load_config(&emit_config(&config)).unwrap();
        prop_assert_eq!(&back, &config);
        prop_assert_eq!(emit_config(&back), emit_config(&config));
    }
}
