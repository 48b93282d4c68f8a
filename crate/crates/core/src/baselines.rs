//! Comparison planners: popular caching and random caching.
//!
//! Both visit contents one at a time and give each the initial count that
//! minimizes its own z-table cost within the capacity still left. They only
//! differ in visiting order. Retention after the first slot follows the same
//! greedy schedules the optimal planner uses, so the comparison isolates the
//! allocation decision.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CachingPlan, DemandMatrix, Scenario};
use crate::planner::expand_plan;
use crate::retention::ZTable;

/// Name of the generator behind every seeded draw in this crate: ChaCha with
/// 8 rounds, seeded through `rand_core`'s `seed_from_u64` (PCG32 expansion of
/// the 64-bit seed into the 256-bit key). Uniform reals are
/// `(next_u64 >> 11) * 2^-53`.
pub const RNG_ALGORITHM: &str = "chacha8/seed_from_u64";

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform real in `[0, 1)` with 53 random bits.
pub(crate) fn unit_interval(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaselineKind {
    Popular,
    Random { seed: u64 },
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::Popular => "popular",
            BaselineKind::Random { .. } => "random",
        }
    }
}

fn check_dimensions(z: &ZTable, scenario: &Scenario, demand: &DemandMatrix) -> Result<()> {
    if z.num_contents() != scenario.num_contents
        || z.max_helpers() != scenario.num_helpers
        || demand.num_contents() != scenario.num_contents
    {
        return Err(Error::domain(
            "z-table, demand and scenario disagree on C or H",
        ));
    }
    Ok(())
}

/// Initial counts chosen by visiting contents in `order`.
pub fn allocate_in_order(z: &ZTable, order: &[usize], capacity: u32) -> Vec<u32> {
    let mut counts = vec![0; z.num_contents()];
    let mut remaining = capacity;
    for &c in order {
        let (x, _) = z.best_initial(c, remaining);
        counts[c] = x;
        remaining -= x;
    }
    counts
}

/// Contents by decreasing aggregate popularity, lower index first on ties.
pub fn popularity_order(popularity: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..popularity.len()).collect();
    order.sort_by(|&a, &b| popularity[b].total_cmp(&popularity[a]).then(a.cmp(&b)));
    order
}

/// Visiting order drawn without replacement, each draw proportional to
/// popularity among the contents not yet drawn.
pub fn weighted_order(popularity: &[f64], seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    let mut pool: Vec<usize> = (0..popularity.len()).collect();
    let mut order = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let total: f64 = pool.iter().map(|&c| popularity[c]).sum();
        let pick = if total > 0.0 {
            let target = unit_interval(&mut rng) * total;
            let mut acc = 0.0;
            let mut pick = pool.len() - 1;
            for (i, &c) in pool.iter().enumerate() {
                acc += popularity[c];
                if target < acc {
                    pick = i;
                    break;
                }
            }
            // Rounding can push the target past the last positive weight.
            while popularity[pool[pick]] == 0.0 && pick > 0 {
                pick -= 1;
            }
            pick
        } else {
            0
        };
        order.push(pool.remove(pick));
    }
    order
}

pub fn popular_plan(z: &ZTable, scenario: &Scenario, demand: &DemandMatrix) -> Result<CachingPlan> {
    check_dimensions(z, scenario, demand)?;
    let order = popularity_order(&demand.popularity());
    let counts = allocate_in_order(z, &order, scenario.total_capacity());
    expand_plan(z, &counts, scenario.num_slots)
}

pub fn random_plan(
    z: &ZTable,
    scenario: &Scenario,
    demand: &DemandMatrix,
    seed: u64,
) -> Result<CachingPlan> {
    check_dimensions(z, scenario, demand)?;
    let order = weighted_order(&demand.popularity(), seed);
    let counts = allocate_in_order(z, &order, scenario.total_capacity());
    expand_plan(z, &counts, scenario.num_slots)
}

pub fn baseline_plan(
    kind: BaselineKind,
    z: &ZTable,
    scenario: &Scenario,
    demand: &DemandMatrix,
) -> Result<CachingPlan> {
    match kind {
        BaselineKind::Popular => popular_plan(z, scenario, demand),
        BaselineKind::Random { seed } => random_plan(z, scenario, demand, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::scenario;
    use crate::model::{check_feasibility, total_cost, StorageCostFn};
    use crate::planner::solve;
    use crate::retention::build_z_table;
    use crate::scenario_io::zipf_demand;

    #[test]
    fn zipf_puts_first_content_first() {
        let d = zipf_demand(10, 1.0, 3).unwrap();
        assert_eq!(popularity_order(&d.popularity())[0], 0);
        assert_eq!(popularity_order(&[0.2, 0.4, 0.4]), vec![1, 2, 0]);
    }

    #[test]
    fn exhausted_capacity_leaves_zeros() {
        let z = ZTable::from_costs(vec![vec![5.0, 1.0, 0.5]; 4]).unwrap();
        let counts = allocate_in_order(&z, &[0, 1, 2, 3], 3);
        assert_eq!(counts, vec![2, 1, 0, 0]);
    }

    #[test]
    fn random_order_is_seeded() {
        let pop = vec![1.0; 12];
        let a = weighted_order(&pop, 7);
        assert_eq!(a, weighted_order(&pop, 7));
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..12).collect::<Vec<_>>());
        assert_ne!(a, weighted_order(&pop, 8));
    }

    #[test]
    fn zero_weight_contents_come_last() {
        let pop = vec![0.0, 0.5, 0.0, 0.5];
        for seed in 0..20 {
            let order = weighted_order(&pop, seed);
            assert!(order[..2].iter().all(|&c| c == 1 || c == 3));
        }
    }

    #[test]
    fn single_content_random_equals_popular() {
        let s = scenario(1, 2, 3, 1, 3, 0.02, StorageCostFn::Quadratic);
        let d = DemandMatrix::new(vec![vec![1.0]; 2]).unwrap();
        let z = build_z_table(&s, &d).unwrap();
        let p = popular_plan(&z, &s, &d).unwrap();
        for seed in 0..5 {
            assert_eq!(random_plan(&z, &s, &d, seed).unwrap(), p);
        }
    }

    #[test]
    fn baselines_are_feasible_and_dominated() {
        let s = scenario(20, 5, 4, 2, 6, 0.002, StorageCostFn::Quadratic);
        let d = zipf_demand(20, 0.9, 5).unwrap();
        let z = build_z_table(&s, &d).unwrap();
        let dp = total_cost(&solve(&z, &s).unwrap().plan, &s, &d).unwrap().total;
        let popular = popular_plan(&z, &s, &d).unwrap();
        assert!(check_feasibility(&popular, &s).is_feasible());
        assert!(dp <= total_cost(&popular, &s, &d).unwrap().total + 1e-9);
        for seed in 0..10 {
            let random = random_plan(&z, &s, &d, seed).unwrap();
            assert!(check_feasibility(&random, &s).is_feasible());
            assert!(dp <= total_cost(&random, &s, &d).unwrap().total + 1e-9);
        }
    }
}
