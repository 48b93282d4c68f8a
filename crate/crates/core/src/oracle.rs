//! Exhaustive reference solvers for small instances.
//!
//! These scan every candidate with no pruning. Candidates are visited in
//! lexicographic order (row-major over `(content, slot)`) and replaced only on
//! a strictly lower cost, so the reported minimizer is the lexicographically
//! first one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{plan_cost, CachingPlan, CostModel, DemandMatrix, Scenario};
use crate::retention::RetentionSchedule;

/// Largest number of plans [`brute_force_global`] will enumerate.
pub const GLOBAL_SEARCH_LIMIT: u128 = 10_000_000;
/// Largest number of schedules [`brute_force_schedules`] will enumerate.
pub const SCHEDULE_SEARCH_LIMIT: u128 = 1_000_000;

/// Which plans the global search admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowShape {
    /// Every integer matrix within range and capacity.
    Any,
    /// Only matrices whose rows never increase over time.
    Nonincreasing,
}

/// `(H + 1)^(C·T)`, saturating.
pub fn global_search_size(scenario: &Scenario) -> u128 {
    let base = u128::from(scenario.num_helpers) + 1;
    let cells = scenario.num_contents.saturating_mul(scenario.num_slots);
    let mut size: u128 = 1;
    for _ in 0..cells {
        size = size.saturating_mul(base);
        if size > GLOBAL_SEARCH_LIMIT {
            return size;
        }
    }
    size
}

/// Number of nonincreasing length-`slots` sequences starting at `initial`:
/// `binom(initial + slots - 1, slots - 1)`.
pub fn schedule_search_size(initial: u32, slots: usize) -> u128 {
    let k = slots.saturating_sub(1) as u128;
    let n = u128::from(initial) + k;
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Minimum-cost feasible plan over all integer matrices.
pub fn brute_force_global(
    scenario: &Scenario,
    demand: &DemandMatrix,
) -> Result<(CachingPlan, f64)> {
    brute_force_global_with(scenario, demand, RowShape::Any)
}

pub fn brute_force_global_with(
    scenario: &Scenario,
    demand: &DemandMatrix,
    shape: RowShape,
) -> Result<(CachingPlan, f64)> {
    let model = CostModel::new(scenario, demand)?;
    let size = global_search_size(scenario);
    if size > GLOBAL_SEARCH_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: GLOBAL_SEARCH_LIMIT,
        });
    }

    let contents = scenario.num_contents;
    let slots = scenario.num_slots;
    let h = scenario.num_helpers;
    let capacity = u64::from(scenario.total_capacity());
    let cost_of: Vec<Vec<Vec<f64>>> = (0..contents)
        .map(|c| {
            (0..slots)
                .map(|t| (0..=h).map(|x| model.delta(c, t, x)).collect())
                .collect()
        })
        .collect();

    let mut cells = vec![0u32; contents * slots];
    let mut best: Option<(Vec<u32>, f64)> = None;
    loop {
        if admissible(&cells, contents, slots, capacity, shape) {
            let cost: f64 = cells
                .iter()
                .enumerate()
                .map(|(i, &x)| cost_of[i / slots][i % slots][x as usize])
                .sum();
            if best.as_ref().is_none_or(|(_, b)| cost < *b) {
                best = Some((cells.clone(), cost));
            }
        }
        if !advance(&mut cells, h) {
            break;
        }
    }

    let (cells, _) = best.expect("the all-zero plan is always admissible");
    let plan = CachingPlan::from_rows(cells.chunks(slots).map(<[u32]>::to_vec).collect())?;
    let cost = plan_cost(&model, &plan).total;
    Ok((plan, cost))
}

fn admissible(cells: &[u32], contents: usize, slots: usize, capacity: u64, shape: RowShape) -> bool {
    if shape == RowShape::Nonincreasing
        && cells
            .chunks(slots)
            .any(|row| row.windows(2).any(|p| p[1] > p[0]))
    {
        return false;
    }
    (0..slots).all(|t| {
        (0..contents)
            .map(|c| u64::from(cells[c * slots + t]))
            .sum::<u64>()
            <= capacity
    })
}

/// Lexicographic successor with the last position fastest.
fn advance(cells: &mut [u32], max: u32) -> bool {
    for cell in cells.iter_mut().rev() {
        if *cell < max {
            *cell += 1;
            return true;
        }
        *cell = 0;
    }
    false
}

/// Minimum-cost nonincreasing schedule of one content starting at `initial`.
pub fn brute_force_schedules(
    content: usize,
    initial: u32,
    scenario: &Scenario,
    demand: &DemandMatrix,
) -> Result<(RetentionSchedule, f64)> {
    let model = CostModel::new(scenario, demand)?;
    if content >= scenario.num_contents {
        return Err(Error::domain(format!(
            "content index {} out of range 0..{}",
            content, scenario.num_contents
        )));
    }
    if initial > scenario.num_helpers {
        return Err(Error::domain(format!(
            "initial helper count {} exceeds H = {}",
            initial, scenario.num_helpers
        )));
    }
    let size = schedule_search_size(initial, scenario.num_slots);
    if size > SCHEDULE_SEARCH_LIMIT {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: SCHEDULE_SEARCH_LIMIT,
        });
    }

    let mut current = vec![initial; scenario.num_slots];
    let mut best: Option<(Vec<u32>, f64)> = None;
    enumerate_tails(&model, content, &mut current, 1, &mut best);
    let (counts, cost) = best.expect("at least one schedule exists");
    Ok((RetentionSchedule::new(counts)?, cost))
}

fn enumerate_tails(
    model: &CostModel,
    content: usize,
    current: &mut Vec<u32>,
    slot: usize,
    best: &mut Option<(Vec<u32>, f64)>,
) {
    if slot == current.len() {
        let cost: f64 = current
            .iter()
            .enumerate()
            .map(|(t, &x)| model.delta(content, t, x))
            .sum();
        if best.as_ref().is_none_or(|(_, b)| cost < *b) {
            *best = Some((current.clone(), cost));
        }
        return;
    }
    for x in 0..=current[slot - 1] {
        current[slot] = x;
        enumerate_tails(model, content, current, slot + 1, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::scenario;
    use crate::model::StorageCostFn;
    use crate::planner::solve;
    use crate::retention::{build_z_table, greedy_schedule};

    #[test]
    fn search_sizes() {
        let s = scenario(2, 1, 2, 1, 2, 0.1, StorageCostFn::Linear);
        assert_eq!(global_search_size(&s), 81);
        assert_eq!(schedule_search_size(0, 5), 1);
        assert_eq!(schedule_search_size(3, 1), 1);
        // x2 ≤ 2, x3 ≤ x2: (0,0),(1,0),(1,1),(2,0),(2,1),(2,2)
        assert_eq!(schedule_search_size(2, 3), 6);
    }

    #[test]
    fn single_cell_matches_base_row() {
        let s = scenario(1, 1, 5, 1, 1, 0.1, StorageCostFn::Constant);
        let d = DemandMatrix::new(vec![vec![1.0]]).unwrap();
        let (plan, cost) = brute_force_global(&s, &d).unwrap();
        let z = build_z_table(&s, &d).unwrap();
        let (x, zc) = z.best_initial(0, 5);
        assert_eq!(plan.get(0, 0), x);
        assert!((cost - zc).abs() < 1e-12);
    }

    #[test]
    fn free_storage_fills_everything() {
        let s = scenario(2, 1, 2, 2, 2, 0.0, StorageCostFn::Linear);
        let d = DemandMatrix::new(vec![vec![0.7, 0.3]]).unwrap();
        let (plan, _) = brute_force_global(&s, &d).unwrap();
        assert_eq!(plan.rows(), &[vec![2, 2], vec![2, 2]]);
    }

    #[test]
    fn matches_dp_on_small_instance() {
        let s = scenario(2, 2, 2, 1, 2, 0.05, StorageCostFn::Quadratic);
        let d = DemandMatrix::new(vec![vec![0.6, 0.4], vec![0.1, 0.9]]).unwrap();
        let (_, oracle) = brute_force_global(&s, &d).unwrap();
        let dp = solve(&build_z_table(&s, &d).unwrap(), &s).unwrap();
        assert!((oracle - dp.allocation.optimal_cost).abs() <= 1e-9 * oracle);
    }

    #[test]
    fn refuses_large_spaces() {
        let s = scenario(4, 1, 3, 1, 3, 0.1, StorageCostFn::Linear);
        let d = DemandMatrix::new(vec![vec![0.25; 4]]).unwrap();
        match brute_force_global(&s, &d) {
            Err(Error::SearchSpaceTooLarge { size, limit }) => {
                assert_eq!(size, 16_777_216);
                assert_eq!(limit, GLOBAL_SEARCH_LIMIT);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        let s = scenario(1, 1, 40, 1, 8, 0.1, StorageCostFn::Linear);
        let d = DemandMatrix::new(vec![vec![1.0]]).unwrap();
        assert!(matches!(
            brute_force_schedules(0, 40, &s, &d),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn schedule_oracle_examples() {
        let d = DemandMatrix::new(vec![vec![1.0]]).unwrap();
        let s = scenario(1, 1, 3, 1, 4, 0.1, StorageCostFn::Quadratic);
        let (zero, cost) = brute_force_schedules(0, 0, &s, &d).unwrap();
        assert_eq!(zero.counts(), &[0, 0, 0, 0]);
        assert!((cost - 4.0).abs() < 1e-12);

        let (_, oracle) = brute_force_schedules(0, 3, &s, &d).unwrap();
        let (_, greedy) = greedy_schedule(0, 3, &s, &d).unwrap();
        assert_eq!(oracle, greedy);

        let one = scenario(1, 1, 3, 1, 1, 0.1, StorageCostFn::Quadratic);
        let (sched, cost) = brute_force_schedules(0, 2, &one, &d).unwrap();
        assert_eq!(sched.counts(), &[2]);
        assert!((cost - ((-2.0f64).exp() + 0.2)).abs() < 1e-12);
    }
}
