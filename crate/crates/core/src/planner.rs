//! Capacity allocation across contents by dynamic programming.
//!
//! With per-content costs `z_c(h)` known, the remaining decision is how many
//! initial copies each content gets under the shared budget `S`. `a(k, i)` is
//! the cheapest cost of the first `k` contents using at most `i` copies:
//!
//! ```text
//! a(1, i) = min_{x <= min(i, H)} z_1(x)
//! a(k, i) = min_{x <= min(i, H)} z_k(x) + a(k - 1, i - x)
//! ```
//!
//! Full rows are kept for every content except the last, for which only the
//! cell `(C, S)` is needed. Backtracking through the argmin table recovers the
//! initial counts, and the z-table schedules expand them into a plan.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_feasibility, CachingPlan, Scenario};
use crate::retention::ZTable;

/// How equal-cost candidates are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Candidates are scanned in increasing helper count with a strict `<`,
    /// so the smallest count wins among equal costs. Contents are processed
    /// in index order and the last content is backtracked first, so on
    /// symmetric inputs lower-index contents receive the copies.
    SmallestCount,
}

impl TieBreak {
    pub fn describe(self) -> &'static str {
        match self {
            TieBreak::SmallestCount => {
                "smallest helper count wins on equal cost; lower content index is favoured"
            }
        }
    }
}

/// The tie rule used by every planner in this crate.
pub fn tie_break_policy() -> TieBreak {
    TieBreak::SmallestCount
}

/// Cost and argmin tables of the allocation recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct DpTables {
    /// `best_cost[k][i]` for contents `0..C-1` (all but the last).
    pub best_cost: Vec<Vec<f64>>,
    /// `best_choice[k][i]`, initial count of content `k` achieving
    /// `best_cost[k][i]`.
    pub best_choice: Vec<Vec<u32>>,
    /// `a(C, S)`.
    pub final_cost: f64,
    /// `b(C, S)`.
    pub final_choice: u32,
    pub capacity: u32,
}

impl DpTables {
    pub fn build(z: &ZTable, capacity: u32) -> Self {
        let contents = z.num_contents();
        let max_helpers = z.max_helpers();
        let width = capacity as usize + 1;
        let mut best_cost: Vec<Vec<f64>> = Vec::with_capacity(contents.saturating_sub(1));
        let mut best_choice: Vec<Vec<u32>> = Vec::with_capacity(contents.saturating_sub(1));

        for k in 0..contents.saturating_sub(1) {
            let mut cost_row = vec![0.0; width];
            let mut choice_row = vec![0; width];
            for i in 0..width {
                let limit = (i as u32).min(max_helpers);
                let (x, cost) = match best_cost.last() {
                    None => z.best_initial(k, limit),
                    Some(prev) => best_step(z, k, limit, |x| prev[i - x as usize]),
                };
                cost_row[i] = cost;
                choice_row[i] = x;
            }
            best_cost.push(cost_row);
            best_choice.push(choice_row);
        }

        let last = contents - 1;
        let limit = capacity.min(max_helpers);
        let (final_choice, final_cost) = match best_cost.last() {
            None => z.best_initial(last, limit),
            Some(prev) => best_step(z, last, limit, |x| prev[(capacity - x) as usize]),
        };

        Self {
            best_cost,
            best_choice,
            final_cost,
            final_choice,
            capacity,
        }
    }

    /// Initial helper counts of every content, recovered from the argmin
    /// table.
    pub fn backtrack(&self) -> Vec<u32> {
        let contents = self.best_choice.len() + 1;
        let mut counts = vec![0; contents];
        counts[contents - 1] = self.final_choice;
        let mut remaining = self.capacity - self.final_choice;
        for k in (0..contents - 1).rev() {
            let x = self.best_choice[k][remaining as usize];
            counts[k] = x;
            remaining -= x;
        }
        counts
    }
}

fn best_step(z: &ZTable, content: usize, limit: u32, rest: impl Fn(u32) -> f64) -> (u32, f64) {
    let mut best = (0, z.get(content, 0) + rest(0));
    for x in 1..=limit {
        let cost = z.get(content, x) + rest(x);
        if cost < best.1 {
            best = (x, cost);
        }
    }
    best
}

/// Optimal initial counts without expanding them into a plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub initial_counts: Vec<u32>,
    /// `a(C, S)`, equal to `Σ_c z_c(x_c)`.
    pub optimal_cost: f64,
    pub tables: DpTables,
}

fn check_dimensions(z: &ZTable, scenario: &Scenario) -> Result<()> {
    if z.num_contents() != scenario.num_contents || z.max_helpers() != scenario.num_helpers {
        return Err(Error::domain(format!(
            "z-table covers {} contents and H={} but the scenario has C={} and H={}",
            z.num_contents(),
            z.max_helpers(),
            scenario.num_contents,
            scenario.num_helpers
        )));
    }
    Ok(())
}

pub fn solve_allocation(z: &ZTable, scenario: &Scenario) -> Result<Allocation> {
    check_dimensions(z, scenario)?;
    let tables = DpTables::build(z, scenario.total_capacity());
    Ok(Allocation {
        initial_counts: tables.backtrack(),
        optimal_cost: tables.final_cost,
        tables,
    })
}

/// Optimal plan together with the allocation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub plan: CachingPlan,
    pub allocation: Allocation,
}

/// Expands initial counts into a plan using the z-table schedules.
pub fn expand_plan(z: &ZTable, initial_counts: &[u32], num_slots: usize) -> Result<CachingPlan> {
    if !z.has_schedules() {
        return Err(Error::domain(
            "z-table carries no schedules; build it with build_z_table",
        ));
    }
    let mut plan = CachingPlan::zeros(initial_counts.len(), num_slots);
    for (c, &x) in initial_counts.iter().enumerate() {
        let schedule = z.schedule(c, x).expect("schedules present");
        plan.set_row(c, schedule.counts());
    }
    Ok(plan)
}

/// Globally optimal caching plan for the scenario the z-table was built for.
pub fn solve(z: &ZTable, scenario: &Scenario) -> Result<Solution> {
    let allocation = solve_allocation(z, scenario)?;
    let plan = expand_plan(z, &allocation.initial_counts, scenario.num_slots)?;
    let verdict = check_feasibility(&plan, scenario);
    assert!(
        verdict.is_feasible(),
        "optimal plan violates constraints: {:?}",
        verdict.violations
    );
    Ok(Solution { plan, allocation })
}
