//! Globally optimal proactive caching with retention-time storage cost for a
//! fleet of mobile helpers.
//!
//! The pipeline is [`retention::build_z_table`] (best schedule per content and
//! initial helper count) followed by [`planner::solve`] (allocation of the
//! shared cache budget). [`baselines`] holds the popular and random
//! comparison planners, [`oracle`] exhaustive reference solvers and
//! [`simulator`] a Monte Carlo check of the analytic download cost.
//!
//! ```
//! use retcache::{build_z_table, solve, total_cost, ScenarioConfig};
//!
//! let config = ScenarioConfig { num_contents: 20, num_helpers: 4, ..Default::default() };
//! let (scenario, demand) = config.build().unwrap();
//! let z = build_z_table(&scenario, &demand).unwrap();
//! let solution = solve(&z, &scenario).unwrap();
//! let cost = total_cost(&solution.plan, &scenario, &demand).unwrap();
//! assert!((cost.total - solution.allocation.optimal_cost).abs() < 1e-9 * cost.total);
//! ```

pub mod baselines;
pub mod cli;
pub mod error;
pub mod model;
pub mod oracle;
pub mod planner;
pub mod retention;
pub mod scenario_io;
pub mod simulator;
pub mod sweep;

pub use baselines::{popular_plan, random_plan, BaselineKind, RNG_ALGORITHM};
pub use error::{Error, Result};
pub use model::{
    check_feasibility, miss_probability, slot_cost, total_cost, CachingPlan, CostBreakdown,
    CostModel, DemandMatrix, Feasibility, Scenario, StorageCostFn, Violation,
};
pub use oracle::{brute_force_global, brute_force_global_with, brute_force_schedules, RowShape};
pub use planner::{solve, solve_allocation, tie_break_policy, Allocation, DpTables, Solution, TieBreak};
pub use retention::{build_z_table, greedy_schedule, RetentionSchedule, ZTable};
pub use scenario_io::{
    emit_config, emit_report, emit_sweep_csv, load_config, zipf_demand, DemandSpec, PlanReport,
    ScenarioConfig, SweepParam, SweepRow,
};
pub use simulator::{simulate, ContactMode, SimConfig, SimResult};
