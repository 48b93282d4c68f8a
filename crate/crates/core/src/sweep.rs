//! Planner comparison and one-parameter sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{popular_plan, random_plan};
use crate::error::{Error, Result};
use crate::model::{total_cost, CostBreakdown};
use crate::planner::solve;
use crate::retention::build_z_table;
use crate::scenario_io::{DemandSpec, ScenarioConfig, SweepParam, SweepRow};

/// Values swept when none are given: the ranges of the reference experiments.
pub fn default_values(param: SweepParam) -> Option<Vec<f64>> {
    match param {
        SweepParam::Helpers => Some(vec![4.0, 8.0, 12.0, 16.0, 20.0]),
        SweepParam::CacheSize => Some((1..=8).map(f64::from).collect()),
        SweepParam::StorageWeight => Some(vec![1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2]),
        SweepParam::ZipfShape => Some(vec![0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]),
        _ => None,
    }
}

fn as_count(param: SweepParam, value: f64) -> Result<u64> {
    if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
        return Err(Error::validation(format!(
            "sweep value {value} for {param} must be a positive integer"
        )));
    }
    Ok(value as u64)
}

/// `config` with one parameter replaced.
pub fn apply(config: &ScenarioConfig, param: SweepParam, value: f64) -> Result<ScenarioConfig> {
    let mut out = config.clone();
    out.sweep.clear();
    if param.is_integer() {
        let n = as_count(param, value)?;
        match param {
            SweepParam::Helpers => {
                out.num_helpers = n as u32;
                out.total_capacity = None;
            }
            SweepParam::CacheSize => {
                out.cache_size_per_helper = n as u32;
                out.total_capacity = None;
            }
            SweepParam::Slots => out.num_slots = n as usize,
            SweepParam::Contents => out.num_contents = n as usize,
            SweepParam::Requesters => out.num_requesters = n as usize,
            _ => unreachable!(),
        }
    } else {
        match param {
            SweepParam::StorageWeight => out.storage_weight = value,
            SweepParam::ContactRate => out.contact_rate = value,
            SweepParam::SlotDuration => out.slot_duration = value,
            SweepParam::ZipfShape => match &mut out.demand {
                DemandSpec::Zipf { gamma } => *gamma = value,
                DemandSpec::Matrix { .. } => {
                    return Err(Error::validation(
                        "cannot sweep gamma with an explicit demand matrix",
                    ))
                }
            },
            _ => unreachable!(),
        }
    }
    out.build()?;
    Ok(out)
}

/// Costs of the three planners on one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub dp: CostBreakdown,
    pub popular: CostBreakdown,
    pub random: Vec<CostBreakdown>,
    pub seeds: Vec<u64>,
}

impl Comparison {
    /// Mean and standard error of the random baseline's total cost.
    pub fn random_summary(&self) -> (f64, f64) {
        let totals: Vec<f64> = self.random.iter().map(|c| c.total).collect();
        mean_and_stderr(&totals)
    }
}

pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn compare(config: &ScenarioConfig, seeds: &[u64]) -> Result<Comparison> {
    let (scenario, demand) = config.build()?;
    let z = build_z_table(&scenario, &demand)?;
    let dp = solve(&z, &scenario)?;
    let popular = popular_plan(&z, &scenario, &demand)?;
    let random = seeds
        .par_iter()
        .map(|&seed| {
            let plan = random_plan(&z, &scenario, &demand, seed)?;
            total_cost(&plan, &scenario, &demand)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Comparison {
        dp: total_cost(&dp.plan, &scenario, &demand)?,
        popular: total_cost(&popular, &scenario, &demand)?,
        random,
        seeds: seeds.to_vec(),
    })
}

/// Seeds `base, base + 1, ..` for `count` random-baseline replications.
pub fn seed_list(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_add(i)).collect()
}

/// One row per value, in input order.
pub fn run_sweep(
    config: &ScenarioConfig,
    param: SweepParam,
    values: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::validation(format!("sweep over {param} lists no values")));
    }
    values
        .par_iter()
        .map(|&value| {
            let point = apply(config, param, value)?;
            let cmp = compare(&point, seeds)?;
            let (random_cost_mean, random_cost_stderr) = cmp.random_summary();
            Ok(SweepRow {
                sweep_param: param,
                sweep_value: value,
                dp_cost: cmp.dp.total,
                popular_cost: cmp.popular.total,
                random_cost_mean,
                random_cost_stderr,
                download_cost_dp: cmp.dp.download,
                storage_cost_dp: cmp.dp.storage,
            })
        })
        .collect()
}
