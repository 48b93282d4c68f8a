//! Configuration files, demand construction and report serialization.
//!
//! Configs and reports are JSON. Reals are written in the shortest form that
//! parses back to the same `f64`, so `load(emit(load(text))) == load(text)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    check_feasibility, total_cost, CachingPlan, DemandMatrix, Scenario, StorageCostFn,
};
use crate::oracle::RowShape;
use crate::simulator::SimResult;

/// Header of the sweep CSV. Column order is part of the file format.
pub const SWEEP_CSV_HEADER: &str = "sweep_param,sweep_value,dp_cost,popular_cost,random_cost_mean,random_cost_stderr,download_cost_dp,storage_cost_dp";

/// Environment variable overriding the default output directory.
pub const OUT_DIR_ENV: &str = "RETCACHE_OUT_DIR";

/// Zipf request probabilities `w_c = c^-γ / Σ_k k^-γ`, identical for every
/// requester.
pub fn zipf_demand(num_contents: usize, gamma: f64, num_requesters: usize) -> Result<DemandMatrix> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::domain(format!(
            "zipf shape must be finite and >= 0, got {gamma}"
        )));
    }
    if num_contents == 0 || num_requesters == 0 {
        return Err(Error::domain("zipf demand needs C >= 1 and R >= 1"));
    }
    let raw: Vec<f64> = (1..=num_contents).map(|c| (c as f64).powf(-gamma)).collect();
    let norm: f64 = raw.iter().sum();
    let row: Vec<f64> = raw.iter().map(|w| w / norm).collect();
    DemandMatrix::new(vec![row; num_requesters])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DemandSpec {
    Zipf { gamma: f64 },
    Matrix { rows: Vec<Vec<f64>> },
}

/// Parameter a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "H")]
    Helpers,
    #[serde(rename = "s")]
    CacheSize,
    #[serde(rename = "alpha", alias = "α")]
    StorageWeight,
    #[serde(rename = "gamma", alias = "γ")]
    ZipfShape,
    #[serde(rename = "lambda", alias = "λ")]
    ContactRate,
    #[serde(rename = "delta", alias = "δ")]
    SlotDuration,
    #[serde(rename = "T")]
    Slots,
    #[serde(rename = "C")]
    Contents,
    #[serde(rename = "R")]
    Requesters,
}

impl SweepParam {
    pub const ALL: [SweepParam; 9] = [
        SweepParam::Helpers,
        SweepParam::CacheSize,
        SweepParam::StorageWeight,
        SweepParam::ZipfShape,
        SweepParam::ContactRate,
        SweepParam::SlotDuration,
        SweepParam::Slots,
        SweepParam::Contents,
        SweepParam::Requesters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Helpers => "H",
            SweepParam::CacheSize => "s",
            SweepParam::StorageWeight => "alpha",
            SweepParam::ZipfShape => "gamma",
            SweepParam::ContactRate => "lambda",
            SweepParam::SlotDuration => "delta",
            SweepParam::Slots => "T",
            SweepParam::Contents => "C",
            SweepParam::Requesters => "R",
        }
    }

    fn symbol(self) -> Option<&'static str> {
        match self {
            SweepParam::StorageWeight => Some("α"),
            SweepParam::ZipfShape => Some("γ"),
            SweepParam::ContactRate => Some("λ"),
            SweepParam::SlotDuration => Some("δ"),
            _ => None,
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(
            self,
            SweepParam::Helpers
                | SweepParam::CacheSize
                | SweepParam::Slots
                | SweepParam::Contents
                | SweepParam::Requesters
        )
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.name() == s || p.symbol() == Some(s))
            .ok_or_else(|| {
                Error::validation(format!(
                    "unknown sweep parameter `{s}`; expected one of H, s, alpha, gamma, lambda, delta, T, C, R"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

/// Everything needed to build a scenario and its demand.
///
/// Omitted fields take the defaults `C=100, R=10, H=12, s=4, T=24, δ=1,
/// λ=1, α=1e-4, f(t)=t²` with Zipf demand of shape 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub num_contents: usize,
    pub num_requesters: usize,
    pub num_helpers: u32,
    pub cache_size_per_helper: u32,
    /// Optional; must equal `cache_size_per_helper * num_helpers` if given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_capacity: Option<u32>,
    pub num_slots: usize,
    pub slot_duration: f64,
    pub contact_rate: f64,
    pub storage_weight: f64,
    pub storage_cost: StorageCostFn,
    pub demand: DemandSpec,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepBlock>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_contents: 100,
            num_requesters: 10,
            num_helpers: 12,
            cache_size_per_helper: 4,
            total_capacity: None,
            num_slots: 24,
            slot_duration: 1.0,
            contact_rate: 1.0,
            storage_weight: 1e-4,
            storage_cost: StorageCostFn::Quadratic,
            demand: DemandSpec::Zipf { gamma: 1.0 },
            sweep: Vec::new(),
        }
    }
}

impl ScenarioConfig {
    pub fn scenario(&self) -> Result<Scenario> {
        let scenario = Scenario {
            num_contents: self.num_contents,
            num_requesters: self.num_requesters,
            num_helpers: self.num_helpers,
            cache_size_per_helper: self.cache_size_per_helper,
            num_slots: self.num_slots,
            slot_duration: self.slot_duration,
            contact_rate: self.contact_rate,
            storage_weight: self.storage_weight,
            storage_cost: self.storage_cost.clone(),
        };
        scenario.validate()?;
        if let Some(total) = self.total_capacity {
            if total != scenario.total_capacity() {
                return Err(Error::validation(format!(
                    "total_capacity {} does not equal cache_size_per_helper * num_helpers = {}",
                    total,
                    scenario.total_capacity()
                )));
            }
        }
        Ok(scenario)
    }

    pub fn demand(&self) -> Result<DemandMatrix> {
        match &self.demand {
            DemandSpec::Zipf { gamma } => {
                zipf_demand(self.num_contents, *gamma, self.num_requesters).map_err(|e| match e {
                    Error::Domain(m) => Error::Validation(m),
                    other => other,
                })
            }
            DemandSpec::Matrix { rows } => {
                let demand = DemandMatrix::new(rows.clone())?;
                if demand.num_requesters() != self.num_requesters
                    || demand.num_contents() != self.num_contents
                {
                    return Err(Error::validation(format!(
                        "demand matrix is {}x{} but num_requesters={} and num_contents={}",
                        demand.num_requesters(),
                        demand.num_contents(),
                        self.num_requesters,
                        self.num_contents
                    )));
                }
                Ok(demand)
            }
        }
    }

    /// Validated scenario and demand.
    pub fn build(&self) -> Result<(Scenario, DemandMatrix)> {
        let scenario = self.scenario()?;
        let demand = self.demand()?;
        for block in &self.sweep {
            if block.values.is_empty() {
                return Err(Error::validation(format!(
                    "sweep over {} lists no values",
                    block.param
                )));
            }
        }
        Ok((scenario, demand))
    }
}

/// Parses and validates a config.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })?;
    config.build()?;
    Ok(config)
}

pub fn emit_config(config: &ScenarioConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serializes")
}

/// Outcome of checking a plan's cost against the exhaustive optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub shape: RowShape,
    pub search_space: u64,
    pub oracle_cost: f64,
    pub dp_cost: f64,
    pub relative_gap: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub planner: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rng_algorithm: Option<String>,
    pub total_cost: f64,
    pub download_cost: f64,
    pub storage_cost: f64,
    pub feasible: bool,
    pub initial_counts: Vec<u32>,
    pub plan: CachingPlan,
    pub scenario: ScenarioConfig,
    /// Wall-clock planning time. Only recorded on request, since it makes
    /// otherwise identical reports differ.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub simulation: Option<SimResult>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleVerdict>,
}

impl PlanReport {
    pub fn new(planner: &str, plan: CachingPlan, config: &ScenarioConfig) -> Result<Self> {
        let (scenario, demand) = config.build()?;
        let cost = total_cost(&plan, &scenario, &demand)?;
        let feasible = check_feasibility(&plan, &scenario).is_feasible();
        let initial_counts = plan.rows().iter().map(|r| r[0]).collect();
        Ok(Self {
            planner: planner.to_string(),
            seed: None,
            rng_algorithm: None,
            total_cost: cost.total,
            download_cost: cost.download,
            storage_cost: cost.storage,
            feasible,
            initial_counts,
            plan,
            scenario: config.clone(),
            timing_ms: None,
            simulation: None,
            oracle: None,
        })
    }
}

pub fn emit_report(report: &PlanReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

pub fn load_report(text: &str) -> Result<PlanReport> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })
}

/// One sweep point: optimal and baseline costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep_param: SweepParam,
    pub sweep_value: f64,
    pub dp_cost: f64,
    pub popular_cost: f64,
    pub random_cost_mean: f64,
    pub random_cost_stderr: f64,
    pub download_cost_dp: f64,
    pub storage_cost_dp: f64,
}

pub fn emit_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.sweep_param,
            r.sweep_value,
            r.dp_cost,
            r.popular_cost,
            r.random_cost_mean,
            r.random_cost_stderr,
            r.download_cost_dp,
            r.storage_cost_dp
        ));
    }
    out
}
