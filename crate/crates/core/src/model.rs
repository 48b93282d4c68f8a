//! Domain types and the closed-form cost model.
//!
//! A helper holding content `c` is met by a requester within a slot of length
//! `δ` with probability `1 - exp(-λδ)`; with `x` such helpers the requester
//! misses all of them with probability `exp(-xλδ)` and downloads from the
//! server at unit cost. Storing one copy in slot `t` costs `α·f(t)`.
//!
//! Content and slot indices are zero-based in this API. The storage cost
//! function is evaluated on one-based slot numbers, so slot index `t` pays
//! `f(t + 1)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on requester row sums of a [`DemandMatrix`].
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Storage cost per cached copy as a function of the one-based slot number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StorageCostFn {
    /// `f(t) = t²`
    Quadratic,
    /// `f(t) = t`
    Linear,
    /// `f(t) = 1`. Only strictly increasing (and therefore valid) when `T = 1`.
    Constant,
    /// Explicit values `f(1), .., f(T)`.
    Table { values: Vec<f64> },
}

impl StorageCostFn {
    /// Evaluates `f` at the one-based slot number `t`.
    ///
    /// Returns `None` for `t = 0` or past the end of a table.
    pub fn at(&self, t: usize) -> Option<f64> {
        if t == 0 {
            return None;
        }
        match self {
            StorageCostFn::Quadratic => Some((t as f64) * (t as f64)),
            StorageCostFn::Linear => Some(t as f64),
            StorageCostFn::Constant => Some(1.0),
            StorageCostFn::Table { values } => values.get(t - 1).copied(),
        }
    }

    /// `f(1), .., f(num_slots)`, after checking that they are finite,
    /// nonnegative and strictly increasing.
    pub fn values(&self, num_slots: usize) -> Result<Vec<f64>> {
        if let StorageCostFn::Table { values } = self {
            if values.len() != num_slots {
                return Err(Error::validation(format!(
                    "storage cost table has {} entries but the horizon has {} slots",
                    values.len(),
                    num_slots
                )));
            }
        }
        let values: Vec<f64> = (1..=num_slots)
            .map(|t| self.at(t).expect("slot within table"))
            .collect();
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::validation(format!(
                    "storage cost f({}) = {} must be finite and nonnegative",
                    i + 1,
                    v
                )));
            }
        }
        for (i, pair) in values.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(Error::validation(format!(
                    "storage cost must be strictly increasing: f({}) = {} but f({}) = {}",
                    i + 2,
                    pair[1],
                    i + 1,
                    pair[0]
                )));
            }
        }
        Ok(values)
    }
}

/// All model parameters of one planning period.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// C, size of the content library.
    pub num_contents: usize,
    /// R
    pub num_requesters: usize,
    /// H
    pub num_helpers: u32,
    /// s, contents per helper cache.
    pub cache_size_per_helper: u32,
    /// T
    pub num_slots: usize,
    /// δ, hours.
    pub slot_duration: f64,
    /// λ, contacts per hour between any two vehicles.
    pub contact_rate: f64,
    /// α
    pub storage_weight: f64,
    pub storage_cost: StorageCostFn,
}

impl Scenario {
    /// Checks every scenario invariant.
    pub fn validate(&self) -> Result<()> {
        if self.num_contents == 0 {
            return Err(Error::validation("num_contents must be at least 1"));
        }
        if self.num_requesters == 0 {
            return Err(Error::validation("num_requesters must be at least 1"));
        }
        if self.num_helpers == 0 {
            return Err(Error::validation("num_helpers must be at least 1"));
        }
        if self.cache_size_per_helper == 0 {
            return Err(Error::validation("cache_size_per_helper must be at least 1"));
        }
        if self.num_slots == 0 {
            return Err(Error::validation("num_slots must be at least 1"));
        }
        if self
            .cache_size_per_helper
            .checked_mul(self.num_helpers)
            .is_none()
        {
            return Err(Error::validation(
                "total capacity cache_size_per_helper * num_helpers overflows",
            ));
        }
        if !(self.slot_duration.is_finite() && self.slot_duration > 0.0) {
            return Err(Error::validation("slot_duration must be finite and > 0"));
        }
        if !(self.contact_rate.is_finite() && self.contact_rate > 0.0) {
            return Err(Error::validation("contact_rate must be finite and > 0"));
        }
        if !(self.storage_weight.is_finite() && self.storage_weight >= 0.0) {
            return Err(Error::validation("storage_weight must be finite and >= 0"));
        }
        self.storage_cost.values(self.num_slots)?;
        Ok(())
    }

    /// S = s·H, the number of cached copies the fleet holds per slot.
    pub fn total_capacity(&self) -> u32 {
        self.cache_size_per_helper * self.num_helpers
    }

    /// λδ, the expected number of contacts with one helper per slot.
    pub fn contacts_per_slot(&self) -> f64 {
        self.contact_rate * self.slot_duration
    }
}

/// Per-requester request probabilities `w_rc`, stored row-major (R×C).
#[derive(Debug, Clone, PartialEq)]
pub struct DemandMatrix {
    rows: Vec<Vec<f64>>,
}

impl DemandMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::validation("demand matrix has no requesters"));
        };
        let width = first.len();
        if width == 0 {
            return Err(Error::validation("demand matrix has no contents"));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::validation(format!(
                    "demand row {} has {} entries, expected {}",
                    r,
                    row.len(),
                    width
                )));
            }
            if let Some((c, w)) = row
                .iter()
                .enumerate()
                .find(|(_, w)| !(w.is_finite() && (0.0..=1.0).contains(*w)))
            {
                return Err(Error::validation(format!(
                    "demand entry ({}, {}) = {} is not a probability",
                    r, c, w
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::validation(format!(
                    "demand row {} sums to {} instead of 1",
                    r, sum
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn num_requesters(&self) -> usize {
        self.rows.len()
    }

    pub fn num_contents(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn get(&self, requester: usize, content: usize) -> f64 {
        self.rows[requester][content]
    }

    /// Aggregate popularity `Σ_r w_rc` of every content.
    pub fn popularity(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.num_contents()];
        for row in &self.rows {
            for (acc, w) in sums.iter_mut().zip(row) {
                *acc += w;
            }
        }
        sums
    }

    fn check_matches(&self, scenario: &Scenario) -> Result<()> {
        if self.num_requesters() != scenario.num_requesters
            || self.num_contents() != scenario.num_contents
        {
            return Err(Error::domain(format!(
                "demand matrix is {}x{} but the scenario has R={} and C={}",
                self.num_requesters(),
                self.num_contents(),
                scenario.num_requesters,
                scenario.num_contents
            )));
        }
        Ok(())
    }
}

/// Number of helpers `x_ct` holding each content in each slot (C×T).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CachingPlan {
    rows: Vec<Vec<u32>>,
}

impl CachingPlan {
    pub fn zeros(num_contents: usize, num_slots: usize) -> Self {
        Self {
            rows: vec![vec![0; num_slots]; num_contents],
        }
    }

    /// Builds a plan from rectangular rows. Range and capacity are not
    /// checked here, see [`check_feasibility`].
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::domain("plan rows have different lengths"));
        }
        Ok(Self { rows })
    }

    pub fn num_contents(&self) -> usize {
        self.rows.len()
    }

    pub fn num_slots(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn get(&self, content: usize, slot: usize) -> u32 {
        self.rows[content][slot]
    }

    pub fn set(&mut self, content: usize, slot: usize, helpers: u32) {
        self.rows[content][slot] = helpers;
    }

    pub fn row(&self, content: usize) -> &[u32] {
        &self.rows[content]
    }

    pub(crate) fn set_row(&mut self, content: usize, row: &[u32]) {
        self.rows[content].copy_from_slice(row);
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Copies stored in slot `slot` across all contents.
    pub fn slot_load(&self, slot: usize) -> u64 {
        self.rows.iter().map(|r| u64::from(r[slot])).sum()
    }

    /// Whether every row is nonincreasing over time.
    pub fn has_nonincreasing_rows(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.windows(2).all(|p| p[1] <= p[0]))
    }

    fn check_matches(&self, scenario: &Scenario) -> Result<()> {
        if self.num_contents() != scenario.num_contents || self.num_slots() != scenario.num_slots
        {
            return Err(Error::domain(format!(
                "plan is {}x{} but the scenario has C={} and T={}",
                self.num_contents(),
                self.num_slots(),
                scenario.num_contents,
                scenario.num_slots
            )));
        }
        Ok(())
    }
}

/// A scenario with its popularity sums and storage costs evaluated once.
///
/// Every optimizer works through this type: the cost of holding content `c`
/// in a slot depends on demand only through `Σ_r w_rc`.
#[derive(Debug, Clone)]
pub struct CostModel {
    popularity: Vec<f64>,
    storage: Vec<f64>,
    contacts_per_slot: f64,
    storage_weight: f64,
    num_helpers: u32,
}

impl CostModel {
    pub fn new(scenario: &Scenario, demand: &DemandMatrix) -> Result<Self> {
        scenario.validate()?;
        demand.check_matches(scenario)?;
        Ok(Self {
            popularity: demand.popularity(),
            storage: scenario.storage_cost.values(scenario.num_slots)?,
            contacts_per_slot: scenario.contacts_per_slot(),
            storage_weight: scenario.storage_weight,
            num_helpers: scenario.num_helpers,
        })
    }

    pub fn num_contents(&self) -> usize {
        self.popularity.len()
    }

    pub fn num_slots(&self) -> usize {
        self.storage.len()
    }

    pub fn num_helpers(&self) -> u32 {
        self.num_helpers
    }

    pub fn popularity(&self) -> &[f64] {
        &self.popularity
    }

    pub fn miss_probability(&self, helpers: u32) -> f64 {
        (-f64::from(helpers) * self.contacts_per_slot).exp()
    }

    /// Expected downloads of `content` in one slot with `helpers` copies.
    pub fn expected_misses(&self, content: usize, helpers: u32) -> f64 {
        self.popularity[content] * self.miss_probability(helpers)
    }

    pub fn storage_cost(&self, slot: usize, helpers: u32) -> f64 {
        self.storage_weight * self.storage[slot] * f64::from(helpers)
    }

    /// Δ: download plus storage cost of `content` in `slot`. Indices are
    /// not checked.
    pub fn delta(&self, content: usize, slot: usize, helpers: u32) -> f64 {
        self.expected_misses(content, helpers) + self.storage_cost(slot, helpers)
    }
}

/// Probability that a requester meets none of `helpers` helpers in a slot.
pub fn miss_probability(helpers: u32, scenario: &Scenario) -> Result<f64> {
    if helpers > scenario.num_helpers {
        return Err(Error::domain(format!(
            "helper count {} exceeds H = {}",
            helpers, scenario.num_helpers
        )));
    }
    Ok((-f64::from(helpers) * scenario.contacts_per_slot()).exp())
}

/// Δ(x) for one content in one slot.
pub fn slot_cost(
    content: usize,
    slot: usize,
    helpers: u32,
    scenario: &Scenario,
    demand: &DemandMatrix,
) -> Result<f64> {
    let model = CostModel::new(scenario, demand)?;
    if content >= scenario.num_contents {
        return Err(Error::domain(format!(
            "content index {} out of range 0..{}",
            content, scenario.num_contents
        )));
    }
    if slot >= scenario.num_slots {
        return Err(Error::domain(format!(
            "slot index {} out of range 0..{}",
            slot, scenario.num_slots
        )));
    }
    if helpers > scenario.num_helpers {
        return Err(Error::domain(format!(
            "helper count {} exceeds H = {}",
            helpers, scenario.num_helpers
        )));
    }
    Ok(model.delta(content, slot, helpers))
}

/// Cost of a plan split into its two components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    pub download: f64,
    pub storage: f64,
}

/// Expected download cost plus weighted storage cost of `plan`.
pub fn total_cost(
    plan: &CachingPlan,
    scenario: &Scenario,
    demand: &DemandMatrix,
) -> Result<CostBreakdown> {
    let model = CostModel::new(scenario, demand)?;
    plan.check_matches(scenario)?;
    Ok(plan_cost(&model, plan))
}

pub(crate) fn plan_cost(model: &CostModel, plan: &CachingPlan) -> CostBreakdown {
    let mut download = 0.0;
    let mut storage = 0.0;
    for (c, row) in plan.rows().iter().enumerate() {
        for (t, &x) in row.iter().enumerate() {
            download += model.expected_misses(c, x);
            storage += model.storage_cost(t, x);
        }
    }
    CostBreakdown {
        total: download + storage,
        download,
        storage,
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// One broken constraint of a plan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DimensionMismatch {
        contents: usize,
        slots: usize,
        expected_contents: usize,
        expected_slots: usize,
    },
    EntryOutOfRange {
        content: usize,
        slot: usize,
        helpers: u32,
        max: u32,
    },
    CapacityExceeded {
        slot: usize,
        load: u64,
        capacity: u32,
        excess: u64,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub violations: Vec<Violation>,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every range and per-slot capacity violation of `plan`.
pub fn check_feasibility(plan: &CachingPlan, scenario: &Scenario) -> Feasibility {
    let mut violations = Vec::new();
    if plan.num_contents() != scenario.num_contents || plan.num_slots() != scenario.num_slots {
        violations.push(Violation::DimensionMismatch {
            contents: plan.num_contents(),
            slots: plan.num_slots(),
            expected_contents: scenario.num_contents,
            expected_slots: scenario.num_slots,
        });
    }
    for (c, row) in plan.rows().iter().enumerate() {
        for (t, &x) in row.iter().enumerate() {
            if x > scenario.num_helpers {
                violations.push(Violation::EntryOutOfRange {
                    content: c,
                    slot: t,
                    helpers: x,
                    max: scenario.num_helpers,
                });
            }
        }
    }
    let capacity = scenario.total_capacity();
    for t in 0..plan.num_slots() {
        let load = plan.slot_load(t);
        if load > u64::from(capacity) {
            violations.push(Violation::CapacityExceeded {
                slot: t,
                load,
                capacity,
                excess: load - u64::from(capacity),
            });
        }
    }
    Feasibility { violations }
}
