//! Per-content retention schedules.
//!
//! Once the initial helper count of a content is fixed, the cheapest way to
//! run it through the remaining slots is greedy: in every later slot keep the
//! count that minimizes that slot's cost among all counts not above the
//! previous one. The z-table records the resulting total cost for every
//! content and every possible initial count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CostModel, DemandMatrix, Scenario};

/// Helper counts of one content over the horizon. Nonincreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RetentionSchedule(Vec<u32>);

impl RetentionSchedule {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.windows(2).any(|p| p[1] > p[0]) {
            return Err(Error::domain("retention schedule must be nonincreasing"));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn initial(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    /// Number of slots with at least one copy.
    pub fn retention_slots(&self) -> usize {
        self.0.iter().take_while(|&&x| x > 0).count()
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

/// Smallest `x` in `0..=ceiling` minimizing `cost(x)`.
pub(crate) fn argmin_up_to(ceiling: u32, cost: impl Fn(u32) -> f64) -> (u32, f64) {
    let mut best = (0, cost(0));
    for x in 1..=ceiling {
        let c = cost(x);
        if c < best.1 {
            best = (x, c);
        }
    }
    best
}

pub(crate) fn greedy(model: &CostModel, content: usize, initial: u32) -> (RetentionSchedule, f64) {
    let mut counts = Vec::with_capacity(model.num_slots());
    counts.push(initial);
    let mut total = model.delta(content, 0, initial);
    let mut ceiling = initial;
    for slot in 1..model.num_slots() {
        let (x, cost) = argmin_up_to(ceiling, |x| model.delta(content, slot, x));
        counts.push(x);
        total += cost;
        ceiling = x;
    }
    (RetentionSchedule(counts), total)
}

/// Greedy retention schedule of `content` starting from `initial` helpers,
/// with its total cost over all slots.
pub fn greedy_schedule(
    content: usize,
    initial: u32,
    scenario: &Scenario,
    demand: &DemandMatrix,
) -> Result<(RetentionSchedule, f64)> {
    let model = CostModel::new(scenario, demand)?;
    if content >= model.num_contents() {
        return Err(Error::domain(format!(
            "content index {} out of range 0..{}",
            content,
            model.num_contents()
        )));
    }
    if initial > model.num_helpers() {
        return Err(Error::domain(format!(
            "initial helper count {} exceeds H = {}",
            initial,
            model.num_helpers()
        )));
    }
    Ok(greedy(&model, content, initial))
}

/// `z_c(h)`: minimum cost of content `c` over the horizon when it starts on
/// `h` helpers, for `h = 0..=H`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTable {
    costs: Vec<Vec<f64>>,
    schedules: Option<Vec<Vec<RetentionSchedule>>>,
}

impl ZTable {
    /// A table of costs only, without schedules. Such a table can drive the
    /// allocation step but cannot be expanded into a full plan.
    pub fn from_costs(costs: Vec<Vec<f64>>) -> Result<Self> {
        let width = costs.first().map_or(0, Vec::len);
        if width == 0 || costs.iter().any(|r| r.len() != width) {
            return Err(Error::domain("z-table rows must be nonempty and equally long"));
        }
        if costs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::domain("z-table entries must be finite"));
        }
        Ok(Self {
            costs,
            schedules: None,
        })
    }

    pub fn num_contents(&self) -> usize {
        self.costs.len()
    }

    /// H, the largest initial count covered.
    pub fn max_helpers(&self) -> u32 {
        (self.costs[0].len() - 1) as u32
    }

    pub fn get(&self, content: usize, initial: u32) -> f64 {
        self.costs[content][initial as usize]
    }

    pub fn row(&self, content: usize) -> &[f64] {
        &self.costs[content]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.costs
    }

    pub fn schedule(&self, content: usize, initial: u32) -> Option<&RetentionSchedule> {
        self.schedules
            .as_ref()
            .map(|s| &s[content][initial as usize])
    }

    pub fn has_schedules(&self) -> bool {
        self.schedules.is_some()
    }

    /// Smallest count in `0..=min(limit, H)` minimizing `z_c`.
    pub fn best_initial(&self, content: usize, limit: u32) -> (u32, f64) {
        argmin_up_to(limit.min(self.max_helpers()), |x| self.get(content, x))
    }
}

/// Runs the greedy schedule for every content and initial count.
pub fn build_z_table(scenario: &Scenario, demand: &DemandMatrix) -> Result<ZTable> {
    let model = CostModel::new(scenario, demand)?;
    Ok(build_from_model(&model))
}

pub(crate) fn build_from_model(model: &CostModel) -> ZTable {
    let h = model.num_helpers();
    let (costs, schedules): (Vec<Vec<f64>>, Vec<Vec<RetentionSchedule>>) = (0..model
        .num_contents())
        .into_par_iter()
        .map(|c| {
            let (sched, cost): (Vec<_>, Vec<_>) = (0..=h).map(|x| greedy(model, c, x)).unzip();
            (cost, sched)
        })
        .unzip();
    ZTable {
        costs,
        schedules: Some(schedules),
    }
}
