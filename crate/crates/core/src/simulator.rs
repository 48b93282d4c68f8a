//! Monte Carlo check of the expected download cost.
//!
//! Every requester issues one request per slot, drawn from its own demand
//! row. The request is served locally if the requester meets at least one of
//! the `x_ct` helpers holding the content within the slot; otherwise it costs
//! one server download. Slots are independent contact windows.
//!
//! Trial `i` draws from its own ChaCha stream `i` under the configured seed,
//! so results do not depend on how trials are scheduled across threads.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{rng_from_seed, unit_interval};
use crate::error::{Error, Result};
use crate::model::{check_feasibility, plan_cost, CachingPlan, CostModel, DemandMatrix, Scenario};

/// How a request decides whether it met a helper.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactMode {
    /// One Bernoulli draw with the closed-form miss probability.
    #[default]
    Bernoulli,
    /// Draw the Poisson number of contacts with holders; miss on zero.
    PoissonCount,
}

#[derive(Debug, Clone, Copy)]
pub struct SimConfig<'a> {
    pub scenario: &'a Scenario,
    pub demand: &'a DemandMatrix,
    pub plan: &'a CachingPlan,
    pub trials: u64,
    pub seed: u64,
    pub mode: ContactMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub seed: u64,
    pub mode: ContactMode,
    pub rng_algorithm: String,
    /// Mean downloads per period over all trials.
    pub empirical_download_cost: f64,
    /// Standard error of that mean.
    pub standard_error: f64,
    pub analytic_download_cost: f64,
    /// Deterministic, echoed from the cost model.
    pub analytic_storage_cost: f64,
    /// `(empirical - analytic) / standard_error`; absent when the standard
    /// error is zero.
    pub z_score: Option<f64>,
}

struct Prepared {
    /// Cumulative demand per requester.
    cumulative: Vec<Vec<f64>>,
    /// Miss probability per (content, slot).
    miss: Vec<Vec<f64>>,
    /// Expected contacts with holders per (content, slot).
    contacts: Vec<Vec<f64>>,
}

impl Prepared {
    fn new(scenario: &Scenario, demand: &DemandMatrix, plan: &CachingPlan) -> Self {
        let cumulative = demand
            .rows()
            .iter()
            .map(|row| {
                row.iter()
                    .scan(0.0, |acc, w| {
                        *acc += w;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect();
        let per_slot = scenario.contacts_per_slot();
        let contacts: Vec<Vec<f64>> = plan
            .rows()
            .iter()
            .map(|row| row.iter().map(|&x| f64::from(x) * per_slot).collect())
            .collect();
        let miss = contacts
            .iter()
            .map(|row| row.iter().map(|m: &f64| (-m).exp()).collect())
            .collect();
        Self {
            cumulative,
            miss,
            contacts,
        }
    }

    fn draw_content(&self, requester: usize, rng: &mut ChaCha8Rng) -> usize {
        let cum = &self.cumulative[requester];
        let target = unit_interval(rng) * cum[cum.len() - 1];
        let idx = cum.partition_point(|&c| c <= target);
        idx.min(cum.len() - 1)
    }

    fn trial(&self, mode: ContactMode, slots: usize, rng: &mut ChaCha8Rng) -> f64 {
        let mut misses = 0u64;
        for t in 0..slots {
            for r in 0..self.cumulative.len() {
                let c = self.draw_content(r, rng);
                let missed = match mode {
                    ContactMode::Bernoulli => unit_interval(rng) < self.miss[c][t],
                    ContactMode::PoissonCount => {
                        let mean = self.contacts[c][t];
                        mean == 0.0
                            || Poisson::new(mean)
                                .map(|p| p.sample(rng) == 0.0)
                                .unwrap_or(false)
                    }
                };
                misses += u64::from(missed);
            }
        }
        misses as f64
    }
}

pub fn simulate(config: &SimConfig<'_>) -> Result<SimResult> {
    if config.trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let model = CostModel::new(config.scenario, config.demand)?;
    let verdict = check_feasibility(config.plan, config.scenario);
    if !verdict.is_feasible() {
        return Err(Error::domain(format!(
            "cannot simulate an infeasible plan: {:?}",
            verdict.violations
        )));
    }
    let analytic = plan_cost(&model, config.plan);
    let prepared = Prepared::new(config.scenario, config.demand, config.plan);
    let slots = config.scenario.num_slots;

    let samples: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(config.seed);
            rng.set_stream(i);
            prepared.trial(config.mode, slots, &mut rng)
        })
        .collect();

    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let standard_error = if samples.len() > 1 {
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let z_score =
        (standard_error > 0.0).then(|| (mean - analytic.download) / standard_error);

    Ok(SimResult {
        trials: config.trials,
        seed: config.seed,
        mode: config.mode,
        rng_algorithm: crate::baselines::RNG_ALGORITHM.to_string(),
        empirical_download_cost: mean,
        standard_error,
        analytic_download_cost: analytic.download,
        analytic_storage_cost: analytic.storage,
        z_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::scenario;
    use crate::model::StorageCostFn;
    use crate::scenario_io::zipf_demand;

    fn config<'a>(
        s: &'a Scenario,
        d: &'a DemandMatrix,
        p: &'a CachingPlan,
        trials: u64,
        mode: ContactMode,
    ) -> SimConfig<'a> {
        SimConfig {
            scenario: s,
            demand: d,
            plan: p,
            trials,
            seed: 11,
            mode,
        }
    }

    #[test]
    fn empty_plan_always_misses() {
        let s = scenario(4, 3, 2, 2, 5, 0.1, StorageCostFn::Linear);
        let d = zipf_demand(4, 1.0, 3).unwrap();
        let p = CachingPlan::zeros(4, 5);
        for mode in [ContactMode::Bernoulli, ContactMode::PoissonCount] {
            let r = simulate(&config(&s, &d, &p, 200, mode)).unwrap();
            assert_eq!(r.empirical_download_cost, 15.0);
            assert_eq!(r.standard_error, 0.0);
            assert_eq!(r.z_score, None);
        }
    }

    #[test]
    fn frequent_contacts_never_miss() {
        let mut s = scenario(2, 2, 2, 1, 3, 0.1, StorageCostFn::Linear);
        s.contact_rate = 60.0;
        let d = DemandMatrix::new(vec![vec![0.5, 0.5]; 2]).unwrap();
        let p = CachingPlan::from_rows(vec![vec![1; 3]; 2]).unwrap();
        let r = simulate(&config(&s, &d, &p, 500, ContactMode::Bernoulli)).unwrap();
        assert_eq!(r.empirical_download_cost, 0.0);
        assert!(r.analytic_download_cost < 1e-20);
    }

    #[test]
    fn seeded_runs_repeat() {
        let s = scenario(5, 4, 3, 1, 4, 0.01, StorageCostFn::Quadratic);
        let d = zipf_demand(5, 1.0, 4).unwrap();
        let p = CachingPlan::from_rows(vec![
            vec![2, 1, 1, 0],
            vec![1, 1, 0, 0],
            vec![0; 4],
            vec![0; 4],
            vec![0; 4],
        ])
        .unwrap();
        let a = simulate(&config(&s, &d, &p, 1000, ContactMode::Bernoulli)).unwrap();
        let b = simulate(&config(&s, &d, &p, 1000, ContactMode::Bernoulli)).unwrap();
        assert_eq!(a, b);
        assert!(a.z_score.unwrap().abs() < 5.0);
    }

    #[test]
    fn modes_agree() {
        let s = scenario(5, 4, 3, 1, 4, 0.01, StorageCostFn::Quadratic);
        let d = zipf_demand(5, 1.0, 4).unwrap();
        let p = CachingPlan::from_rows(vec![
            vec![2, 2, 1, 0],
            vec![1, 0, 0, 0],
            vec![0; 4],
            vec![0; 4],
            vec![0; 4],
        ])
        .unwrap();
        let a = simulate(&config(&s, &d, &p, 20_000, ContactMode::Bernoulli)).unwrap();
        let mut cfg = config(&s, &d, &p, 20_000, ContactMode::PoissonCount);
        cfg.seed = 12;
        let b = simulate(&cfg).unwrap();
        let joint = (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt();
        assert!((a.empirical_download_cost - b.empirical_download_cost).abs() <= 4.0 * joint);
    }

    #[test]
    fn rejects_infeasible_plan_and_zero_trials() {
        let s = scenario(2, 1, 1, 1, 1, 0.1, StorageCostFn::Linear);
        let d = DemandMatrix::new(vec![vec![0.5, 0.5]]).unwrap();
        let over = CachingPlan::from_rows(vec![vec![1], vec![1]]).unwrap();
        assert!(matches!(
            simulate(&config(&s, &d, &over, 10, ContactMode::Bernoulli)),
            Err(Error::Domain(_))
        ));
        let ok = CachingPlan::zeros(2, 1);
        assert!(simulate(&config(&s, &d, &ok, 0, ContactMode::Bernoulli)).is_err());
    }
}
