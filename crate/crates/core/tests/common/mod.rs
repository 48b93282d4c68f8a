#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retcache::{DemandMatrix, Scenario, StorageCostFn};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random rows normalized to one; some entries may be zero.
pub fn random_demand(rng: &mut impl Rng, requesters: usize, contents: usize) -> DemandMatrix {
    let rows = (0..requesters)
        .map(|_| {
            let raw: Vec<f64> = (0..contents)
                .map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random::<f64>() })
                .collect();
            let sum: f64 = raw.iter().sum();
            if sum == 0.0 {
                let mut one = vec![0.0; contents];
                one[rng.random_range(0..contents)] = 1.0;
                one
            } else {
                raw.iter().map(|w| w / sum).collect()
            }
        })
        .collect();
    DemandMatrix::new(rows).unwrap()
}

/// Strictly increasing positive table of length `slots`.
pub fn random_storage(rng: &mut impl Rng, slots: usize) -> StorageCostFn {
    let mut acc = rng.random_range(0.05..1.5);
    let values = (0..slots)
        .map(|_| {
            let v = acc;
            acc += rng.random_range(0.05..2.0);
            v
        })
        .collect();
    StorageCostFn::Table { values }
}

pub struct Instance {
    pub scenario: Scenario,
    pub demand: DemandMatrix,
}

/// Random instance with the given shape. Storage weight and contact
/// intensity are drawn so that caching is sometimes but not always worth it.
pub fn random_instance(
    rng: &mut impl Rng,
    contents: usize,
    helpers: u32,
    cache: u32,
    slots: usize,
) -> Instance {
    let requesters = rng.random_range(1..=3);
    let scenario = Scenario {
        num_contents: contents,
        num_requesters: requesters,
        num_helpers: helpers,
        cache_size_per_helper: cache,
        num_slots: slots,
        slot_duration: rng.random_range(0.25..2.0),
        contact_rate: rng.random_range(0.25..2.0),
        storage_weight: if rng.random_bool(0.1) {
            0.0
        } else {
            10f64.powf(rng.random_range(-3.0..0.0))
        },
        storage_cost: random_storage(rng, slots),
    };
    let demand = random_demand(rng, requesters, contents);
    Instance { scenario, demand }
}
