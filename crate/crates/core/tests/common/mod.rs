#![allow(dead_code)]

use ctnoma_core::{SystemConfig, TsInstance, UserProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Users drawn like the reference scenario: c ~ U(10, 40), d ~ U(1, 500) m,
/// Rayleigh fading, 1 Mbit of samples, 1.5 GHz CPUs.
pub fn random_users(rng: &mut impl Rng, n: usize, max_energy_j: f64) -> Vec<UserProfile> {
    (0..n)
        .map(|_| {
            let c = rng.random_range(10.0..40.0);
            let d: f64 = rng.random_range(1.0..500.0);
            let fading = -(1.0 - rng.random::<f64>()).ln();
            UserProfile::new(c, 1e6, 1.5e9, max_energy_j, fading / (d * d)).unwrap()
        })
        .collect()
}

/// A random instance for which every protocol has a finite optimum.
pub fn random_instance(rng: &mut impl Rng, n: usize) -> TsInstance {
    loop {
        let e = rng.random_range(0.5..3.0);
        let inst = TsInstance::new(SystemConfig::reference(n), random_users(rng, n, e)).unwrap();
        if ctnoma_core::minimize_round_delay_tdma(&inst, 1e-6).is_ok() {
            return inst;
        }
    }
}
