mod common;

use ctnoma_core::oracles::{mac_region_check, mac_region_feasible};
use ctnoma_core::ts::{tail_constraint_times, tail_constraints_hold, EffectiveGains};
use ctnoma_core::SystemConfig;
use rand::Rng;

#[test]
fn subset_and_tail_forms_agree() {
    let mut rng = common::rng(7);
    let mut feasible = 0;
    for trial in 0..1000 {
        let n = 1 + trial % 4;
        let cfg = SystemConfig::reference(n);
        let gains: Vec<f64> = (0..n)
            .map(|_| {
                let d: f64 = rng.random_range(1.0..500.0);
                -(1.0 - rng.random::<f64>()).ln() / (d * d)
            })
            .collect();
        let energies: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        let a: Vec<f64> = energies.iter().zip(&gains).map(|(e, g)| e * g).collect();
        let sorted = EffectiveGains::from_unsorted(&a);
        let t_star = tail_constraint_times(&cfg, &sorted).into_iter().fold(0.0, f64::max);
        let t = if t_star.is_finite() {
            t_star * rng.random_range(0.5..1.5)
        } else {
            rng.random_range(1e-3..10.0)
        };
        let subsets = mac_region_check(&cfg, &gains, &energies, t, cfg.payload_bits).unwrap();
        let full = mac_region_feasible(&subsets);
        assert_eq!(full, tail_constraints_hold(&cfg, &sorted, t), "trial {trial}: {subsets:?}");
        feasible += full as usize;
    }
    assert!((200..800).contains(&feasible), "{feasible} feasible draws");
}
