//! Oracle self-check run by `--validate` before a sweep.

use ctnoma_core::lambertw::w_minus1;
use ctnoma_core::model::residual_tx_energies;
use ctnoma_core::oracles::{
    bisection_t_for_tau, convex_descent_fdo, grid_min_ts, mac_region_check, mac_region_feasible,
};
use ctnoma_core::ts::{effective_gains, optimal_t_for_tau, tail_constraints_hold};
use ctnoma_core::{minimize_round_delay_ts, FdoInstance, TsInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::{draw_instance, Scenario};
use crate::sweep::Protocol;

pub const MAX_USERS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn instances(base: &Scenario, seed: u64, n: usize, count: usize) -> impl Iterator<Item = TsInstance> + '_ {
    let scenario = Scenario {
        num_users: n.min(MAX_USERS),
        ..*base
    };
    (0..).map_while(move |trial| draw_instance(&scenario, seed, trial).ok())
        .filter(|inst| Protocol::Tdma.solve(inst, 1e-6).is_some())
        .take(count)
}

fn report(name: &'static str, failures: usize, total: usize, extra: String) -> CheckReport {
    CheckReport {
        name,
        passed: failures == 0 && total > 0,
        detail: format!("{failures}/{total} failed{extra}"),
    }
}

fn region_equivalence(base: &Scenario, seed: u64, rng: &mut ChaCha8Rng) -> CheckReport {
    let (mut failures, mut total) = (0, 0);
    for n in 1..=MAX_USERS {
        for inst in instances(base, seed, n, 50) {
            let tau = inst.tau_low() * rng.random_range(1.001..3.0);
            let Ok(energies) = residual_tx_energies(&inst.cfg, &inst.users, tau) else { continue };
            let Ok(t_star) = optimal_t_for_tau(&inst, tau) else { continue };
            if !t_star.is_finite() {
                continue;
            }
            let t = t_star * rng.random_range(0.5..1.5);
            let gains: Vec<f64> = inst.users.iter().map(|u| u.channel_gain).collect();
            let Ok(subsets) = mac_region_check(&inst.cfg, &gains, &energies, t, inst.cfg.payload_bits) else {
                continue;
            };
            let tails = effective_gains(&inst, tau).map(|g| tail_constraints_hold(&inst.cfg, &g, t));
            total += 1;
            if tails.ok() != Some(mac_region_feasible(&subsets)) {
                failures += 1;
            }
        }
    }
    report("region equivalence", failures, total, String::new())
}

fn closed_form_vs_bisection(base: &Scenario, seed: u64, rng: &mut ChaCha8Rng) -> CheckReport {
    let (mut failures, mut total, mut worst) = (0, 0, 0.0f64);
    for inst in instances(base, seed, MAX_USERS, 100) {
        let tau = inst.tau_low() * rng.random_range(1.001..3.0);
        let (Ok(a), Ok(b)) = (optimal_t_for_tau(&inst, tau), bisection_t_for_tau(&inst, tau)) else {
            failures += 1;
            continue;
        };
        if !a.is_finite() && !b.is_finite() {
            continue;
        }
        total += 1;
        let rel = (a - b).abs() / b;
        worst = worst.max(rel);
        if !(rel <= 1e-8) {
            failures += 1;
        }
    }
    report("closed-form transmission time", failures, total, format!(", worst relative error {worst:.2e}"))
}

fn ts_vs_grid(base: &Scenario, seed: u64, tol: f64) -> CheckReport {
    let (mut failures, mut total) = (0, 0);
    for inst in instances(base, seed, 3, 10) {
        total += 1;
        let ok = match (minimize_round_delay_ts(&inst, tol), grid_min_ts(&inst, 2000)) {
            (Ok(sol), Ok((_, grid))) => sol.total_delay_s <= grid + (10.0 * tol).max(1e-6 * grid),
            _ => false,
        };
        failures += !ok as usize;
    }
    report("time-sharing optimum vs grid", failures, total, String::new())
}

fn fdo_vs_descent(base: &Scenario, seed: u64, tol: f64) -> CheckReport {
    let (mut failures, mut total, mut worst) = (0, 0, 0.0f64);
    for inst in instances(base, seed, 3, 5) {
        total += 1;
        let fdo = FdoInstance::with_default_order(&inst);
        let (Some(sol), Ok(d)) = (Protocol::Fdo.solve(&inst, tol), convex_descent_fdo(&fdo, 2000)) else {
            failures += 1;
            continue;
        };
        let rel = (d.objective - sol).abs() / sol;
        worst = worst.max(rel);
        if !(rel <= 1e-4) {
            failures += 1;
        }
    }
    report("fixed-order optimum vs log-domain descent", failures, total, format!(", worst relative gap {worst:.2e}"))
}

fn dominance(base: &Scenario, seed: u64, tol: f64) -> CheckReport {
    let (mut failures, mut total) = (0, 0);
    for inst in instances(base, seed, MAX_USERS, 20) {
        let Some(ts) = Protocol::Ts.solve(&inst, tol) else {
            failures += 1;
            continue;
        };
        for p in [Protocol::Fdo, Protocol::Tdma] {
            if let Some(other) = p.solve(&inst, tol) {
                total += 1;
                failures += (ts > other * (1.0 + 1e-9)) as usize;
            }
        }
    }
    report("time-sharing dominance", failures, total, String::new())
}

fn lambert_identity(rng: &mut ChaCha8Rng) -> CheckReport {
    let mut failures = 0;
    let total = 1000;
    for _ in 0..total {
        let x = -rng.random_range(1e-12..1.0) / std::f64::consts::E;
        let ok = w_minus1(x).is_ok_and(|w| (w * w.exp() - x).abs() <= 1e-10 * x.abs());
        failures += !ok as usize;
    }
    report("Lambert W identity", failures, total, String::new())
}

/// Runs every check on small instances drawn from `base`.
pub fn self_check(base: &Scenario, seed: u64, tol_s: f64) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    vec![
        lambert_identity(&mut rng),
        region_equivalence(base, seed, &mut rng),
        closed_form_vs_bisection(base, seed, &mut rng),
        ts_vs_grid(base, seed, tol_s),
        fdo_vs_descent(base, seed, tol_s),
        dominance(base, seed, tol_s),
    ]
}
