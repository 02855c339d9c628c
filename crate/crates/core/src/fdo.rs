//! CT-NOMA with a single successive-interference-cancellation order.
//!
//! The user decoded `k`-th sees interference from everyone decoded after it.
//! For a given `t` the rate constraints hold with equality for exactly one
//! energy vector, built backwards from the last-decoded user:
//!
//! ```text
//! γ = 2^{Z/(tB)} − 1
//! E_π(N) = γ·tBN₀ / g_π(N)
//! E_π(k) = γ·(Σ_{j>k} E_π(j)·g_π(j) + tBN₀) / g_π(k)
//! ```
//!
//! Any feasible vector dominates it componentwise, and every entry shrinks
//! as `t` grows, so for fixed `τ` feasibility is monotone in `t` and the
//! shortest transmission is found by bisection.

use crate::error::{Error, Result};
use crate::model::{
    residual_tx_energies, tau_lower_bound, validate_instance, RoundSolution, SystemConfig,
    UserProfile,
};
use crate::search::{minimize_over_tau, TauSearch};
use crate::ts::TsInstance;

const BRACKET_LOW_S: f64 = 1e-9;
const BRACKET_START_S: f64 = 1e-3;
const MAX_DOUBLINGS: usize = 200;

/// A SIC order: `order[k]` is the user decoded `k`-th.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecodingOrder {
    order: Vec<usize>,
}

impl DecodingOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &u in &order {
            if u >= order.len() || std::mem::replace(&mut seen[u], true) {
                return Err(Error::Domain(format!("{order:?} is not a permutation")));
            }
        }
        Ok(Self { order })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Strongest channel decoded first, ties by user index.
pub fn default_decoding_order(users: &[UserProfile]) -> DecodingOrder {
    let mut order: Vec<usize> = (0..users.len()).collect();
    order.sort_by(|&a, &b| users[b].channel_gain.total_cmp(&users[a].channel_gain));
    DecodingOrder { order }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdoInstance {
    pub cfg: SystemConfig,
    pub users: Vec<UserProfile>,
    pub order: DecodingOrder,
}

impl FdoInstance {
    pub fn new(cfg: SystemConfig, users: Vec<UserProfile>, order: DecodingOrder) -> Result<Self> {
        validate_instance(&cfg, &users)?;
        if order.len() != users.len() {
            return Err(Error::InvalidParameter {
                name: "order",
                reason: format!("{} positions for {} users", order.len(), users.len()),
            });
        }
        Ok(Self { cfg, users, order })
    }

    /// Pairs an instance with the descending-gain order.
    pub fn with_default_order(inst: &TsInstance) -> Self {
        Self {
            cfg: inst.cfg,
            users: inst.users.clone(),
            order: default_decoding_order(&inst.users),
        }
    }

    pub fn tau_low(&self) -> f64 {
        tau_lower_bound(&self.cfg, &self.users).expect("instance has at least one user")
    }
}

/// Smallest transmit energies meeting every SIC rate constraint over `t_s`,
/// indexed by user.
pub fn minimal_energy_chain(inst: &FdoInstance, t_s: f64) -> Vec<f64> {
    let cfg = &inst.cfg;
    let gamma = (cfg.payload_bits * std::f64::consts::LN_2 / (t_s * cfg.bandwidth_hz)).exp_m1();
    let noise = cfg.noise_energy(t_s);
    let mut energies = vec![0.0; inst.users.len()];
    let mut interference = 0.0;
    for &u in inst.order.as_slice().iter().rev() {
        let g = inst.users[u].channel_gain;
        let e = gamma * (interference + noise) / g;
        energies[u] = e;
        interference += e * g;
    }
    energies
}

fn chain_fits(inst: &FdoInstance, residual: &[f64], t_s: f64) -> bool {
    minimal_energy_chain(inst, t_s)
        .iter()
        .zip(residual)
        .all(|(e, r)| e <= r)
}

/// Whether a transmission of `t_s` seconds fits in the energy left after a
/// computation window of `tau_s`.
pub fn fdo_feasible(inst: &FdoInstance, tau_s: f64, t_s: f64) -> bool {
    if !(t_s > 0.0) {
        return inst.cfg.payload_bits <= 0.0;
    }
    match residual_tx_energies(&inst.cfg, &inst.users, tau_s) {
        Ok(residual) => chain_fits(inst, &residual, t_s),
        Err(_) => false,
    }
}

/// Shortest feasible transmission time for a fixed `τ`, to within `tol_s`.
///
/// Returns `+∞` when no transmission time fits.
pub fn optimal_t_for_tau_fdo(inst: &FdoInstance, tau_s: f64, tol_s: f64) -> Result<f64> {
    if !(tol_s > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol_s}")));
    }
    let residual = residual_tx_energies(&inst.cfg, &inst.users, tau_s)?;
    if inst.cfg.payload_bits <= 0.0 {
        return Ok(0.0);
    }
    if residual.iter().any(|&r| r <= 0.0) {
        return Ok(f64::INFINITY);
    }

    let fits = |t: f64| chain_fits(inst, &residual, t);
    let (mut lo, mut hi) = (BRACKET_LOW_S, BRACKET_START_S);
    if fits(lo) {
        return Ok(lo);
    }
    let mut doublings = 0;
    while !fits(hi) {
        if doublings == MAX_DOUBLINGS {
            return Ok(f64::INFINITY);
        }
        lo = hi;
        hi *= 2.0;
        doublings += 1;
    }
    while hi - lo > tol_s {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `τ + t*(τ)` with the inner search resolved to `tol_s`, `+∞` when infeasible.
pub fn round_delay_fdo(inst: &FdoInstance, tau_s: f64, tol_s: f64) -> f64 {
    match optimal_t_for_tau_fdo(inst, tau_s, tol_s) {
        Ok(t) => tau_s + t,
        Err(_) => f64::INFINITY,
    }
}

// The outer search compares delays a fraction of `tol` apart, so the inner
// solve runs close to machine precision.
fn inner_tol(tol_s: f64) -> f64 {
    tol_s * 1e-6
}

pub fn search_fdo(inst: &FdoInstance, tol_s: f64) -> Result<TauSearch> {
    if !(tol_s > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol_s}")));
    }
    let inner = inner_tol(tol_s);
    minimize_over_tau(|tau| round_delay_fdo(inst, tau, inner), inst.tau_low(), tol_s)
}

/// Minimises `τ + t` for the instance's decoding order. Reported energies are
/// the minimal chain at the optimum.
pub fn minimize_round_delay_fdo(inst: &FdoInstance, tol_s: f64) -> Result<RoundSolution> {
    let search = search_fdo(inst, tol_s)?;
    let t = optimal_t_for_tau_fdo(inst, search.tau_s, inner_tol(tol_s))?;
    let energies = minimal_energy_chain(inst, t);
    Ok(RoundSolution::new(&inst.users, search.tau_s, t, energies, search.iterations))
}
