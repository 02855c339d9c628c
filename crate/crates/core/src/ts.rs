//! CT-NOMA with time-sharing between decoding orders.
//!
//! With every user spending its whole residual energy, the achievable region
//! for a fixed `τ` depends only on the effective gains `A_i = E_i·g_i`.
//! Sorting them in descending order, the `2^N − 1` subset constraints reduce
//! to `N` tail constraints
//!
//! ```text
//! (N + 1 − n)·Z ≤ t·B·log₂(1 + Σ_{i≥n} A_i / (t·B·N₀)),   n = 1..N
//! ```
//!
//! each of which is increasing in `t` and has a closed-form root through
//! `W₋₁`. The smallest feasible `t` is the largest of those roots.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::lambertw::{lambert_w_minus1, LambertArg};
use crate::model::{
    capacity_bits, residual_tx_energies, tau_lower_bound, validate_instance, RoundSolution, SystemConfig,
    UserProfile,
};
use crate::search::{minimize_over_tau, TauSearch};

/// A round to be scheduled: configuration plus one profile per user.
#[derive(Debug, Clone, PartialEq)]
pub struct TsInstance {
    pub cfg: SystemConfig,
    pub users: Vec<UserProfile>,
}

impl TsInstance {
    pub fn new(cfg: SystemConfig, users: Vec<UserProfile>) -> Result<Self> {
        validate_instance(&cfg, &users)?;
        Ok(Self { cfg, users })
    }

    pub fn tau_low(&self) -> f64 {
        tau_lower_bound(&self.cfg, &self.users).expect("instance has at least one user")
    }
}

/// Effective gains sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveGains {
    pub a_sorted: Vec<f64>,
    /// `perm[k]` is the user holding the `k`-th largest gain.
    pub perm: Vec<usize>,
}

impl EffectiveGains {
    /// Builds the descending order of arbitrary nonnegative gains. Ties keep
    /// the original index order.
    pub fn from_unsorted(gains: &[f64]) -> Self {
        let mut perm: Vec<usize> = (0..gains.len()).collect();
        perm.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
        Self {
            a_sorted: perm.iter().map(|&i| gains[i]).collect(),
            perm,
        }
    }

    /// `Σ_{i≥n} A_i` for every `n`, over the sorted gains.
    pub fn tail_sums(&self) -> Vec<f64> {
        let mut tails = vec![0.0; self.a_sorted.len()];
        let mut acc = 0.0;
        for (k, a) in self.a_sorted.iter().enumerate().rev() {
            acc += a;
            tails[k] = acc;
        }
        tails
    }
}

/// `A_i = (E_max − ζc³D³/τ²)·g_i`, sorted.
pub fn effective_gains(inst: &TsInstance, tau_s: f64) -> Result<EffectiveGains> {
    let energies = residual_tx_energies(&inst.cfg, &inst.users, tau_s)?;
    let gains: Vec<f64> = energies
        .iter()
        .zip(&inst.users)
        .map(|(e, u)| e * u.channel_gain)
        .collect();
    Ok(EffectiveGains::from_unsorted(&gains))
}

/// Shortest `t` with `bits ≤ t·B·log₂(1 + S/(t·B·N₀))`.
///
/// Returns `0` for an empty payload and `+∞` when even `t → ∞` cannot carry
/// the payload, i.e. when `bits·N₀·ln 2 ≥ S`.
pub fn min_time_for_bits(cfg: &SystemConfig, bits: f64, received_energy: f64) -> f64 {
    if bits <= 0.0 {
        return 0.0;
    }
    if !(received_energy > 0.0) {
        return f64::INFINITY;
    }
    let n0 = cfg.noise_psd_w_per_hz;
    let x = bits * n0 * LN_2 / received_energy;
    if x >= 1.0 {
        return f64::INFINITY;
    }
    // b = −2^{−z·N₀/S}·z·N₀·ln2/S = −x·e^{−x}
    let b = -x * (-x).exp();
    if b == 0.0 {
        return 0.0;
    }
    let arg = LambertArg::new(b).expect("-x·exp(-x) lies in [-1/e, 0) for x > 0");
    let w = lambert_w_minus1(arg);
    let denom = cfg.bandwidth_hz * (bits * n0 * LN_2 + w * received_energy);
    let t = -bits * LN_2 * received_energy / denom;
    if t.is_finite() && t > 0.0 {
        t
    } else {
        f64::INFINITY
    }
}

/// Per-constraint roots of the tail constraints for sorted gains.
pub fn tail_constraint_times(cfg: &SystemConfig, gains: &EffectiveGains) -> Vec<f64> {
    let n = gains.a_sorted.len();
    gains
        .tail_sums()
        .iter()
        .enumerate()
        .map(|(k, &tail)| min_time_for_bits(cfg, (n - k) as f64 * cfg.payload_bits, tail))
        .collect()
}

/// Relative slack `(capacity − demand)/demand` of every tail constraint at `t_s`.
pub fn tail_constraint_slacks(cfg: &SystemConfig, gains: &EffectiveGains, t_s: f64) -> Vec<f64> {
    let n = gains.a_sorted.len();
    gains
        .tail_sums()
        .iter()
        .enumerate()
        .map(|(k, &tail)| {
            let demand = (n - k) as f64 * cfg.payload_bits;
            (capacity_bits(cfg, t_s, tail) - demand) / demand
        })
        .collect()
}

/// Whether `t_s` satisfies all `N` tail constraints.
pub fn tail_constraints_hold(cfg: &SystemConfig, gains: &EffectiveGains, t_s: f64) -> bool {
    tail_constraint_slacks(cfg, gains, t_s).iter().all(|&s| s >= 0.0)
}

/// Optimal transmission time for a fixed computation window.
///
/// Returns `+∞` when the window leaves too little energy for any finite `t`.
pub fn optimal_t_for_tau(inst: &TsInstance, tau_s: f64) -> Result<f64> {
    let gains = effective_gains(inst, tau_s)?;
    if inst.cfg.payload_bits <= 0.0 {
        return Ok(0.0);
    }
    Ok(tail_constraint_times(&inst.cfg, &gains)
        .into_iter()
        .fold(0.0, f64::max))
}

/// `T(τ) = τ + t*(τ)`, or `+∞` if `τ` is infeasible.
pub fn round_delay_ts(inst: &TsInstance, tau_s: f64) -> f64 {
    optimal_t_for_tau(inst, tau_s).map_or(f64::INFINITY, |t| tau_s + t)
}

/// Upper end of the bracket holding `τ*`, `τ̄ + t*(τ̄)`.
pub fn tau_upper_bound(inst: &TsInstance, tau_bar: f64) -> Result<f64> {
    let t = optimal_t_for_tau(inst, tau_bar)?;
    if !t.is_finite() {
        return Err(Error::Infeasible(format!(
            "no finite transmission time at tau = {tau_bar:e} s"
        )));
    }
    Ok(tau_bar + t)
}

/// Checks that the round can be completed for a large enough `τ`.
pub(crate) fn check_asymptotic_feasibility(cfg: &SystemConfig, users: &[UserProfile], per_user_bits: &[f64]) -> Result<()> {
    let full: Vec<f64> = users.iter().map(|u| u.max_energy_j * u.channel_gain).collect();
    let sorted = EffectiveGains::from_unsorted(&full);
    let tails = sorted.tail_sums();
    for (k, tail) in tails.iter().enumerate() {
        let bits: f64 = sorted.perm[k..].iter().map(|&i| per_user_bits[i]).sum();
        if !min_time_for_bits(cfg, bits, *tail).is_finite() {
            return Err(Error::Infeasible(format!(
                "received energy {tail:e} J cannot carry {bits:e} bits at any rate"
            )));
        }
    }
    Ok(())
}

/// Minimises `τ + t` with time-sharing.
pub fn minimize_round_delay_ts(inst: &TsInstance, tol_s: f64) -> Result<RoundSolution> {
    let search = search_ts(inst, tol_s)?;
    let t = optimal_t_for_tau(inst, search.tau_s)?;
    let energies = residual_tx_energies(&inst.cfg, &inst.users, search.tau_s)?;
    Ok(RoundSolution::new(&inst.users, search.tau_s, t, energies, search.iterations))
}

/// Runs the outer search and exposes its bracket and iteration count.
pub fn search_ts(inst: &TsInstance, tol_s: f64) -> Result<TauSearch> {
    let bits = vec![inst.cfg.payload_bits; inst.users.len()];
    check_asymptotic_feasibility(&inst.cfg, &inst.users, &bits)?;
    minimize_over_tau(|tau| round_delay_ts(inst, tau), inst.tau_low(), tol_s)
}
