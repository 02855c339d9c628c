//! Orthogonal baseline: common computation window, then one exclusive slot
//! per user over the full band.
//!
//! Slots are interference-free, so each user spends its whole residual
//! energy and its slot is the single-user closed form.

use crate::error::{Error, Result};
use crate::model::residual_tx_energies;
use crate::search::minimize_over_tau;
use crate::ts::{min_time_for_bits, TsInstance};

/// How transmission time is divided among users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SlotPolicy {
    /// Every slot is as short as its user allows.
    #[default]
    Optimized,
    /// All slots equal the longest one.
    EqualSplit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdmaSolution {
    pub tau_s: f64,
    pub slot_s: Vec<f64>,
    pub total_delay_s: f64,
    pub tx_energy_j: Vec<f64>,
    pub cpu_hz: Vec<f64>,
    pub iterations: usize,
}

impl TdmaSolution {
    pub fn transmission_s(&self) -> f64 {
        self.slot_s.iter().sum()
    }
}

/// Per-user slot lengths for a fixed computation window.
pub fn slots_for_tau(inst: &TsInstance, tau_s: f64, policy: SlotPolicy) -> Result<Vec<f64>> {
    let energies = residual_tx_energies(&inst.cfg, &inst.users, tau_s)?;
    let mut slots: Vec<f64> = energies
        .iter()
        .zip(&inst.users)
        .map(|(e, u)| min_time_for_bits(&inst.cfg, inst.cfg.payload_bits, e * u.channel_gain))
        .collect();
    if policy == SlotPolicy::EqualSplit {
        let longest = slots.iter().cloned().fold(0.0, f64::max);
        slots.iter_mut().for_each(|s| *s = longest);
    }
    Ok(slots)
}

pub fn round_delay_tdma(inst: &TsInstance, tau_s: f64, policy: SlotPolicy) -> f64 {
    slots_for_tau(inst, tau_s, policy).map_or(f64::INFINITY, |s| tau_s + s.iter().sum::<f64>())
}

pub fn minimize_round_delay_tdma(inst: &TsInstance, tol_s: f64) -> Result<TdmaSolution> {
    minimize_round_delay_tdma_with(inst, tol_s, SlotPolicy::Optimized)
}

pub fn minimize_round_delay_tdma_with(
    inst: &TsInstance,
    tol_s: f64,
    policy: SlotPolicy,
) -> Result<TdmaSolution> {
    for (n, u) in inst.users.iter().enumerate() {
        if !min_time_for_bits(&inst.cfg, inst.cfg.payload_bits, u.max_energy_j * u.channel_gain).is_finite() {
            return Err(Error::Infeasible(format!(
                "user {n} cannot deliver its payload alone at any rate"
            )));
        }
    }
    let search = minimize_over_tau(|tau| round_delay_tdma(inst, tau, policy), inst.tau_low(), tol_s)?;
    let slot_s = slots_for_tau(inst, search.tau_s, policy)?;
    let tx_energy_j = residual_tx_energies(&inst.cfg, &inst.users, search.tau_s)?;
    let cpu_hz = inst.users.iter().map(|u| u.cycles() / search.tau_s).collect();
    Ok(TdmaSolution {
        tau_s: search.tau_s,
        total_delay_s: search.tau_s + slot_s.iter().sum::<f64>(),
        slot_s,
        tx_energy_j,
        cpu_hz,
        iterations: search.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdo::{minimize_round_delay_fdo, FdoInstance};
    use crate::model::{capacity_bits, SystemConfig, UserProfile};
    use crate::ts::minimize_round_delay_ts;
    use approx::assert_relative_eq;

    fn user(c: f64, e: f64, g: f64) -> UserProfile {
        UserProfile::new(c, 1e6, 1.5e9, e, g).unwrap()
    }

    #[test]
    fn single_user_matches_noma() {
        let ts = TsInstance::new(SystemConfig::reference(1), vec![user(33.0, 0.15, 7e-7)]).unwrap();
        let a = minimize_round_delay_ts(&ts, 1e-10).unwrap();
        let b = minimize_round_delay_fdo(&FdoInstance::with_default_order(&ts), 1e-10).unwrap();
        let c = minimize_round_delay_tdma(&ts, 1e-10).unwrap();
        assert_relative_eq!(a.total_delay_s, c.total_delay_s, max_relative = 1e-9);
        assert_relative_eq!(b.total_delay_s, c.total_delay_s, max_relative = 1e-8);
    }

    #[test]
    fn symmetric_pair_doubles_single_slot() {
        let u = user(28.0, 0.2, 3e-6);
        let pair = TsInstance::new(SystemConfig::reference(2), vec![u, u]).unwrap();
        let sol = minimize_round_delay_tdma(&pair, 1e-10).unwrap();
        let single = TsInstance::new(SystemConfig::reference(1), vec![u]).unwrap();
        let one = slots_for_tau(&single, sol.tau_s, SlotPolicy::Optimized).unwrap()[0];
        assert_relative_eq!(sol.transmission_s(), 2.0 * one, max_relative = 1e-12);
        assert_eq!(sol.total_delay_s, sol.tau_s + sol.transmission_s());
    }

    #[test]
    fn slots_meet_rate_with_equality() {
        let inst = TsInstance::new(
            SystemConfig::reference(3),
            vec![user(40.0, 0.3, 2e-6), user(15.0, 0.5, 4e-7), user(22.0, 0.25, 1e-5)],
        )
        .unwrap();
        let sol = minimize_round_delay_tdma(&inst, 1e-10).unwrap();
        for n in 0..3 {
            let bits = capacity_bits(&inst.cfg, sol.slot_s[n], sol.tx_energy_j[n] * inst.users[n].channel_gain);
            assert_relative_eq!(bits, inst.cfg.payload_bits, max_relative = 1e-9);
        }
        let ts = minimize_round_delay_ts(&inst, 1e-10).unwrap();
        assert!(ts.total_delay_s <= sol.total_delay_s * (1.0 + 1e-9));
    }

    #[test]
    fn equal_split_is_never_faster() {
        let inst = TsInstance::new(
            SystemConfig::reference(2),
            vec![user(40.0, 0.3, 2e-6), user(15.0, 0.5, 4e-8)],
        )
        .unwrap();
        let opt = minimize_round_delay_tdma(&inst, 1e-10).unwrap();
        let eq = minimize_round_delay_tdma_with(&inst, 1e-10, SlotPolicy::EqualSplit).unwrap();
        assert!(opt.total_delay_s <= eq.total_delay_s);
        assert_eq!(eq.slot_s[0], eq.slot_s[1]);
    }

    #[test]
    fn hopeless_user_is_infeasible() {
        let inst = TsInstance::new(
            SystemConfig::reference(2),
            vec![user(40.0, 0.3, 2e-6), user(15.0, 0.5, 1e-17)],
        )
        .unwrap();
        assert!(matches!(minimize_round_delay_tdma(&inst, 1e-9), Err(Error::Infeasible(_))));
    }
}
