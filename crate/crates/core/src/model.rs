//! System parameters, per-user profiles and the local-computation model.
//!
//! Every user trains on `D` bits at `c` cycles per bit, so a local iteration
//! costs `c·D` cycles. Running at `f` Hz takes `c·D/f` seconds and burns
//! `ζ·c·D·f²` joules. All users share the same computation window `τ`, which
//! fixes `f = c·D/τ` and leaves `E_max − ζ·c³·D³/τ²` joules for the upload.

use crate::error::{Error, Result};

/// Closest distance to the base station considered by the path-loss model.
pub const DISTANCE_FLOOR_M: f64 = 1.0;

/// Relative slack used when checking solver outputs against their invariants.
pub const REL_EPS: f64 = 1e-9;

/// Converts a power spectral density from dBm/Hz to W/Hz.
pub fn dbm_per_hz_to_w(dbm_per_hz: f64) -> f64 {
    10f64.powf((dbm_per_hz - 30.0) / 10.0)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}

/// Constants shared by every user in a round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Uplink bandwidth `B`.
    pub bandwidth_hz: f64,
    /// Noise power spectral density `N₀` (linear).
    pub noise_psd_w_per_hz: f64,
    /// Size `Z` of every uploaded model update.
    pub payload_bits: f64,
    /// Effective switched capacitance `ζ`.
    pub hardware_coeff: f64,
    pub num_users: usize,
}

impl SystemConfig {
    pub fn new(
        bandwidth_hz: f64,
        noise_psd_w_per_hz: f64,
        payload_bits: f64,
        hardware_coeff: f64,
        num_users: usize,
    ) -> Result<Self> {
        let cfg = Self {
            bandwidth_hz,
            noise_psd_w_per_hz,
            payload_bits,
            hardware_coeff,
            num_users,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reference settings: 1 MHz, −174 dBm/Hz, 0.8 Mbit updates, ζ = 1e-27.
    pub fn reference(num_users: usize) -> Self {
        Self {
            bandwidth_hz: 1e6,
            noise_psd_w_per_hz: dbm_per_hz_to_w(-174.0),
            payload_bits: 0.8e6,
            hardware_coeff: 1e-27,
            num_users,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("noise_psd_w_per_hz", self.noise_psd_w_per_hz)?;
        positive("payload_bits", self.payload_bits)?;
        positive("hardware_coeff", self.hardware_coeff)?;
        if self.num_users == 0 {
            return Err(Error::InvalidParameter {
                name: "num_users",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    pub fn with_payload(mut self, payload_bits: f64) -> Self {
        self.payload_bits = payload_bits;
        self
    }

    /// Thermal noise energy collected over a window of `t_s` seconds, `t·B·N₀`.
    pub fn noise_energy(&self, t_s: f64) -> f64 {
        t_s * self.bandwidth_hz * self.noise_psd_w_per_hz
    }
}

/// Computation, energy and channel parameters of one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserProfile {
    pub cycles_per_sample: f64,
    pub data_samples: f64,
    pub max_cpu_hz: f64,
    pub max_energy_j: f64,
    /// Composite gain `|h|²·d⁻²`.
    pub channel_gain: f64,
}

impl UserProfile {
    pub fn new(
        cycles_per_sample: f64,
        data_samples: f64,
        max_cpu_hz: f64,
        max_energy_j: f64,
        channel_gain: f64,
    ) -> Result<Self> {
        let user = Self {
            cycles_per_sample,
            data_samples,
            max_cpu_hz,
            max_energy_j,
            channel_gain,
        };
        user.validate()?;
        Ok(user)
    }

    pub fn validate(&self) -> Result<()> {
        positive("cycles_per_sample", self.cycles_per_sample)?;
        positive("data_samples", self.data_samples)?;
        positive("max_cpu_hz", self.max_cpu_hz)?;
        positive("max_energy_j", self.max_energy_j)?;
        positive("channel_gain", self.channel_gain)
    }

    /// Total CPU cycles of one local iteration, `c·D`.
    pub fn cycles(&self) -> f64 {
        self.cycles_per_sample * self.data_samples
    }
}

/// One realisation of small-scale fading and placement for a user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelDraw {
    /// `|h|²`, exponentially distributed for Rayleigh fading.
    pub fading_power: f64,
    pub distance_m: f64,
}

/// Outcome of a CT-NOMA round optimisation.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSolution {
    pub tau_s: f64,
    pub t_s: f64,
    pub total_delay_s: f64,
    pub tx_energy_j: Vec<f64>,
    pub cpu_hz: Vec<f64>,
    /// Iterations spent by the outer search over `τ`.
    pub iterations: usize,
}

impl RoundSolution {
    /// Builds a solution, deriving the CPU frequencies from `τ`.
    pub fn new(
        users: &[UserProfile],
        tau_s: f64,
        t_s: f64,
        tx_energy_j: Vec<f64>,
        iterations: usize,
    ) -> Self {
        Self {
            tau_s,
            t_s,
            total_delay_s: tau_s + t_s,
            tx_energy_j,
            cpu_hz: users.iter().map(|u| u.cycles() / tau_s).collect(),
            iterations,
        }
    }

    /// Checks the frequency and energy budgets of every user to `REL_EPS`.
    pub fn check_budgets(&self, cfg: &SystemConfig, users: &[UserProfile]) -> Result<()> {
        if self.tx_energy_j.len() != users.len() || self.cpu_hz.len() != users.len() {
            return Err(Error::Domain("solution and user list differ in length".into()));
        }
        for (n, user) in users.iter().enumerate() {
            let f = self.cpu_hz[n];
            if f > user.max_cpu_hz * (1.0 + REL_EPS) {
                return Err(Error::Domain(format!(
                    "user {n} runs at {f:e} Hz above its {:e} Hz limit",
                    user.max_cpu_hz
                )));
            }
            let spent = self.tx_energy_j[n]
                + local_compute_energy(user, cfg.hardware_coeff, self.tau_s)?;
            if self.tx_energy_j[n] < 0.0 || spent > user.max_energy_j * (1.0 + REL_EPS) {
                return Err(Error::Domain(format!(
                    "user {n} spends {spent:e} J of a {:e} J budget",
                    user.max_energy_j
                )));
            }
        }
        Ok(())
    }
}

/// Time to run one local iteration at `cpu_hz`.
pub fn local_compute_time(user: &UserProfile, cpu_hz: f64) -> Result<f64> {
    if !(cpu_hz > 0.0) {
        return Err(Error::Domain(format!("cpu frequency must be > 0, got {cpu_hz}")));
    }
    Ok(user.cycles() / cpu_hz)
}

/// Energy of one local iteration finished in exactly `tau_s`, `ζ·c³·D³/τ²`.
pub fn local_compute_energy(user: &UserProfile, hardware_coeff: f64, tau_s: f64) -> Result<f64> {
    if !(tau_s > 0.0) {
        return Err(Error::Domain(format!("tau must be > 0, got {tau_s}")));
    }
    Ok(hardware_coeff * user.cycles().powi(3) / (tau_s * tau_s))
}

/// Energy of one local iteration run at `cpu_hz`, `ζ·c·D·f²`.
pub fn local_compute_energy_at_frequency(user: &UserProfile, hardware_coeff: f64, cpu_hz: f64) -> f64 {
    hardware_coeff * user.cycles() * cpu_hz * cpu_hz
}

/// Composite channel gain `|h|²/d²`.
pub fn channel_gain(draw: &ChannelDraw) -> Result<f64> {
    if !(draw.distance_m >= DISTANCE_FLOOR_M) || !draw.distance_m.is_finite() {
        return Err(Error::Domain(format!(
            "distance {} m is below the {DISTANCE_FLOOR_M} m floor",
            draw.distance_m
        )));
    }
    if !(draw.fading_power >= 0.0) || !draw.fading_power.is_finite() {
        return Err(Error::Domain(format!(
            "fading power must be finite and >= 0, got {}",
            draw.fading_power
        )));
    }
    Ok(draw.fading_power / (draw.distance_m * draw.distance_m))
}

/// Bits deliverable in `t_s` seconds when `received_energy` joules (energy
/// times gain, summed over the transmitters) arrive over noise, `t·B·log₂(1 + S/(t·B·N₀))`.
pub fn capacity_bits(cfg: &SystemConfig, t_s: f64, received_energy: f64) -> f64 {
    if t_s <= 0.0 {
        return 0.0;
    }
    let snr = received_energy / cfg.noise_energy(t_s);
    t_s * cfg.bandwidth_hz * snr.ln_1p() / std::f64::consts::LN_2
}

/// Shortest window allowed by the CPU limits, `max c·D/f_max`.
pub fn cpu_time_bound(users: &[UserProfile]) -> f64 {
    users
        .iter()
        .map(|u| u.cycles() / u.max_cpu_hz)
        .fold(0.0, f64::max)
}

/// Shortest window that leaves every user a nonnegative transmit budget,
/// `max sqrt(ζ·c³·D³/E_max)`.
pub fn energy_time_bound(cfg: &SystemConfig, users: &[UserProfile]) -> f64 {
    users
        .iter()
        .map(|u| (cfg.hardware_coeff * u.cycles().powi(3) / u.max_energy_j).sqrt())
        .fold(0.0, f64::max)
}

/// `τ_low`, the larger of the CPU and energy bounds.
pub fn tau_lower_bound(cfg: &SystemConfig, users: &[UserProfile]) -> Result<f64> {
    if users.is_empty() {
        return Err(Error::Domain("empty user list".into()));
    }
    Ok(cpu_time_bound(users).max(energy_time_bound(cfg, users)))
}

/// Energy left for the upload once the computation window is `tau_s`.
///
/// Deficits within rounding of the budget (relative 1e-12) count as zero.
pub fn residual_tx_energy(user: &UserProfile, cfg: &SystemConfig, tau_s: f64) -> Result<f64> {
    let energy_j = user.max_energy_j - local_compute_energy(user, cfg.hardware_coeff, tau_s)?;
    if energy_j < 0.0 && energy_j >= -1e-12 * user.max_energy_j {
        return Ok(0.0);
    }
    if energy_j < 0.0 {
        return Err(Error::InfeasibleTau {
            tau_s,
            user: None,
            energy_j,
        });
    }
    Ok(energy_j)
}

/// Residual energies of all users, tagging the first infeasible one.
pub fn residual_tx_energies(cfg: &SystemConfig, users: &[UserProfile], tau_s: f64) -> Result<Vec<f64>> {
    users
        .iter()
        .enumerate()
        .map(|(n, u)| {
            residual_tx_energy(u, cfg, tau_s).map_err(|e| match e {
                Error::InfeasibleTau { tau_s, energy_j, .. } => Error::InfeasibleTau {
                    tau_s,
                    user: Some(n),
                    energy_j,
                },
                other => other,
            })
        })
        .collect()
}

/// Validates a configuration against the user list it is paired with.
pub fn validate_instance(cfg: &SystemConfig, users: &[UserProfile]) -> Result<()> {
    cfg.validate()?;
    if users.len() != cfg.num_users {
        return Err(Error::InvalidParameter {
            name: "num_users",
            reason: format!("config says {} but {} profiles given", cfg.num_users, users.len()),
        });
    }
    users.iter().try_for_each(UserProfile::validate)
}
