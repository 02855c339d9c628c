use ctnoma_core::model::{channel_gain, dbm_per_hz_to_w, ChannelDraw};
use ctnoma_core::{SystemConfig, TsInstance, UserProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Parameters of the random deployment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub num_users: usize,
    pub bandwidth_hz: f64,
    pub noise_psd_w_per_hz: f64,
    pub payload_bits: f64,
    pub max_energy_j: f64,
    pub hardware_coeff: f64,
    pub data_samples: f64,
    pub max_cpu_hz: f64,
    pub cycles_min: f64,
    pub cycles_max: f64,
    pub distance_min_m: f64,
    pub distance_max_m: f64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            num_users: 10,
            bandwidth_hz: 1e6,
            noise_psd_w_per_hz: dbm_per_hz_to_w(-174.0),
            payload_bits: 0.8e6,
            max_energy_j: 2.0,
            hardware_coeff: 1e-27,
            data_samples: 1e6,
            max_cpu_hz: 1.5e9,
            cycles_min: 10.0,
            cycles_max: 40.0,
            distance_min_m: 1.0,
            distance_max_m: 500.0,
        }
    }
}

impl Scenario {
    pub fn system_config(&self) -> ctnoma_core::Result<SystemConfig> {
        SystemConfig::new(
            self.bandwidth_hz,
            self.noise_psd_w_per_hz,
            self.payload_bits,
            self.hardware_coeff,
            self.num_users,
        )
    }
}

fn substream(seed: u64, trial: u64, user: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 20) | user);
    rng
}

/// Draws the users of one trial. Cycles, distance and fading come from the
/// `(trial, user)` substream; energy budget and payload from `scenario`.
pub fn draw_instance(scenario: &Scenario, seed: u64, trial: u64) -> ctnoma_core::Result<TsInstance> {
    let users = (0..scenario.num_users)
        .map(|n| {
            let mut rng = substream(seed, trial, n as u64);
            let cycles = rng.random_range(scenario.cycles_min..=scenario.cycles_max);
            let distance_m = rng.random_range(scenario.distance_min_m..=scenario.distance_max_m);
            // |h|² of a unit-variance circular Gaussian is Exp(1).
            let fading_power = -(1.0 - rng.random::<f64>()).ln();
            let gain = channel_gain(&ChannelDraw {
                fading_power,
                distance_m,
            })?;
            UserProfile::new(
                cycles,
                scenario.data_samples,
                scenario.max_cpu_hz,
                scenario.max_energy_j,
                gain,
            )
        })
        .collect::<ctnoma_core::Result<Vec<_>>>()?;
    TsInstance::new(scenario.system_config()?, users)
}
