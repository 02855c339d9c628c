use std::fmt;
use std::str::FromStr;

use ctnoma_core::{
    minimize_round_delay_fdo, minimize_round_delay_tdma, minimize_round_delay_ts, FdoInstance, TsInstance,
};
use rayon::prelude::*;

use crate::scenario::{draw_instance, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    Ts,
    Fdo,
    Tdma,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::Ts, Protocol::Fdo, Protocol::Tdma];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Ts => "ts",
            Protocol::Fdo => "fdo",
            Protocol::Tdma => "tdma",
        }
    }

    /// Optimal round delay, or `None` when the solver reports an error.
    pub fn solve(self, inst: &TsInstance, tol_s: f64) -> Option<f64> {
        let delay = match self {
            Protocol::Ts => minimize_round_delay_ts(inst, tol_s).map(|s| s.total_delay_s),
            Protocol::Fdo => {
                minimize_round_delay_fdo(&FdoInstance::with_default_order(inst), tol_s).map(|s| s.total_delay_s)
            }
            Protocol::Tdma => minimize_round_delay_tdma(inst, tol_s).map(|s| s.total_delay_s),
        };
        delay.ok().filter(|d| d.is_finite())
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ts" => Ok(Protocol::Ts),
            "fdo" => Ok(Protocol::Fdo),
            "tdma" => Ok(Protocol::Tdma),
            other => Err(format!("unknown protocol `{other}` (expected ts, fdo or tdma)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    MaxEnergy,
    Payload,
}

impl SweepVariable {
    /// Column value in the CSV output.
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::MaxEnergy => "max_energy_j",
            SweepVariable::Payload => "payload_bits",
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepVariable::MaxEnergy => vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            SweepVariable::Payload => vec![0.2e6, 0.4e6, 0.6e6, 0.8e6, 1.0e6],
        }
    }

    /// Base scenario of the matching reference experiment.
    pub fn default_scenario(self) -> Scenario {
        match self {
            SweepVariable::MaxEnergy => Scenario {
                payload_bits: 0.8e6,
                ..Scenario::default()
            },
            SweepVariable::Payload => Scenario {
                max_energy_j: 2.0,
                ..Scenario::default()
            },
        }
    }

    pub fn apply(self, base: &Scenario, value: f64) -> Scenario {
        match self {
            SweepVariable::MaxEnergy => Scenario {
                max_energy_j: value,
                ..*base
            },
            SweepVariable::Payload => Scenario {
                payload_bits: value,
                ..*base
            },
        }
    }
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "emax" | "max_energy_j" => Ok(SweepVariable::MaxEnergy),
            "payload" | "payload_bits" => Ok(SweepVariable::Payload),
            other => Err(format!("unknown sweep `{other}` (expected emax or payload)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub protocols: Vec<Protocol>,
    pub tol_s: f64,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable) -> Self {
        Self {
            base: variable.default_scenario(),
            variable,
            values: variable.default_values(),
            trials: 1000,
            seed: 1,
            protocols: Protocol::ALL.to_vec(),
            tol_s: 1e-9,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.values.is_empty() {
            return Err("sweep values must not be empty".into());
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err("sweep values must be strictly increasing".into());
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err("sweep values must be finite and positive".into());
        }
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if !(self.tol_s > 0.0) {
            return Err(format!("tolerance must be positive, got {}", self.tol_s));
        }
        for v in &self.values {
            self.variable
                .apply(&self.base, *v)
                .system_config()
                .map_err(|e| e.to_string())?;
        }
        Ok(())
    }
}

/// Delays of every trial for one `(sweep value, protocol)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub value: f64,
    pub protocol: Protocol,
    /// Indexed by trial; `None` marks an infeasible trial.
    pub delays: Vec<Option<f64>>,
}

impl SweepCell {
    pub fn feasible(&self) -> usize {
        self.delays.iter().flatten().count()
    }

    pub fn infeasible(&self) -> usize {
        self.delays.len() - self.feasible()
    }

    /// Mean over feasible trials, `NaN` if there are none.
    pub fn mean(&self) -> f64 {
        let n = self.feasible();
        if n == 0 {
            return f64::NAN;
        }
        self.delays.iter().flatten().sum::<f64>() / n as f64
    }

    /// Sample standard deviation over feasible trials.
    pub fn std_dev(&self) -> f64 {
        let n = self.feasible();
        match n {
            0 => f64::NAN,
            1 => 0.0,
            _ => {
                let mean = self.mean();
                let ss: f64 = self.delays.iter().flatten().map(|d| (d - mean).powi(2)).sum();
                (ss / (n - 1) as f64).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    /// Sorted by sweep value, then protocol name.
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    pub fn cell(&self, value: f64, protocol: Protocol) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.value == value && c.protocol == protocol)
    }
}

/// Runs every trial at every sweep value on `workers` threads (all cores when 0).
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult, String> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| e.to_string())?;

    let jobs: Vec<(usize, u64)> = (0..spec.values.len())
        .flat_map(|v| (0..spec.trials as u64).map(move |t| (v, t)))
        .collect();
    // Ordered collect keeps results in job order whatever the scheduling.
    let outcomes: Vec<Vec<Option<f64>>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(v, trial)| {
                let scenario = spec.variable.apply(&spec.base, spec.values[v]);
                match draw_instance(&scenario, spec.seed, trial) {
                    Ok(inst) => spec.protocols.iter().map(|p| p.solve(&inst, spec.tol_s)).collect(),
                    Err(_) => vec![None; spec.protocols.len()],
                }
            })
            .collect()
    });

    let mut protocols = spec.protocols.clone();
    protocols.sort_by_key(|p| p.name());
    protocols.dedup();
    let mut cells = Vec::with_capacity(spec.values.len() * protocols.len());
    for (v, &value) in spec.values.iter().enumerate() {
        let rows = &outcomes[v * spec.trials..(v + 1) * spec.trials];
        for &p in &protocols {
            let col = spec.protocols.iter().position(|q| *q == p).expect("protocol is listed");
            cells.push(SweepCell {
                value,
                protocol: p,
                delays: rows.iter().map(|r| r[col]).collect(),
            });
        }
    }
    Ok(SweepResult {
        variable: spec.variable,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(variable: SweepVariable) -> SweepSpec {
        SweepSpec {
            base: Scenario {
                num_users: 3,
                ..variable.default_scenario()
            },
            trials: 4,
            seed: 3,
            ..SweepSpec::new(variable)
        }
    }

    #[test]
    fn statistics() {
        let cell = SweepCell {
            value: 1.0,
            protocol: Protocol::Ts,
            delays: vec![Some(1.0), None, Some(3.0), Some(2.0)],
        };
        assert_eq!(cell.feasible(), 3);
        assert_eq!(cell.infeasible(), 1);
        assert_eq!(cell.mean(), 2.0);
        assert_eq!(cell.std_dev(), 1.0);
        let empty = SweepCell {
            delays: vec![None],
            ..cell
        };
        assert!(empty.mean().is_nan());
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = small(SweepVariable::MaxEnergy);
        s.values = vec![1.0, 1.0];
        assert!(run_sweep(&s, 1).is_err());
        s.values = vec![];
        assert!(s.validate().is_err());
        let mut s = small(SweepVariable::Payload);
        s.trials = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn cells_are_sorted_and_paired() {
        let s = small(SweepVariable::MaxEnergy);
        let r = run_sweep(&s, 2).unwrap();
        assert_eq!(r.cells.len(), 18);
        let names: Vec<_> = r.cells[..3].iter().map(|c| c.protocol.name()).collect();
        assert_eq!(names, ["fdo", "tdma", "ts"]);
        for v in &s.values {
            let ts = r.cell(*v, Protocol::Ts).unwrap();
            for other in [Protocol::Fdo, Protocol::Tdma] {
                let o = r.cell(*v, other).unwrap();
                for (a, b) in ts.delays.iter().zip(&o.delays) {
                    if let (Some(a), Some(b)) = (a, b) {
                        assert!(*a <= b * (1.0 + 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let s = small(SweepVariable::Payload);
        assert_eq!(run_sweep(&s, 1).unwrap(), run_sweep(&s, 3).unwrap());
    }

    #[test]
    fn parses_names() {
        assert_eq!("TDMA".parse::<Protocol>().unwrap(), Protocol::Tdma);
        assert!("noma".parse::<Protocol>().is_err());
        assert_eq!("emax".parse::<SweepVariable>().unwrap(), SweepVariable::MaxEnergy);
        assert_eq!("payload".parse::<SweepVariable>().unwrap(), SweepVariable::Payload);
    }
}
