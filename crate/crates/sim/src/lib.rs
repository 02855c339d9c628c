//! Monte Carlo sweeps over random CT-NOMA instances.
//!
//! A [`SweepSpec`] names a base [`Scenario`], the parameter being swept and
//! the protocols to compare. Every `(trial, user)` pair owns its own RNG
//! substream, so all sweep points and protocols see the same users and the
//! output does not depend on how trials are spread across threads.

pub mod config;
pub mod output;
pub mod scenario;
pub mod sweep;
pub mod validate;

pub use config::{parse_config, ConfigError};
pub use output::{emit_csv, parse_csv, render_csv, CsvRow};
pub use scenario::{draw_instance, Scenario};
pub use sweep::{run_sweep, Protocol, SweepCell, SweepResult, SweepSpec, SweepVariable};
