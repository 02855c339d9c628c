//! Delay-optimal resource allocation for one round of wireless federated
//! learning under compute-then-transmit NOMA.
//!
//! All users finish local training inside a common window `τ` and then upload
//! their updates simultaneously for `t` seconds. The crate minimises
//! `τ + t` for three uplink schemes:
//!
//! * [`ts`]: NOMA with time-sharing over decoding orders (the full MAC region),
//! * [`fdo`]: NOMA with one fixed SIC order,
//! * [`tdma`]: orthogonal slots, as a baseline.
//!
//! The [`oracles`] module (feature `validation`) holds brute-force checks used
//! by the test suites and by the simulator's self-check.

pub mod error;
pub mod fdo;
pub mod lambertw;
pub mod model;
#[cfg(feature = "validation")]
pub mod oracles;
pub mod search;
pub mod tdma;
pub mod ts;

pub use error::{Error, Result};
pub use fdo::{default_decoding_order, minimize_round_delay_fdo, DecodingOrder, FdoInstance};
pub use model::{ChannelDraw, RoundSolution, SystemConfig, UserProfile};
pub use tdma::{minimize_round_delay_tdma, SlotPolicy, TdmaSolution};
pub use ts::{minimize_round_delay_ts, TsInstance};
