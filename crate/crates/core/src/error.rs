use thiserror::Error;

/// Errors raised by the model, the solvers and the validators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or profile violates its invariants.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The computation window is too short for a user to keep a nonnegative
    /// transmit energy budget.
    #[error("tau = {tau_s:e} s leaves {} with negative transmit energy ({energy_j:e} J)", user.map_or("a user".to_string(), |u| format!("user {u}")))]
    InfeasibleTau {
        tau_s: f64,
        user: Option<usize>,
        energy_j: f64,
    },

    /// No finite round delay exists for this instance.
    #[error("infeasible instance: {0}")]
    Infeasible(String),

    /// An exponential validator was asked to enumerate too many cases.
    #[error("refusing to enumerate {what} for {n} users (limit {limit})")]
    TooLarge {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    /// An iterative method ran out of iterations.
    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
