//! Outer search over the computation window `τ`.
//!
//! For every protocol the round delay `T(τ) = τ + t*(τ)` is convex on
//! `(τ_low, ∞)`, and `τ* ≤ T(τ̄)` for any feasible `τ̄`, so `τ*` is
//! bracketed by `[τ_low, T(τ̄)]`. The bracket is halved until it is no wider
//! than the tolerance. Each step compares `T` at the midpoint with `T` a
//! small probe step to its right, which tells on which side of the midpoint
//! the minimiser lies.

use crate::error::{Error, Result};

/// Offset keeping evaluations strictly above `τ_low`.
pub fn tau_floor_offset(tau_low: f64) -> f64 {
    1e-12 * tau_low.max(1.0)
}

/// Result of the outer search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauSearch {
    pub tau_s: f64,
    pub delay_s: f64,
    pub iterations: usize,
    /// Initial bracket `[τ_low, τ_up]`.
    pub tau_low: f64,
    pub tau_up: f64,
}

impl TauSearch {
    /// `ceil(log₂((τ_up − τ_low)/tol)) + 1`, the most halvings the search needs.
    pub fn iteration_bound(&self, tol: f64) -> usize {
        let ratio = (self.tau_up - self.tau_low) / tol;
        if ratio <= 1.0 {
            1
        } else {
            ratio.log2().ceil() as usize + 1
        }
    }
}

/// Finds a `τ̄` with finite delay, starting just above `τ_low` and moving
/// away geometrically.
pub fn feasible_start<F>(delay: &mut F, tau_low: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let floor = tau_low + tau_floor_offset(tau_low);
    let mut gap = floor - tau_low;
    for _ in 0..120 {
        let tau = tau_low + gap;
        let t = delay(tau);
        if t.is_finite() {
            return Ok((tau, t));
        }
        gap *= 4.0;
    }
    Err(Error::Infeasible(format!(
        "no computation window above {tau_low:e} s gives a finite delay"
    )))
}

/// Minimises a convex round delay over `τ ≥ τ_low` to within `tol` seconds.
///
/// `delay(τ)` must return `τ + t*(τ)`, or `+∞` where no finite `t` exists.
pub fn minimize_over_tau<F>(mut delay: F, tau_low: f64, tol: f64) -> Result<TauSearch>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be > 0, got {tol}")));
    }
    let floor = tau_low + tau_floor_offset(tau_low);
    let (tau_bar, delay_bar) = feasible_start(&mut delay, tau_low)?;
    let mut eval = |tau: f64| delay(tau.max(floor));

    let tau_up = delay_bar;
    let (mut lo, mut up) = (tau_low, tau_up);
    let probe = tol / 8.0;
    let mut iterations = 0;
    while up - lo > tol {
        let mid = 0.5 * (lo + up);
        let right = (mid + probe).min(up);
        if eval(right) > eval(mid) {
            up = right;
        } else {
            lo = mid;
        }
        iterations += 1;
    }

    let mut best = (tau_bar, delay_bar);
    for tau in [lo.max(floor), up] {
        let t = eval(tau);
        if t < best.1 {
            best = (tau, t);
        }
    }
    Ok(TauSearch {
        tau_s: best.0,
        delay_s: best.1,
        iterations,
        tau_low,
        tau_up,
    })
}
