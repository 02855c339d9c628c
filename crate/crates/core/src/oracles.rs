//! Brute-force validators.
//!
//! None of these are meant to be fast. They re-derive the quantities the
//! solvers compute along a different route: full subset enumeration of the
//! MAC region, plain bisection instead of `W₋₁`, grid scans instead of the
//! convex search, a closed-form SIC chain instead of the backward
//! recursion, and a barrier method on the log-domain convex program.

use std::f64::consts::LN_2;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::fdo::{minimize_round_delay_fdo, DecodingOrder, FdoInstance};
use crate::model::{
    capacity_bits, cpu_time_bound, local_compute_energy, residual_tx_energies, SystemConfig,
};
use crate::search::feasible_start;
use crate::tdma::{round_delay_tdma, SlotPolicy};
use crate::ts::{round_delay_ts, TsInstance};

const MAX_SUBSET_USERS: usize = 20;
const MAX_ORDER_USERS: usize = 5;
const MAX_DESCENT_USERS: usize = 6;

/// One subset constraint of the MAC capacity region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsetConstraintReport {
    /// Bit `i` set when user `i` belongs to the subset.
    pub subset_mask: u32,
    pub lhs_bits: f64,
    pub rhs_bits: f64,
    pub satisfied: bool,
}

/// Evaluates all `2^N − 1` subset constraints for equal payloads.
pub fn mac_region_check(
    cfg: &SystemConfig,
    gains: &[f64],
    energies: &[f64],
    t_s: f64,
    payload_bits: f64,
) -> Result<Vec<SubsetConstraintReport>> {
    let n = energies.len();
    if n > MAX_SUBSET_USERS {
        return Err(Error::TooLarge {
            what: "subsets",
            n,
            limit: MAX_SUBSET_USERS,
        });
    }
    if gains.len() != n {
        return Err(Error::Domain("gains and energies differ in length".into()));
    }
    let reports = (1u32..(1u32 << n))
        .map(|mask| {
            let members = (0..n).filter(|i| mask & (1 << i) != 0);
            let received: f64 = members.clone().map(|i| energies[i] * gains[i]).sum();
            let lhs_bits = members.count() as f64 * payload_bits;
            let rhs_bits = capacity_bits(cfg, t_s, received);
            SubsetConstraintReport {
                subset_mask: mask,
                lhs_bits,
                rhs_bits,
                satisfied: lhs_bits <= rhs_bits,
            }
        })
        .collect();
    Ok(reports)
}

pub fn mac_region_feasible(reports: &[SubsetConstraintReport]) -> bool {
    reports.iter().all(|r| r.satisfied)
}

/// Shortest `t` meeting `bits ≤ t·B·log₂(1 + S/(tBN₀))`, by bisection.
pub fn bisect_min_time(cfg: &SystemConfig, bits: f64, received_energy: f64) -> f64 {
    if bits <= 0.0 {
        return 0.0;
    }
    if received_energy <= bits * cfg.noise_psd_w_per_hz * LN_2 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0f64, 1e-3f64);
    while capacity_bits(cfg, hi, received_energy) < bits {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if capacity_bits(cfg, mid, received_energy) >= bits {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Per-constraint bisection for the time-sharing `t*(τ)`: sorts the
/// effective gains, solves each tail constraint at equality and takes the max.
pub fn bisection_t_for_tau(inst: &TsInstance, tau_s: f64) -> Result<f64> {
    let energies = residual_tx_energies(&inst.cfg, &inst.users, tau_s)?;
    let mut gains: Vec<f64> = energies
        .iter()
        .zip(&inst.users)
        .map(|(e, u)| e * u.channel_gain)
        .collect();
    gains.sort_by(|a, b| a.total_cmp(b));
    // Ascending order: the k smallest gains carry k payloads.
    let mut acc = 0.0;
    let mut t = 0.0f64;
    for (k, g) in gains.iter().enumerate() {
        acc += g;
        t = t.max(bisect_min_time(&inst.cfg, (k + 1) as f64 * inst.cfg.payload_bits, acc));
    }
    Ok(t)
}

/// Minimum of `f` over a log-spaced grid on `[lo, up]`, as `(τ, f(τ))`.
pub fn log_grid_min<F>(mut f: F, lo: f64, up: f64, points: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (l0, l1) = (lo.ln(), up.ln());
    (0..points)
        .map(|i| {
            let tau = if i + 1 == points {
                up
            } else {
                (l0 + (l1 - l0) * i as f64 / (points - 1) as f64).exp()
            };
            (tau, f(tau))
        })
        .fold((lo, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

fn grid_bracket<F>(mut delay: F, inst: &TsInstance, points: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    if points < 100 {
        return Err(Error::Domain(format!("grid needs at least 100 points, got {points}")));
    }
    let low = inst.tau_low();
    let (_, up) = feasible_start(&mut delay, low)?;
    Ok(log_grid_min(delay, low * (1.0 + 1e-9), up, points))
}

/// Grid search for the time-sharing optimum, returning `(τ, T)`.
pub fn grid_min_ts(inst: &TsInstance, tau_grid_points: usize) -> Result<(f64, f64)> {
    grid_bracket(|tau| round_delay_ts(inst, tau), inst, tau_grid_points)
}

/// Grid search for the orthogonal baseline, returning `(τ, T)`.
pub fn grid_min_tdma(inst: &TsInstance, tau_grid_points: usize) -> Result<(f64, f64)> {
    grid_bracket(|tau| round_delay_tdma(inst, tau, SlotPolicy::Optimized), inst, tau_grid_points)
}

/// Whether the SIC rates fit, using the closed form
/// `E_π(k)·g_π(k) = γ·(1+γ)^{N−1−k}·tBN₀` of the equality chain.
pub fn closed_form_chain_fits(inst: &FdoInstance, tau_s: f64, t_s: f64) -> bool {
    if t_s <= 0.0 {
        return false;
    }
    let Ok(residual) = residual_tx_energies(&inst.cfg, &inst.users, tau_s) else {
        return false;
    };
    let cfg = &inst.cfg;
    let gamma = (cfg.payload_bits / (t_s * cfg.bandwidth_hz)).exp2() - 1.0;
    let order = inst.order.as_slice();
    let n = order.len();
    order.iter().enumerate().all(|(k, &u)| {
        let needed = gamma * (1.0 + gamma).powi((n - 1 - k) as i32) * cfg.noise_energy(t_s);
        needed <= residual[u] * inst.users[u].channel_gain
    })
}

/// Best point of a refined 2-D grid over `(τ, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub tau_s: f64,
    pub t_s: f64,
    pub delay_s: f64,
    /// Spacing of the finest grid that produced the point.
    pub tau_step: f64,
    pub t_step: f64,
}

/// 2-D grid search for the fixed-order optimum.
///
/// A `points × points` grid covers `[τ_low, τ_up] × (0, τ_up]`; then
/// `zoom_levels` grids of 101 × 101 points each zoom on ±4 cells around the
/// incumbent. Feasibility comes from [`closed_form_chain_fits`].
pub fn grid_min_fdo(inst: &FdoInstance, points: usize, zoom_levels: usize) -> Result<GridPoint> {
    if points < 10 {
        return Err(Error::Domain(format!("grid needs at least 10 points, got {points}")));
    }
    let tau_min = inst.tau_low() * (1.0 + 1e-9);
    let tau_bar = 2.0 * inst.tau_low();
    let mut t_bar = 1e-3;
    let mut doublings = 0;
    while !closed_form_chain_fits(inst, tau_bar, t_bar) {
        t_bar *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Infeasible("no feasible point found for the grid bracket".into()));
        }
    }
    let tau_up = tau_bar + t_bar;

    let mut best = GridPoint {
        tau_s: tau_bar,
        t_s: t_bar,
        delay_s: tau_up,
        tau_step: tau_up - tau_min,
        t_step: tau_up,
    };
    let scan = |tau_lo: f64, tau_hi: f64, t_lo: f64, t_hi: f64, m: usize, best: &mut GridPoint| {
        let dtau = (tau_hi - tau_lo) / (m - 1) as f64;
        let dt = (t_hi - t_lo) / (m - 1) as f64;
        for i in 0..m {
            let tau = tau_lo + dtau * i as f64;
            if let Some(j) = (0..m).find(|&j| closed_form_chain_fits(inst, tau, t_lo + dt * j as f64)) {
                let t = t_lo + dt * j as f64;
                if tau + t < best.delay_s {
                    best.tau_s = tau;
                    best.t_s = t;
                    best.delay_s = tau + t;
                }
            }
        }
        best.tau_step = dtau;
        best.t_step = dt;
    };

    scan(tau_min, tau_up, tau_up / points as f64, tau_up, points, &mut best);
    for _ in 0..zoom_levels {
        let (dtau, dt) = (best.tau_step, best.t_step);
        let tau_lo = (best.tau_s - 4.0 * dtau).max(tau_min);
        let t_lo = (best.t_s - 4.0 * dt).max(dt * 1e-3);
        scan(tau_lo, best.tau_s + 4.0 * dtau, t_lo, best.t_s + 4.0 * dt, 101, &mut best);
    }
    Ok(best)
}

/// Result of the log-domain barrier descent.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub objective: f64,
    pub tau_s: f64,
    pub t_s: f64,
    pub energies: Vec<f64>,
    /// Largest constraint value at the output (all ≤ 0 when feasible).
    pub max_constraint: f64,
    pub newton_steps: usize,
}

struct Constraint {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<Vec<f64>>,
}

/// The fixed-order problem in variables `x = (τ, ln t, ln E_1, …, ln E_N)`:
///
/// ```text
/// min  τ + e^{x₁}
/// s.t. (ζc³D³/τ² + e^{x_{2+u}})/E_max,u − 1 ≤ 0
///      ln(2^{(Z/B)e^{−x₁}} − 1) + ln(Σ_{later i} e^{x_{2+i} − x_{2+u}} g_i + e^{x₁ − x_{2+u}} BN₀) − ln g_u ≤ 0
///      (a₁ − τ)/a₁ ≤ 0
/// ```
struct LogDomainProgram<'a> {
    inst: &'a FdoInstance,
    a1: f64,
}

impl LogDomainProgram<'_> {
    fn dim(&self) -> usize {
        2 + self.inst.users.len()
    }

    fn zero(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let d = self.dim();
        (vec![0.0; d], vec![vec![0.0; d]; d])
    }

    fn constraints(&self, x: &[f64]) -> Vec<Constraint> {
        let inst = self.inst;
        let cfg = &inst.cfg;
        let tau = x[0];
        let mut out = Vec::with_capacity(2 * inst.users.len() + 1);

        for (u, user) in inst.users.iter().enumerate() {
            let k = cfg.hardware_coeff * user.cycles().powi(3);
            let e = x[2 + u].exp();
            let (mut grad, mut hess) = self.zero();
            grad[0] = -2.0 * k / tau.powi(3) / user.max_energy_j;
            grad[2 + u] = e / user.max_energy_j;
            hess[0][0] = 6.0 * k / tau.powi(4) / user.max_energy_j;
            hess[2 + u][2 + u] = e / user.max_energy_j;
            out.push(Constraint {
                value: (k / (tau * tau) + e) / user.max_energy_j - 1.0,
                grad,
                hess,
            });
        }

        // ln(2^{a·e^{-t̃}} − 1) with q = a·ln2·e^{-t̃}
        let q = cfg.payload_bits / cfg.bandwidth_hz * LN_2 * (-x[1]).exp();
        let s = -(-q).exp_m1();
        let h = q + s.ln();
        let dh = -q / s;
        let d2h = q * (s - q * (-q).exp()) / (s * s);

        let order = inst.order.as_slice();
        for (k, &u) in order.iter().enumerate() {
            // Log-sum-exp over the interferers and the noise term.
            let mut terms: Vec<(f64, Vec<(usize, f64)>)> = order[k + 1..]
                .iter()
                .map(|&i| {
                    (
                        x[2 + i] - x[2 + u] + inst.users[i].channel_gain.ln(),
                        vec![(2 + i, 1.0), (2 + u, -1.0)],
                    )
                })
                .collect();
            terms.push((
                x[1] - x[2 + u] + (cfg.bandwidth_hz * cfg.noise_psd_w_per_hz).ln(),
                vec![(1, 1.0), (2 + u, -1.0)],
            ));
            let ymax = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
            let total: f64 = terms.iter().map(|t| (t.0 - ymax).exp()).sum();
            let lse = ymax + total.ln();

            let (mut grad, mut hess) = self.zero();
            let mut mean = vec![0.0; self.dim()];
            for (y, coeffs) in &terms {
                let w = (y - ymax).exp() / total;
                for &(i, ci) in coeffs {
                    mean[i] += w * ci;
                    for &(j, cj) in coeffs {
                        hess[i][j] += w * ci * cj;
                    }
                }
            }
            for i in 0..self.dim() {
                grad[i] = mean[i];
                for j in 0..self.dim() {
                    hess[i][j] -= mean[i] * mean[j];
                }
            }
            grad[1] += dh;
            hess[1][1] += d2h;
            out.push(Constraint {
                value: h + lse - inst.users[u].channel_gain.ln(),
                grad,
                hess,
            });
        }

        let (mut grad, hess) = self.zero();
        grad[0] = -1.0 / self.a1;
        out.push(Constraint {
            value: (self.a1 - tau) / self.a1,
            grad,
            hess,
        });
        out
    }

    fn objective(&self, x: &[f64]) -> f64 {
        x[0] + x[1].exp()
    }

    fn strictly_feasible(&self, x: &[f64]) -> bool {
        x[0] > 0.0 && self.constraints(x).iter().all(|c| c.value < 0.0 && c.value.is_finite())
    }

    // Φ(x) = s·f(x)/scale − Σ ln(−c_i(x))
    fn barrier(&self, x: &[f64], s: f64, scale: f64) -> f64 {
        let cons = self.constraints(x);
        if x[0] <= 0.0 || cons.iter().any(|c| !(c.value < 0.0)) {
            return f64::INFINITY;
        }
        s * self.objective(x) / scale - cons.iter().map(|c| (-c.value).ln()).sum::<f64>()
    }

    fn barrier_derivatives(&self, x: &[f64], s: f64, scale: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let d = self.dim();
        let (mut grad, mut hess) = self.zero();
        grad[0] = s / scale;
        grad[1] = s * x[1].exp() / scale;
        hess[1][1] = s * x[1].exp() / scale;
        for c in self.constraints(x) {
            let inv = -1.0 / c.value;
            for i in 0..d {
                grad[i] += inv * c.grad[i];
                for j in 0..d {
                    hess[i][j] += inv * inv * c.grad[i] * c.grad[j] + inv * c.hess[i][j];
                }
            }
        }
        (grad, hess)
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let acc: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - acc) / a[row][row];
    }
    Some(x)
}

/// Solves the log-domain fixed-order program with a log-barrier Newton method
/// and returns the objective at its final, strictly feasible point.
pub fn convex_descent_fdo(inst: &FdoInstance, iters: usize) -> Result<DescentOutcome> {
    let n = inst.users.len();
    if n > MAX_DESCENT_USERS {
        return Err(Error::TooLarge {
            what: "log-domain descent variables",
            n,
            limit: MAX_DESCENT_USERS,
        });
    }
    let program = LogDomainProgram {
        inst,
        a1: cpu_time_bound(&inst.users),
    };

    // Start: τ well above τ_low, half the residual energy, and t long enough.
    let tau0 = 1.5 * inst.tau_low();
    let residual = residual_tx_energies(&inst.cfg, &inst.users, tau0)?;
    let mut x = vec![tau0, 1e-3f64.ln()];
    x.extend(residual.iter().map(|r| (0.5 * r).ln()));
    let mut doublings = 0;
    while !program.strictly_feasible(&x) {
        x[1] += LN_2;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Infeasible("no strictly feasible starting point".into()));
        }
    }

    let m = (2 * n + 1) as f64;
    let scale = program.objective(&x);
    let mut s = 1.0;
    let mut steps = 0;
    loop {
        // Centering.
        loop {
            if steps >= iters {
                return Err(Error::NoConvergence {
                    iterations: steps,
                    detail: format!("barrier weight {s:e}, objective {:e}", program.objective(&x)),
                });
            }
            steps += 1;
            let (grad, hess) = program.barrier_derivatives(&x, s, scale);
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let Some(dir) = solve_dense(hess, neg) else {
                return Err(Error::NoConvergence {
                    iterations: steps,
                    detail: "singular barrier Hessian".into(),
                });
            };
            let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            if -slope / 2.0 < 1e-12 {
                break;
            }
            let phi = program.barrier(&x, s, scale);
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..80 {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + alpha * di).collect();
                if trial == x {
                    break;
                }
                if program.barrier(&trial, s, scale) <= phi + 0.25 * alpha * slope {
                    x = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let objective = program.objective(&x);
        if m * scale / s <= 1e-7 * objective {
            break;
        }
        s *= 8.0;
    }

    let cons = program.constraints(&x);
    Ok(DescentOutcome {
        objective: program.objective(&x),
        tau_s: x[0],
        t_s: x[1].exp(),
        energies: x[2..].iter().map(|e| e.exp()).collect(),
        max_constraint: cons.iter().map(|c| c.value).fold(f64::NEG_INFINITY, f64::max),
        newton_steps: steps,
    })
}

/// Checks a descent output directly against the SIC rates and energy budgets.
pub fn descent_point_is_feasible(inst: &FdoInstance, out: &DescentOutcome) -> bool {
    let cfg = &inst.cfg;
    let order = inst.order.as_slice();
    let budgets_ok = inst.users.iter().zip(&out.energies).all(|(u, e)| {
        local_compute_energy(u, cfg.hardware_coeff, out.tau_s).is_ok_and(|c| c + e <= u.max_energy_j)
    });
    let rates_ok = order.iter().enumerate().all(|(k, &u)| {
        let interference: f64 = order[k + 1..]
            .iter()
            .map(|&i| out.energies[i] * inst.users[i].channel_gain)
            .sum();
        let sinr = out.energies[u] * inst.users[u].channel_gain
            / (interference + cfg.noise_energy(out.t_s));
        out.t_s * cfg.bandwidth_hz * sinr.ln_1p() / LN_2 >= cfg.payload_bits * (1.0 - 1e-12)
    });
    budgets_ok && rates_ok && out.tau_s >= cpu_time_bound(&inst.users)
}

/// Best decoding order found by enumerating all `N!` of them.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSearch {
    pub order: DecodingOrder,
    pub delay_s: f64,
    pub evaluated: usize,
}

pub fn exhaustive_order_search(inst: &TsInstance, tol_s: f64) -> Result<OrderSearch> {
    let n = inst.users.len();
    if n > MAX_ORDER_USERS {
        return Err(Error::TooLarge {
            what: "decoding orders",
            n,
            limit: MAX_ORDER_USERS,
        });
    }
    let mut best: Option<OrderSearch> = None;
    let mut evaluated = 0;
    for perm in (0..n).permutations(n) {
        evaluated += 1;
        let order = DecodingOrder::new(perm)?;
        let fdo = FdoInstance::new(inst.cfg, inst.users.clone(), order.clone())?;
        let Ok(sol) = minimize_round_delay_fdo(&fdo, tol_s) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| sol.total_delay_s < b.delay_s) {
            best = Some(OrderSearch {
                order,
                delay_s: sol.total_delay_s,
                evaluated: 0,
            });
        }
    }
    let mut best = best.ok_or_else(|| Error::Infeasible("no decoding order is feasible".into()))?;
    best.evaluated = evaluated;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdo::default_decoding_order;
    use crate::model::UserProfile;
    use crate::ts::{effective_gains, optimal_t_for_tau};

    fn user(c: f64, e: f64, g: f64) -> UserProfile {
        UserProfile::new(c, 1e6, 1.5e9, e, g).unwrap()
    }

    fn three() -> TsInstance {
        TsInstance::new(
            SystemConfig::reference(3),
            vec![user(30.0, 0.4, 3e-6), user(18.0, 0.3, 9e-6), user(35.0, 0.6, 5e-7)],
        )
        .unwrap()
    }

    #[test]
    fn subset_count_and_refusal() {
        let cfg = SystemConfig::reference(2);
        let r = mac_region_check(&cfg, &[1e-6, 2e-6], &[1.0, 1.0], 0.1, 1e5).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|c| c.subset_mask != 0));
        let big = vec![1.0; 21];
        assert!(matches!(
            mac_region_check(&cfg, &big, &big, 0.1, 1e5),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn zero_energy_violates_everything() {
        let cfg = SystemConfig::reference(3);
        let r = mac_region_check(&cfg, &[1e-6; 3], &[0.0; 3], 0.1, 1e5).unwrap();
        assert!(r.iter().all(|c| !c.satisfied));
    }

    #[test]
    fn ts_optimum_sits_on_region_boundary() {
        let inst = three();
        let tau = inst.tau_low() * 1.3;
        let t = optimal_t_for_tau(&inst, tau).unwrap();
        let e = residual_tx_energies(&inst.cfg, &inst.users, tau).unwrap();
        let g: Vec<f64> = inst.users.iter().map(|u| u.channel_gain).collect();
        let r = mac_region_check(&inst.cfg, &g, &e, t * (1.0 + 1e-12), inst.cfg.payload_bits).unwrap();
        assert!(mac_region_feasible(&r));
        assert!(r.iter().any(|c| (c.rhs_bits - c.lhs_bits).abs() <= 1e-9 * c.lhs_bits));
        let gains = effective_gains(&inst, tau).unwrap();
        assert!(crate::ts::tail_constraints_hold(&inst.cfg, &gains, t * (1.0 + 1e-12)));
    }

    #[test]
    fn bisection_oracle_agrees_with_closed_form() {
        let inst = three();
        for f in [1.01, 1.5, 4.0] {
            let tau = inst.tau_low() * f;
            let a = optimal_t_for_tau(&inst, tau).unwrap();
            let b = bisection_t_for_tau(&inst, tau).unwrap();
            assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
        }
    }

    #[test]
    fn grid_refinement_never_hurts() {
        let inst = three();
        let (_, coarse) = grid_min_ts(&inst, 500).unwrap();
        let (_, fine) = grid_min_ts(&inst, 999).unwrap();
        assert!(fine <= coarse);
        assert!(grid_min_ts(&inst, 50).is_err());
    }

    #[test]
    fn single_user_grid_matches_closed_form_scan() {
        let inst = TsInstance::new(SystemConfig::reference(1), vec![user(22.0, 0.2, 2e-6)]).unwrap();
        let (_, grid) = grid_min_ts(&inst, 10_000).unwrap();
        let sol = crate::ts::minimize_round_delay_ts(&inst, 1e-11).unwrap();
        assert!((grid - sol.total_delay_s).abs() <= 1e-8 * grid);
    }

    #[test]
    fn closed_form_chain_matches_recursion() {
        let inst = FdoInstance::with_default_order(&three());
        let tau = inst.tau_low() * 1.4;
        for t in [0.01, 0.05, 0.08, 0.1, 0.2, 1.0] {
            assert_eq!(
                closed_form_chain_fits(&inst, tau, t),
                crate::fdo::fdo_feasible(&inst, tau, t),
                "t = {t}"
            );
        }
    }

    #[test]
    fn fdo_grid_and_descent_agree_with_solver() {
        let inst = FdoInstance::with_default_order(&three());
        let sol = minimize_round_delay_fdo(&inst, 1e-10).unwrap();
        let grid = grid_min_fdo(&inst, 300, 4).unwrap();
        assert!(sol.total_delay_s <= grid.delay_s + 1e-10);
        assert!(grid.delay_s - sol.total_delay_s <= 1e-10 + grid.tau_step + grid.t_step);

        let d = convex_descent_fdo(&inst, 2000).unwrap();
        assert!(d.max_constraint <= 1e-8);
        assert!(descent_point_is_feasible(&inst, &d));
        assert!((d.objective - sol.total_delay_s).abs() <= 1e-4 * sol.total_delay_s, "{d:?} vs {sol:?}");
    }

    #[test]
    fn single_user_descent() {
        let ts = TsInstance::new(SystemConfig::reference(1), vec![user(35.0, 0.12, 1e-6)]).unwrap();
        let inst = FdoInstance::with_default_order(&ts);
        let sol = minimize_round_delay_fdo(&inst, 1e-10).unwrap();
        let d = convex_descent_fdo(&inst, 2000).unwrap();
        assert!((d.objective - sol.total_delay_s).abs() <= 1e-4 * sol.total_delay_s);
    }

    #[test]
    fn order_enumeration_counts() {
        let inst = three();
        let best = exhaustive_order_search(&inst, 1e-9).unwrap();
        assert_eq!(best.evaluated, 6);
        let default = minimize_round_delay_fdo(&FdoInstance::with_default_order(&inst), 1e-9).unwrap();
        assert!(best.delay_s <= default.total_delay_s + 1e-9);

        let two = TsInstance::new(SystemConfig::reference(2), inst.users[..2].to_vec()).unwrap();
        assert_eq!(exhaustive_order_search(&two, 1e-9).unwrap().evaluated, 2);
        let one = TsInstance::new(SystemConfig::reference(1), inst.users[..1].to_vec()).unwrap();
        let r = exhaustive_order_search(&one, 1e-9).unwrap();
        assert_eq!(r.evaluated, 1);
        assert_eq!(r.order, default_decoding_order(&one.users));

        let six = TsInstance::new(SystemConfig::reference(6), vec![inst.users[0]; 6]).unwrap();
        assert!(matches!(exhaustive_order_search(&six, 1e-9), Err(Error::TooLarge { .. })));
    }
}
