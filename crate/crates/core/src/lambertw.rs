//! Lower real branch `W₋₁` of the Lambert W function.
//!
//! `W₋₁(x)` is the solution `w ≤ −1` of `w·eʷ = x` for `x ∈ [−1/e, 0)`.
//! The starting point comes from the branch-point series near `−1/e` and
//! from the logarithmic asymptote near `0⁻`; Halley's iteration refines it.

use std::f64::consts::E;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;
const MAX_ITERATIONS: usize = 50;
const BRANCH_POINT_SNAP: f64 = 1e-14;
const DOMAIN_SLACK: f64 = 1e-15;
const RESIDUAL_TOL: f64 = 1e-14;

/// A validated argument of `W₋₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambertArg(f64);

impl LambertArg {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value >= 0.0 || value < -INV_E - DOMAIN_SLACK {
            return Err(Error::Domain(format!(
                "W-1 is defined on [-1/e, 0), got {value:e}"
            )));
        }
        Ok(Self(value.max(-INV_E)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series in p = -sqrt(2(1 + e·x)) around the branch point.
        let p = -(2.0 * (1.0 + E * x)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    }
}

/// Evaluates `W₋₁(x)`.
pub fn lambert_w_minus1(x: LambertArg) -> f64 {
    let x = x.value();
    if (x + INV_E).abs() < BRANCH_POINT_SNAP {
        return -1.0;
    }
    if x > -1e-250 {
        return tiny_argument(x);
    }

    let mut w = initial_guess(x);
    for _ in 0..MAX_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= RESIDUAL_TOL * x.abs() {
            break;
        }
        let w1 = w + 1.0;
        let step = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1));
        let next = (w - step).min(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    w
}

/// Checked convenience wrapper over [`lambert_w_minus1`].
pub fn w_minus1(x: f64) -> Result<f64> {
    Ok(lambert_w_minus1(LambertArg::new(x)?))
}

// eʷ underflows here, so solve w + ln(−w) = ln(−x) instead.
fn tiny_argument(x: f64) -> f64 {
    let target = (-x).ln();
    let mut w = target - (-target).ln();
    for _ in 0..MAX_ITERATIONS {
        let g = w + (-w).ln() - target;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Plain bisection on w·eʷ = x over [−20, −1]; w·eʷ is decreasing there.
    fn bisection_oracle(x: f64) -> f64 {
        let (mut lo, mut hi) = (-20.0f64, -1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() > x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn analytic_points() {
        assert_eq!(w_minus1(-INV_E).unwrap(), -1.0);
        let w = w_minus1(-2.0 * (-2.0f64).exp()).unwrap();
        assert_relative_eq!(w, -2.0, max_relative = 1e-14);
    }

    #[test]
    fn matches_bisection_at_minus_tenth() {
        let w = w_minus1(-0.1).unwrap();
        assert_relative_eq!(w, -3.577152063957297, max_relative = 1e-14);
        assert_relative_eq!(w, bisection_oracle(-0.1), max_relative = 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(w_minus1(0.0).is_err());
        assert!(w_minus1(0.5).is_err());
        assert!(w_minus1(-0.4).is_err());
        assert!(w_minus1(f64::NAN).is_err());
        // Rounding slack just below the branch point is accepted.
        assert_eq!(w_minus1(-INV_E - 5e-16).unwrap(), -1.0);
    }

    #[test]
    fn tiny_arguments() {
        for &x in &[-1e-12, -1e-100, -1e-260, -1e-300, -f64::MIN_POSITIVE] {
            let w = w_minus1(x).unwrap();
            assert!(w <= -1.0);
            // Compare in log space: w + ln(-w) = ln(-x).
            let lhs = w + (-w).ln();
            assert_relative_eq!(lhs, (-x).ln(), max_relative = 1e-14);
        }
    }

    #[test]
    fn near_branch_point() {
        for k in 1..12 {
            let x = -INV_E + 10f64.powi(-k);
            let w = w_minus1(x).unwrap();
            assert!(w <= -1.0);
            assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs(), "x = {x:e}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]

            #[test]
            fn defining_identity(u in 0.0f64..1.0) {
                let x = -INV_E + u * (INV_E - 1e-12);
                let x = x.min(-1e-12);
                let w = w_minus1(x).unwrap();
                prop_assert!(w <= -1.0);
                prop_assert!((w * w.exp() - x).abs() <= 1e-10 * x.abs());
            }

            #[test]
            fn decreasing(a in 1e-12f64..0.3678, b in 1e-12f64..0.3678) {
                prop_assume!(a != b);
                let (x1, x2) = if a > b { (-a, -b) } else { (-b, -a) };
                // x1 < x2 ⇒ W(x1) > W(x2)
                prop_assert!(w_minus1(x1).unwrap() >= w_minus1(x2).unwrap());
            }
        }
    }
}
