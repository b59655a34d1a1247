use serde::Serialize;

use crate::e;
use crate::error::{Error, Result};

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Both sides of `|Σ_{n=1}^N e(jnα)| ≤ 1/(2‖jα‖)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RotationBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl RotationBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// Geometric-sum bound for the irrational rotation: `lhs` by direct
/// summation, `rhs = 1/(2·dist(jα, ℤ))`.
pub fn exp_weyl_bound_check(alpha: f64, j: i64, n: usize) -> Result<RotationBound> {
    if j == 0 {
        return Err(Error::input("frequency j must be nonzero"));
    }
    let step = (j as f64 * alpha).rem_euclid(1.0);
    let d = dist_to_integer(step);
    if d < 1e-12 {
        return Err(Error::input(format!("jα = {} is an integer at working precision", j as f64 * alpha)));
    }
    let mut sum = crate::Complex64::new(0.0, 0.0);
    for k in 1..=n {
        // (k·step) mod 1 keeps the argument small.
        sum += e((k as f64 * step).rem_euclid(1.0));
    }
    Ok(RotationBound { lhs: sum.norm(), rhs: 1.0 / (2.0 * d) })
}
