use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::quadrature::adaptive_gl16;
use crate::e;
use crate::error::{Error, Result};

/// Absolute tolerance of the quadrature for `f̂(t)`.
pub const C1_QUAD_TOL: f64 = 1e-10;

/// Probability densities on `[lo, hi]` with closed-form sup norms of `f` and
/// `f′`. Each integrates to 1 exactly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum C1Density {
    /// `1/w`.
    Uniform { lo: f64, hi: f64 },
    /// `6(x − lo)(hi − x)/w³`.
    Parabola { lo: f64, hi: f64 },
    /// `(1 + cos(2π(x − lo)/w))/w`.
    RaisedCosine { lo: f64, hi: f64 },
    /// `(n + 1) u^n / w` with `u = (x − lo)/w`.
    Monomial { lo: f64, hi: f64, n: u32 },
}

impl C1Density {
    pub fn interval(&self) -> (f64, f64) {
        match *self {
            C1Density::Uniform { lo, hi }
            | C1Density::Parabola { lo, hi }
            | C1Density::RaisedCosine { lo, hi }
            | C1Density::Monomial { lo, hi, .. } => (lo, hi),
        }
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.interval();
        hi - lo
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval();
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::input(format!("density interval [{lo}, {hi}] is empty")));
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        let (lo, hi) = self.interval();
        match self {
            C1Density::Uniform { .. } => format!("uniform[{lo},{hi}]"),
            C1Density::Parabola { .. } => format!("parabola[{lo},{hi}]"),
            C1Density::RaisedCosine { .. } => format!("raised_cosine[{lo},{hi}]"),
            C1Density::Monomial { n, .. } => format!("monomial{n}[{lo},{hi}]"),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, _) = self.interval();
        let w = self.width();
        let u = (x - lo) / w;
        match *self {
            C1Density::Uniform { .. } => 1.0 / w,
            C1Density::Parabola { .. } => 6.0 * u * (1.0 - u) / w,
            C1Density::RaisedCosine { .. } => (1.0 + (2.0 * PI * u).cos()) / w,
            C1Density::Monomial { n, .. } => (n + 1) as f64 * u.powi(n as i32) / w,
        }
    }

    /// `‖f‖_∞` on the interval.
    pub fn sup_norm(&self) -> f64 {
        let w = self.width();
        match *self {
            C1Density::Uniform { .. } => 1.0 / w,
            C1Density::Parabola { .. } => 1.5 / w,
            C1Density::RaisedCosine { .. } => 2.0 / w,
            C1Density::Monomial { n, .. } => (n + 1) as f64 / w,
        }
    }

    /// `‖f′‖_∞` on the interval.
    pub fn derivative_sup_norm(&self) -> f64 {
        let w2 = self.width() * self.width();
        match *self {
            C1Density::Uniform { .. } => 0.0,
            C1Density::Parabola { .. } => 6.0 / w2,
            C1Density::RaisedCosine { .. } => 2.0 * PI / w2,
            C1Density::Monomial { n, .. } => (n * (n + 1)) as f64 / w2,
        }
    }

    /// The built-in battery.
    pub fn battery() -> Vec<C1Density> {
        vec![
            C1Density::Parabola { lo: 0.0, hi: 1.0 },
            C1Density::RaisedCosine { lo: 0.0, hi: 1.0 },
            C1Density::Uniform { lo: 0.0, hi: 1.0 },
            C1Density::Monomial { lo: 0.0, hi: 1.0, n: 3 },
            C1Density::Parabola { lo: -0.5, hi: 2.0 },
            C1Density::RaisedCosine { lo: 0.25, hi: 0.75 },
        ]
    }
}

/// `f̂(t) = ∫ f(x) e(tx) dx` by adaptive quadrature.
pub fn c1_transform(f: &C1Density, t: f64) -> Result<Complex64> {
    f.validate()?;
    let (lo, hi) = f.interval();
    let g = |x: f64| e(t * x) * f.eval(x);
    // Two panels per period of e(tx) before any bisection.
    let initial = (2.0 * t.abs() * (hi - lo)).ceil() as usize + 1;
    adaptive_gl16(&g, lo, hi, initial, C1_QUAD_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C1BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `|f̂(t)|` against `(‖f‖_∞ + (b − a)‖f′‖_∞)/(π|t|)`.
pub fn c1_bound_check(f: &C1Density, t: f64) -> Result<C1BoundCheck> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::input(format!("frequency must be finite and nonzero, got {t}")));
    }
    let lhs = c1_transform(f, t)?.norm();
    let rhs = (f.sup_norm() + f.width() * f.derivative_sup_norm()) / (PI * t.abs());
    Ok(C1BoundCheck { lhs, rhs, ok: lhs <= rhs })
}
