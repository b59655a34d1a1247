use serde::Serialize;

use super::quadrature::gl16_panels;
use super::transform::LineMeasure;
use crate::error::{Error, Result};

/// Target change between successive panel doublings.
pub const QUAD_TOL: f64 = 1e-6;

/// Parameters of the scaled square-integral and its bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothingParams {
    /// Scale base `b > 1`.
    pub b: f64,
    /// Nonzero integer frequency.
    pub m: i64,
    /// Correlation radius `r > 0`.
    pub r: f64,
    /// Largest panel count tried before giving up.
    pub max_panels: usize,
}

impl SmoothingParams {
    pub const DEFAULT_MAX_PANELS: usize = 1 << 20;

    pub fn new(b: f64, m: i64, r: f64) -> Result<Self> {
        let p = SmoothingParams { b, m, r, max_panels: Self::DEFAULT_MAX_PANELS };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 1.0 && self.b.is_finite()) {
            return Err(Error::input(format!("scale base must exceed 1, got {}", self.b)));
        }
        if self.m == 0 {
            return Err(Error::input("frequency m must be nonzero"));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::input(format!("radius must be positive, got {}", self.r)));
        }
        Ok(())
    }

    /// Starting panel count `max(16, ⌈4|m| b ln b · max(diam, 1)⌉)`: about
    /// four panels per oscillation of `t ↦ |ν̂(m b^t)|²`.
    pub fn initial_panels(&self, diameter: f64) -> usize {
        let osc = 4.0 * self.m.unsigned_abs() as f64 * self.b * self.b.ln() * diameter.max(1.0);
        (osc.ceil() as usize).max(16)
    }
}

/// A quadrature value with the change seen at the last doubling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// `∫₀¹ |ν̂(m b^t)|² dt` on 16-point Gauss–Legendre panels, doubling the
/// panel count until two successive values differ by less than `1e−6`.
pub fn scaled_sq_integral<M: LineMeasure + Sync>(nu: &M, params: &SmoothingParams) -> Result<Quadrature> {
    params.validate()?;
    let (b, m) = (params.b, params.m as f64);
    let ln_b = b.ln();
    let f = |t: f64| nu.fourier(m * (t * ln_b).exp()).norm_sqr();
    let mut panels = params.initial_panels(nu.diameter());
    if panels > params.max_panels {
        return Err(Error::Resource(format!(
            "scaled square-integral needs {panels} panels, budget is {}",
            params.max_panels
        )));
    }
    let mut prev = gl16_panels(&f, 0.0, 1.0, panels);
    while 2 * panels <= params.max_panels {
        panels *= 2;
        let next = gl16_panels(&f, 0.0, 1.0, panels);
        let change = (next - prev).abs();
        if change < QUAD_TOL {
            return Ok(Quadrature { value: next, error_estimate: change, panels });
        }
        prev = next;
    }
    Err(Error::Numerical(format!(
        "scaled square-integral not converged at {panels} panels (m={}, b={b}, diameter={})",
        params.m,
        nu.diameter()
    )))
}

/// `1/(r |m| ln b) + ∫ ν(B_r(y)) dν(y)`.
pub fn smoothing_rhs<M: LineMeasure>(nu: &M, params: &SmoothingParams) -> Result<f64> {
    params.validate()?;
    Ok(fourier_term(params) + nu.correlation_integral(params.r)?)
}

/// The first summand `1/(r |m| ln b)` of the bound.
pub fn fourier_term(params: &SmoothingParams) -> f64 {
    1.0 / (params.r * params.m.unsigned_abs() as f64 * params.b.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{AdicTransform, AtomicMeasure, Scaled};
    use crate::measure::{AdicMeasure, MeasureGen};

    #[test]
    fn dirac_gives_one() {
        let d = AtomicMeasure::dirac(0.0);
        let q = scaled_sq_integral(&d, &SmoothingParams::new(2.0, 1, 0.1).unwrap()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn uniform_under_bound() {
        let u = AdicTransform::new(&AdicMeasure::uniform(2, 10).unwrap());
        for r in [0.05, 0.1, 0.2] {
            let p = SmoothingParams::new(2.0, 3, r).unwrap();
            let lhs = scaled_sq_integral(&u, &p).unwrap().value;
            let rhs = smoothing_rhs(&u, &p).unwrap();
            assert!((rhs - (1.0 / (r * 3.0 * 2f64.ln()) + 2.0 * r - r * r)).abs() < 1e-12);
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn uniform_closed_form() {
        // |û(ξ)|² = sinc²(πξ) for Lebesgue on [0,1]; compare with an
        // independent fine trapezoid rule.
        let u = AdicTransform::new(&AdicMeasure::uniform(2, 8).unwrap());
        let p = SmoothingParams::new(2.0, 1, 0.1).unwrap();
        let q = scaled_sq_integral(&u, &p).unwrap();
        let n = 200_000;
        let g = |t: f64| {
            let x = std::f64::consts::PI * 2f64.powf(t);
            (x.sin() / x).powi(2)
        };
        let trap: f64 = (0..=n).map(|i| g(i as f64 / n as f64) * if i == 0 || i == n { 0.5 } else { 1.0 }).sum::<f64>() / n as f64;
        assert!((q.value - trap).abs() < 1e-8, "{} vs {trap}", q.value);
    }

    #[test]
    fn smoothing_rhs_examples() {
        let u = AdicTransform::new(&AdicMeasure::uniform(2, 8).unwrap());
        let p = SmoothingParams::new(2.0, 1, 0.1).unwrap();
        assert!((smoothing_rhs(&u, &p).unwrap() - 14.6170).abs() < 1e-3);
        let p = SmoothingParams::new(10.0, -2, 1.5).unwrap();
        assert!((smoothing_rhs(&u, &p).unwrap() - (1.0 / (1.5 * 2.0 * 10f64.ln()) + 1.0)).abs() < 1e-15);

        let c = AdicTransform::from_generator(&MeasureGen::cantor(), None, 12).unwrap();
        let p = SmoothingParams::new(2.0, 2, 3f64.powi(-4)).unwrap();
        let rhs = smoothing_rhs(&c, &p).unwrap();
        assert!(rhs.is_finite() && rhs > 0.0);
        assert!(scaled_sq_integral(&c, &p).unwrap().value <= rhs);
    }

    #[test]
    fn scaled_measure_matches_prescaled_frequency() {
        let c = AdicTransform::from_generator(&MeasureGen::cantor(), None, 8).unwrap();
        let s = Scaled::new(&c, 9.0).unwrap();
        let q = scaled_sq_integral(&s, &SmoothingParams::new(3.0, 1, 0.5).unwrap()).unwrap();
        assert!(q.panels >= SmoothingParams::new(3.0, 1, 0.5).unwrap().initial_panels(9.0));
        assert!(q.value > 0.0 && q.value < 1.0);
        assert!(matches!(
            SmoothingParams::new(1.0, 1, 0.1),
            Err(Error::Input(_))
        ));
        assert!(SmoothingParams::new(2.0, 0, 0.1).is_err());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let c = AdicTransform::from_generator(&MeasureGen::cantor(), None, 8).unwrap();
        let mut p = SmoothingParams::new(2.0, 1, 0.1).unwrap();
        p.max_panels = 8;
        assert!(matches!(scaled_sq_integral(&c, &p), Err(Error::Resource(_))));
    }
}
