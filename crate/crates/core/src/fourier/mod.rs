//! Fourier transforms of measures on the line and the smoothing bounds.
//!
//! Conventions: `e(x) = exp(2πix)`, `ν̂(ξ) = ∫ e(ξx) dν(x)`, `S_t x = tx`.
//! Two inequalities are computed on both sides and certified:
//!
//! * for a `C¹` density `f` on `[a,b]`,
//!   `|f̂(t)| ≤ (‖f‖_∞ + (b − a)‖f′‖_∞)/(π|t|)`;
//! * for a probability measure `ν`, `b > 1`, `m ≠ 0` and `r > 0`,
//!   `∫₀¹ |ν̂(m b^t)|² dt ≤ 1/(r|m| ln b) + ∫ ν(B_r(y)) dν(y)`.

mod certify;
mod density;
mod quadrature;
mod smoothing;
mod transform;

pub use certify::{
    certify_c1, certify_smoothing, default_c1_frequencies, default_measures, mc_cross_check, mc_scaled_sq, C1Row,
    CertMeasure, McCheck, SmoothingGrid, SmoothingReport, SmoothingRow, CERT_SLACK,
};
pub use density::{c1_bound_check, c1_transform, C1BoundCheck, C1Density, C1_QUAD_TOL};
pub use quadrature::{adaptive_gl16, gauss_legendre16, gl16, gl16_panels};
pub use smoothing::{fourier_term, scaled_sq_integral, smoothing_rhs, Quadrature, SmoothingParams, QUAD_TOL};
pub use transform::{ft_adic, ft_scaled, sinc, AdicTransform, AtomicMeasure, LineMeasure, Scaled};
