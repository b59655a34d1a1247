//! Numerical laboratory for equidistribution of `×b` orbits of points that
//! are typical for `×a`-invariant measures.
//!
//! The crate is organised bottom-up:
//!
//! * [`adic`] — exact points of `[0,1)` at fixed `a`-adic precision, the
//!   `×b` orbit kernel and the Kronecker time-change schedule.
//! * [`measure`] — Bernoulli, Markov and digit-IFS generators, their `a`-adic
//!   discretisations, conditional measures given the past, and correlation
//!   integrals.
//! * [`fourier`] — Fourier transforms of piecewise-uniform measures, the
//!   scaled square-integral `∫₀¹ |F_m(S_{b^t} ν)|² dt` and the two smoothing
//!   bounds it is certified against.
//! * [`ergodic`] — martingale-difference averages and joint equidistribution
//!   along the times `[βn]`.
//! * [`host`] — Weyl sums along exact orbits, the orbit-versus-conditional
//!   comparison, and the integrated Fourier quantity that decays in `k`.
//!
//! Everything is deterministic for a fixed master seed; parallel sections
//! reduce in index order so results do not depend on the thread count.

pub mod adic;
pub mod ergodic;
mod error;
pub mod fourier;
pub mod host;
pub mod measure;
pub mod report;
pub mod seed;
pub mod stats;

pub use adic::{KroneckerSchedule, OrbitKernel, PrecisionBudget, UnitPoint};
pub use error::{Error, Result};
pub use fourier::{AdicTransform, AtomicMeasure, LineMeasure, Scaled};
pub use measure::{AdicMeasure, CylinderWord, MeasureGen, PastWord};
pub use num_complex::Complex64;

/// `e(x) = exp(2πix)`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (std::f64::consts::TAU * x).sin_cos();
    Complex64::new(c, s)
}
