//! Exact arithmetic on `[0,1)` at fixed `a`-adic precision.
//!
//! [`UnitPoint`] stores `x = numerator / a^L`, [`OrbitKernel`] iterates
//! `x ↦ bx mod 1` on it without drift, and [`KroneckerSchedule`] tabulates the
//! time change `n′ = ⌊αn⌋`, `z_n = αn mod 1` for `α = log b / log a`.

mod fixed;
mod kernel;
mod point;
mod rotation;
mod schedule;

pub use kernel::OrbitKernel;
pub(crate) use point::check_base;
pub use point::{PrecisionBudget, UnitPoint};
pub use rotation::{dist_to_integer, exp_weyl_bound_check, RotationBound};
pub use schedule::{multiplicatively_dependent, primitive_root, KroneckerSchedule, ScheduleSummary};
