//! Simulated checks of the soft ergodic statements: Cesàro averages of
//! martingale differences, and joint equidistribution of `(nθ, T^{[βn]}x)`.
//!
//! Conditional expectations are evaluated in closed form, never by nested
//! simulation. Trials draw from counter-derived seeds and run in parallel;
//! results are collected in trial order.

mod martingale;
mod time_change;

pub use martingale::{
    martingale_avg_experiment, split_index_average, MartingaleResult, SplitCheck, SymbolicProcess, WindowFunction,
};
pub use time_change::{
    cesaro_slack, check_irrational, time_change_joint_experiment, DigitTest, JointEntry, JointEquidistResult,
    IRRATIONALITY_MAX_Q, IRRATIONALITY_TOL,
};
