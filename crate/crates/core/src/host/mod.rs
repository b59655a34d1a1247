//! The orbit experiment: Weyl sums along exact `×b` orbits of `μ`-typical
//! points, their comparison with averaged conditional measures, and the
//! integrated Fourier quantity that decays in `k`.

mod compare;
mod experiment;
mod proof_chain;
mod weyl;

pub use compare::{
    lifting_identity_check, orbit_vs_conditional_compare, CompareResult, LiftingCheck, COMPARE_EXTRA_LEVELS, LIFTING_TOL,
};
pub use experiment::{
    host_experiment, rational_point_control, HostExperimentConfig, HostReport, RationalControl, WeylRow, WeylSummary,
    ORACLE_LEVEL,
};
pub use proof_chain::{decay_violation, proof_chain_quantity, ProofChainEstimate, ENTROPY_FLOOR};
pub use weyl::{character_at, weyl_sum, WeylAccumulator, WeylCheckpoint};
