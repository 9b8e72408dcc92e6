//! Activated random walks on one-dimensional finite boxes, driven by
//! per-site instruction stacks.
//!
//! The representation makes the dynamics commutative: the stable
//! configuration, the per-site instruction counts and the odometer depend
//! only on the initial particles and the stacks, not on the order in which
//! legal moves execute. It is also monotone: removing particles, starting
//! them passive, or inserting sleep instructions never increases the
//! odometer anywhere. Both properties are exercised directly by
//! [`stabilize::check_abelian`] and [`stabilize::check_monotone`], and the
//! sweep-and-trap construction in [`sweep`] turns them into a replayable
//! fixation certificate.

pub mod scan;
pub mod stabilize;
pub mod stack;
pub mod state;
pub mod sweep;

pub use scan::{fixation_scan, ScanCell, ScanGrid};
pub use stabilize::{
    check_abelian, check_monotone, stabilize, stabilize_fast, stabilize_timed, AbelianReport,
    LabelPolicy, MonotoneReport, Perturbation, StableProfile, Stabilized, TimedStep,
    DEFAULT_STEP_CAP,
};
pub use stack::{
    ArwParams, ExplicitStacks, Instruction, JumpView, SampledStacks, SleepInserted,
    SparseSleepStacks, Stacks,
};
pub use state::{ArwState, ParticleState, StepOutcome};
pub use sweep::{
    build_traps, choose_sweep_radius, replay_certificate, run_trap_trial, sweep,
    swept_boundary_mean, DirectionRule, ReplayReport, SweepOutcome, Trap, TrapCertificate,
    TrapTrial,
};
