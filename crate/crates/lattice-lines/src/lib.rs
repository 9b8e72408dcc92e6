//! Simulation and combinatorial toolkit for abelian-stack activated random
//! walks and the broken-line representation of oriented flows, with
//! last-passage percolation solvers built on both.
//!
//! Three subsystems:
//!
//! * [`arw`] — activated random walks on finite one-dimensional boxes via
//!   per-site instruction stacks: stabilization under any label policy,
//!   order-invariance and monotonicity checks, and the sweep-and-trap
//!   fixation certificate.
//! * [`bl`] — flow fields on rectangular tilted-lattice domains: interval
//!   propagation along broken traces, brick-diagram decomposition into
//!   ordered crossing lines, crossing totals, reversible boundary laws,
//!   the discrete geometric chain, and intersection statistics.
//! * [`lpp`] — last-passage percolation: a dynamic-programming oracle, the
//!   broken-line solver with its local-rule path extractor, and law-of-
//!   large-numbers experiments for exponential and geometric weights.
//!
//! All randomness is drawn from splittable [`rng::SeededStream`]s, so every
//! simulation is reproducible from `(seed, substream)` addresses.

pub mod arw;
pub mod bl;
pub mod cli;
pub mod error;
pub mod lpp;
pub mod rng;

pub use error::{Error, Result};
