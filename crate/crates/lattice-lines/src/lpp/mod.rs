//! Last-passage percolation: the maximum birth mass collected by an
//! oriented corner-to-corner path. Solved two independent ways — a
//! dynamic-programming corner recursion and the broken-line crossing
//! total, which agree by the flow identity — plus law-of-large-numbers
//! experiments for the exponential and geometric weight families.

pub mod brokenline;
pub mod dp;
pub mod instance;
pub mod lln;

pub use brokenline::{boundary_comparison, solve_brokenline, BoundaryComparison};
pub use dp::solve_dp;
pub use instance::{
    instance_from_json, instance_to_json, LppInstance, LppInstanceJson, LppSolution, Method,
};
pub use lln::{
    analytic_limit, lln_experiment, LlnFamily, LlnRow,
};
