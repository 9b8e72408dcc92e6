//! Broken-line representation of oriented flows on rectangular
//! tilted-lattice domains.
//!
//! A conservative edge-weight field decomposes uniquely into totally
//! ordered crossing lines with positive weights ([`decompose`]); the
//! weight any trace can carry is recovered by interval propagation
//! ([`propagate_interval`]), and the total line weight equals either
//! boundary sum ([`crossing_total`]). The discrete geometric chain, the
//! reversible boundary families and the intersection statistics live in
//! their own submodules.

pub mod chain;
pub mod decompose;
pub mod domain;
pub mod flow;
pub mod intersections;
pub mod interval;
pub mod json;
pub mod reversible;
pub mod trace;
pub mod weight;

pub use chain::{
    column_sites, geometric_chain_step, kernel_pmf, kernel_sample, run_geometric_chain,
    ChainColumn,
};
pub use decompose::{
    corner_potential, crossing_total, decompose, recompose, CrossingTotal, Decomposition,
};
pub use domain::{RectDomain, Site, SiteClass};
pub use flow::{
    absorb_boundary, flow_from_boundary, reflect, BirthField, BoundaryFlows, FlowField,
};
pub use intersections::{
    horizontal_pair_mass, intersection_stats, sample_horizontal_pairs, LineKind, LineStats,
};
pub use interval::{
    chase_atom, indicator_field, propagate_interval, trace_weight, BrokenLine, Interval,
};
pub use json::{
    decomposition_from_json, decomposition_to_json, field_from_json, field_to_json,
    DecompositionJson, FieldJson, JsonWeight,
};
pub use reversible::{
    optimal_split_exponential, optimal_split_geometric, sample_reversible_exponential,
    sample_reversible_geometric, BoundaryFamily,
};
pub use trace::{BrokenTrace, EdgeRef};
pub use weight::{Weight, REAL_TOLERANCE};
