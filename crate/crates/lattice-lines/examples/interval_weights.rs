//! Interval propagation: the maximal weight a trace carries, recovered
//! edge by edge through the association rules.

use lattice_lines::bl::{
    decompose, flow_from_boundary, propagate_interval, trace_weight, BirthField, BoundaryFlows,
    BrokenTrace, EdgeRef, RectDomain, Site,
};
use lattice_lines::rng::SeededStream;

fn main() {
    let domain = RectDomain::new(3, 3).unwrap();
    let mut births = BirthField::zero(domain);
    let mut stream = SeededStream::new(41, 0);
    for s in domain.sites() {
        births.set(s.i, s.j, stream.below(5));
    }
    let field = flow_from_boundary(&births, &BoundaryFlows::zero(domain)).unwrap();

    // Single edges carry their flow; wedges carry the birth mass.
    let s = Site::new(2, 2);
    let edge = BrokenTrace::of_edge(EdgeRef::Up { i: 2, j: 2 });
    println!(
        "edge weight {} (flow {})",
        trace_weight(&field, &edge).unwrap(),
        field.out_ne(s)
    );
    let wedge = BrokenTrace::wedge(s);
    println!(
        "wedge weight {} (birth mass {})",
        trace_weight(&field, &wedge).unwrap(),
        field.births_at(s)
    );

    // Every decomposed line reproduces its strip width, with the interval
    // positions on each edge.
    let dec = decompose(&field).unwrap();
    for (trace, w) in dec.traces().iter().zip(dec.weights()) {
        let line = propagate_interval(&field, trace).unwrap().expect("positive weight");
        println!(
            "strip width {w}: intervals {:?}",
            line.intervals
                .iter()
                .map(|iv| (iv.lo, iv.hi))
                .collect::<Vec<_>>()
        );
    }
}
