//! Maximal broken lines by interval propagation.
//!
//! Atoms on an edge e are points of (0, η(e)]. At each interior vertex the
//! association rules transfer an interval of atoms from the incoming edge
//! to the outgoing one; the maps are translations restricted to windows,
//! so the feasible set stays a single half-open interval. A forward pass
//! computes the feasible interval on every edge, the surviving length on
//! the last edge is the trace's weight, and a backward pass through the
//! inverse translations recovers the unique maximal line.

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::domain::{RectDomain, Site};
use super::flow::FlowField;
use super::trace::{BrokenTrace, EdgeRef};
use super::weight::Weight;

/// Half-open interval (lo, hi]; empty iff hi <= lo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<W> {
    pub lo: W,
    pub hi: W,
}

impl<W: Weight> Interval<W> {
    pub fn new(lo: W, hi: W) -> Self {
        Interval { lo, hi }
    }

    pub fn full(hi: W) -> Self {
        Interval { lo: W::ZERO, hi }
    }

    pub fn width(&self) -> W {
        self.hi.pos_diff(self.lo)
    }

    pub fn is_empty(&self) -> bool {
        !matches!(
            self.hi.partial_cmp(&self.lo),
            Some(std::cmp::Ordering::Greater)
        )
    }

    pub fn contains(&self, p: W) -> bool {
        p > self.lo && p <= self.hi
    }

    pub fn intersect(&self, other: &Interval<W>) -> Interval<W> {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    fn shift_up(&self, d: W) -> Interval<W> {
        Interval {
            lo: self.lo.add(d),
            hi: self.hi.add(d),
        }
    }

    /// Translation downward; callers guarantee lo >= d on nonempty input.
    fn shift_down(&self, d: W) -> Interval<W> {
        if self.is_empty() {
            return Interval::new(W::ZERO, W::ZERO);
        }
        Interval {
            lo: self.lo.sub(d),
            hi: self.hi.sub(d),
        }
    }
}

/// Which association rule applies at an interior vertex, given how the
/// trace enters (from sw or se) and leaves (to nw or ne).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VertexCase {
    /// in ↙, out ↖: annihilation vertex.
    Collision,
    /// in ↘, out ↖: descending flow passes through.
    PassDescending,
    /// in ↙, out ↗: ascending flow passes through.
    PassAscending,
    /// in ↘, out ↗: left corner, a birth vertex.
    Birth,
}

fn classify_vertex(prev: Site, v: Site, next: Site) -> VertexCase {
    let in_sw = prev.j == v.j - 1; // arrived via the ↙ edge
    let out_ne = next.j == v.j + 1; // leaves via the ↗ edge
    match (in_sw, out_ne) {
        (true, false) => VertexCase::Collision,
        (false, false) => VertexCase::PassDescending,
        (true, true) => VertexCase::PassAscending,
        (false, true) => VertexCase::Birth,
    }
}

/// Forward transfer of the feasible interval across vertex `v`.
fn forward<W: Weight>(field: &FlowField<W>, v: Site, case: VertexCase, j: Interval<W>) -> Interval<W> {
    let sw = field.in_sw(v);
    let nw = field.in_nw(v);
    let ne = field.out_ne(v);
    let se = field.out_se(v);
    match case {
        // p' = p, valid for p <= η(e^↖) (and p <= η(e^↙) already).
        VertexCase::Collision => j.intersect(&Interval::full(nw)),
        // p' = p + η(e^↙), landing in (η(e^↙), η(e^↖)].
        VertexCase::PassDescending => j
            .shift_up(sw)
            .intersect(&Interval::new(sw, nw)),
        // p' = p - η(e^↖) for p in (η(e^↖), η(e^↙)].
        VertexCase::PassAscending => j
            .intersect(&Interval::new(nw, sw))
            .shift_down(nw)
            .intersect(&Interval::full(ne)),
        // Ages from the end: η(e1) - p1 = η(e2) - p2 within the birth mass.
        VertexCase::Birth => {
            let xi = ne.min(se);
            j.intersect(&Interval::new(se.sub(xi), se))
                .shift_down(se.sub(xi))
                .shift_up(ne.sub(xi))
                .intersect(&Interval::new(ne.sub(xi), ne))
        }
    }
}

/// Inverse transfer; `j` must be contained in the forward image.
fn backward<W: Weight>(field: &FlowField<W>, v: Site, case: VertexCase, j: Interval<W>) -> Interval<W> {
    let sw = field.in_sw(v);
    let nw = field.in_nw(v);
    let ne = field.out_ne(v);
    let se = field.out_se(v);
    match case {
        VertexCase::Collision => j,
        VertexCase::PassDescending => j.shift_down(sw),
        VertexCase::PassAscending => j.shift_up(nw),
        VertexCase::Birth => {
            let xi = ne.min(se);
            j.shift_down(ne.sub(xi)).shift_up(se.sub(xi))
        }
    }
}

/// A broken line: a trace together with the per-edge atom intervals, all
/// of the same width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrokenLine<W> {
    pub trace: BrokenTrace,
    pub intervals: Vec<Interval<W>>,
}

impl<W: Weight> BrokenLine<W> {
    pub fn weight(&self) -> W {
        self.intervals[0].width()
    }
}

/// Computes the maximal broken line with the given trace, or `None` when
/// no atom survives the whole trace (weight zero).
pub fn propagate_interval<W: Weight>(
    field: &FlowField<W>,
    trace: &BrokenTrace,
) -> Result<Option<BrokenLine<W>>> {
    let domain = field.domain();
    trace.check_in_closure(domain)?;
    let vertices = trace.vertices();
    let edges: Vec<EdgeRef> = trace.edges().collect();

    // Forward pass: feasible-from-the-left interval on each edge.
    let mut feasible: Vec<Interval<W>> = Vec::with_capacity(edges.len());
    feasible.push(Interval::full(edges[0].flow(field)));
    for k in 1..edges.len() {
        let v = vertices[k];
        let case = classify_vertex(vertices[k - 1], v, vertices[k + 1]);
        let prev = feasible[k - 1];
        let next = forward(field, v, case, prev).intersect(&Interval::full(edges[k].flow(field)));
        feasible.push(next);
    }

    let last = *feasible.last().unwrap();
    if last.is_empty() {
        return Ok(None);
    }

    // Backward pass: pull the surviving interval through the inverse maps.
    let mut intervals = vec![Interval::new(W::ZERO, W::ZERO); edges.len()];
    intervals[edges.len() - 1] = last;
    for k in (1..edges.len()).rev() {
        let v = vertices[k];
        let case = classify_vertex(vertices[k - 1], v, vertices[k + 1]);
        let pulled = backward(field, v, case, intervals[k]);
        debug_assert!(
            pulled.intersect(&feasible[k - 1]).width().approx_eq(pulled.width()),
            "backward image escapes the forward-feasible set"
        );
        intervals[k - 1] = pulled;
    }

    Ok(Some(BrokenLine {
        trace: trace.clone(),
        intervals,
    }))
}

/// Maximal weight carried by a trace: the width of its maximal line.
pub fn trace_weight<W: Weight>(field: &FlowField<W>, trace: &BrokenTrace) -> Result<W> {
    Ok(propagate_interval(field, trace)?
        .map(|line| line.weight())
        .unwrap_or(W::ZERO))
}

/// Follows a single atom through the association rules, returning the
/// pointwise chain if the atom survives every vertex. Used to check
/// maximality: every surviving chain must lie inside the maximal line.
pub fn chase_atom<W: Weight>(
    field: &FlowField<W>,
    trace: &BrokenTrace,
    p_start: W,
) -> Option<Vec<W>> {
    let vertices = trace.vertices();
    let edges: Vec<EdgeRef> = trace.edges().collect();
    let mut p = p_start;
    if !Interval::full(edges[0].flow(field)).contains(p) {
        return None;
    }
    let mut chain = vec![p];
    for k in 1..edges.len() {
        let v = vertices[k];
        let case = classify_vertex(vertices[k - 1], v, vertices[k + 1]);
        let sw = field.in_sw(v);
        let nw = field.in_nw(v);
        let ne = field.out_ne(v);
        let se = field.out_se(v);
        let next = match case {
            VertexCase::Collision => {
                if p <= nw.min(sw) {
                    Some(p)
                } else {
                    None
                }
            }
            VertexCase::PassDescending => {
                let q = p.add(sw);
                if q > sw && q <= nw {
                    Some(q)
                } else {
                    None
                }
            }
            VertexCase::PassAscending => {
                if p > nw && p <= sw {
                    Some(p.sub(nw))
                } else {
                    None
                }
            }
            VertexCase::Birth => {
                let xi = ne.min(se);
                if p > se.sub(xi) && p <= se {
                    Some(p.sub(se.sub(xi)).add(ne.sub(xi)))
                } else {
                    None
                }
            }
        }?;
        if !Interval::full(edges[k].flow(field)).contains(next) {
            return None;
        }
        chain.push(next);
        p = next;
    }
    Some(chain)
}

/// Convenience: the field induced by a trace with unit weight.
pub fn indicator_field<W: Weight>(domain: RectDomain, trace: &BrokenTrace, w: W) -> Result<FlowField<W>> {
    trace.check_in_closure(domain)?;
    let mut field = FlowField::zero(domain);
    for e in trace.edges() {
        match e {
            EdgeRef::Up { i, j } => field.add_up(i, j, w),
            EdgeRef::Right { i, j } => field.add_right(i, j, w),
        }
    }
    Ok(field)
}
