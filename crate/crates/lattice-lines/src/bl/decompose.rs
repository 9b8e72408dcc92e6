//! Brick-diagram decomposition of a flow field into ordered crossing
//! lines, and its inverse.
//!
//! Conservation makes the flow a discrete gradient: there is a potential p
//! on the (N+1)×(M+1) grid corners, normalized to p = 0 at the
//! bottom-left corner, whose increments across an edge equal the flow on
//! it. Sorting the distinct potential values into levels q_0 < … < q_L
//! slices the diagram into L strips; strip k has width w_k = q_k - q_{k-1}
//! and passes through exactly the sites whose corner interval contains
//! level k, which traces out the k-th crossing line. Every maximal-line
//! weight is the total width of the strips whose line contains the trace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::domain::{RectDomain, Site};
use super::flow::FlowField;
use super::trace::BrokenTrace;
use super::weight::Weight;

/// Corner potential of a conservative field, indexed `a*(M+1)+b` for
/// corner (a, b), a ∈ 0..=N, b ∈ 0..=M. Corner (a, b) sits right of
/// column a and above row b; the flow identities are
///   up(i, j)    = p(i, j)   - p(i-1, j)
///   right(i, j) = p(i, j)   - p(i, j-1).
pub fn corner_potential<W: Weight>(field: &FlowField<W>) -> Vec<W> {
    let (n, m) = (field.domain().n() as usize, field.domain().m() as usize);
    let mut p = vec![W::ZERO; (n + 1) * (m + 1)];
    let idx = |a: usize, b: usize| a * (m + 1) + b;
    for a in 1..=n {
        p[idx(a, 0)] = p[idx(a - 1, 0)].add(field.up(a as i32, 0));
    }
    for a in 0..=n {
        for b in 1..=m {
            p[idx(a, b)] = p[idx(a, b - 1)].add(field.right(a as i32, b as i32));
        }
    }
    p
}

/// Totally ordered crossing traces with positive weights, together with
/// the brick data they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition<W> {
    domain: RectDomain,
    traces: Vec<BrokenTrace>,
    weights: Vec<W>,
}

impl<W: Weight> Decomposition<W> {
    /// Assembles a decomposition from parts, validating strict order and
    /// the crossing property.
    pub fn from_parts(
        domain: RectDomain,
        traces: Vec<BrokenTrace>,
        weights: Vec<W>,
    ) -> Result<Self> {
        if traces.len() != weights.len() {
            return Err(Error::schema(format!(
                "{} traces vs {} weights",
                traces.len(),
                weights.len()
            )));
        }
        for (k, w) in weights.iter().enumerate() {
            if !w.is_nonnegative() || *w <= W::ZERO {
                return Err(Error::parameter(format!("weight {k} is not positive")));
            }
        }
        for (k, t) in traces.iter().enumerate() {
            t.check_in_closure(domain)?;
            if !t.is_crossing(domain) {
                return Err(Error::domain(format!("trace {k} does not cross the domain")));
            }
        }
        for k in 1..traces.len() {
            if !traces[k].strictly_right_of(&traces[k - 1]) {
                return Err(Error::Order {
                    first: k - 1,
                    second: k,
                });
            }
        }
        Ok(Decomposition {
            domain,
            traces,
            weights,
        })
    }

    pub fn domain(&self) -> RectDomain {
        self.domain
    }

    pub fn traces(&self) -> &[BrokenTrace] {
        &self.traces
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// The sorted level set q_0 < … < q_L (cumulative weights).
    pub fn levels(&self) -> Vec<W> {
        let mut out = vec![W::ZERO];
        let mut acc = W::ZERO;
        for &w in &self.weights {
            acc = acc.add(w);
            out.push(acc);
        }
        out
    }

    pub fn total_weight(&self) -> W {
        self.weights.iter().fold(W::ZERO, |a, &b| a.add(b))
    }

    /// Σ_j w_j · 1[ℓ ⊆ ℓ_j]: the weight a sub-trace inherits.
    pub fn subtrace_weight(&self, trace: &BrokenTrace) -> W {
        self.traces
            .iter()
            .zip(&self.weights)
            .filter(|(t, _)| trace.is_subtrace_of(t))
            .fold(W::ZERO, |acc, (_, &w)| acc.add(w))
    }
}

/// Cluster the sorted potential values into levels, merging values closer
/// than the mode tolerance. Returns (levels, cluster index per corner).
fn cluster_levels<W: Weight>(p: &[W]) -> (Vec<W>, Vec<u32>) {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).expect("finite weights"));
    let mut levels: Vec<W> = Vec::new();
    let mut cluster = vec![0u32; p.len()];
    for &corner in &order {
        let v = p[corner];
        match levels.last() {
            Some(&last) if !last.distinct_level(v) => {
                cluster[corner] = (levels.len() - 1) as u32;
            }
            _ => {
                levels.push(v);
                cluster[corner] = (levels.len() - 1) as u32;
            }
        }
    }
    (levels, cluster)
}

/// Decomposes a conservative flow field into its ordered crossing lines.
pub fn decompose<W: Weight>(field: &FlowField<W>) -> Result<Decomposition<W>> {
    field.check_conservation()?;
    let domain = field.domain();
    let (n, m) = (domain.n() as i32, domain.m() as i32);
    let p = corner_potential(field);
    let (levels, cluster) = cluster_levels(&p);
    let level_of = |a: i32, b: i32| -> u32 {
        debug_assert!(a >= 0 && a <= n && b >= 0 && b <= m);
        cluster[a as usize * (m as usize + 1) + b as usize]
    };

    // Potential must be nondecreasing in both corner directions.
    for a in 0..=n {
        for b in 0..=m {
            if a > 0 && level_of(a - 1, b) > level_of(a, b)
                || b > 0 && level_of(a, b - 1) > level_of(a, b)
            {
                return Err(Error::integrity(format!(
                    "corner potential not monotone at corner ({a}, {b})"
                )));
            }
        }
    }

    let line_count = levels.len() - 1;
    let mut traces = Vec::with_capacity(line_count);
    let mut weights = Vec::with_capacity(line_count);

    // Entry edges tile (q_0, q_L]: bottom edges up(i, 0) carry
    // (level(i-1,0), level(i,0)], then right-column edges right(N, j)
    // carry (level(N,j-1), level(N,j)].
    let mut entries: Vec<(u32, u32, Site, Site)> = Vec::new();
    for i in 1..=n {
        entries.push((
            level_of(i - 1, 0),
            level_of(i, 0),
            Site::new(i, 0),
            Site::new(i, 1),
        ));
    }
    for j in 1..=m {
        entries.push((
            level_of(n, j - 1),
            level_of(n, j),
            Site::new(n + 1, j),
            Site::new(n, j),
        ));
    }

    for k in 1..=line_count as u32 {
        let &(_, _, start, second) = entries
            .iter()
            .find(|&&(lo, hi, _, _)| lo < k && k <= hi)
            .ok_or_else(|| Error::integrity(format!("no entry edge for strip {k}")))?;
        let mut vertices = vec![start, second];
        loop {
            let v = *vertices.last().unwrap();
            if v.i == 0 || v.j == m + 1 {
                break; // reached an exit border site
            }
            // Outgoing candidates at v: the up edge (v.i, v.j) spanning
            // corners (v.i-1, v.j)..(v.i, v.j) and the left edge
            // right(v.i-1, v.j) spanning (v.i-1, v.j-1)..(v.i-1, v.j).
            let split = level_of(v.i - 1, v.j);
            let next = if k <= split {
                Site::new(v.i - 1, v.j)
            } else {
                debug_assert!(k <= level_of(v.i, v.j), "strip {k} escapes at ({}, {})", v.i, v.j);
                Site::new(v.i, v.j + 1)
            };
            vertices.push(next);
        }
        traces.push(BrokenTrace::new(vertices)?);
        weights.push(levels[k as usize].sub(levels[k as usize - 1]));
    }

    Decomposition::from_parts(domain, traces, weights)
}

/// Sums w_j · (unit field of ℓ_j); the unique field whose decomposition is
/// the input.
pub fn recompose<W: Weight>(d: &Decomposition<W>) -> Result<FlowField<W>> {
    let mut field = FlowField::zero(d.domain());
    for (trace, &w) in d.traces().iter().zip(d.weights()) {
        for e in trace.edges() {
            match e {
                super::trace::EdgeRef::Up { i, j } => field.add_up(i, j, w),
                super::trace::EdgeRef::Right { i, j } => field.add_right(i, j, w),
            }
        }
    }
    field.check_conservation()?;
    Ok(field)
}

/// The three expressions for the crossing total: inflow-side boundary sum,
/// outflow-side boundary sum, and the total strip width of the brick
/// diagram. They must agree (exactly / within 1e-9).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CrossingTotal<W> {
    /// ζ⁺ over the bottom row plus η⁻ over the right column.
    pub left_sum: W,
    /// ζ⁻ over the left column plus η⁺ over the top row.
    pub right_sum: W,
    /// q_L - q_0 from the clustered corner potential.
    pub decomposition_total: W,
    pub h: W,
}

pub fn crossing_total<W: Weight>(field: &FlowField<W>) -> Result<CrossingTotal<W>> {
    field.check_conservation()?;
    let (n, m) = (field.domain().n() as i32, field.domain().m() as i32);
    let mut left = W::ZERO;
    for i in 1..=n {
        left = left.add(field.up(i, 0));
    }
    for j in 1..=m {
        left = left.add(field.right(n, j));
    }
    let mut right = W::ZERO;
    for j in 1..=m {
        right = right.add(field.right(0, j));
    }
    for i in 1..=n {
        right = right.add(field.up(i, m));
    }
    let p = corner_potential(field);
    let (levels, _) = cluster_levels(&p);
    let decomposition_total = levels.last().copied().unwrap_or(W::ZERO).sub(levels[0]);

    for (x, y) in [(left, right), (left, decomposition_total)] {
        if !x.approx_eq(y) || !y.approx_eq(x) {
            return Err(Error::integrity(format!(
                "crossing totals disagree: left {:?}, right {:?}, decomposition {:?}",
                left, right, decomposition_total
            )));
        }
    }
    Ok(CrossingTotal {
        left_sum: left,
        right_sum: right,
        decomposition_total,
        h: left,
    })
}
