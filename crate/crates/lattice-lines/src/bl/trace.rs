//! Broken traces: the interval-free skeletons of broken lines.
//!
//! A trace is a vertex path with x increasing by 1 per step and t moving
//! by ±1, i.e. grid steps northeast (j+1) or northwest (i-1). A trace
//! crosses the domain when both endpoints lie on the border of the
//! closure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::domain::{RectDomain, Site, SiteClass};
use super::flow::FlowField;
use super::weight::Weight;

/// Reference to a flow slot, resolving a trace step to its edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeRef {
    /// Northeast edge (i,j)→(i,j+1).
    Up { i: i32, j: i32 },
    /// Southeast edge (i,j)→(i+1,j); traversed downward by a trace.
    Right { i: i32, j: i32 },
}

impl EdgeRef {
    pub fn flow<W: Weight>(&self, field: &FlowField<W>) -> W {
        match *self {
            EdgeRef::Up { i, j } => field.up(i, j),
            EdgeRef::Right { i, j } => field.right(i, j),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrokenTrace {
    vertices: Vec<Site>,
}

impl BrokenTrace {
    /// Builds a trace from vertices, checking the step shape (x strictly
    /// increasing via NE/NW moves) but not domain membership.
    pub fn new(vertices: Vec<Site>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::domain("a trace needs at least one edge".to_string()));
        }
        for w in vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let ne = b.i == a.i && b.j == a.j + 1;
            let nw = b.i == a.i - 1 && b.j == a.j;
            if !ne && !nw {
                return Err(Error::domain(format!(
                    "invalid trace step ({},{}) -> ({},{})",
                    a.i, a.j, b.i, b.j
                )));
            }
        }
        Ok(BrokenTrace { vertices })
    }

    /// Single-edge trace through the given edge.
    pub fn of_edge(edge: EdgeRef) -> Self {
        let vertices = match edge {
            EdgeRef::Up { i, j } => vec![Site::new(i, j), Site::new(i, j + 1)],
            EdgeRef::Right { i, j } => vec![Site::new(i + 1, j), Site::new(i, j)],
        };
        BrokenTrace { vertices }
    }

    /// The wedge through a site: southeast neighbour, site, northeast
    /// neighbour. Its maximal weight equals the site's birth mass.
    pub fn wedge(s: Site) -> Self {
        BrokenTrace {
            vertices: vec![Site::new(s.i + 1, s.j), s, Site::new(s.i, s.j + 1)],
        }
    }

    pub fn vertices(&self) -> &[Site] {
        &self.vertices
    }

    pub fn len_edges(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.vertices.windows(2).map(|w| {
            let (a, b) = (w[0], w[1]);
            if b.j == a.j + 1 {
                EdgeRef::Up { i: a.i, j: a.j }
            } else {
                EdgeRef::Right { i: b.i, j: b.j }
            }
        })
    }

    /// Checks that every edge lies in the closure's edge set: interior
    /// vertices inside the domain, endpoints inside or on the border.
    pub fn check_in_closure(&self, domain: RectDomain) -> Result<()> {
        let k = self.vertices.len();
        for (idx, &v) in self.vertices.iter().enumerate() {
            let class = domain.classify(v);
            let ok = if idx == 0 {
                matches!(
                    class,
                    SiteClass::Interior | SiteClass::EntryBottom | SiteClass::ExitRight
                )
            } else if idx == k - 1 {
                matches!(
                    class,
                    SiteClass::Interior | SiteClass::EntryLeft | SiteClass::ExitTop
                )
            } else {
                class == SiteClass::Interior
            };
            if !ok {
                return Err(Error::domain(format!(
                    "trace vertex ({}, {}) leaves the domain closure",
                    v.i, v.j
                )));
            }
        }
        Ok(())
    }

    /// A crossing trace starts on the bottom/right border and ends on the
    /// left/top border.
    pub fn is_crossing(&self, domain: RectDomain) -> bool {
        self.check_in_closure(domain).is_ok()
            && matches!(
                domain.classify(self.vertices[0]),
                SiteClass::EntryBottom | SiteClass::ExitRight
            )
            && matches!(
                domain.classify(*self.vertices.last().unwrap()),
                SiteClass::EntryLeft | SiteClass::ExitTop
            )
    }

    pub fn x_range(&self) -> (i64, i64) {
        (self.vertices[0].x(), self.vertices.last().unwrap().x())
    }

    /// t(x) for x in the trace's domain.
    pub fn t_at(&self, x: i64) -> Option<i64> {
        let (lo, _) = self.x_range();
        let off = x - lo;
        if off < 0 || off >= self.vertices.len() as i64 {
            return None;
        }
        Some(self.vertices[off as usize].t())
    }

    /// Left corners: interior vertices entered from the southeast and left
    /// to the northeast, the birth slots of the trace.
    pub fn left_corners(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for w in self.vertices.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            if a.i == b.i + 1 && c.j == b.j + 1 {
                out.push(b);
            }
        }
        out
    }

    /// Contiguous sub-trace test: same t(x) on a sub-range of x.
    pub fn is_subtrace_of(&self, other: &BrokenTrace) -> bool {
        let (lo, hi) = self.x_range();
        let (olo, ohi) = other.x_range();
        if lo < olo || hi > ohi {
            return false;
        }
        (lo..=hi).all(|x| self.t_at(x) == other.t_at(x))
    }

    /// `self` ⪰ `other`: self is to the right of other, i.e. t(x) ≥ t'(x)
    /// on the common x-domain, and some pair of vertices witnesses
    /// t(x) ≥ t'(x') when the domains are disjoint.
    pub fn is_right_of(&self, other: &BrokenTrace) -> bool {
        let (lo, hi) = self.x_range();
        let (olo, ohi) = other.x_range();
        let common_lo = lo.max(olo);
        let common_hi = hi.min(ohi);
        if common_lo <= common_hi {
            (common_lo..=common_hi).all(|x| self.t_at(x).unwrap() >= other.t_at(x).unwrap())
        } else {
            self.vertices
                .iter()
                .any(|a| other.vertices.iter().any(|b| a.t() >= b.t()))
        }
    }

    pub fn strictly_right_of(&self, other: &BrokenTrace) -> bool {
        self.is_right_of(other) && self != other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_shape_and_left_corner() {
        let w = BrokenTrace::wedge(Site::new(2, 2));
        assert_eq!(w.vertices().len(), 3);
        assert_eq!(w.left_corners(), vec![Site::new(2, 2)]);
        let d = RectDomain::new(2, 2).unwrap();
        assert!(w.is_crossing(d));
    }

    #[test]
    fn step_validation() {
        assert!(BrokenTrace::new(vec![Site::new(1, 1), Site::new(2, 1)]).is_err());
        assert!(BrokenTrace::new(vec![Site::new(1, 1), Site::new(1, 2)]).is_ok());
        assert!(BrokenTrace::new(vec![Site::new(2, 1), Site::new(1, 1)]).is_ok());
    }

    #[test]
    fn closure_membership() {
        let d = RectDomain::new(2, 2).unwrap();
        // Vertical run up the left column, exits at the top.
        let t = BrokenTrace::new(vec![
            Site::new(1, 0),
            Site::new(1, 1),
            Site::new(1, 2),
            Site::new(1, 3),
        ])
        .unwrap();
        t.check_in_closure(d).unwrap();
        assert!(t.is_crossing(d));
        // Same path shifted out of the domain.
        let bad = BrokenTrace::new(vec![Site::new(3, 0), Site::new(3, 1)]).unwrap();
        assert!(bad.check_in_closure(d).is_err());
    }

    #[test]
    fn order_relation_on_crossing_traces() {
        // Two wedges through horizontally adjacent sites: the one through
        // the larger t is to the right.
        let a = BrokenTrace::wedge(Site::new(1, 1));
        let b = BrokenTrace::wedge(Site::new(1, 2));
        assert!(b.is_right_of(&a));
        assert!(!a.is_right_of(&b) || a == b);
        assert!(b.strictly_right_of(&a));
    }

    #[test]
    fn subtrace_relation() {
        let long = BrokenTrace::new(vec![
            Site::new(2, 0),
            Site::new(2, 1),
            Site::new(1, 1),
            Site::new(1, 2),
        ])
        .unwrap();
        let short = BrokenTrace::new(vec![Site::new(2, 1), Site::new(1, 1)]).unwrap();
        assert!(short.is_subtrace_of(&long));
        let other = BrokenTrace::new(vec![Site::new(2, 1), Site::new(2, 2)]).unwrap();
        assert!(!other.is_subtrace_of(&long));
    }
}
