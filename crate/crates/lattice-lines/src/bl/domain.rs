//! Rectangular domains on the tilted lattice and their grid chart.
//!
//! Sites live on the even sublattice {(t,x) : t+x even}. A rectangular
//! N×M domain is charted by (i, j) ∈ {1..N}×{1..M} with
//! (t, x) = (i+j-2, j-i): moving northeast in (t, x) is j+1, northwest is
//! i-1, southeast is i+1, southwest is j-1. The closure adds the sites at
//! lattice distance √2, i.e. the formal grid border i ∈ {0, N+1} or
//! j ∈ {0, M+1} minus the four corners.
//!
//! Boundary classes (each covers one side of the border, disjointly):
//! entry-bottom (j = 0) where the ascending flow ζ⁺ enters, entry-left
//! (i = 0) where the descending flow ζ⁻ enters, exit-top (j = M+1) where
//! η⁺ leaves, and exit-right (i = N+1) where η⁻ leaves. Broken traces
//! cross from {entry-bottom ∪ exit-right} to {entry-left ∪ exit-top} as
//! x increases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectDomain {
    n: u32,
    m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i: i32,
    pub j: i32,
}

impl Site {
    pub fn new(i: i32, j: i32) -> Self {
        Site { i, j }
    }

    pub fn t(&self) -> i64 {
        self.i as i64 + self.j as i64 - 2
    }

    pub fn x(&self) -> i64 {
        self.j as i64 - self.i as i64
    }

    pub fn from_tx(t: i64, x: i64) -> Option<Site> {
        if (t + x) % 2 != 0 {
            return None;
        }
        let i = (t - x) / 2 + 1;
        let j = (t + x) / 2 + 1;
        if i32::try_from(i).is_err() || i32::try_from(j).is_err() {
            return None;
        }
        Some(Site::new(i as i32, j as i32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteClass {
    Interior,
    EntryBottom,
    EntryLeft,
    ExitTop,
    ExitRight,
    Outside,
}

impl RectDomain {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n < 1 || m < 1 {
            return Err(Error::parameter(format!(
                "domain must be at least 1x1, got {n}x{m}"
            )));
        }
        Ok(RectDomain { n, m })
    }

    /// Width N (number of grid columns).
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Height M (number of grid rows).
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn site_count(&self) -> usize {
        self.n as usize * self.m as usize
    }

    pub fn contains(&self, s: Site) -> bool {
        s.i >= 1 && s.i <= self.n as i32 && s.j >= 1 && s.j <= self.m as i32
    }

    pub fn classify(&self, s: Site) -> SiteClass {
        let (n, m) = (self.n as i32, self.m as i32);
        match (s.i, s.j) {
            (i, j) if i >= 1 && i <= n && j >= 1 && j <= m => SiteClass::Interior,
            (i, 0) if i >= 1 && i <= n => SiteClass::EntryBottom,
            (0, j) if j >= 1 && j <= m => SiteClass::EntryLeft,
            (i, j) if j == m + 1 && i >= 1 && i <= n => SiteClass::ExitTop,
            (i, j) if i == n + 1 && j >= 1 && j <= m => SiteClass::ExitRight,
            _ => SiteClass::Outside,
        }
    }

    /// Member of the closure: domain or one of the four border classes.
    pub fn in_closure(&self, s: Site) -> bool {
        !matches!(self.classify(s), SiteClass::Outside)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        let (n, m) = (self.n as i32, self.m as i32);
        (1..=n).flat_map(move |i| (1..=m).map(move |j| Site::new(i, j)))
    }

    /// Sites of the closure (domain plus border, corners excluded).
    pub fn closure_sites(&self) -> impl Iterator<Item = Site> + '_ {
        let (n, m) = (self.n as i32, self.m as i32);
        (0..=n + 1)
            .flat_map(move |i| (0..=m + 1).map(move |j| Site::new(i, j)))
            .filter(|&s| self.in_closure(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_round_trip_and_parity() {
        let d = RectDomain::new(4, 3).unwrap();
        for s in d.sites() {
            assert_eq!((s.t() + s.x()) % 2, 0);
            assert_eq!(Site::from_tx(s.t(), s.x()), Some(s));
        }
        // Chart anchors: (1,1) -> (0,0), (N,M) -> (N+M-2, M-N).
        assert_eq!(Site::new(1, 1).t(), 0);
        assert_eq!(Site::new(1, 1).x(), 0);
        assert_eq!(Site::new(4, 3).t(), 5);
        assert_eq!(Site::new(4, 3).x(), -1);
    }

    #[test]
    fn boundary_classes_are_disjoint_and_cover_border() {
        let d = RectDomain::new(3, 2).unwrap();
        let mut counts = std::collections::HashMap::new();
        for s in d.closure_sites() {
            *counts.entry(format!("{:?}", d.classify(s))).or_insert(0) += 1;
        }
        assert_eq!(counts["Interior"], 6);
        assert_eq!(counts["EntryBottom"], 3);
        assert_eq!(counts["EntryLeft"], 2);
        assert_eq!(counts["ExitTop"], 3);
        assert_eq!(counts["ExitRight"], 2);
        // Corners are not part of the closure.
        for corner in [
            Site::new(0, 0),
            Site::new(0, 3),
            Site::new(4, 0),
            Site::new(4, 3),
        ] {
            assert_eq!(d.classify(corner), SiteClass::Outside);
        }
    }
}
