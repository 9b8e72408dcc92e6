//! Intersection statistics: broken-line counts along fixed lattice lines.
//!
//! The count on an edge equals the flow through it, so line statistics
//! read directly off the field: northeast lines ({t-x = const}, a grid
//! column) collect the descending inflow per site; southeast lines
//! ({t+x = const}, a grid row) the ascending inflow; vertical lines the
//! pair (τ⁻, τ⁺) = (in_nw, in_sw); horizontal lines ({x = const}, a grid
//! diagonal) the pair (τ⁻, τ⁺) = (in_nw, out_ne).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{GeometricLaw, SeededStream};

use super::domain::Site;
use super::flow::FlowField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineKind {
    /// {t - x = const}: fixed grid column i; index is i.
    NorthEast,
    /// {t + x = const}: fixed grid row j; index is j.
    SouthEast,
    /// {t = const}: an anti-diagonal; index is t.
    Vertical,
    /// {x = const}: a grid diagonal; index is x.
    Horizontal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum LineStats {
    /// Per-site single counts (NE and SE lines).
    Singles(Vec<u64>),
    /// Per-site (τ⁻, τ⁺) pairs (vertical and horizontal lines).
    Pairs(Vec<(u64, u64)>),
}

impl LineStats {
    pub fn len(&self) -> usize {
        match self {
            LineStats::Singles(v) => v.len(),
            LineStats::Pairs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total count: sums pairs as τ⁻ + τ⁺.
    pub fn total(&self) -> u64 {
        match self {
            LineStats::Singles(v) => v.iter().sum(),
            LineStats::Pairs(v) => v.iter().map(|&(a, b)| a + b).sum(),
        }
    }
}

pub fn intersection_stats(
    field: &FlowField<u64>,
    kind: LineKind,
    index: i64,
) -> Result<LineStats> {
    let domain = field.domain();
    let (n, m) = (domain.n() as i64, domain.m() as i64);
    match kind {
        LineKind::NorthEast => {
            let i = index;
            if i < 1 || i > n {
                return Err(Error::domain(format!("column {i} outside 1..={n}")));
            }
            Ok(LineStats::Singles(
                (1..=m)
                    .map(|j| field.in_nw(Site::new(i as i32, j as i32)))
                    .collect(),
            ))
        }
        LineKind::SouthEast => {
            let j = index;
            if j < 1 || j > m {
                return Err(Error::domain(format!("row {j} outside 1..={m}")));
            }
            Ok(LineStats::Singles(
                (1..=n)
                    .map(|i| field.in_sw(Site::new(i as i32, j as i32)))
                    .collect(),
            ))
        }
        LineKind::Vertical => {
            let sites = super::chain::column_sites(domain, index);
            if sites.is_empty() {
                return Err(Error::domain(format!("no sites on the line t = {index}")));
            }
            Ok(LineStats::Pairs(
                sites
                    .into_iter()
                    .map(|s| (field.in_nw(s), field.in_sw(s)))
                    .collect(),
            ))
        }
        LineKind::Horizontal => {
            let mut pairs = Vec::new();
            for i in 1..=n {
                let j = i + index;
                if j >= 1 && j <= m {
                    let s = Site::new(i as i32, j as i32);
                    pairs.push((field.in_nw(s), field.out_ne(s)));
                }
            }
            if pairs.is_empty() {
                return Err(Error::domain(format!("no sites on the line x = {index}")));
            }
            Ok(LineStats::Pairs(pairs))
        }
    }
}

/// Exact bivariate mass of the horizontal-line pair:
/// P(τ⁻ = m, τ⁺ = n) = (1-λ)(1-λ²) λ^{2(m+n)} (λ^{-m} + λ^{-n} - 1 - λ).
pub fn horizontal_pair_mass(lambda: f64, tminus: u64, tplus: u64) -> f64 {
    let m = tminus as i32;
    let n = tplus as i32;
    (1.0 - lambda)
        * (1.0 - lambda * lambda)
        * lambda.powi(2 * (m + n))
        * (lambda.powi(-m) + lambda.powi(-n) - 1.0 - lambda)
}

/// Streams the stationary field row by row (O(width) memory) and collects
/// the (τ⁻, τ⁺) pairs on the main diagonal, i.e. `count` consecutive
/// sites of the horizontal line x = 0.
pub fn sample_horizontal_pairs(
    count: usize,
    lambda: f64,
    stream: &mut SeededStream,
) -> Result<Vec<(u64, u64)>> {
    let boundary_law = GeometricLaw::new(lambda)?;
    let birth_law = GeometricLaw::new(lambda * lambda)?;
    let width = count + 1;
    // up[i] carries the ascending flow from row j-1 into (i+1, j).
    let mut up: Vec<u64> = (0..width).map(|_| boundary_law.sample(stream)).collect();
    let mut pairs = Vec::with_capacity(count);
    for j in 1..=count {
        let mut left = boundary_law.sample(stream); // ζ⁻ entering (1, j)
        for (i, up_i) in up.iter_mut().enumerate() {
            let zeta_plus = *up_i;
            let zeta_minus = left;
            let xi = birth_law.sample(stream);
            let eta_plus = xi + zeta_plus.saturating_sub(zeta_minus);
            let eta_minus = xi + zeta_minus.saturating_sub(zeta_plus);
            if i + 1 == j {
                // Site (j, j) on the main diagonal: τ⁻ = in_nw, τ⁺ = out_ne.
                pairs.push((zeta_minus, eta_plus));
            }
            *up_i = eta_plus;
            left = eta_minus;
        }
    }
    Ok(pairs)
}
