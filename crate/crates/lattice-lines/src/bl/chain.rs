//! The discrete geometric chain: column-by-column evolution driven by the
//! two-site kernel
//!
//!   q(n⁺, n⁻ | m⁺, m⁻) = Z⁻¹ λ^{n⁺+n⁻} 1[n⁺ - n⁻ = m⁺ - m⁻],
//!   Z = λ^{|m⁺-m⁻|} / (1 - λ²),
//!
//! equivalently: n⁺ ∧ n⁻ ~ Geom(λ²) independent of the inputs, and the
//! difference is carried over. Columns are the constant-t anti-diagonals
//! of the grid chart.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{GeometricLaw, SeededStream};

use super::domain::{RectDomain, Site};
use super::flow::{BirthField, BoundaryFlows, FlowField};

/// Outgoing flows (η⁺, η⁻) for every site of one anti-diagonal column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainColumn {
    pub t: i64,
    /// Sites (i, j) with i+j-2 = t, listed by increasing i, with their
    /// outgoing (eta_plus, eta_minus).
    pub sites: Vec<(Site, u64, u64)>,
}

/// Sites of the column at time t, by increasing i.
pub fn column_sites(domain: RectDomain, t: i64) -> Vec<Site> {
    let (n, m) = (domain.n() as i64, domain.m() as i64);
    let mut out = Vec::new();
    for i in 1..=n {
        let j = t + 2 - i;
        if j >= 1 && j <= m {
            out.push(Site::new(i as i32, j as i32));
        }
    }
    out
}

/// One sample from the kernel: the min coordinate is a fresh Geom(λ²)
/// draw, the difference m⁺ - m⁻ passes through.
pub fn kernel_sample(
    m_plus: u64,
    m_minus: u64,
    law_lambda_sq: &GeometricLaw,
    stream: &mut SeededStream,
) -> (u64, u64) {
    let k = law_lambda_sq.sample(stream);
    (
        k + m_plus.saturating_sub(m_minus),
        k + m_minus.saturating_sub(m_plus),
    )
}

/// Kernel mass q(n⁺, n⁻ | m⁺, m⁻) from the closed-form normalization;
/// used as the enumeration oracle for the chain-vs-product identity.
pub fn kernel_pmf(n_plus: u64, n_minus: u64, m_plus: u64, m_minus: u64, lambda: f64) -> f64 {
    let d_in = m_plus as i64 - m_minus as i64;
    let d_out = n_plus as i64 - n_minus as i64;
    if d_in != d_out {
        return 0.0;
    }
    let z = lambda.powi(d_in.unsigned_abs() as i32) / (1.0 - lambda * lambda);
    lambda.powi((n_plus + n_minus) as i32) / z
}

/// Advances the chain one column: every site of column t+1 pulls its
/// inputs (the southwest neighbour's η⁺ or the boundary ζ⁺ on the first
/// row; the northwest neighbour's η⁻ or the boundary ζ⁻ on the first
/// column) and draws its outputs from the kernel.
pub fn geometric_chain_step(
    domain: RectDomain,
    prev: Option<&ChainColumn>,
    boundary: &BoundaryFlows<u64>,
    lambda: f64,
    stream: &mut SeededStream,
) -> Result<ChainColumn> {
    let law = GeometricLaw::new(lambda * lambda)
        .map_err(|_| Error::parameter(format!("lambda must lie in (0,1), got {lambda}")))?;
    boundary.validate(domain)?;
    let t = prev.map_or(0, |c| c.t + 1);
    let lookup = |s: Site| -> Option<(u64, u64)> {
        prev.and_then(|c| {
            c.sites
                .iter()
                .find(|(p, _, _)| *p == s)
                .map(|&(_, ep, em)| (ep, em))
        })
    };
    let mut sites = Vec::new();
    for s in column_sites(domain, t) {
        let zeta_plus = if s.j == 1 {
            boundary.zeta_plus[s.i as usize - 1]
        } else {
            lookup(Site::new(s.i, s.j - 1))
                .ok_or_else(|| Error::integrity("missing southwest neighbour".to_string()))?
                .0
        };
        let zeta_minus = if s.i == 1 {
            boundary.zeta_minus[s.j as usize - 1]
        } else {
            lookup(Site::new(s.i - 1, s.j))
                .ok_or_else(|| Error::integrity("missing northwest neighbour".to_string()))?
                .1
        };
        let (eta_plus, eta_minus) = kernel_sample(zeta_plus, zeta_minus, &law, stream);
        sites.push((s, eta_plus, eta_minus));
    }
    Ok(ChainColumn { t, sites })
}

/// Runs the kernel chain over the whole domain with i.i.d. Geom(λ)
/// boundary inputs, assembling the flow field and the recovered births
/// ξ = η⁺ ∧ η⁻.
pub fn run_geometric_chain(
    domain: RectDomain,
    lambda: f64,
    stream: &mut SeededStream,
) -> Result<(FlowField<u64>, BirthField<u64>)> {
    let boundary_law = GeometricLaw::new(lambda)?;
    let boundary = BoundaryFlows {
        zeta_plus: (0..domain.n()).map(|_| boundary_law.sample(stream)).collect(),
        zeta_minus: (0..domain.m()).map(|_| boundary_law.sample(stream)).collect(),
    };
    let mut field = FlowField::zero(domain);
    let (n, m) = (domain.n() as i32, domain.m() as i32);
    for i in 1..=n {
        field.set_up(i, 0, boundary.zeta_plus[i as usize - 1]);
    }
    for j in 1..=m {
        field.set_right(0, j, boundary.zeta_minus[j as usize - 1]);
    }
    let mut births = BirthField::zero(domain);
    let mut column: Option<ChainColumn> = None;
    let t_max = (n + m - 2) as i64;
    for _t in 0..=t_max {
        let next = geometric_chain_step(domain, column.as_ref(), &boundary, lambda, stream)?;
        for &(s, eta_plus, eta_minus) in &next.sites {
            field.set_up(s.i, s.j, eta_plus);
            field.set_right(s.i, s.j, eta_minus);
            births.set(s.i, s.j, eta_plus.min(eta_minus));
        }
        column = Some(next);
    }
    field.check_conservation()?;
    Ok((field, births))
}
