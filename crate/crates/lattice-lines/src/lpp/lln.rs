//! Law-of-large-numbers experiments: Monte Carlo means of G(N, ⌊βN⌋)/N
//! against the analytic limits
//!   exponential(α):  (1+√β)²/α,
//!   geometric(λ):   (1+√(βλ))²/(1-λ) - 1,
//! plus empirical tail frequencies as a qualitative concentration check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bl::{crossing_total, flow_from_boundary, BoundaryFlows, RectDomain};
use crate::error::{Error, Result};
use crate::rng::SeededStream;

use super::instance::LppInstance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LlnFamily {
    Exponential { alpha: f64 },
    Geometric { lambda: f64 },
}

impl LlnFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LlnFamily::Exponential { alpha } if alpha > 0.0 => Ok(()),
            LlnFamily::Geometric { lambda } if lambda > 0.0 && lambda < 1.0 => Ok(()),
            _ => Err(Error::parameter(format!("invalid family parameters {self:?}"))),
        }
    }
}

pub fn analytic_limit(family: LlnFamily, beta: f64) -> f64 {
    match family {
        LlnFamily::Exponential { alpha } => (1.0 + beta.sqrt()).powi(2) / alpha,
        LlnFamily::Geometric { lambda } => {
            (1.0 + (beta * lambda).sqrt()).powi(2) / (1.0 - lambda) - 1.0
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LlnRow {
    pub n: u32,
    pub m: u32,
    pub trials: u64,
    pub mean_g_over_n: f64,
    pub se: f64,
    pub sd: f64,
    pub limit: f64,
    /// Fraction of trials with |G/N - limit| > delta, when delta is given.
    pub tail_delta: Option<f64>,
    pub tail_frequency: Option<f64>,
}

/// One G sample via the broken-line crossing total.
fn sample_g(family: LlnFamily, domain: RectDomain, stream: &mut SeededStream) -> Result<f64> {
    let h = match family {
        LlnFamily::Exponential { alpha } => {
            let instance = LppInstance::sample_exponential(domain, alpha, stream)?;
            let field = flow_from_boundary(&instance.births, &BoundaryFlows::zero(domain))?;
            crossing_total(&field)?.h
        }
        LlnFamily::Geometric { lambda } => {
            let instance = LppInstance::sample_geometric(domain, lambda, stream)?;
            let field = flow_from_boundary(&instance.births, &BoundaryFlows::zero(domain))?;
            crossing_total(&field)?.h as f64
        }
    };
    Ok(h)
}

pub fn lln_experiment(
    family: LlnFamily,
    beta: f64,
    n_list: &[u32],
    trials: u64,
    delta: Option<f64>,
    stream: &SeededStream,
) -> Result<Vec<LlnRow>> {
    family.validate()?;
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::parameter("beta must be positive".to_string()));
    }
    if trials == 0 {
        return Err(Error::parameter("trials must be >= 1".to_string()));
    }
    let limit = analytic_limit(family, beta);
    let mut rows = Vec::with_capacity(n_list.len());
    for (row_idx, &n) in n_list.iter().enumerate() {
        let m = ((beta * n as f64).floor() as u32).max(1);
        let domain = RectDomain::new(n, m)?;
        let values: Result<Vec<f64>> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut s = stream.derive(&[0x11a, row_idx as u64, trial]);
                sample_g(family, domain, &mut s).map(|g| g / n as f64)
            })
            .collect();
        let values = values?;
        let count = values.len() as f64;
        let mean = values.iter().sum::<f64>() / count;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1.0)
        } else {
            0.0
        };
        let sd = var.sqrt();
        let tail_frequency = delta.map(|d| {
            values.iter().filter(|v| (*v - limit).abs() > d).count() as f64 / count
        });
        rows.push(LlnRow {
            n,
            m,
            trials,
            mean_g_over_n: mean,
            se: sd / count.sqrt(),
            sd,
            limit,
            tail_delta: delta,
            tail_frequency,
        });
    }
    Ok(rows)
}
