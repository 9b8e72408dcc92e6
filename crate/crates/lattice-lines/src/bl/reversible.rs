//! Reversible boundary triples.
//!
//! A boundary/birth triple (π₁, π₂, π₃) is reversible when feeding ζ⁺ ~ π₁
//! into the bottom row, ζ⁻ ~ π₂ into the left column and births ~ π₃
//! everywhere makes the exiting flows look like fresh boundary inputs:
//! η⁺ on the top row is i.i.d. π₁ and η⁻ on the right column i.i.d. π₂.
//! Exactly two families are implemented — geometric with π₃ = Geom(λ₊λ₋)
//! and exponential with π₃ = Exp(α₊+α₋) — matching the two laws for which
//! the kernel-preservation identity holds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{ExponentialLaw, GeometricLaw, SeededStream};

use super::domain::RectDomain;
use super::flow::{BirthField, BoundaryFlows};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryFamily {
    Geometric { lambda_plus: f64, lambda_minus: f64 },
    Exponential { alpha_plus: f64, alpha_minus: f64 },
}

impl BoundaryFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BoundaryFamily::Geometric {
                lambda_plus,
                lambda_minus,
            } => {
                GeometricLaw::new(lambda_plus)?;
                GeometricLaw::new(lambda_minus)?;
                Ok(())
            }
            BoundaryFamily::Exponential {
                alpha_plus,
                alpha_minus,
            } => {
                ExponentialLaw::new(alpha_plus)?;
                ExponentialLaw::new(alpha_minus)?;
                Ok(())
            }
        }
    }
}

/// Samples the geometric reversible triple: ζ⁺ ~ Geom(λ₊), ζ⁻ ~ Geom(λ₋),
/// ξ ~ Geom(λ₊λ₋).
pub fn sample_reversible_geometric(
    domain: RectDomain,
    lambda_plus: f64,
    lambda_minus: f64,
    stream: &mut SeededStream,
) -> Result<(BoundaryFlows<u64>, BirthField<u64>)> {
    let plus = GeometricLaw::new(lambda_plus)?;
    let minus = GeometricLaw::new(lambda_minus)?;
    let birth = GeometricLaw::new(lambda_plus * lambda_minus)?;
    let boundary = BoundaryFlows {
        zeta_plus: (0..domain.n()).map(|_| plus.sample(stream)).collect(),
        zeta_minus: (0..domain.m()).map(|_| minus.sample(stream)).collect(),
    };
    let mut births = BirthField::zero(domain);
    for s in domain.sites() {
        births.set(s.i, s.j, birth.sample(stream));
    }
    Ok((boundary, births))
}

/// Samples the exponential reversible triple: ζ⁺ ~ Exp(α₊), ζ⁻ ~ Exp(α₋),
/// ξ ~ Exp(α₊+α₋).
pub fn sample_reversible_exponential(
    domain: RectDomain,
    alpha_plus: f64,
    alpha_minus: f64,
    stream: &mut SeededStream,
) -> Result<(BoundaryFlows<f64>, BirthField<f64>)> {
    let plus = ExponentialLaw::new(alpha_plus)?;
    let minus = ExponentialLaw::new(alpha_minus)?;
    let birth = ExponentialLaw::new(alpha_plus + alpha_minus)?;
    let boundary = BoundaryFlows {
        zeta_plus: (0..domain.n()).map(|_| plus.sample(stream)).collect(),
        zeta_minus: (0..domain.m()).map(|_| minus.sample(stream)).collect(),
    };
    let mut births = BirthField::zero(domain);
    for s in domain.sites() {
        births.set(s.i, s.j, birth.sample(stream));
    }
    Ok((boundary, births))
}

/// The split α± = α/(1 + β^{±1/2}) minimizing 1/α₊ + β/α₋ subject to
/// α₊ + α₋ = α; at this split the bound equals (1+√β)²/α.
pub fn optimal_split_exponential(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if alpha.is_nan() || alpha <= 0.0 || beta.is_nan() || beta <= 0.0 {
        return Err(Error::parameter(
            "alpha and beta must be positive".to_string(),
        ));
    }
    let plus = alpha / (1.0 + beta.sqrt());
    let minus = alpha / (1.0 + 1.0 / beta.sqrt());
    Ok((plus, minus))
}

/// The split λ₊ = (λ + √(βλ))/(1 + √(βλ)), λ₋ = λ/λ₊ with λ₊λ₋ = λ; at
/// this split the boundary bound equals (1+√(βλ))²/(1-λ) - 1.
pub fn optimal_split_geometric(lambda: f64, beta: f64) -> Result<(f64, f64)> {
    if lambda.is_nan() || lambda <= 0.0 || lambda >= 1.0 || beta.is_nan() || beta <= 0.0 {
        return Err(Error::parameter(
            "need lambda in (0,1) and beta > 0".to_string(),
        ));
    }
    let root = (beta * lambda).sqrt();
    let plus = (lambda + root) / (1.0 + root);
    let minus = lambda / plus;
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bl::flow::flow_from_boundary;

    #[test]
    fn optimal_splits_satisfy_their_identities() {
        let (ap, am) = optimal_split_exponential(1.0, 1.0).unwrap();
        assert!((ap - 0.5).abs() < 1e-12);
        assert!((am - 0.5).abs() < 1e-12);
        assert!((ap + am - 1.0).abs() < 1e-12);
        let (ap, am) = optimal_split_exponential(2.0, 4.0).unwrap();
        assert!((ap + am - 2.0).abs() < 1e-12);
        let bound = 1.0 / ap + 4.0 / am;
        let limit = (1.0 + 2.0f64).powi(2) / 2.0;
        assert!((bound - limit).abs() < 1e-9, "{bound} vs {limit}");

        let (lp, lm) = optimal_split_geometric(0.25, 1.0).unwrap();
        assert!((lp * lm - 0.25).abs() < 1e-12);
        let bound = lp / (1.0 - lp) + lm / (1.0 - lm);
        let limit = (1.0 + 0.5f64).powi(2) / 0.75 - 1.0;
        assert!((bound - limit).abs() < 1e-9, "{bound} vs {limit}");
    }

    #[test]
    fn degenerate_domain_gives_three_independent_draws() {
        let domain = RectDomain::new(1, 1).unwrap();
        let mut s = SeededStream::new(0xE10, 0);
        let (boundary, births) = sample_reversible_exponential(domain, 0.7, 1.3, &mut s).unwrap();
        assert_eq!(boundary.zeta_plus.len(), 1);
        assert_eq!(boundary.zeta_minus.len(), 1);
        assert_eq!(births.values().len(), 1);
        let values = [boundary.zeta_plus[0], boundary.zeta_minus[0], births.get(1, 1)];
        assert!(values.iter().all(|v| *v > 0.0));
        assert!(values[0] != values[1] && values[1] != values[2]);
    }

    #[test]
    fn exponential_exit_flows_have_the_entry_law() {
        // α₊ = α₋ = 1/2, births Exp(1): top-row exits are Exp(1/2), i.e.
        // mean 2, variance 4.
        let domain = RectDomain::new(30, 30).unwrap();
        let mut values = Vec::new();
        let mut trial = 0u64;
        while values.len() < 10_000 {
            let mut s = SeededStream::new(0xE11, trial);
            trial += 1;
            let (boundary, births) =
                sample_reversible_exponential(domain, 0.5, 0.5, &mut s).unwrap();
            let field = flow_from_boundary(&births, &boundary).unwrap();
            for i in 1..=30 {
                values.push(field.up(i, 30));
            }
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let se_mean = 2.0 / n.sqrt();
        assert!((mean - 2.0).abs() < 3.0 * se_mean, "mean {mean}");
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // SE of the sample variance of Exp(1/2): sqrt((μ4 - σ⁴)/n), with
        // μ4 = 9σ⁴ = 144.
        let se_var = (128.0f64 / n).sqrt();
        assert!((var - 4.0).abs() < 3.0 * se_var, "var {var}");
    }

    #[test]
    fn geometric_exit_flows_have_the_entry_means() {
        let domain = RectDomain::new(24, 24).unwrap();
        let (lp, lm) = (0.5f64, 0.4f64);
        let mut top = Vec::new();
        let mut right = Vec::new();
        for trial in 0..400u64 {
            let mut s = SeededStream::new(0xE12, trial);
            let (boundary, births) =
                sample_reversible_geometric(domain, lp, lm, &mut s).unwrap();
            let field = flow_from_boundary(&births, &boundary).unwrap();
            for i in 1..=24 {
                top.push(field.up(i, 24));
            }
            for j in 1..=24 {
                right.push(field.right(24, j));
            }
        }
        let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len() as f64;
        let expect_top = lp / (1.0 - lp);
        let expect_right = lm / (1.0 - lm);
        let se_top = (lp / (1.0 - lp).powi(2) / top.len() as f64).sqrt();
        let se_right = (lm / (1.0 - lm).powi(2) / right.len() as f64).sqrt();
        assert!((mean(&top) - expect_top).abs() < 3.0 * se_top);
        assert!((mean(&right) - expect_right).abs() < 3.0 * se_right);
    }
}
