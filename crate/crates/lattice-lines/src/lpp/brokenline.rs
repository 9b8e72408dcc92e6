//! Broken-line solver: the value is the crossing total of the flow field
//! generated by the births, and an optimal path is assembled backward from
//! the exit corner by one local comparison per step — go down-left when
//! η(e^↙) ≥ η(e^↖), down-right otherwise. The rule forbids the path to
//! cross any broken line, which is exactly optimality.

use serde::{Deserialize, Serialize};

use crate::bl::{
    crossing_total, decompose, flow_from_boundary, BoundaryFlows, FlowField, Site, Weight,
};
use crate::error::{Error, Result};

use super::instance::{LppInstance, LppSolution, Method};

/// Extracts the local-rule path on a flow field built from births alone.
fn extract_path<W: Weight>(field: &FlowField<W>) -> Vec<Site> {
    let domain = field.domain();
    let (n, m) = (domain.n() as i32, domain.m() as i32);
    let mut path = Vec::with_capacity((n + m - 1) as usize);
    let (mut i, mut j) = (n, m);
    path.push(Site::new(i, j));
    while i > 1 || j > 1 {
        let s = Site::new(i, j);
        let go_down = if j == 1 {
            false // forced left along the bottom row
        } else if i == 1 {
            true // forced down the first column
        } else {
            field.in_sw(s) >= field.in_nw(s)
        };
        if go_down {
            j -= 1;
        } else {
            i -= 1;
        }
        path.push(Site::new(i, j));
    }
    path.reverse();
    path
}

/// Solves the instance through the flow field: value = crossing total,
/// path by the local rule. The identity needs a pure birth field, so a
/// boundary on the instance is a parameter error. After extraction the
/// path is validated: its birth sum must equal the value and it must meet
/// the left-corner set of every positive-weight crossing line exactly
/// once; a failure is an integrity error, never a legitimate outcome.
pub fn solve_brokenline<W: Weight>(instance: &LppInstance<W>) -> Result<LppSolution<W>> {
    if instance.boundary.is_some() {
        return Err(Error::parameter(
            "the value identity requires zero boundary flow; drop the boundary first".to_string(),
        ));
    }
    let domain = instance.domain();
    let field = flow_from_boundary(&instance.births, &BoundaryFlows::zero(domain))?;
    let total = crossing_total(&field)?;
    let path = extract_path(&field);
    let solution = LppSolution {
        value: total.h,
        path,
        method: Method::BrokenLine,
    };
    solution.check_path_shape(domain)?;

    let path_sum = solution.path_sum(&instance.births);
    if !path_sum.approx_eq(solution.value) || !solution.value.approx_eq(path_sum) {
        return Err(Error::integrity(format!(
            "path sum {:?} does not match crossing total {:?}",
            path_sum, solution.value
        )));
    }

    // Left-corner coverage: the path meets L(ℓ) of every decomposed line
    // exactly once.
    let decomposition = decompose(&field)?;
    let on_path: std::collections::HashSet<Site> = solution.path.iter().copied().collect();
    for (k, trace) in decomposition.traces().iter().enumerate() {
        let hits = trace
            .left_corners()
            .iter()
            .filter(|s| on_path.contains(s))
            .count();
        if hits != 1 {
            return Err(Error::integrity(format!(
                "path meets the left corners of line {k} {hits} times"
            )));
        }
    }
    Ok(solution)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryComparison<W> {
    pub h_with_boundary: W,
    pub h_without: W,
    pub gap: W,
}

/// Crossing totals with and without the instance's boundary inflow.
/// Adding boundary mass can only increase the total; a decrease is an
/// integrity error.
pub fn boundary_comparison<W: Weight>(instance: &LppInstance<W>) -> Result<BoundaryComparison<W>> {
    let domain = instance.domain();
    let boundary = instance
        .boundary
        .clone()
        .ok_or_else(|| Error::parameter("instance carries no boundary flows".to_string()))?;
    let with_field = flow_from_boundary(&instance.births, &boundary)?;
    let h_with = crossing_total(&with_field)?.h;
    let without_field = flow_from_boundary(&instance.births, &BoundaryFlows::zero(domain))?;
    let h_without = crossing_total(&without_field)?.h;
    if h_without.to_f64() > h_with.to_f64() + crate::bl::REAL_TOLERANCE {
        return Err(Error::integrity(format!(
            "monotonicity violated: H without boundary {:?} exceeds H with boundary {:?}",
            h_without, h_with
        )));
    }
    Ok(BoundaryComparison {
        h_with_boundary: h_with,
        h_without,
        gap: h_with.pos_diff(h_without),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bl::{absorb_boundary, BirthField, RectDomain};
    use crate::lpp::dp::solve_dp;
    use crate::lpp::instance::LppInstance;
    use crate::rng::SeededStream;

    #[test]
    fn zero_field_solves_to_zero() {
        let domain = RectDomain::new(3, 4).unwrap();
        let instance = LppInstance::new(BirthField::<u64>::zero(domain));
        let sol = solve_brokenline(&instance).unwrap();
        assert_eq!(sol.value, 0);
        sol.check_path_shape(domain).unwrap();
    }

    #[test]
    fn two_by_two_matches_dp() {
        let domain = RectDomain::new(2, 2).unwrap();
        let mut births = BirthField::zero(domain);
        births.set(1, 1, 1u64);
        births.set(2, 1, 3);
        births.set(1, 2, 2);
        births.set(2, 2, 4);
        let instance = LppInstance::new(births);
        let bl = solve_brokenline(&instance).unwrap();
        let dp = solve_dp(&instance).unwrap();
        assert_eq!(bl.value, 8);
        assert_eq!(bl.value, dp.value);
        assert_eq!(bl.path_sum(&instance.births), 8);
    }

    #[test]
    fn oracle_equivalence_exponential() {
        let domain = RectDomain::new(8, 8).unwrap();
        for trial in 0..200u64 {
            let mut stream = SeededStream::new(0x6e0, trial);
            let instance = LppInstance::sample_exponential(domain, 1.0, &mut stream).unwrap();
            let bl = solve_brokenline(&instance).unwrap();
            let dp = solve_dp(&instance).unwrap();
            assert!(
                (bl.value - dp.value).abs() <= 1e-9,
                "trial {trial}: {} vs {}",
                bl.value,
                dp.value
            );
            assert!((bl.path_sum(&instance.births) - bl.value).abs() <= 1e-9);
        }
    }

    #[test]
    fn oracle_equivalence_geometric_with_ties() {
        // Integer weights exercise the ≥ tie rule deliberately.
        for trial in 0..200u64 {
            let mut stream = SeededStream::new(0x6e1, trial);
            let n = 1 + stream.below(9) as u32;
            let m = 1 + stream.below(9) as u32;
            let domain = RectDomain::new(n, m).unwrap();
            let instance = LppInstance::sample_geometric(domain, 0.5, &mut stream).unwrap();
            let bl = solve_brokenline(&instance).unwrap();
            let dp = solve_dp(&instance).unwrap();
            assert_eq!(bl.value, dp.value, "trial {trial}");
        }
    }

    #[test]
    fn boundary_comparison_zero_boundary_gap() {
        let domain = RectDomain::new(4, 4).unwrap();
        let mut stream = SeededStream::new(0x6e2, 0);
        let mut instance = LppInstance::sample_geometric(domain, 0.5, &mut stream).unwrap();
        instance.boundary = Some(BoundaryFlows::zero(domain));
        let cmp = boundary_comparison(&instance).unwrap();
        assert_eq!(cmp.gap, 0);
        assert_eq!(cmp.h_with_boundary, cmp.h_without);
    }

    #[test]
    fn boundary_monotone_every_trial() {
        let domain = RectDomain::new(12, 12).unwrap();
        for trial in 0..100u64 {
            let mut stream = SeededStream::new(0x6e3, trial);
            let (boundary, births) =
                crate::bl::sample_reversible_exponential(domain, 0.5, 0.5, &mut stream).unwrap();
            let instance = LppInstance::with_boundary(births, boundary).unwrap();
            let cmp = boundary_comparison(&instance).unwrap();
            assert!(cmp.h_without <= cmp.h_with_boundary + 1e-9);
        }
    }

    #[test]
    fn enlarged_domain_equals_boundary_total() {
        // H(ζ°, ξ) matches both H(ξ') and the DP value on the enlarged
        // domain, tying the boundary construction back to the oracle.
        let domain = RectDomain::new(6, 5).unwrap();
        for trial in 0..50u64 {
            let mut stream = SeededStream::new(0x6e4, trial);
            let (boundary, births) =
                crate::bl::sample_reversible_geometric(domain, 0.5, 0.5, &mut stream).unwrap();
            let with_field = flow_from_boundary(&births, &boundary).unwrap();
            let h_with = crossing_total(&with_field).unwrap().h;
            let enlarged = absorb_boundary(&births, &boundary).unwrap();
            let instance = LppInstance::new(enlarged);
            let bl = solve_brokenline(&instance).unwrap();
            let dp = solve_dp(&instance).unwrap();
            assert_eq!(bl.value, h_with, "trial {trial}");
            assert_eq!(dp.value, h_with, "trial {trial}");
        }
    }

    #[test]
    fn boundary_gap_per_site_shrinks_with_n() {
        // With the optimal split the boundary contribution vanishes per
        // unit width: mean gap/N strictly decreases over N in {25,50,100}.
        let (alpha, beta) = (1.0, 1.0);
        let (ap, am) = crate::bl::optimal_split_exponential(alpha, beta).unwrap();
        let mut means = Vec::new();
        for (ni, n) in [25u32, 50, 100].into_iter().enumerate() {
            let domain = RectDomain::new(n, n).unwrap();
            let trials = 100u64;
            let mut total = 0.0;
            for t in 0..trials {
                let mut stream = SeededStream::new(0x6e6, (ni as u64) << 32 | t);
                let (boundary, births) =
                    crate::bl::sample_reversible_exponential(domain, ap, am, &mut stream)
                        .unwrap();
                let instance = LppInstance::with_boundary(births, boundary).unwrap();
                let cmp = boundary_comparison(&instance).unwrap();
                total += cmp.gap / n as f64;
            }
            means.push(total / trials as f64);
        }
        assert!(
            means[0] > means[1] && means[1] > means[2],
            "gap/N means not decreasing: {means:?}"
        );
    }

    #[test]
    fn single_coordinate_bump_never_decreases_h() {
        let domain = RectDomain::new(6, 6).unwrap();
        for trial in 0..100u64 {
            let mut stream = SeededStream::new(0x6e5, trial);
            let (boundary, births) =
                crate::bl::sample_reversible_geometric(domain, 0.4, 0.6, &mut stream).unwrap();
            let base = crossing_total(&flow_from_boundary(&births, &boundary).unwrap())
                .unwrap()
                .h;
            // Bump one random coordinate of (ζ°, ξ) by one unit.
            let mut births2 = births.clone();
            let mut boundary2 = boundary.clone();
            match stream.below(3) {
                0 => {
                    let i = 1 + stream.below(6) as i32;
                    let j = 1 + stream.below(6) as i32;
                    births2.set(i, j, births.get(i, j) + 1);
                }
                1 => {
                    let i = stream.below(6) as usize;
                    boundary2.zeta_plus[i] += 1;
                }
                _ => {
                    let j = stream.below(6) as usize;
                    boundary2.zeta_minus[j] += 1;
                }
            }
            let bumped = crossing_total(&flow_from_boundary(&births2, &boundary2).unwrap())
                .unwrap()
                .h;
            assert!(bumped >= base, "trial {trial}: {bumped} < {base}");
        }
    }
}
