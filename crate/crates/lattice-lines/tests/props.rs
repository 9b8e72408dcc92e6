//! Cross-module property tests and enumeration oracles.

use std::collections::HashMap;

use proptest::prelude::*;

use lattice_lines::arw::{ArwParams, ArwState, ParticleState, SampledStacks, StepOutcome};
use lattice_lines::bl::{
    self, crossing_total, decompose, flow_from_boundary, kernel_pmf, recompose, BirthField,
    BoundaryFlows, RectDomain,
};
use lattice_lines::rng::SeededStream;

fn arb_field(
    max_side: u32,
    max_w: u64,
) -> impl Strategy<Value = (RectDomain, Vec<u64>, Vec<u64>, Vec<u64>)> {
    (1..=max_side, 1..=max_side).prop_flat_map(move |(n, m)| {
        let domain = RectDomain::new(n, m).unwrap();
        (
            Just(domain),
            prop::collection::vec(0..=max_w, (n * m) as usize),
            prop::collection::vec(0..=max_w, n as usize),
            prop::collection::vec(0..=max_w, m as usize),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// decompose ∘ recompose is the identity and the crossing totals
    /// agree, for arbitrary integer fields with boundary inflow.
    #[test]
    fn decompose_recompose_identity((domain, xi, zp, zm) in arb_field(5, 4)) {
        let births = BirthField::from_values(domain, xi).unwrap();
        let boundary = BoundaryFlows { zeta_plus: zp, zeta_minus: zm };
        let field = flow_from_boundary(&births, &boundary).unwrap();
        let dec = decompose(&field).unwrap();
        let back = recompose(&dec).unwrap();
        prop_assert_eq!(&back, &field);
        let ct = crossing_total(&field).unwrap();
        let strip_sum: u64 = dec.weights().iter().sum();
        prop_assert_eq!(ct.left_sum, ct.right_sum);
        prop_assert_eq!(ct.left_sum, strip_sum);
        // Consecutive traces are strictly ordered.
        for pair in dec.traces().windows(2) {
            prop_assert!(pair[1].strictly_right_of(&pair[0]));
        }
    }

    /// The maximal weight of every decomposed trace matches interval
    /// propagation, and sub-traces can only gain weight.
    #[test]
    fn trace_weights_monotone_under_restriction((domain, xi, zp, zm) in arb_field(4, 3)) {
        let births = BirthField::from_values(domain, xi).unwrap();
        let boundary = BoundaryFlows { zeta_plus: zp, zeta_minus: zm };
        let field = flow_from_boundary(&births, &boundary).unwrap();
        let dec = decompose(&field).unwrap();
        for (trace, &w) in dec.traces().iter().zip(dec.weights()) {
            prop_assert_eq!(bl::trace_weight(&field, trace).unwrap(), w);
            // Dropping the last edge yields a super-set of atoms.
            if trace.vertices().len() > 2 {
                let shorter = bl::BrokenTrace::new(
                    trace.vertices()[..trace.vertices().len() - 1].to_vec(),
                ).unwrap();
                let w_short = bl::trace_weight(&field, &shorter).unwrap();
                prop_assert!(w_short >= w);
            }
        }
    }

    /// Stabilization conserves particles and never decreases counters,
    /// and the passive count changes by at most one per elementary step.
    #[test]
    fn stabilization_conservation(seed in 0u64..500, m in 1usize..8) {
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let mut stream = SeededStream::new(seed, 99);
        let particles: Vec<(i64, ParticleState)> = (0..m)
            .map(|_| ((stream.below(9) as i64) - 4, ParticleState::Active))
            .collect();
        let mut state = ArwState::from_particles(&particles, 4);
        let stacks = SampledStacks::new(params, stream.derive(&[1]));
        let total = state.particle_count();
        let mut woken = Vec::new();
        let mut steps = 0u64;
        let mut last_passive = 0usize;
        while !state.all_passive() && steps < 100_000 {
            let n = (0..total).find(|&n| state.is_active(n)).unwrap();
            let before_j: u64 = state.j_map().values().sum();
            let outcome = state.step_collect(&stacks, n, &mut woken).unwrap();
            let after_j: u64 = state.j_map().values().sum();
            prop_assert_eq!(state.particle_count(), total);
            prop_assert_eq!(after_j, before_j + u64::from(outcome.burned_instruction()));
            let passive = total - state.active_count();
            // A sleep adds one passive; a jump can only wake.
            match outcome {
                StepOutcome::Slept => prop_assert_eq!(passive, last_passive + 1),
                _ => prop_assert!(passive <= last_passive + 1),
            }
            last_passive = passive;
            steps += 1;
        }
        prop_assert!(state.all_passive());
        // R <= j at every site.
        for (x, r) in state.r_map() {
            prop_assert!(*r <= state.j_map()[x]);
        }
    }
}

/// Exact enumeration on the 2x2 domain, truncated at k <= 6: the law of
/// the flow field under the column-kernel chain (normalization from the
/// closed form) equals the law under the product construction
/// (ζ ~ Geom(λ) boundary, ξ ~ Geom(λ²) births), up to truncation mass.
#[test]
fn kernel_chain_equals_product_construction_on_2x2() {
    let lambda = 0.25f64;
    let cap = 6u64;
    let domain = RectDomain::new(2, 2).unwrap();

    let geo = |lam: f64, k: u64| (1.0 - lam) * lam.powi(k as i32);

    // Encode a configuration by (ζ⁺₁, ζ⁺₂, ζ⁻₁, ζ⁻₂, ξ₁₁, ξ₂₁, ξ₁₂, ξ₂₂);
    // the map (ζ°, ξ) -> η is a bijection, so equality of these laws is
    // equality of the field laws.
    let encode = |vals: &[u64; 8]| -> u64 {
        vals.iter().fold(0u64, |acc, &v| (acc << 6) | v)
    };

    // Product route: independent geometric masses.
    let mut product: HashMap<u64, f64> = HashMap::new();
    let mut stack = vec![(Vec::<u64>::new(), 1.0f64)];
    while let Some((prefix, weight)) = stack.pop() {
        if prefix.len() == 8 {
            let vals: [u64; 8] = prefix.clone().try_into().unwrap();
            *product.entry(encode(&vals)).or_insert(0.0) += weight;
            continue;
        }
        let is_birth = prefix.len() >= 4;
        let lam = if is_birth { lambda * lambda } else { lambda };
        for v in 0..=cap {
            let mut next = prefix.clone();
            next.push(v);
            stack.push((next, weight * geo(lam, v)));
        }
    }

    // Kernel route: same boundary law, then site-by-site kernel draws in
    // dependency order (1,1), (2,1), (1,2), (2,2) with the closed-form
    // normalization. The recovered births are n⁺ ∧ n⁻.
    let mut kernel: HashMap<u64, f64> = HashMap::new();
    let mut boundary_configs = Vec::new();
    for z_p1 in 0..=cap {
        for z_p2 in 0..=cap {
            for z_m1 in 0..=cap {
                for z_m2 in 0..=cap {
                    let w = geo(lambda, z_p1) * geo(lambda, z_p2) * geo(lambda, z_m1)
                        * geo(lambda, z_m2);
                    boundary_configs.push(([z_p1, z_p2, z_m1, z_m2], w));
                }
            }
        }
    }
    for (bound, w0) in boundary_configs {
        let [zp1, zp2, zm1, zm2] = bound;
        // Site (1,1): inputs (ζ⁺₁, ζ⁻₁); draws (η⁺, η⁻) with min = k11.
        for k11 in 0..=cap {
            let n11p = k11 + zp1.saturating_sub(zm1);
            let n11m = k11 + zm1.saturating_sub(zp1);
            let w1 = w0 * kernel_pmf(n11p, n11m, zp1, zm1, lambda);
            if w1 == 0.0 {
                continue;
            }
            // Site (2,1): inputs (ζ⁺₂, η⁻ of (1,1)).
            for k21 in 0..=cap {
                let m_plus = zp2;
                let m_minus = n11m;
                let n21p = k21 + m_plus.saturating_sub(m_minus);
                let n21m = k21 + m_minus.saturating_sub(m_plus);
                let w2 = w1 * kernel_pmf(n21p, n21m, m_plus, m_minus, lambda);
                if w2 == 0.0 {
                    continue;
                }
                // Site (1,2): inputs (η⁺ of (1,1), ζ⁻₂).
                for k12 in 0..=cap {
                    let m_plus = n11p;
                    let m_minus = zm2;
                    let n12p = k12 + m_plus.saturating_sub(m_minus);
                    let n12m = k12 + m_minus.saturating_sub(m_plus);
                    let w3 = w2 * kernel_pmf(n12p, n12m, m_plus, m_minus, lambda);
                    if w3 == 0.0 {
                        continue;
                    }
                    // Site (2,2): inputs (η⁺ of (2,1), η⁻ of (1,2)).
                    for k22 in 0..=cap {
                        let m_plus = n21p;
                        let m_minus = n12m;
                        let w4 = w3
                            * kernel_pmf(
                                k22 + m_plus.saturating_sub(m_minus),
                                k22 + m_minus.saturating_sub(m_plus),
                                m_plus,
                                m_minus,
                                lambda,
                            );
                        if w4 == 0.0 {
                            continue;
                        }
                        let vals = [zp1, zp2, zm1, zm2, k11, k21, k12, k22];
                        *kernel.entry(encode(&vals)).or_insert(0.0) += w4;
                    }
                }
            }
        }
    }

    // Sanity: the recovered min at each site is exactly ξ in the flow
    // construction, so matching keys really compare the same objects.
    {
        let births = BirthField::from_values(domain, vec![3u64, 1, 0, 2]).unwrap();
        let boundary = BoundaryFlows {
            zeta_plus: vec![2, 0],
            zeta_minus: vec![1, 4],
        };
        let field = flow_from_boundary(&births, &boundary).unwrap();
        assert_eq!(field.recovered_births(), births);
    }

    let mut tv = 0.0f64;
    let mut keys: std::collections::HashSet<u64> = product.keys().copied().collect();
    keys.extend(kernel.keys());
    for key in keys {
        let p = product.get(&key).copied().unwrap_or(0.0);
        let q = kernel.get(&key).copied().unwrap_or(0.0);
        tv += (p - q).abs();
    }
    tv /= 2.0;
    // Both routes also miss some tail mass; include it the way total
    // variation between the full laws would see it at worst.
    let p_mass: f64 = product.values().sum();
    let q_mass: f64 = kernel.values().sum();
    let tv_bound = tv + (1.0 - p_mass).max(1.0 - q_mass);
    assert!(
        tv_bound < 1e-3,
        "TV {tv:.3e} + truncation {:.3e} exceeds 1e-3",
        (1.0 - p_mass).max(1.0 - q_mass)
    );
}

/// Randomized point-chases: any pointwise-associated atom chain lies
/// inside the maximal line's intervals.
#[test]
fn atom_chains_lie_in_maximal_lines() {
    for trial in 0..60u64 {
        let mut stream = SeededStream::new(0xC0DE, trial);
        let n = 1 + stream.below(4) as u32;
        let m = 1 + stream.below(4) as u32;
        let domain = RectDomain::new(n, m).unwrap();
        let (boundary, births) =
            bl::sample_reversible_geometric(domain, 0.5, 0.5, &mut stream).unwrap();
        let field = flow_from_boundary(&births, &boundary).unwrap();
        let dec = decompose(&field).unwrap();
        for trace in dec.traces() {
            let line = bl::propagate_interval(&field, trace).unwrap().unwrap();
            let first_edge = trace.edges().next().unwrap();
            let hi = first_edge.flow(&field);
            for p in 1..=hi {
                if let Some(chain) = bl::chase_atom(&field, trace, p) {
                    for (value, interval) in chain.iter().zip(&line.intervals) {
                        assert!(
                            interval.contains(*value),
                            "trial {trial}: atom {value} escapes {interval:?}"
                        );
                    }
                }
            }
        }
    }
}
