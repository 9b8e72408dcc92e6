//! Stabilization under a label policy, the continuous-time driver, and the
//! order-invariance / monotonicity checkers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{ExponentialLaw, SeededStream};

use super::stack::{SleepInserted, Stacks};
use super::state::{ArwState, StepOutcome};

/// How the next particle to act is chosen. Every policy keeps scheduling
/// each particle as long as it stays active, which is the fairness
/// condition stabilization needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelPolicy {
    /// Uniformly random among currently active particles.
    UniformRandom,
    /// Cycle particle indices 0, 1, …, m-1, skipping passive ones.
    RoundRobin,
    /// Always the smallest active index.
    LowestIndexActive,
    /// An explicit label sequence; entries naming passive particles are
    /// null steps. The sequence must suffice to stabilize.
    Custom(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct Stabilized {
    pub state: ArwState,
    /// Elementary steps used, i.e. instructions burned; null steps do not
    /// count.
    pub steps: u64,
}

pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Runs the dynamics until every particle is passive.
///
/// Exceeding `step_cap` elementary steps is a reported outcome
/// ([`Error::NotStabilized`]), never a panic: finite systems stabilize
/// almost surely but admit no uniform bound.
pub fn stabilize(
    mut state: ArwState,
    stacks: &dyn Stacks,
    policy: &LabelPolicy,
    step_cap: u64,
    stream: &mut SeededStream,
) -> Result<Stabilized> {
    if step_cap == 0 {
        return Err(Error::parameter("step_cap must be positive".to_string()));
    }
    let mut steps = 0u64;
    macro_rules! burn {
        ($n:expr) => {{
            let outcome = state.step(stacks, $n)?;
            if outcome.burned_instruction() {
                steps += 1;
                if steps > step_cap {
                    return Err(Error::NotStabilized { cap: step_cap });
                }
            }
            outcome
        }};
    }

    match policy {
        LabelPolicy::UniformRandom => {
            // Invariant: `active` holds each active particle exactly once.
            let mut active: Vec<u32> = (0..state.particle_count() as u32)
                .filter(|&n| state.is_active(n as usize))
                .collect();
            let mut woken = Vec::new();
            while !active.is_empty() {
                let slot = stream.below(active.len() as u64) as usize;
                let n = active.swap_remove(slot) as usize;
                let outcome = state.step_collect(stacks, n, &mut woken)?;
                steps += 1;
                if steps > step_cap {
                    return Err(Error::NotStabilized { cap: step_cap });
                }
                match outcome {
                    StepOutcome::Slept => {}
                    StepOutcome::Jumped { .. } => {
                        active.push(n as u32);
                        active.extend_from_slice(&woken);
                    }
                    StepOutcome::FailedSleep => active.push(n as u32),
                    StepOutcome::Null => unreachable!("active particle stepped"),
                }
            }
        }
        LabelPolicy::RoundRobin => {
            let m = state.particle_count();
            while !state.all_passive() {
                for n in 0..m {
                    if state.is_active(n) {
                        burn!(n);
                    }
                }
            }
        }
        LabelPolicy::LowestIndexActive => {
            while !state.all_passive() {
                let n = (0..state.particle_count())
                    .find(|&n| state.is_active(n))
                    .expect("some particle is active");
                burn!(n);
            }
        }
        LabelPolicy::Custom(labels) => {
            for &n in labels {
                if state.all_passive() {
                    break;
                }
                burn!(n);
            }
            if !state.all_passive() {
                return Err(Error::parameter(
                    "custom label sequence exhausted before stabilization".to_string(),
                ));
            }
        }
    }

    Ok(Stabilized { state, steps })
}

/// Deterministic greedy stabilizer used by Monte Carlo drivers: keeps a
/// LIFO pool of active particles and needs no label stream. By
/// order-invariance it produces the same counters and occupation as any
/// fair policy.
pub fn stabilize_fast(mut state: ArwState, stacks: &dyn Stacks, step_cap: u64) -> Result<Stabilized> {
    let mut active: Vec<u32> = (0..state.particle_count() as u32)
        .filter(|&n| state.is_active(n as usize))
        .collect();
    let mut woken = Vec::new();
    let mut steps = 0u64;
    while let Some(n) = active.pop() {
        let outcome = state.step_collect(stacks, n as usize, &mut woken)?;
        steps += 1;
        if steps > step_cap {
            return Err(Error::NotStabilized { cap: step_cap });
        }
        match outcome {
            StepOutcome::Slept => {}
            StepOutcome::Jumped { .. } => {
                active.push(n);
                active.extend_from_slice(&woken);
            }
            StepOutcome::FailedSleep => active.push(n),
            StepOutcome::Null => unreachable!("active particle stepped"),
        }
    }
    Ok(Stabilized { state, steps })
}

/// One sampled point of a continuous-time trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TimedStep {
    pub time: f64,
    pub label: usize,
    pub outcome: StepOutcome,
    /// Odometer at the origin after this ring, i.e. R_0^t.
    pub r_origin: u64,
}

/// Continuous-time embedded chain: the whole system rings at rate
/// m·(1+λ) and a uniform label acts at each ring (rings of passive
/// particles are null events). Returns the rings up to `t_horizon`,
/// stopping early once every particle is passive — from then on all rings
/// are null and the trajectory is constant.
pub fn stabilize_timed(
    mut state: ArwState,
    stacks: &dyn Stacks,
    lambda: f64,
    stream: &mut SeededStream,
    t_horizon: f64,
) -> Result<(Vec<TimedStep>, ArwState)> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::parameter("lambda must be positive".to_string()));
    }
    let m = state.particle_count();
    let mut trajectory = Vec::new();
    if m == 0 {
        return Ok((trajectory, state));
    }
    let rate = ExponentialLaw::new(m as f64 * (1.0 + lambda))?;
    let mut t = 0.0;
    while !state.all_passive() {
        t += rate.sample(stream);
        if t > t_horizon {
            break;
        }
        let label = stream.below(m as u64) as usize;
        let outcome = state.step(stacks, label)?;
        trajectory.push(TimedStep {
            time: t,
            label,
            outcome,
            r_origin: state.r_at(0),
        });
    }
    Ok((trajectory, state))
}

/// Result of one stabilization, reduced to its order-invariant content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableProfile {
    pub j: HashMap<i64, u64>,
    pub r: HashMap<i64, u64>,
    pub occupation: HashMap<i64, u32>,
}

impl StableProfile {
    pub fn of(state: &ArwState) -> Self {
        StableProfile {
            j: state.j_map().clone(),
            r: state.r_map().clone(),
            occupation: state.occupation(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AbelianReport {
    pub profiles: Vec<StableProfile>,
    /// Index of the first policy disagreeing with policy 0, if any.
    pub first_mismatch: Option<usize>,
}

impl AbelianReport {
    pub fn all_equal(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Stabilizes the same (state, stacks) under each policy and compares the
/// per-site instruction counts, odometers and final occupation.
pub fn check_abelian(
    state: &ArwState,
    stacks: &dyn Stacks,
    policies: &[LabelPolicy],
    step_cap: u64,
    stream: &mut SeededStream,
) -> Result<AbelianReport> {
    let mut profiles = Vec::with_capacity(policies.len());
    for (i, policy) in policies.iter().enumerate() {
        let mut s = stream.derive(&[0xAB31, i as u64]);
        let done = stabilize(state.clone(), stacks, policy, step_cap, &mut s)?;
        profiles.push(StableProfile::of(&done.state));
    }
    let first_mismatch = profiles
        .iter()
        .position(|p| *p != profiles[0])
        .filter(|&i| i > 0);
    Ok(AbelianReport {
        profiles,
        first_mismatch,
    })
}

/// A single monotone perturbation of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perturbation {
    RemoveParticle(usize),
    PassifyParticle(usize),
    /// Insert one sleep instruction at `(site, index)` of the stacks,
    /// 1-based composite index.
    InsertSleep { site: i64, index: u64 },
}

#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub base: StableProfile,
    pub perturbed: StableProfile,
    /// Sites where the perturbed odometer exceeds the base odometer.
    pub violations: Vec<i64>,
}

impl MonotoneReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Stabilizes the configuration and its perturbed version, then compares
/// odometers pointwise: R'_x <= R_x must hold at every site. Burned sleep
/// instructions are not part of the comparison, so an inserted sleep never
/// counts against it.
pub fn check_monotone(
    state: &ArwState,
    stacks: &dyn Stacks,
    perturbation: &Perturbation,
    step_cap: u64,
    stream: &mut SeededStream,
) -> Result<MonotoneReport> {
    let policy = LabelPolicy::UniformRandom;
    let mut s_base = stream.derive(&[0x40B0, 0]);
    let base = stabilize(state.clone(), stacks, &policy, step_cap, &mut s_base)?;

    let mut s_pert = stream.derive(&[0x40B0, 1]);
    let perturbed = match perturbation {
        Perturbation::RemoveParticle(n) => {
            let mut st = state.clone();
            st.remove_particle(*n)?;
            stabilize(st, stacks, &policy, step_cap, &mut s_pert)?
        }
        Perturbation::PassifyParticle(n) => {
            let mut st = state.clone();
            st.passify_particle(*n)?;
            stabilize(st, stacks, &policy, step_cap, &mut s_pert)?
        }
        Perturbation::InsertSleep { site, index } => {
            let overlay = SleepInserted::new(stacks, *site, *index)?;
            stabilize(state.clone(), &overlay, &policy, step_cap, &mut s_pert)?
        }
    };

    let base_profile = StableProfile::of(&base.state);
    let pert_profile = StableProfile::of(&perturbed.state);
    let mut violations: Vec<i64> = pert_profile
        .r
        .iter()
        .filter(|(x, &r_pert)| r_pert > base_profile.r.get(x).copied().unwrap_or(0))
        .map(|(&x, _)| x)
        .collect();
    violations.sort_unstable();
    Ok(MonotoneReport {
        base: base_profile,
        perturbed: pert_profile,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arw::stack::{ArwParams, ExplicitStacks, Instruction::*, SampledStacks};
    use crate::arw::state::ParticleState;

    fn two_particle_instance() -> (ArwState, ExplicitStacks) {
        let state = ArwState::from_particles(
            &[(0, ParticleState::Active), (0, ParticleState::Active)],
            1,
        );
        let stacks = ExplicitStacks::from_pairs(&[
            (0, &[Sleep, JumpRight, Sleep][..]),
            (1, &[Sleep][..]),
        ]);
        (state, stacks)
    }

    #[test]
    fn empty_state_stabilizes_in_zero_steps() {
        let stacks = ExplicitStacks::from_pairs(&[]);
        let state = ArwState::from_particles(&[], 0);
        let mut s = SeededStream::new(0, 0);
        let done = stabilize(state, &stacks, &LabelPolicy::RoundRobin, 10, &mut s).unwrap();
        assert_eq!(done.steps, 0);
        assert!(done.state.all_passive());
    }

    /// Hand trace: either particle burns the first Sleep and fails (both
    /// present), one then jumps right and sleeps alone at 1, the other
    /// sleeps alone at 0. Totals: j_0 = 3, j_1 = 1, R_0 = 1, R_1 = 0.
    #[test]
    fn two_particle_hand_trace() {
        let (state, stacks) = two_particle_instance();
        let mut s = SeededStream::new(5, 0);
        for policy in [
            LabelPolicy::UniformRandom,
            LabelPolicy::RoundRobin,
            LabelPolicy::LowestIndexActive,
        ] {
            let done = stabilize(state.clone(), &stacks, &policy, 100, &mut s).unwrap();
            assert!(done.state.all_passive());
            assert_eq!(done.state.j_at(0), 3, "policy {policy:?}");
            assert_eq!(done.state.j_at(1), 1);
            assert_eq!(done.state.r_at(0), 1);
            assert_eq!(done.state.r_at(1), 0);
            assert_eq!(done.state.occupation()[&0], 1);
            assert_eq!(done.state.occupation()[&1], 1);
            assert_eq!(done.steps, 4);
        }
    }

    /// Exhaustive oracle: explore every schedule (all choices of active
    /// particle at every step) with memoization and collect all terminal
    /// profiles. Order-invariance says there is exactly one.
    fn explore_all_orders(state: &ArwState, stacks: &dyn Stacks) -> Vec<StableProfile> {
        use std::collections::HashSet;
        fn key(state: &ArwState) -> String {
            let mut parts: Vec<String> = (0..state.particle_count())
                .map(|n| format!("{}:{}", state.position(n), state.is_active(n)))
                .collect();
            let mut j: Vec<_> = state.j_map().iter().collect();
            j.sort();
            parts.push(format!("{j:?}"));
            parts.join(";")
        }
        fn go(
            state: ArwState,
            stacks: &dyn Stacks,
            seen: &mut HashSet<String>,
            out: &mut Vec<StableProfile>,
        ) {
            if state.all_passive() {
                let profile = StableProfile::of(&state);
                if !out.contains(&profile) {
                    out.push(profile);
                }
                return;
            }
            if !seen.insert(key(&state)) {
                return;
            }
            for n in 0..state.particle_count() {
                if state.is_active(n) {
                    let mut next = state.clone();
                    next.step(stacks, n).unwrap();
                    go(next, stacks, seen, out);
                }
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        go(state.clone(), stacks, &mut seen, &mut out);
        out
    }

    #[test]
    fn two_particle_brute_force_all_orders() {
        let (state, stacks) = two_particle_instance();
        let profiles = explore_all_orders(&state, &stacks);
        assert_eq!(profiles.len(), 1, "all schedules end in the same profile");
        assert_eq!(profiles[0].r[&0], 1);
        assert_eq!(profiles[0].j[&0], 3);
    }

    #[test]
    fn trivial_jump_then_sleep() {
        let stacks =
            ExplicitStacks::from_pairs(&[(0, &[JumpRight][..]), (1, &[Sleep][..])]);
        let state = ArwState::from_particles(&[(0, ParticleState::Active)], 1);
        let mut s = SeededStream::new(5, 1);
        let done = stabilize(state, &stacks, &LabelPolicy::RoundRobin, 10, &mut s).unwrap();
        assert_eq!(done.state.position(0), 1);
        assert_eq!(done.state.r_at(0), 1);
        assert_eq!(done.state.r_at(1), 0);
    }

    #[test]
    fn step_cap_is_reported() {
        // Two particles ping-ponging with no sleeps in reach would exceed
        // any cap; use jump-only stacks and a small cap.
        let stacks = ExplicitStacks::new(
            [
                (0i64, vec![JumpRight; 64]),
                (1, vec![JumpLeft; 64]),
            ]
            .into_iter()
            .collect(),
        );
        let state = ArwState::from_particles(
            &[(0, ParticleState::Active), (1, ParticleState::Active)],
            1,
        );
        let mut s = SeededStream::new(6, 0);
        let err = stabilize(state, &stacks, &LabelPolicy::RoundRobin, 16, &mut s).unwrap_err();
        assert!(matches!(err, Error::NotStabilized { cap: 16 }));
    }

    #[test]
    fn random_instances_brute_force_unique_profile() {
        // Exhaustive order-independence over small random instances.
        let params = ArwParams::new(1.0, 0.5).unwrap();
        for trial in 0..30u64 {
            let mut s = SeededStream::new(1000 + trial, 0);
            let m = 1 + (s.next_u64() % 3) as usize;
            let particles: Vec<_> = (0..m)
                .map(|_| ((s.next_u64() % 5) as i64 - 2, ParticleState::Active))
                .collect();
            let state = ArwState::from_particles(&particles, 2);
            let stacks = SampledStacks::new(params, s.substream(1));
            let profiles = explore_all_orders(&state, &stacks);
            assert_eq!(profiles.len(), 1, "trial {trial}");
        }
    }

    #[test]
    fn check_abelian_two_particle_many_orders() {
        let (state, stacks) = two_particle_instance();
        let policies = vec![LabelPolicy::UniformRandom; 20];
        let mut s = SeededStream::new(7, 0);
        let report = check_abelian(&state, &stacks, &policies, 1000, &mut s).unwrap();
        assert!(report.all_equal());
    }

    #[test]
    fn check_abelian_empty_state() {
        let stacks = ExplicitStacks::from_pairs(&[]);
        let state = ArwState::from_particles(&[], 0);
        let mut s = SeededStream::new(8, 0);
        let report = check_abelian(
            &state,
            &stacks,
            &[LabelPolicy::RoundRobin, LabelPolicy::LowestIndexActive],
            10,
            &mut s,
        )
        .unwrap();
        assert!(report.all_equal());
    }

    #[test]
    fn check_abelian_random_instance_fifty_orders() {
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let mut s = SeededStream::new(9, 0);
        let particles: Vec<_> = (0..6)
            .map(|_| ((s.below(11) as i64) - 5, ParticleState::Active))
            .collect();
        let state = ArwState::from_particles(&particles, 5);
        let stacks = SampledStacks::new(params, s.substream(2));
        let policies = vec![LabelPolicy::UniformRandom; 50];
        let report = check_abelian(&state, &stacks, &policies, 100_000, &mut s).unwrap();
        assert!(report.all_equal());
    }

    #[test]
    fn monotone_remove_only_particle() {
        let stacks = ExplicitStacks::from_pairs(&[(0, &[Sleep][..])]);
        let state = ArwState::from_particles(&[(0, ParticleState::Active)], 1);
        let mut s = SeededStream::new(10, 0);
        let report = check_monotone(
            &state,
            &stacks,
            &Perturbation::RemoveParticle(0),
            100,
            &mut s,
        )
        .unwrap();
        assert!(report.holds());
        assert!(report.perturbed.r.values().all(|&r| r == 0));
    }

    #[test]
    fn monotone_two_particle_removal_hand_trace() {
        let (state, stacks) = two_particle_instance();
        let mut s = SeededStream::new(11, 0);
        let report = check_monotone(
            &state,
            &stacks,
            &Perturbation::RemoveParticle(1),
            100,
            &mut s,
        )
        .unwrap();
        assert!(report.holds());
        // Lone particle sleeps immediately: j'_0 = 1 <= 3, R'_0 = 0 <= 1.
        assert_eq!(report.perturbed.j.get(&0).copied().unwrap_or(0), 1);
        assert_eq!(report.perturbed.r.get(&0).copied().unwrap_or(0), 0);
        assert_eq!(report.base.j[&0], 3);
        assert_eq!(report.base.r[&0], 1);
    }

    #[test]
    fn monotone_insert_sleep_and_passify() {
        let params = ArwParams::new(0.8, 0.5).unwrap();
        for trial in 0..50u64 {
            let mut s = SeededStream::new(2000 + trial, 0);
            let m = 1 + s.below(6) as usize;
            let particles: Vec<_> = (0..m)
                .map(|_| ((s.below(9) as i64) - 4, ParticleState::Active))
                .collect();
            let state = ArwState::from_particles(&particles, 4);
            let stacks = SampledStacks::new(params, s.substream(3));
            let perturbation = match s.below(3) {
                0 => Perturbation::RemoveParticle(s.below(m as u64) as usize),
                1 => Perturbation::PassifyParticle(s.below(m as u64) as usize),
                _ => Perturbation::InsertSleep {
                    site: (s.below(9) as i64) - 4,
                    index: 1 + s.below(4),
                },
            };
            let report =
                check_monotone(&state, &stacks, &perturbation, 1_000_000, &mut s).unwrap();
            assert!(report.holds(), "trial {trial}: {perturbation:?}");
        }
    }

    #[test]
    fn timed_empty_trajectory() {
        let stacks = ExplicitStacks::from_pairs(&[]);
        let state = ArwState::from_particles(&[], 0);
        let mut s = SeededStream::new(12, 0);
        let (traj, _) = stabilize_timed(state, &stacks, 1.0, &mut s, 100.0).unwrap();
        assert!(traj.is_empty());
    }

    #[test]
    fn timed_first_ring_rate() {
        // Single particle, λ = 1: first ring ~ Exp(2), mean 0.5.
        let mut total = 0.0;
        let trials = 10_000u64;
        for t in 0..trials {
            let stacks = ExplicitStacks::from_pairs(&[(0, &[Sleep][..])]);
            let state = ArwState::from_particles(&[(0, ParticleState::Active)], 1);
            let mut s = SeededStream::new(13, t);
            let (traj, _) = stabilize_timed(state, &stacks, 1.0, &mut s, f64::INFINITY).unwrap();
            total += traj[0].time;
        }
        let mean = total / trials as f64;
        let se = 0.5 / (trials as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn timed_r_origin_nondecreasing() {
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let mut s = SeededStream::new(14, 0);
        let stacks = SampledStacks::new(params, s.substream(1));
        let particles: Vec<_> = (0..5)
            .map(|_| ((s.below(5) as i64) - 2, ParticleState::Active))
            .collect();
        let state = ArwState::from_particles(&particles, 2);
        let (traj, _) = stabilize_timed(state, &stacks, 1.0, &mut s, 50.0).unwrap();
        let mut last = 0u64;
        for step in &traj {
            assert!(step.r_origin >= last);
            last = step.r_origin;
        }
    }
}
