//! Sweep-and-trap: the constructive fixation certificate.
//!
//! Phase one evacuates the window (-K, K): every particle inside is walked
//! one at a time, on the jump subsequence only (all sleep instructions
//! ignored), until it reaches the boundary. Phase two pins each particle:
//! walk it on jumps until it hits the current barrier, then pick the trap
//! site — the jump index where the walk last left that site has a positive
//! sleep gap in the underlying stack, so re-inserting that single sleep
//! makes the particle fall asleep there instead of completing the walk.
//! Replaying the combined schedule with exactly the certified sleeps put
//! back must stabilize every particle at its trap without the origin
//! burning anything beyond the sweep count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{PoissonLaw, SeededStream};

use super::stack::{ArwParams, JumpView, SparseSleepStacks};
use super::state::ArwState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionRule {
    /// Walk until the position reaches -K or +K.
    Symmetric,
    /// Walk until the position reaches +K; requires p > q.
    BiasedRight,
}

/// Outcome of the sweep phase.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Particle positions after sweeping; counters carry the jump
    /// consumption (j = R since no sleep instruction exists in this
    /// coupling).
    pub state: ArwState,
    /// Jump envelopes burned at the origin while sweeping.
    pub r_origin: u64,
    /// Total walk steps.
    pub steps: u64,
}

const WALK_CAP: u64 = 100_000_000;

fn walk_until(
    state: &mut ArwState,
    jumps: &JumpView,
    n: usize,
    stop: impl Fn(i64) -> bool,
) -> Result<u64> {
    let mut steps = 0u64;
    while !stop(state.position(n)) {
        let x = state.position(n);
        let k = state.r_at(x) + 1;
        let d = jumps.jump(x, k).displacement();
        state.force_jump(n, d);
        steps += 1;
        if steps > WALK_CAP {
            return Err(Error::NotStabilized { cap: WALK_CAP });
        }
    }
    Ok(steps)
}

/// Sweeps every particle strictly inside (-K, K) to the boundary, one at a
/// time, consuming the jump subsequence.
pub fn sweep(
    state: &ArwState,
    jumps: &JumpView,
    radius: i64,
    rule: DirectionRule,
    params: ArwParams,
) -> Result<SweepOutcome> {
    if radius < 1 {
        return Err(Error::parameter("sweep radius must be >= 1".to_string()));
    }
    if rule == DirectionRule::BiasedRight && params.p <= params.q() {
        return Err(Error::parameter(
            "BiasedRight sweep requires p > q; a leftward or unbiased walk need not reach +K"
                .to_string(),
        ));
    }
    let mut swept = state.clone();
    let mut total = 0u64;
    for n in 0..swept.particle_count() {
        if swept.position(n).abs() < radius {
            total += match rule {
                DirectionRule::Symmetric => {
                    walk_until(&mut swept, jumps, n, |x| x.abs() >= radius)?
                }
                DirectionRule::BiasedRight => walk_until(&mut swept, jumps, n, |x| x >= radius)?,
            };
        }
    }
    Ok(SweepOutcome {
        r_origin: swept.r_at(0),
        steps: total,
        state: swept,
    })
}

/// A certified trap: a sleep instruction sits in the gap before jump
/// `jump_index` of `site`'s stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trap {
    pub site: i64,
    pub jump_index: u64,
    /// Particle the trap is for.
    pub particle: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrapCertificate {
    pub success: bool,
    pub radius: i64,
    /// Outermost barriers used on each side: [a_0, b_0] on the right,
    /// mirrored on the left.
    pub outer_barrier: i64,
    /// Traps in schedule order (right side by increasing start position,
    /// then left side by decreasing start position).
    pub traps: Vec<Trap>,
    /// Barrier interval after each successful stage.
    pub barriers: Vec<(i64, i64)>,
    /// Stage at which the construction failed, if it did.
    pub failed_stage: Option<usize>,
    /// R_0 consumed by the sweep; the replay must not exceed it.
    pub r0_sweep: u64,
}

/// Runs the barrier/trap loop on a swept state.
///
/// Right-side particles are processed by increasing position, then
/// left-side ones by decreasing position. A failed stage yields
/// `success = false` with the stage index; it is a legitimate outcome, not
/// an error.
pub fn build_traps(
    swept: &SweepOutcome,
    jumps: &JumpView,
    radius: i64,
    params: ArwParams,
    rule: DirectionRule,
) -> Result<TrapCertificate> {
    let state = &swept.state;
    for n in 0..state.particle_count() {
        if state.position(n).abs() < radius {
            return Err(Error::parameter(format!(
                "build_traps requires a swept state; particle {n} is at {} inside (-{radius}, {radius})",
                state.position(n)
            )));
        }
    }
    let b0 = ((3.0 + 1.0 / params.lambda) * radius as f64).ceil() as i64;

    let mut right: Vec<usize> = (0..state.particle_count())
        .filter(|&n| state.position(n) >= radius)
        .collect();
    right.sort_by_key(|&n| (state.position(n), n));
    let mut left: Vec<usize> = (0..state.particle_count())
        .filter(|&n| state.position(n) <= -radius)
        .collect();
    left.sort_by_key(|&n| (-state.position(n), n));
    if rule == DirectionRule::BiasedRight && !left.is_empty() {
        return Err(Error::parameter(
            "BiasedRight trap construction expects all particles on the right side".to_string(),
        ));
    }

    // Trap windows on the far side must sit strictly above every starting
    // position, so a walk that hits the far barrier has crossed the whole
    // window.
    let far_right = right
        .iter()
        .map(|&n| state.position(n))
        .max()
        .unwrap_or(radius)
        .max(radius);
    let far_left = left
        .iter()
        .map(|&n| state.position(n))
        .min()
        .unwrap_or(-radius)
        .min(-radius);

    let mut work = state.clone();
    let mut traps = Vec::new();
    let mut barriers = Vec::new();
    let mut stage = 0usize;

    // gap_before(x) > 0 means the stack at x holds a sleep immediately
    // before the next jump the replay would burn there, given the walk has
    // just consumed jump r_x as its last action at x.
    let gap_at = |work: &ArwState, x: i64| -> bool {
        let k = work.r_at(x);
        k >= 1 && jumps.sleep_gap(x, k) > 0
    };

    // Right side: barriers a (origin side) and b (far side).
    let (mut a, mut b) = (0i64, b0);
    for &n in &right {
        stage += 1;
        let start = work.position(n);
        walk_until(&mut work, jumps, n, |x| x <= a || x >= b)?;
        let hit = work.position(n);
        let trap_site = if hit <= a {
            // Search (a, start) from the origin side outward.
            (a + 1..start).find(|&x| gap_at(&work, x))
        } else {
            // Far-side window sits beyond every start position.
            (far_right + 1..b).rev().find(|&x| gap_at(&work, x))
        };
        match trap_site {
            Some(x) => {
                traps.push(Trap {
                    site: x,
                    jump_index: work.r_at(x),
                    particle: n,
                });
                if hit <= a {
                    a = x;
                } else {
                    b = x;
                }
                barriers.push((a, b));
            }
            None => {
                return Ok(TrapCertificate {
                    success: false,
                    radius,
                    outer_barrier: b0,
                    traps,
                    barriers,
                    failed_stage: Some(stage),
                    r0_sweep: swept.r_origin,
                });
            }
        }
    }

    // Left side, mirrored: barriers b' (origin side, starts at 0) and a'
    // (far side, starts at -b0).
    let (mut a_l, mut b_l) = (-b0, 0i64);
    for &n in &left {
        stage += 1;
        let start = work.position(n);
        walk_until(&mut work, jumps, n, |x| x <= a_l || x >= b_l)?;
        let hit = work.position(n);
        let trap_site = if hit >= b_l {
            ((start + 1)..b_l).rev().find(|&x| gap_at(&work, x))
        } else {
            (a_l + 1..far_left).find(|&x| gap_at(&work, x))
        };
        match trap_site {
            Some(x) => {
                traps.push(Trap {
                    site: x,
                    jump_index: work.r_at(x),
                    particle: n,
                });
                if hit >= b_l {
                    b_l = x;
                } else {
                    a_l = x;
                }
                barriers.push((a_l, b_l));
            }
            None => {
                return Ok(TrapCertificate {
                    success: false,
                    radius,
                    outer_barrier: b0,
                    traps,
                    barriers,
                    failed_stage: Some(stage),
                    r0_sweep: swept.r_origin,
                });
            }
        }
    }

    Ok(TrapCertificate {
        success: true,
        radius,
        outer_barrier: b0,
        traps,
        barriers,
        failed_stage: None,
        r0_sweep: swept.r_origin,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayReport {
    pub ok: bool,
    pub r0_replay: u64,
    pub r0_sweep: u64,
    pub failures: Vec<String>,
}

/// Replays the certified schedule from the initial state on the modified
/// stacks (jump subsequence plus exactly the certified sleeps) and checks
/// the certificate's claims: the sweep is undisturbed, every particle
/// falls asleep alone at its certified site, and the origin's odometer
/// stays at the sweep count.
pub fn replay_certificate(
    initial: &ArwState,
    jumps: &JumpView,
    cert: &TrapCertificate,
    rule: DirectionRule,
) -> Result<ReplayReport> {
    if !cert.success {
        return Err(Error::parameter(
            "cannot replay a failed certificate".to_string(),
        ));
    }
    let stacks = SparseSleepStacks::new(
        jumps,
        cert.traps.iter().map(|t| (t.site, t.jump_index)),
    );
    let mut state = initial.clone();
    let mut failures = Vec::new();
    let radius = cert.radius;

    // Phase one: sweep schedule. Each in-window particle acts repeatedly
    // until it reaches the boundary; hitting an inserted sleep here would
    // break the certificate.
    let stop = |x: i64| match rule {
        DirectionRule::Symmetric => x.abs() >= radius,
        DirectionRule::BiasedRight => x >= radius,
    };
    let mut steps = 0u64;
    'sweep: for n in 0..state.particle_count() {
        if state.position(n).abs() >= radius {
            continue; // same selection as the sweep itself
        }
        while !stop(state.position(n)) {
            match state.step(&stacks, n)? {
                super::state::StepOutcome::Slept | super::state::StepOutcome::FailedSleep => {
                    failures.push(format!(
                        "particle {n} hit a sleep instruction at {} during the sweep",
                        state.position(n)
                    ));
                    break 'sweep;
                }
                _ => {}
            }
            steps += 1;
            if steps > WALK_CAP {
                return Err(Error::NotStabilized { cap: WALK_CAP });
            }
        }
    }

    // Phase two: trap schedule, in certificate order.
    if failures.is_empty() {
        'traps: for trap in &cert.traps {
            let n = trap.particle;
            loop {
                match state.step(&stacks, n)? {
                    super::state::StepOutcome::Slept => {
                        if state.position(n) != trap.site {
                            failures.push(format!(
                                "particle {n} slept at {} instead of its certified trap {}",
                                state.position(n),
                                trap.site
                            ));
                        }
                        break;
                    }
                    super::state::StepOutcome::FailedSleep => {
                        failures.push(format!(
                            "particle {n} failed to sleep at {}: site not empty",
                            state.position(n)
                        ));
                        break 'traps;
                    }
                    super::state::StepOutcome::Null => {
                        failures.push(format!("particle {n} was already passive"));
                        break 'traps;
                    }
                    super::state::StepOutcome::Jumped { .. } => {}
                }
                steps += 1;
                if steps > WALK_CAP {
                    return Err(Error::NotStabilized { cap: WALK_CAP });
                }
            }
        }
    }

    if failures.is_empty() && !state.all_passive() {
        failures.push("replay left active particles".to_string());
    }
    let r0_replay = state.r_at(0);
    if failures.is_empty() && r0_replay != cert.r0_sweep {
        failures.push(format!(
            "origin burned {r0_replay} jumps in replay vs {} in the sweep",
            cert.r0_sweep
        ));
    }
    Ok(ReplayReport {
        ok: failures.is_empty(),
        r0_replay,
        r0_sweep: cert.r0_sweep,
        failures,
    })
}

/// Smallest window radius K for which the empirical probability that
/// Poisson(μ) partial sums overtake Bernoulli(λ/(1+λ)) partial sums beyond
/// K (the event S'_{n+1} > S_n for some n >= K) stays below ε.
pub fn choose_sweep_radius(
    mu: f64,
    lambda: f64,
    epsilon: f64,
    trials: u64,
    stream: &mut SeededStream,
) -> Result<i64> {
    let sleep_density = lambda / (1.0 + lambda);
    if mu.is_nan() || mu < 0.0 {
        return Err(Error::parameter("mu must be nonnegative".to_string()));
    }
    if mu >= sleep_density {
        return Err(Error::parameter(format!(
            "trap density {sleep_density} does not dominate particle density {mu}; no radius works"
        )));
    }
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(Error::parameter("epsilon must lie in (0,1)".to_string()));
    }
    let poisson = PoissonLaw::new(mu)?;
    // Horizon where the drift gap dwarfs fluctuations.
    let horizon = (200.0_f64).max(60.0 / (sleep_density - mu)).ceil() as u64;
    let mut last_overtake = vec![0u64; trials as usize];
    for t in 0..trials {
        let mut s = stream.derive(&[0x4b43, t]);
        let mut bern_sum = 0u64;
        let mut pois_sum = poisson.sample(&mut s); // S'_1 before the loop
        let mut last = 0u64;
        for n in 1..=horizon {
            bern_sum += u64::from(s.uniform_open01() <= sleep_density);
            pois_sum += poisson.sample(&mut s); // S'_{n+1}
            if pois_sum > bern_sum {
                last = n;
            }
        }
        last_overtake[t as usize] = last;
    }
    // P(K) = fraction of trials with an overtake at some n >= K; find the
    // smallest K below ε.
    for k in 1..=horizon as i64 {
        let bad = last_overtake.iter().filter(|&&l| l >= k as u64).count();
        if (bad as f64) < epsilon * trials as f64 {
            return Ok(k);
        }
    }
    Err(Error::integrity(
        "no radius satisfied the crossing criterion within the horizon".to_string(),
    ))
}

/// Full certification experiment: Poisson(μ) particles on [-K, K], sweep,
/// trap construction, and (on success) replay validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrapTrial {
    pub success: bool,
    pub replay_ok: Option<bool>,
    pub r0_sweep: u64,
    pub particles: usize,
}

pub fn run_trap_trial(
    mu: f64,
    params: ArwParams,
    radius: i64,
    rule: DirectionRule,
    stream: &mut SeededStream,
) -> Result<TrapTrial> {
    let mut init_stream = stream.derive(&[0x7121, 0]);
    let state = ArwState::init(mu, radius, &mut init_stream)?;
    let stacks = super::stack::SampledStacks::new(params, stream.derive(&[0x7121, 1]));
    let jumps = JumpView::new(&stacks);
    let swept = sweep(&state, &jumps, radius, rule, params)?;
    let cert = build_traps(&swept, &jumps, radius, params, rule)?;
    let replay_ok = if cert.success {
        Some(replay_certificate(&state, &jumps, &cert, rule)?.ok)
    } else {
        None
    };
    Ok(TrapTrial {
        success: cert.success,
        replay_ok,
        r0_sweep: cert.r0_sweep,
        particles: state.particle_count(),
    })
}

/// Poisson(μ(K+1/2)) is the law of each swept boundary pile in the
/// symmetric case with initial box [-K, K]; exposed for tests and the CLI.
pub fn swept_boundary_mean(mu: f64, radius: i64) -> f64 {
    mu * (radius as f64 + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arw::stack::{ExplicitStacks, Instruction::*, SampledStacks};
    use crate::arw::state::ParticleState;

    #[test]
    fn sweep_identity_when_nothing_inside() {
        let stacks = ExplicitStacks::from_pairs(&[]);
        let jumps = JumpView::new(&stacks);
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let state = ArwState::from_particles(&[(5, ParticleState::Active)], 5);
        let swept = sweep(&state, &jumps, 5, DirectionRule::Symmetric, params).unwrap();
        assert_eq!(swept.r_origin, 0);
        assert_eq!(swept.steps, 0);
        assert_eq!(swept.state.position(0), 5);
    }

    #[test]
    fn sweep_single_jump_to_boundary() {
        let stacks = ExplicitStacks::from_pairs(&[(0, &[JumpRight][..])]);
        let jumps = JumpView::new(&stacks);
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let state = ArwState::from_particles(&[(0, ParticleState::Active)], 1);
        let swept = sweep(&state, &jumps, 1, DirectionRule::Symmetric, params).unwrap();
        assert_eq!(swept.state.position(0), 1);
        assert_eq!(swept.r_origin, 1);
    }

    #[test]
    fn biased_sweep_requires_right_drift() {
        let stacks = ExplicitStacks::from_pairs(&[]);
        let jumps = JumpView::new(&stacks);
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let state = ArwState::from_particles(&[], 0);
        let err = sweep(&state, &jumps, 3, DirectionRule::BiasedRight, params).unwrap_err();
        assert!(matches!(err, Error::Parameter(_)));
    }

    #[test]
    fn swept_boundary_occupancy_mean() {
        // μ = 0.3, K = 20, initial box [-K, K]: the pile at each boundary
        // site (swept mass plus the particles that started there) is
        // Poisson with mean μ(K + 1/2) = 6.15.
        let mu = 0.3;
        let radius = 20i64;
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let trials = 1000u64;
        let mut at_plus = 0u64;
        let mut at_minus = 0u64;
        for t in 0..trials {
            let root = SeededStream::new(0xACE0, t);
            let mut init_stream = root.derive(&[1]);
            let state = ArwState::init(mu, radius, &mut init_stream).unwrap();
            let stacks = SampledStacks::new(params, root.derive(&[2]));
            let jumps = JumpView::new(&stacks);
            let swept = sweep(&state, &jumps, radius, DirectionRule::Symmetric, params).unwrap();
            at_plus += swept.state.occupancy(radius) as u64;
            at_minus += swept.state.occupancy(-radius) as u64;
        }
        let expect = swept_boundary_mean(mu, radius);
        let se = (expect / trials as f64).sqrt(); // Poisson variance = mean
        let mean_plus = at_plus as f64 / trials as f64;
        let mean_minus = at_minus as f64 / trials as f64;
        assert!((mean_plus - expect).abs() < 3.0 * se, "mean+ {mean_plus} vs {expect}");
        assert!((mean_minus - expect).abs() < 3.0 * se, "mean- {mean_minus} vs {expect}");
    }

    #[test]
    fn traps_trivial_empty() {
        let stacks = ExplicitStacks::from_pairs(&[]);
        let jumps = JumpView::new(&stacks);
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let state = ArwState::from_particles(&[], 0);
        let swept = sweep(&state, &jumps, 3, DirectionRule::Symmetric, params).unwrap();
        let cert = build_traps(&swept, &jumps, 3, params, DirectionRule::Symmetric).unwrap();
        assert!(cert.success);
        assert!(cert.traps.is_empty());
    }

    #[test]
    fn single_particle_dense_sleeps_traps_inside_window() {
        // λ large: nearly every jump gap holds a sleep, so the first trap
        // search succeeds and lands strictly between the origin and K.
        let params = ArwParams::new(50.0, 0.5).unwrap();
        let root = SeededStream::new(0xBEE, 3);
        let stacks = SampledStacks::new(params, root.derive(&[2]));
        let jumps = JumpView::new(&stacks);
        let state = ArwState::from_particles(&[(2, ParticleState::Active)], 5);
        let swept = sweep(&state, &jumps, 5, DirectionRule::Symmetric, params).unwrap();
        let cert = build_traps(&swept, &jumps, 5, params, DirectionRule::Symmetric).unwrap();
        assert!(cert.success);
        assert_eq!(cert.traps.len(), 1);
        let t = cert.traps[0];
        assert!(
            (t.site > 0 && t.site < cert.outer_barrier) || (t.site < 0 && t.site > -cert.outer_barrier),
            "trap at {}",
            t.site
        );
        let initial = ArwState::from_particles(&[(2, ParticleState::Active)], 5);
        let report = replay_certificate(&initial, &jumps, &cert, DirectionRule::Symmetric).unwrap();
        assert!(report.ok, "{:?}", report.failures);
    }

    #[test]
    fn certificate_replay_holds_on_random_instances() {
        let params = ArwParams::new(1.0, 0.5).unwrap();
        let mut successes = 0u32;
        for t in 0..100u64 {
            let mut stream = SeededStream::new(0xCAFE, t);
            let trial = run_trap_trial(0.2, params, 12, DirectionRule::Symmetric, &mut stream)
                .unwrap();
            if trial.success {
                successes += 1;
                assert_eq!(trial.replay_ok, Some(true), "trial {t}");
            }
        }
        assert!(successes > 80, "only {successes}/100 certificates succeeded");
    }

    #[test]
    fn radius_criterion_is_monotone_in_epsilon() {
        let mut s = SeededStream::new(0xD00D, 0);
        let k_loose = choose_sweep_radius(0.2, 1.0, 0.10, 4000, &mut s).unwrap();
        let mut s = SeededStream::new(0xD00D, 0);
        let k_tight = choose_sweep_radius(0.2, 1.0, 0.01, 4000, &mut s).unwrap();
        assert!(k_tight >= k_loose, "{k_tight} < {k_loose}");
        assert!(k_loose >= 1);
        let mut s = SeededStream::new(0xD00D, 1);
        assert!(choose_sweep_radius(0.6, 1.0, 0.05, 100, &mut s).is_err());
    }
}
