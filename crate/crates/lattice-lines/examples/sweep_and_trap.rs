//! The constructive fixation certificate: sweep the window, then pin each
//! particle at a sleep-bearing stack position before it can revisit the
//! origin, and replay the whole schedule to check the claim.

use lattice_lines::arw::{
    build_traps, choose_sweep_radius, replay_certificate, sweep, ArwParams, ArwState,
    DirectionRule, JumpView, SampledStacks,
};
use lattice_lines::rng::SeededStream;

fn main() {
    let mu = 0.2;
    let lambda = 1.0;
    let params = ArwParams::new(lambda, 0.5).unwrap();
    let root = SeededStream::new(15, 0);

    // Radius from the Bernoulli-vs-Poisson crossing criterion.
    let mut k_stream = root.derive(&[0]);
    let radius = choose_sweep_radius(mu, lambda, 0.02, 10_000, &mut k_stream).unwrap();
    println!("sweep radius K = {radius} (epsilon = 0.02)");

    let mut init_stream = root.derive(&[1]);
    let state = ArwState::init(mu, radius, &mut init_stream).unwrap();
    println!("{} particles on [-{radius}, {radius}]", state.particle_count());

    let stacks = SampledStacks::new(params, root.derive(&[2]));
    let jumps = JumpView::new(&stacks);
    let swept = sweep(&state, &jumps, radius, DirectionRule::Symmetric, params).unwrap();
    println!(
        "sweep: {} walk steps, R_0 = {}, boundary piles {} / {}",
        swept.steps,
        swept.r_origin,
        swept.state.occupancy(-radius),
        swept.state.occupancy(radius),
    );

    let cert = build_traps(&swept, &jumps, radius, params, DirectionRule::Symmetric).unwrap();
    if !cert.success {
        println!("trap construction failed at stage {:?}", cert.failed_stage);
        return;
    }
    println!("outer barrier b0 = {}", cert.outer_barrier);
    for trap in &cert.traps {
        println!(
            "  particle {} sleeps at site {} before jump #{}",
            trap.particle, trap.site, trap.jump_index
        );
    }

    let replay = replay_certificate(&state, &jumps, &cert, DirectionRule::Symmetric).unwrap();
    println!(
        "replay ok = {}; origin odometer {} (sweep claimed {})",
        replay.ok, replay.r0_replay, replay.r0_sweep
    );
}
