//! The continuous-time driver: every particle rings at rate 1+λ, so the
//! system rings at rate m(1+λ); R_0^t climbs along the trajectory until
//! the configuration falls asleep.

use lattice_lines::arw::{stabilize_timed, ArwParams, ArwState, SampledStacks};
use lattice_lines::rng::SeededStream;

fn main() {
    let lambda = 1.0;
    let params = ArwParams::new(lambda, 0.5).unwrap();
    let root = SeededStream::new(99, 0);
    let mut init_stream = root.derive(&[1]);
    let state = ArwState::init(0.8, 4, &mut init_stream).unwrap();
    println!("{} particles on [-4, 4]", state.particle_count());

    let stacks = SampledStacks::new(params, root.derive(&[2]));
    let mut clock_stream = root.derive(&[3]);
    let (trajectory, final_state) =
        stabilize_timed(state, &stacks, lambda, &mut clock_stream, 500.0).unwrap();

    println!("{} rings until quiescence; a few of them:", trajectory.len());
    for step in trajectory.iter().take(8) {
        println!(
            "  t = {:>7.3}  particle {:>2}  {:?}  R_0 = {}",
            step.time, step.label, step.outcome, step.r_origin
        );
    }
    if let Some(last) = trajectory.last() {
        println!("  ... last ring at t = {:.3}, R_0 = {}", last.time, last.r_origin);
    }
    println!("all passive: {}", final_state.all_passive());
}
