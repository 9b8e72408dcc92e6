//! The odometer never grows under monotone perturbations: remove a
//! particle, start one passive, or insert a sleep instruction.

use lattice_lines::arw::{
    check_monotone, ArwParams, ArwState, ParticleState, Perturbation, SampledStacks,
};
use lattice_lines::rng::SeededStream;

fn main() {
    let params = ArwParams::new(0.8, 0.5).unwrap();
    let root = SeededStream::new(7, 0);
    let mut pos_stream = root.derive(&[1]);
    let particles: Vec<(i64, ParticleState)> = (0..6)
        .map(|_| ((pos_stream.below(9) as i64) - 4, ParticleState::Active))
        .collect();
    let state = ArwState::from_particles(&particles, 4);
    let stacks = SampledStacks::new(params, root.derive(&[2]));

    for perturbation in [
        Perturbation::RemoveParticle(0),
        Perturbation::PassifyParticle(1),
        Perturbation::InsertSleep { site: 0, index: 1 },
    ] {
        let mut stream = root.derive(&[3]);
        let report = check_monotone(&state, &stacks, &perturbation, 1_000_000, &mut stream)
            .expect("both configurations stabilize");
        let base_total: u64 = report.base.r.values().sum();
        let pert_total: u64 = report.perturbed.r.values().sum();
        println!(
            "{perturbation:?}: total R {base_total} -> {pert_total}, pointwise holds = {}",
            report.holds()
        );
    }
}
