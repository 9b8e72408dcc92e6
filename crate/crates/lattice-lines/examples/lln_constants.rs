//! Monte Carlo means of G(N, βN)/N against the explicit limits
//! (1+√β)²/α for exponential weights and (1+√(βλ))²/(1-λ) - 1 for
//! geometric ones.

use lattice_lines::lpp::{lln_experiment, LlnFamily};
use lattice_lines::rng::SeededStream;

fn main() {
    let stream = SeededStream::new(314, 0);
    for family in [
        LlnFamily::Exponential { alpha: 1.0 },
        LlnFamily::Geometric { lambda: 0.25 },
    ] {
        println!("{family:?} (beta = 1):");
        let rows = lln_experiment(family, 1.0, &[50, 100, 200], 100, Some(0.5), &stream).unwrap();
        for r in rows {
            println!(
                "  N {:>4}: mean G/N {:.4} ± {:.4} (sd {:.4}), limit {}, P(|G/N - limit| > 0.5) = {:.3}",
                r.n,
                r.mean_g_over_n,
                r.se,
                r.sd,
                r.limit,
                r.tail_frequency.unwrap()
            );
        }
    }
}
