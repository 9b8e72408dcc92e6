//! A small phase scan: P(R_0 >= r) across densities and box sizes. Below
//! λ/(1+λ) the estimates die off in r uniformly in M; above density one
//! they climb toward certainty as the box grows.

use lattice_lines::arw::{fixation_scan, ScanGrid};
use lattice_lines::rng::SeededStream;

fn main() {
    let grid = ScanGrid {
        mu_grid: vec![0.2, 1.5],
        lambda_grid: vec![1.0],
        m_grid: vec![10, 20, 40],
        r_grid: vec![1, 4, 16, 64],
        trials: 300,
        p: 0.5,
        step_cap: 10_000_000,
    };
    let stream = SeededStream::new(5150, 0);
    let cells = fixation_scan(&grid, &stream).unwrap();
    println!("{:>5} {:>7} {:>4} {:>4} {:>9} {:>9}", "mu", "lambda", "M", "r", "estimate", "se");
    for c in cells {
        println!(
            "{:>5} {:>7} {:>4} {:>4} {:>9.4} {:>9.4}",
            c.mu, c.lambda, c.box_radius, c.r, c.estimate, c.se
        );
    }
}
