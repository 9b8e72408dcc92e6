//! Intersection statistics: geometric marginals on diagonal and vertical
//! lines, and the non-product joint law on a horizontal line.

use lattice_lines::bl::{
    flow_from_boundary, horizontal_pair_mass, intersection_stats, sample_horizontal_pairs,
    sample_reversible_geometric, LineKind, LineStats, RectDomain,
};
use lattice_lines::rng::SeededStream;

fn main() {
    let lambda = 0.5;
    let domain = RectDomain::new(24, 24).unwrap();
    let mut stream = SeededStream::new(808, 0);
    let (boundary, births) =
        sample_reversible_geometric(domain, lambda, lambda, &mut stream).unwrap();
    let field = flow_from_boundary(&births, &boundary).unwrap();

    for (kind, index, label) in [
        (LineKind::NorthEast, 12, "northeast line (column 12)"),
        (LineKind::SouthEast, 12, "southeast line (row 12)"),
        (LineKind::Vertical, 22, "vertical line (t = 22)"),
    ] {
        let stats = intersection_stats(&field, kind, index).unwrap();
        let (count, sum) = match &stats {
            LineStats::Singles(v) => (v.len(), v.iter().sum::<u64>() as f64),
            LineStats::Pairs(v) => (2 * v.len(), stats.total() as f64),
        };
        println!(
            "{label}: mean {:.3} per crossing slot (Geom(λ) mean is {})",
            sum / count as f64,
            lambda / (1.0 - lambda)
        );
    }

    // Horizontal line: stream 20k diagonal sites and compare a few joint
    // cells with the explicit bivariate mass.
    let mut stream = SeededStream::new(808, 1);
    let pairs = sample_horizontal_pairs(20_000, lambda, &mut stream).unwrap();
    let n = pairs.len() as f64;
    println!("horizontal joint law at λ = 0.5 over {} sites:", pairs.len());
    for (tm, tp) in [(0u64, 0u64), (1, 0), (0, 1), (1, 1), (2, 1)] {
        let observed =
            pairs.iter().filter(|&&(a, b)| a == tm && b == tp).count() as f64 / n;
        let exact = horizontal_pair_mass(lambda, tm, tp);
        println!("  (τ⁻={tm}, τ⁺={tp}): observed {observed:.4}, exact {exact:.4}");
    }
    let t_n: u64 = pairs.iter().map(|&(a, b)| a + b).sum();
    println!(
        "T_n/n = {:.4} (limit λ/(1-λ) = {})",
        t_n as f64 / (2.0 * n),
        lambda / (1.0 - lambda)
    );
}
