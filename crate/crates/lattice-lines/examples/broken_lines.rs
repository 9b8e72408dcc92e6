//! Decompose a sampled flow field into its ordered crossing lines and put
//! it back together.

use lattice_lines::bl::{
    crossing_total, decompose, flow_from_boundary, recompose, sample_reversible_geometric,
    RectDomain,
};
use lattice_lines::rng::SeededStream;

fn main() {
    let domain = RectDomain::new(4, 4).unwrap();
    let mut stream = SeededStream::new(31, 0);
    let (boundary, births) = sample_reversible_geometric(domain, 0.5, 0.5, &mut stream).unwrap();
    let field = flow_from_boundary(&births, &boundary).unwrap();

    let totals = crossing_total(&field).unwrap();
    println!(
        "crossing totals: bottom+right {}, left+top {}, strip sum {}",
        totals.left_sum, totals.right_sum, totals.decomposition_total
    );

    let dec = decompose(&field).unwrap();
    println!("{} crossing lines:", dec.len());
    for (k, (trace, w)) in dec.traces().iter().zip(dec.weights()).enumerate() {
        let path: Vec<(i64, i64)> = trace.vertices().iter().map(|v| (v.t(), v.x())).collect();
        println!("  line {:>2} (weight {w}): {path:?}", k + 1);
    }

    let back = recompose(&dec).unwrap();
    println!("recompose reproduces the field exactly: {}", back == field);
}
