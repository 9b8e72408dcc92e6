//! One instance, two solvers: the corner recursion and the broken-line
//! crossing total give the same value; each returns a maximal path.

use lattice_lines::bl::RectDomain;
use lattice_lines::lpp::{solve_brokenline, solve_dp, LppInstance};
use lattice_lines::rng::SeededStream;

fn main() {
    let domain = RectDomain::new(8, 8).unwrap();
    let mut stream = SeededStream::new(42, 0);
    let instance = LppInstance::sample_exponential(domain, 1.0, &mut stream).unwrap();

    let dp = solve_dp(&instance).unwrap();
    let bl = solve_brokenline(&instance).unwrap();
    println!("DP value          {:.12}", dp.value);
    println!("broken-line value {:.12}", bl.value);
    println!("difference        {:.3e}", (dp.value - bl.value).abs());

    let fmt = |path: &[lattice_lines::bl::Site]| {
        path.iter().map(|s| (s.i, s.j)).collect::<Vec<_>>()
    };
    println!("DP path  {:?}", fmt(&dp.path));
    println!("BL path  {:?}", fmt(&bl.path));
    println!(
        "path sums {:.12} / {:.12}",
        dp.path_sum(&instance.births),
        bl.path_sum(&instance.births)
    );
}
