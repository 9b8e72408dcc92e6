//! Dynamic-programming oracle: the plain corner recursion
//! f(i,j) = ξ(i,j) + max(f(i-1,j), f(i,j-1)), with backtracking ties
//! broken toward the lexicographically smaller predecessor (i-1, j).

use crate::bl::{Site, Weight};
use crate::error::Result;

use super::instance::{LppInstance, LppSolution, Method};

pub fn solve_dp<W: Weight>(instance: &LppInstance<W>) -> Result<LppSolution<W>> {
    let domain = instance.domain();
    let (n, m) = (domain.n() as usize, domain.m() as usize);
    let idx = |i: usize, j: usize| (i - 1) * m + (j - 1);
    let mut f = vec![W::ZERO; n * m];
    for i in 1..=n {
        for j in 1..=m {
            let xi = instance.births.get(i as i32, j as i32);
            let best = match (i > 1, j > 1) {
                (false, false) => W::ZERO,
                (true, false) => f[idx(i - 1, j)],
                (false, true) => f[idx(i, j - 1)],
                (true, true) => f[idx(i - 1, j)].max(f[idx(i, j - 1)]),
            };
            f[idx(i, j)] = xi.add(best);
        }
    }

    let mut path = Vec::with_capacity(n + m - 1);
    let (mut i, mut j) = (n, m);
    path.push(Site::new(i as i32, j as i32));
    while i > 1 || j > 1 {
        let from_left = i > 1;
        let from_below = j > 1;
        let go_left = match (from_left, from_below) {
            (true, false) => true,
            (false, true) => false,
            // Tie toward (i-1, j), the lexicographically smaller one.
            (true, true) => f[idx(i - 1, j)] >= f[idx(i, j - 1)],
            (false, false) => unreachable!(),
        };
        if go_left {
            i -= 1;
        } else {
            j -= 1;
        }
        path.push(Site::new(i as i32, j as i32));
    }
    path.reverse();

    let solution = LppSolution {
        value: f[idx(n, m)],
        path,
        method: Method::Dp,
    };
    solution.check_path_shape(domain)?;
    Ok(solution)
}
