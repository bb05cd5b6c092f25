//! Exact bipartite max-flow (Edmonds-Karp) over rational capacities.

use std::collections::VecDeque;

use crate::rational::Rational;

/// Maximum flow from `supply` (left) to `demand` (right) through the edges
/// `(i, j)` for which `allowed(i, j)` holds, each edge uncapacitated.
///
/// Returns the flow value and the per-edge flow matrix. Augmenting paths are
/// found by BFS in a fixed node order, so the result is deterministic.
pub fn bipartite_max_flow(
    supply: &[Rational],
    demand: &[Rational],
    allowed: impl Fn(usize, usize) -> bool,
) -> (Rational, Vec<Vec<Rational>>) {
    let m = supply.len();
    let k = demand.len();
    // nodes: 0 = source, 1..=m left, m+1..=m+k right, m+k+1 = sink
    let n = m + k + 2;
    let sink = n - 1;
    let mut cap = vec![vec![Rational::zero(); n]; n];
    for (i, s) in supply.iter().enumerate() {
        cap[0][1 + i] = s.clone();
    }
    for (j, d) in demand.iter().enumerate() {
        cap[1 + m + j][sink] = d.clone();
    }
    for i in 0..m {
        for j in 0..k {
            if allowed(i, j) {
                // bounded by the smaller endpoint mass, equivalent to infinity here
                cap[1 + i][1 + m + j] = Rational::min_of(&supply[i], &demand[j]).clone();
            }
        }
    }
    let mut flow = vec![vec![Rational::zero(); n]; n];
    let mut total = Rational::zero();

    loop {
        let mut parent = vec![usize::MAX; n];
        parent[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            if u == sink {
                break;
            }
            for v in 0..n {
                if parent[v] == usize::MAX && cap[u][v] > flow[u][v] {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[sink] == usize::MAX {
            break;
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = sink;
        while v != 0 {
            let u = parent[v];
            let residual = &cap[u][v] - &flow[u][v];
            bottleneck = Some(match bottleneck {
                Some(b) if b <= residual => b,
                _ => residual,
            });
            v = u;
        }
        let b = bottleneck.expect("path has at least one edge");
        let mut v = sink;
        while v != 0 {
            let u = parent[v];
            flow[u][v] += &b;
            flow[v][u] -= &b;
            v = u;
        }
        total += b;
    }

    let matrix = (0..m)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let f = &flow[1 + i][1 + m + j];
                    if f.is_positive() {
                        f.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    (total, matrix)
}
