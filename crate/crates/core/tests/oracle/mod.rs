//! Brute-force reference computations, written independently of the library
//! algorithms.
//!
//! Both metrics are infima of upward-closed sets of the form
//! `{eps : F(eps) <= eps}` with `F` non-increasing. The infimum `c` satisfies
//! the right-limit condition `F(c+) <= c`, and it is one of finitely many
//! candidates: a jump point of `F` or a value `F(c+)` itself.
#![allow(dead_code)]

use measure_lift::{FiniteMetricSpace, IntervalSet, Measure, Rational, SimpleRandomVariable};

/// Prokhorov distance by enumeration of all subsets `A`, using
/// `F(c+) = max_A mu(A) - nu({y : d(y, A) <= c})`.
pub fn q(mu: &Measure, nu: &Measure) -> Rational {
    let s = mu.space();
    let m = s.len();
    assert!(m <= 16, "oracle is exponential");
    let mut candidates: Vec<Rational> = vec![Rational::zero()];
    for i in 0..m {
        for j in 0..m {
            candidates.push(s.dist(i, j).clone());
        }
    }
    candidates.sort();
    candidates.dedup();
    let excess_after = |c: &Rational| -> Rational {
        let mut best = Rational::zero();
        for mask in 1u32..(1 << m) {
            let mass_a: Rational = (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| mu.weight(i).clone())
                .sum();
            let mass_nbhd: Rational = (0..m)
                .filter(|&y| (0..m).any(|x| mask >> x & 1 == 1 && s.dist(x, y) <= c))
                .map(|y| nu.weight(y).clone())
                .sum();
            let e = mass_a - mass_nbhd;
            if e > best {
                best = e;
            }
        }
        best
    };
    let extra: Vec<Rational> = candidates.iter().map(&excess_after).collect();
    candidates.extend(extra);
    candidates.sort();
    candidates.dedup();
    candidates
        .into_iter()
        .find(|c| excess_after(c) <= *c)
        .expect("the largest distance is always feasible")
}

/// Values of `x` and `y` on each elementary interval of the common
/// refinement of their blocks, found by probing interval midpoints.
pub fn joint_cells(
    x: &SimpleRandomVariable,
    y: &SimpleRandomVariable,
) -> Vec<(usize, usize, Rational)> {
    let mut cuts = vec![Rational::zero(), Rational::one()];
    for b in x.blocks().iter().chain(y.blocks()) {
        for (l, r) in b.intervals() {
            cuts.push(l.clone());
            cuts.push(r.clone());
        }
    }
    cuts.sort();
    cuts.dedup();
    let label = |v: &SimpleRandomVariable, p: &Rational| {
        let hits: Vec<usize> = (0..v.blocks().len())
            .filter(|&i| v.blocks()[i].contains(p))
            .collect();
        assert_eq!(hits.len(), 1, "blocks must partition [0,1)");
        hits[0]
    };
    cuts.windows(2)
        .map(|w| {
            let mid = (&w[0] + &w[1]) * Rational::new(1, 2);
            (label(x, &mid), label(y, &mid), &w[1] - &w[0])
        })
        .collect()
}

/// Ky Fan distance from the distribution of `D = d(x, y)`, using
/// `F(c+) = P(D > c)`.
pub fn rho(x: &SimpleRandomVariable, y: &SimpleRandomVariable) -> Rational {
    let s = x.space();
    let cells: Vec<(Rational, Rational)> = joint_cells(x, y)
        .into_iter()
        .map(|(i, j, len)| (s.dist(i, j).clone(), len))
        .collect();
    let tail = |c: &Rational| -> Rational {
        cells
            .iter()
            .filter(|(d, _)| d > c)
            .map(|(_, l)| l.clone())
            .sum()
    };
    let mut candidates: Vec<Rational> = vec![Rational::zero()];
    candidates.extend(cells.iter().map(|(d, _)| d.clone()));
    let extra: Vec<Rational> = candidates.iter().map(&tail).collect();
    candidates.extend(extra);
    candidates.sort();
    candidates.dedup();
    candidates
        .into_iter()
        .find(|c| tail(c) <= *c)
        .expect("the largest distance is feasible")
}

/// Law by summing the lengths of the elementary intervals.
pub fn law(x: &SimpleRandomVariable) -> Vec<Rational> {
    let mut w = vec![Rational::zero(); x.space().len()];
    for (i, _, len) in joint_cells(x, x) {
        w[i] += len;
    }
    w
}

pub fn mix(a: &[Rational], b: &[Rational], t: &Rational) -> Vec<Rational> {
    a.iter()
        .zip(b)
        .map(|(u, v)| (Rational::one() - t) * u + t * v)
        .collect()
}

/// `P(E)` from the interval list.
pub fn length(e: &IntervalSet) -> Rational {
    e.intervals().iter().map(|(l, r)| r - l).sum()
}

pub fn space_from(points: &[&str], dist: &[&[(i64, i64)]]) -> std::sync::Arc<FiniteMetricSpace> {
    let d = dist
        .iter()
        .map(|row| row.iter().map(|&(n, k)| Rational::new(n, k)).collect())
        .collect();
    std::sync::Arc::new(
        FiniteMetricSpace::new(points.iter().map(|p| p.to_string()).collect(), d).unwrap(),
    )
}
