//! Seeded generators of random instances for property suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::metric::{FiniteMetricSpace, Measure};
use crate::omega::IntervalSet;
use crate::path::{lift_polygonal, LiftedPath, PolygonalPath, SampledPath};
use crate::rational::Rational;
use crate::srv::{canonical_rv, match_to_law, SimpleRandomVariable};

/// Shortest-path metric of a complete graph with edge weights `k/8`,
/// `k in 1..=8`, on `m` points named `p0, p1, ..`.
pub fn random_space<R: Rng>(rng: &mut R, m: usize) -> Arc<FiniteMetricSpace> {
    let mut d = vec![vec![Rational::zero(); m]; m];
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    for (i, j) in pairs {
        let w = Rational::new(rng.gen_range(1..=8), 8);
        d[i][j] = w.clone();
        d[j][i] = w;
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let points = (0..m).map(|i| format!("p{i}")).collect();
    Arc::new(FiniteMetricSpace::new(points, d).expect("shortest-path distances form a metric"))
}

/// Random weights, some of them zero.
pub fn random_measure<R: Rng>(rng: &mut R, space: &Arc<FiniteMetricSpace>) -> Measure {
    let m = space.len();
    let mut raw: Vec<i64> = (0..m)
        .map(|_| {
            if rng.gen_bool(0.25) {
                0
            } else {
                rng.gen_range(1..=6)
            }
        })
        .collect();
    if raw.iter().all(|&w| w == 0) {
        raw[rng.gen_range(0..m)] = 1;
    }
    let total: i64 = raw.iter().sum();
    Measure::new(
        space.clone(),
        raw.into_iter().map(|w| Rational::new(w, total)).collect(),
    )
    .expect("normalized")
}

/// Rational in `[0,1]` with denominator at most 12.
pub fn random_time<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(1..=12);
    Rational::new(rng.gen_range(0..=d), d)
}

/// Rational in `(0,1)` with denominator at most 12.
pub fn random_interior_time<R: Rng>(rng: &mut R) -> Rational {
    let d = rng.gen_range(2..=12);
    Rational::new(rng.gen_range(1..d), d)
}

/// `[0,1)` cut at up to 6 random points, each piece given a random label.
pub fn random_srv<R: Rng>(rng: &mut R, space: &Arc<FiniteMetricSpace>) -> SimpleRandomVariable {
    let mut cuts: Vec<Rational> = (0..rng.gen_range(0..=6))
        .map(|_| random_interior_time(rng))
        .collect();
    cuts.push(Rational::zero());
    cuts.push(Rational::one());
    cuts.sort();
    cuts.dedup();
    let mut blocks = vec![IntervalSet::empty(); space.len()];
    for w in cuts.windows(2) {
        let label = rng.gen_range(0..space.len());
        blocks[label] = blocks[label]
            .union(&IntervalSet::interval(w[0].clone(), w[1].clone()).expect("ordered cut"));
    }
    SimpleRandomVariable::new(space.clone(), blocks).expect("cuts partition [0,1)")
}

/// Random variable with law `nu`, usually not the canonical one.
pub fn random_srv_with_law<R: Rng>(rng: &mut R, nu: &Measure) -> SimpleRandomVariable {
    if rng.gen_bool(0.2) {
        return canonical_rv(nu);
    }
    match_to_law(&random_srv(rng, nu.space()), nu).expect("same space")
}

/// `n` strictly increasing times from 0 to 1 with interior points of
/// denominator at most 24.
pub fn random_breakpoints<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    assert!(n >= 2);
    let mut pool: Vec<i64> = (1..24).collect();
    pool.shuffle(rng);
    let mut times: Vec<Rational> = pool[..n - 2]
        .iter()
        .map(|&k| Rational::new(k, 24))
        .collect();
    times.push(Rational::zero());
    times.push(Rational::one());
    times.sort();
    times
}

pub fn random_polygonal<R: Rng>(
    rng: &mut R,
    space: &Arc<FiniteMetricSpace>,
    n_vertices: usize,
) -> PolygonalPath {
    let times = random_breakpoints(rng, n_vertices);
    let vertices = (0..n_vertices)
        .map(|_| random_measure(rng, space))
        .collect();
    PolygonalPath::new(times, vertices).expect("valid breakpoints")
}

/// Total variation distance, an upper bound for the Prokhorov distance.
pub fn total_variation(mu: &Measure, nu: &Measure) -> Rational {
    let sum: Rational = mu
        .weights()
        .iter()
        .zip(nu.weights())
        .map(|(a, b)| (a - b).abs())
        .sum();
    sum * Rational::new(1, 2)
}

/// Sampled path interpolating a random table, with `L` the largest total
/// variation rate over its legs (so `L <= max_rate`).
pub fn random_lipschitz_path<R: Rng>(
    rng: &mut R,
    space: &Arc<FiniteMetricSpace>,
    max_rate: &Rational,
) -> SampledPath {
    let legs = rng.gen_range(2..=5);
    let times: Vec<Rational> = (0..=legs).map(|k| Rational::new(k, legs)).collect();
    let step = Rational::new(1, legs);
    let mut vertices = vec![random_measure(rng, space)];
    let mut rate = Rational::zero();
    for _ in 0..legs {
        let prev = vertices.last().expect("non-empty").clone();
        let target = random_measure(rng, space);
        // tv(prev, mix(s)) = s * tv(prev, target) <= s
        let cap = Rational::min_of(&(max_rate * &step), &Rational::one()).clone();
        let s = &cap * Rational::new(rng.gen_range(1..=4), 4);
        let next = prev.mixture(&target, &s).expect("same space");
        let leg_rate = total_variation(&prev, &next) / &step;
        if leg_rate > rate {
            rate = leg_rate;
        }
        vertices.push(next);
    }
    let table = PolygonalPath::new(times, vertices).expect("uniform breakpoints");
    SampledPath::from_table(table, rate).expect("non-negative rate")
}

/// An input for `relift_near` that meets its precondition.
#[derive(Debug, Clone)]
pub struct ReliftInstance {
    pub prev: LiftedPath,
    pub beta: PolygonalPath,
    pub eps: Rational,
}

/// `prev` lifts a random polygonal `gamma` and `beta = (1 - eps) gamma + eps
/// eta` for another random polygonal `eta`. `beta` is affine between merged
/// breakpoints and `q(gamma(t), beta(t)) <= tv <= eps` for all `t`.
pub fn random_relift_instance<R: Rng>(
    rng: &mut R,
    space: &Arc<FiniteMetricSpace>,
) -> ReliftInstance {
    let n = rng.gen_range(2..=5);
    let gamma = random_polygonal(rng, space, n);
    let start = random_srv_with_law(rng, gamma.start());
    let end = random_srv_with_law(rng, gamma.end());
    let prev = lift_polygonal(&gamma, &start, &end).expect("laws match");

    let eta = {
        let n = rng.gen_range(2..=4);
        random_polygonal(rng, space, n)
    };
    let eps = Rational::new(rng.gen_range(1..=6), 12);
    let mut times: Vec<Rational> = gamma
        .breakpoints()
        .iter()
        .chain(eta.breakpoints())
        .cloned()
        .collect();
    times.sort();
    times.dedup();
    let last = times.len() - 1;
    let vertices = times
        .iter()
        .enumerate()
        .map(|(k, t)| {
            // beta keeps gamma's endpoint laws so prev's endpoints stay valid
            let g = gamma.eval(t).expect("t in [0,1]");
            if k == 0 || k == last {
                g
            } else {
                g.mixture(&eta.eval(t).expect("t in [0,1]"), &eps)
                    .expect("same space")
            }
        })
        .collect();
    let beta = PolygonalPath::new(times, vertices).expect("merged breakpoints");
    ReliftInstance { prev, beta, eps }
}
