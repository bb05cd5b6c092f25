//! Finite metric spaces, finitely supported probability measures, couplings
//! and the Prokhorov metric.
//!
//! All distances are rational and the space is finite, so every infimum in
//! the definitions of the Ky Fan functional and of the Prokhorov metric is
//! taken over a step function with finitely many steps. Let
//! `0 = d_0 < d_1 < ... < d_r` be the distinct distances of the space. On the
//! threshold interval `(d_{k-1}, d_k]` the relation `d(x, y) < eps` is the
//! same as `d(x, y) <= d_{k-1}`, so each interval contributes a single
//! candidate `max(d_{k-1}, M_k)` (feasible when it does not exceed `d_k`), and
//! the infimum is the smallest feasible candidate. The last interval
//! `(d_r, inf)` always has `M = 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::bipartite_max_flow;
use crate::rational::Rational;

/// Largest space accepted by [`prokhorov_subsets`].
pub const SUBSET_ORACLE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRecord")]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

#[derive(Deserialize)]
struct SpaceRecord {
    points: Vec<String>,
    dist: Vec<Vec<Rational>>,
}

impl TryFrom<SpaceRecord> for FiniteMetricSpace {
    type Error = Error;
    fn try_from(r: SpaceRecord) -> Result<Self> {
        FiniteMetricSpace::new(r.points, r.dist)
    }
}

impl FiniteMetricSpace {
    /// Validates the metric axioms; the error names the violated axiom and a
    /// witness.
    pub fn new(points: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<Self> {
        let m = points.len();
        if m == 0 {
            return Err(Error::Metric("space has no points".into()));
        }
        if dist.len() != m || dist.iter().any(|row| row.len() != m) {
            return Err(Error::Metric(format!("distance matrix is not {m}x{m}")));
        }
        for i in 0..m {
            if points[i + 1..].contains(&points[i]) {
                return Err(Error::Metric(format!(
                    "duplicate point identifier {:?}",
                    points[i]
                )));
            }
        }
        for i in 0..m {
            if !dist[i][i].is_zero() {
                return Err(Error::Metric(format!(
                    "nonzero diagonal d({0},{0}) = {1}",
                    points[i], dist[i][i]
                )));
            }
            for j in 0..m {
                if dist[i][j] != dist[j][i] {
                    return Err(Error::Metric(format!(
                        "asymmetry: d({},{}) = {} but d({},{}) = {}",
                        points[i], points[j], dist[i][j], points[j], points[i], dist[j][i]
                    )));
                }
                if i != j && !dist[i][j].is_positive() {
                    return Err(Error::Metric(format!(
                        "distinct points {} and {} at distance {}",
                        points[i], points[j], dist[i][j]
                    )));
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if dist[a][c] > &dist[a][b] + &dist[b][c] {
                        return Err(Error::Metric(format!(
                            "triangle inequality violated at ({},{},{}): d({},{}) = {} > {} + {}",
                            points[a],
                            points[b],
                            points[c],
                            points[a],
                            points[c],
                            dist[a][c],
                            dist[a][b],
                            dist[b][c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { points, dist })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.points.iter().position(|p| p == label)
    }

    /// Sorted distinct distances, starting with 0.
    pub fn distinct_distances(&self) -> Vec<Rational> {
        let mut d: Vec<Rational> = self.dist.iter().flatten().cloned().collect();
        d.sort();
        d.dedup();
        d
    }
}

/// Free-function form of [`FiniteMetricSpace::new`].
pub fn validate_space(points: Vec<String>, dist: Vec<Vec<Rational>>) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::new(points, dist)
}

pub(crate) fn same_space(a: &Arc<FiniteMetricSpace>, b: &Arc<FiniteMetricSpace>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub(crate) fn ensure_same_space(
    a: &Arc<FiniteMetricSpace>,
    b: &Arc<FiniteMetricSpace>,
    what: &str,
) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(what.to_string()))
    }
}

/// Probability measure on a finite metric space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    space: Arc<FiniteMetricSpace>,
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(space: Arc<FiniteMetricSpace>, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::Domain(format!(
                "{} weights for a {}-point space",
                weights.len(),
                space.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::Domain(format!("negative weight {w}")));
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        Ok(Measure { space, weights })
    }

    /// Point mass at the `i`-th point.
    pub fn dirac(space: Arc<FiniteMetricSpace>, i: usize) -> Self {
        let mut weights = vec![Rational::zero(); space.len()];
        weights[i] = Rational::one();
        Measure { space, weights }
    }

    pub(crate) fn from_parts_unchecked(
        space: Arc<FiniteMetricSpace>,
        weights: Vec<Rational>,
    ) -> Self {
        debug_assert_eq!(weights.iter().sum::<Rational>(), Rational::one());
        Measure { space, weights }
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &Rational {
        &self.weights[i]
    }

    /// `(1 - t) * self + t * other`.
    pub fn mixture(&self, other: &Measure, t: &Rational) -> Result<Measure> {
        ensure_same_space(&self.space, &other.space, "mixture of measures")?;
        if t.is_negative() || t > &Rational::one() {
            return Err(Error::Domain(format!(
                "mixture parameter {t} outside [0,1]"
            )));
        }
        let s = Rational::one() - t;
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| &s * a + t * b)
            .collect();
        Ok(Measure {
            space: self.space.clone(),
            weights,
        })
    }
}

/// Free-function form of [`Measure::mixture`].
pub fn mixture(mu: &Measure, nu: &Measure, t: &Rational) -> Result<Measure> {
    mu.mixture(nu, t)
}

/// Joint probability on `S x S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingMatrix {
    space: Arc<FiniteMetricSpace>,
    mass: Vec<Vec<Rational>>,
}

impl CouplingMatrix {
    pub fn new(space: Arc<FiniteMetricSpace>, mass: Vec<Vec<Rational>>) -> Result<Self> {
        let m = space.len();
        if mass.len() != m || mass.iter().any(|r| r.len() != m) {
            return Err(Error::Domain(format!("coupling matrix is not {m}x{m}")));
        }
        if mass.iter().flatten().any(Rational::is_negative) {
            return Err(Error::Domain("coupling has a negative entry".into()));
        }
        let total: Rational = mass.iter().flatten().sum();
        if total != Rational::one() {
            return Err(Error::Domain(format!("coupling has total mass {total}")));
        }
        Ok(CouplingMatrix { space, mass })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn mass(&self) -> &[Vec<Rational>] {
        &self.mass
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.mass[i][j]
    }

    pub fn row_marginal(&self) -> Measure {
        let w = self.mass.iter().map(|row| row.iter().sum()).collect();
        Measure::from_parts_unchecked(self.space.clone(), w)
    }

    pub fn column_marginal(&self) -> Measure {
        let m = self.space.len();
        let w = (0..m)
            .map(|j| self.mass.iter().map(|row| &row[j]).sum())
            .collect();
        Measure::from_parts_unchecked(self.space.clone(), w)
    }

    /// `inf{eps > 0 : pi{d >= eps} <= eps}`.
    pub fn kyfan_functional(&self) -> Rational {
        kyfan_functional(self)
    }
}

/// Smallest feasible candidate over the threshold intervals, where
/// `excess(k)` is the step value on `(d_{k-1}, d_k]` (and `0` past `d_r`).
fn step_infimum(
    thresholds: &[Rational],
    mut excess: impl FnMut(usize) -> Rational,
) -> (Rational, usize) {
    let mut best: Option<(Rational, usize)> = None;
    for k in 1..=thresholds.len() {
        let left = &thresholds[k - 1];
        let value = if k < thresholds.len() {
            excess(k)
        } else {
            Rational::zero()
        };
        let candidate = Rational::max_of(left, &value).clone();
        let feasible = k == thresholds.len() || candidate <= thresholds[k];
        if feasible && best.as_ref().is_none_or(|(b, _)| &candidate < b) {
            best = Some((candidate, k));
        }
    }
    best.expect("the last threshold interval is always feasible")
}

/// `inf{eps > 0 : pi{(x,y) : d(x,y) >= eps} <= eps}`, exactly.
pub fn kyfan_functional(pi: &CouplingMatrix) -> Rational {
    let space = &pi.space;
    let thresholds = space.distinct_distances();
    let m = space.len();
    step_infimum(&thresholds, |k| {
        let below = &thresholds[k - 1];
        let mut total = Rational::zero();
        for i in 0..m {
            for j in 0..m {
                if space.dist(i, j) > below {
                    total += &pi.mass[i][j];
                }
            }
        }
        total
    })
    .0
}

/// Prokhorov distance through optimal couplings, with a witness coupling
/// whose Ky Fan functional equals the distance.
///
/// On `(d_{k-1}, d_k]` the least mass a coupling must put on pairs with
/// `d >= eps` is `1 - Phi`, where `Phi` is the max flow from `mu` to `nu`
/// through pairs with `d <= d_{k-1}`.
pub fn prokhorov_coupling(mu: &Measure, nu: &Measure) -> Result<(Rational, CouplingMatrix)> {
    ensure_same_space(&mu.space, &nu.space, "prokhorov distance")?;
    let space = &mu.space;
    let thresholds = space.distinct_distances();
    let mut flows: Vec<Option<Vec<Vec<Rational>>>> = vec![None; thresholds.len() + 1];
    let (value, k_best) = step_infimum(&thresholds, |k| {
        let below = thresholds[k - 1].clone();
        let (phi, flow) =
            bipartite_max_flow(&mu.weights, &nu.weights, |i, j| space.dist(i, j) <= &below);
        flows[k] = Some(flow);
        Rational::one() - phi
    });
    let routed = match flows[k_best].take() {
        Some(f) => f,
        // past the largest distance every pair is cheap
        None => bipartite_max_flow(&mu.weights, &nu.weights, |_, _| true).1,
    };
    let mass = northwest_fill(routed, &mu.weights, &nu.weights);
    let pi = CouplingMatrix {
        space: space.clone(),
        mass,
    };
    debug_assert_eq!(kyfan_functional(&pi), value);
    Ok((value, pi))
}

/// Completes a partial transport plan to the given marginals by filling the
/// leftover row and column masses in row-major (northwest corner) order.
fn northwest_fill(
    mut mass: Vec<Vec<Rational>>,
    rows: &[Rational],
    cols: &[Rational],
) -> Vec<Vec<Rational>> {
    let mut row_left: Vec<Rational> = rows
        .iter()
        .zip(&mass)
        .map(|(r, row)| r - row.iter().sum::<Rational>())
        .collect();
    let mut col_left: Vec<Rational> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| c - mass.iter().map(|row| &row[j]).sum::<Rational>())
        .collect();
    let (mut i, mut j) = (0, 0);
    while i < rows.len() && j < cols.len() {
        if row_left[i].is_zero() {
            i += 1;
            continue;
        }
        if col_left[j].is_zero() {
            j += 1;
            continue;
        }
        let amount = Rational::min_of(&row_left[i], &col_left[j]).clone();
        mass[i][j] += &amount;
        row_left[i] -= &amount;
        col_left[j] -= &amount;
    }
    mass
}

/// Prokhorov distance.
pub fn prokhorov(mu: &Measure, nu: &Measure) -> Result<Rational> {
    Ok(prokhorov_coupling(mu, nu)?.0)
}

/// Prokhorov distance straight from the closed-set definition, by enumerating
/// every subset `A` of the space, with `A^eps = {x : d(x, A) < eps}`.
///
/// Exponential in the number of points; refused above [`SUBSET_ORACLE_LIMIT`].
pub fn prokhorov_subsets(mu: &Measure, nu: &Measure) -> Result<Rational> {
    ensure_same_space(&mu.space, &nu.space, "prokhorov subset oracle")?;
    let space = &mu.space;
    let m = space.len();
    if m > SUBSET_ORACLE_LIMIT {
        return Err(Error::OracleTooLarge {
            points: m,
            limit: SUBSET_ORACLE_LIMIT,
        });
    }
    let subsets = 1usize << m;
    let mass_table = |w: &[Rational]| {
        let mut t = vec![Rational::zero(); subsets];
        for mask in 1..subsets {
            let low = mask.trailing_zeros() as usize;
            t[mask] = &t[mask & (mask - 1)] + &w[low];
        }
        t
    };
    let mu_of = mass_table(&mu.weights);
    let nu_of = mass_table(&nu.weights);
    let thresholds = space.distinct_distances();
    let mut neighborhood = vec![0usize; subsets];
    Ok(step_infimum(&thresholds, |k| {
        let radius = &thresholds[k - 1];
        let balls: Vec<usize> = (0..m)
            .map(|x| {
                (0..m)
                    .filter(|&y| space.dist(x, y) <= radius)
                    .fold(0, |acc, y| acc | (1 << y))
            })
            .collect();
        let mut worst = Rational::zero();
        for mask in 1..subsets {
            let low = mask.trailing_zeros() as usize;
            neighborhood[mask] = neighborhood[mask & (mask - 1)] | balls[low];
            let gap = &mu_of[mask] - &nu_of[neighborhood[mask]];
            if gap > worst {
                worst = gap;
            }
        }
        worst
    })
    .0)
}
