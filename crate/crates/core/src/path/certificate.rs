use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metric::prokhorov;
use crate::path::lifted::LiftedPath;
use crate::path::{verification_grid, LawPath};
use crate::rational::Rational;
use crate::srv::{kyfan_rho, SimpleRandomVariable};

/// Refinement history of an iterated lift.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LiftHistory {
    /// Bound the final law gap must respect (the requested tolerance, or 0
    /// for an exact lift of a polygonal target).
    pub law_gap_bound: Rational,
    /// Approximation tolerance of each round.
    pub epsilons: Vec<Rational>,
    /// Sup over the grid of the Ky Fan distance between successive lifts.
    pub decay_table: Vec<Rational>,
    /// `5 (eps_n + eps_{n+1})` for each relift.
    pub decay_budget: Vec<Rational>,
}

/// Exact evidence that a lift realizes a target law path.
///
/// The grid always contains every breakpoint of the lift, so each grid step
/// lies inside one segment lift of length `len`; on it the lift moves at most
/// `step / len` in Ky Fan distance (`continuity_lipschitz_bound`). Between two
/// grid points the distance to either neighbour is at most the table entry
/// plus `2 step / len` (`continuity_between_grid`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub grid: Vec<Rational>,
    pub max_law_gap: Rational,
    pub law_gap_bound: Rational,
    pub continuity_table: Vec<Rational>,
    pub continuity_lipschitz_bound: Vec<Rational>,
    pub continuity_between_grid: Vec<Rational>,
    /// Start and end checks.
    pub endpoint_ok: [bool; 2],
    pub epsilons: Vec<Rational>,
    pub decay_table: Vec<Rational>,
    pub decay_budget: Vec<Rational>,
}

impl Certificate {
    /// Replaces the law-level endpoint checks by identity with prescribed
    /// endpoint variables.
    pub fn prescribe_endpoints(
        mut self,
        lift: &LiftedPath,
        start: &SimpleRandomVariable,
        end: &SimpleRandomVariable,
    ) -> Self {
        self.endpoint_ok = [lift.start() == start, lift.end() == end];
        self
    }

    pub fn with_history(mut self, history: &LiftHistory) -> Self {
        self.law_gap_bound = history.law_gap_bound.clone();
        self.epsilons = history.epsilons.clone();
        self.decay_table = history.decay_table.clone();
        self.decay_budget = history.decay_budget.clone();
        self
    }

    pub fn law_gap_ok(&self) -> bool {
        self.max_law_gap <= self.law_gap_bound
    }

    pub fn continuity_ok(&self) -> bool {
        self.continuity_table
            .iter()
            .zip(&self.continuity_lipschitz_bound)
            .all(|(r, b)| r <= b)
    }

    pub fn decay_ok(&self) -> bool {
        self.decay_table.len() == self.decay_budget.len()
            && self
                .decay_table
                .iter()
                .zip(&self.decay_budget)
                .all(|(d, b)| d <= b)
    }

    /// Every recorded bound holds.
    pub fn holds(&self) -> bool {
        self.law_gap_ok()
            && self.continuity_ok()
            && self.decay_ok()
            && self.endpoint_ok.iter().all(|&b| b)
    }
}

/// Evaluates `lift` against `target` on `grid_n + 1` uniform points plus all
/// breakpoints of both.
///
/// The law gap bound starts at 0 and `endpoint_ok` compares endpoint laws
/// with the target; see [`Certificate::with_history`] and
/// [`Certificate::prescribe_endpoints`].
pub fn verify_lift(lift: &LiftedPath, target: &dyn LawPath, grid_n: usize) -> Result<Certificate> {
    let grid = verification_grid(grid_n, &[lift.breakpoints(), &target.breakpoints()]);
    let values = grid
        .par_iter()
        .map(|t| lift.eval(t))
        .collect::<Result<Vec<_>>>()?;
    let gaps = grid
        .par_iter()
        .zip(&values)
        .map(|(t, x)| prokhorov(&x.law(), &target.law_at(t)?))
        .collect::<Result<Vec<_>>>()?;
    let max_law_gap = gaps.into_iter().max().unwrap_or_default();

    let steps: Vec<usize> = (1..grid.len()).collect();
    let continuity_table = steps
        .par_iter()
        .map(|&k| kyfan_rho(&values[k - 1], &values[k]))
        .collect::<Result<Vec<_>>>()?;
    let mut continuity_lipschitz_bound = Vec::with_capacity(steps.len());
    let mut continuity_between_grid = Vec::with_capacity(steps.len());
    for (&k, rho) in steps.iter().zip(&continuity_table) {
        let step = &grid[k] - &grid[k - 1];
        let piece = &lift.pieces()[lift.piece_index(&grid[k - 1])?];
        let rate = &step / piece.length();
        continuity_between_grid.push(rho + Rational::from_integer(2) * &rate);
        continuity_lipschitz_bound.push(rate);
    }

    let start_law = target.law_at(&Rational::zero())?;
    let end_law = target.law_at(&Rational::one())?;
    Ok(Certificate {
        grid,
        max_law_gap,
        law_gap_bound: Rational::zero(),
        continuity_table,
        continuity_lipschitz_bound,
        continuity_between_grid,
        endpoint_ok: [lift.start().law() == start_law, lift.end().law() == end_law],
        epsilons: Vec::new(),
        decay_table: Vec::new(),
        decay_budget: Vec::new(),
    })
}
