//! Multi-affine interpolation on `[0,1]^n` and its lift.
//!
//! `g(mu_1, mu_2)(t_1) = (1 - t_1) mu_1 + t_1 mu_2`, and each further corner
//! is mixed in along a new axis:
//! `g(mu_1..mu_{n+1})(t, t_{n+1}) = (1 - t_{n+1}) g(mu_1..mu_n)(t) + t_{n+1} mu_{n+1}`.
//!
//! The lift mirrors the recursion. The one-dimensional lift is a segment lift
//! between the canonical variables of `mu_1` and `mu_2`. Given the level-`n`
//! value with blocks `A_i(t)` and the canonical variable `X_{n+1}` of
//! `mu_{n+1}` with blocks `B_j`, form `E_ij(t) = A_i(t) ∩ B_j` and move the
//! part `[E_ij]_gamma` of mass `gamma = t_{n+1} e_ij(t)` from value `a_i` to
//! value `a_j`. The nested family is cut through the prefixes of `B_j`:
//! `[E_ij]_gamma = E_ij ∩ prefix(B_j, s*)` with `s*` the largest `s` for which
//! `P(E_ij ∩ prefix(B_j, s)) = gamma`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{ensure_same_space, prokhorov, FiniteMetricSpace, Measure};
use crate::omega::IntervalSet;
use crate::path::SegmentLift;
use crate::rational::Rational;
use crate::srv::{canonical_rv, kyfan_rho, SimpleRandomVariable};

/// Dimension cap for the lift.
pub const MAX_DIMENSION: usize = 3;
pub const DEFAULT_CUBE_GRID: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeInterpolation {
    corners: Vec<Measure>,
}

impl CubeInterpolation {
    pub fn new(corners: Vec<Measure>) -> Result<Self> {
        if corners.len() < 2 {
            return Err(Error::Domain(
                "cube interpolation needs at least two corner measures".into(),
            ));
        }
        for c in &corners[1..] {
            ensure_same_space(corners[0].space(), c.space(), "cube corners")?;
        }
        Ok(CubeInterpolation { corners })
    }

    pub fn dimension(&self) -> usize {
        self.corners.len() - 1
    }

    pub fn corners(&self) -> &[Measure] {
        &self.corners
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        self.corners[0].space()
    }

    fn check_point(&self, t: &[Rational]) -> Result<()> {
        if t.len() != self.dimension() {
            return Err(Error::Domain(format!(
                "point has {} coordinates, cube has dimension {}",
                t.len(),
                self.dimension()
            )));
        }
        if let Some(c) = t.iter().find(|c| c.is_negative() || *c > &Rational::one()) {
            return Err(Error::Domain(format!("coordinate {c} outside [0,1]")));
        }
        Ok(())
    }

    pub fn eval(&self, t: &[Rational]) -> Result<Measure> {
        self.check_point(t)?;
        let mut mu = self.corners[0].mixture(&self.corners[1], &t[0])?;
        for (k, tk) in t.iter().enumerate().skip(1) {
            mu = mu.mixture(&self.corners[k + 1], tk)?;
        }
        Ok(mu)
    }
}

/// Free-function form of [`CubeInterpolation::eval`].
pub fn g_eval(c: &CubeInterpolation, t: &[Rational]) -> Result<Measure> {
    c.eval(t)
}

/// Lift of a [`CubeInterpolation`] built on canonical corner variables.
#[derive(Debug, Clone)]
pub struct CubeLift {
    interpolation: CubeInterpolation,
    base: SegmentLift,
    corner_vars: Vec<SimpleRandomVariable>,
}

impl CubeLift {
    pub fn new(interpolation: CubeInterpolation) -> Result<Self> {
        if interpolation.dimension() > MAX_DIMENSION {
            return Err(Error::Domain(format!(
                "cube lift supports dimension at most {MAX_DIMENSION}, got {}",
                interpolation.dimension()
            )));
        }
        let corner_vars: Vec<SimpleRandomVariable> =
            interpolation.corners.iter().map(canonical_rv).collect();
        let base = SegmentLift::new(
            corner_vars[0].clone(),
            corner_vars[1].clone(),
            Rational::zero(),
            Rational::one(),
        )?;
        Ok(CubeLift {
            interpolation,
            base,
            corner_vars,
        })
    }

    pub fn interpolation(&self) -> &CubeInterpolation {
        &self.interpolation
    }

    pub fn corner_variable(&self, k: usize) -> &SimpleRandomVariable {
        &self.corner_vars[k]
    }

    pub fn eval(&self, t: &[Rational]) -> Result<SimpleRandomVariable> {
        self.interpolation.check_point(t)?;
        let mut x = self.base.eval(&t[0])?;
        for (k, tk) in t.iter().enumerate().skip(1) {
            x = transfer(&x, &self.corner_vars[k + 1], tk)?;
        }
        Ok(x)
    }
}

/// Free-function form of [`CubeLift::eval`] for one-off evaluations.
pub fn g_lift_eval(c: &CubeInterpolation, t: &[Rational]) -> Result<SimpleRandomVariable> {
    CubeLift::new(c.clone())?.eval(t)
}

/// One inductive step: moves the fraction `t` of every cell `A_i ∩ B_j` to
/// value `a_j`, cutting each cell along the prefixes of `B_j`.
fn transfer(
    a: &SimpleRandomVariable,
    b: &SimpleRandomVariable,
    t: &Rational,
) -> Result<SimpleRandomVariable> {
    if t.is_zero() {
        return Ok(a.clone());
    }
    let m = a.space().len();
    let mut blocks = vec![IntervalSet::empty(); m];
    for i in 0..m {
        for j in 0..m {
            let base = b.block(j);
            let cell = a.block(i).intersect(base);
            if cell.is_empty() {
                continue;
            }
            if i == j {
                blocks[i] = blocks[i].union(&cell);
                continue;
            }
            let gamma = t * cell.measure();
            let s = cell.inverse_prefix_mass(base, &gamma)?;
            let moved = cell.intersect(&base.prefix(&s)?);
            let stayed = cell.difference(&moved);
            blocks[j] = blocks[j].union(&moved);
            blocks[i] = blocks[i].union(&stayed);
        }
    }
    SimpleRandomVariable::new(a.space().clone(), blocks)
        .map_err(|e| Error::Invariant(format!("cube transfer lost the partition property: {e}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubePoint {
    pub t: Vec<Rational>,
    pub law_gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeEdge {
    pub from: Vec<Rational>,
    pub axis: usize,
    pub rho: Rational,
}

/// Law gaps at every grid point and Ky Fan distances between grid neighbours.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeReport {
    pub dimension: usize,
    pub grid: usize,
    pub max_law_gap: Rational,
    pub max_adjacent_rho: Rational,
    pub points: Vec<CubePoint>,
    pub adjacent_rho: Vec<CubeEdge>,
}

/// Evaluates the lift on the uniform grid with `grid` points per axis.
pub fn cube_report(lift: &CubeLift, grid: usize) -> Result<CubeReport> {
    if grid < 2 {
        return Err(Error::Domain(
            "cube grid needs at least 2 points per axis".into(),
        ));
    }
    let n = lift.interpolation.dimension();
    let axis: Vec<Rational> = (0..grid)
        .map(|k| Rational::new(k as i64, grid as i64 - 1))
        .collect();
    let total = grid.pow(n as u32);
    let index_of = |digits: &[usize]| digits.iter().rev().fold(0, |acc, &d| acc * grid + d);
    let digits_of = |mut idx: usize| {
        (0..n)
            .map(|_| {
                let d = idx % grid;
                idx /= grid;
                d
            })
            .collect::<Vec<_>>()
    };
    let evaluated = (0..total)
        .into_par_iter()
        .map(|idx| {
            let t: Vec<Rational> = digits_of(idx).iter().map(|&d| axis[d].clone()).collect();
            let x = lift.eval(&t)?;
            let gap = prokhorov(&x.law(), &lift.interpolation.eval(&t)?)?;
            Ok((t, x, gap))
        })
        .collect::<Result<Vec<_>>>()?;

    let edges = (0..total)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let digits = digits_of(idx);
            (0..n)
                .filter(move |&k| digits[k] + 1 < grid)
                .map(move |k| (idx, k))
        })
        .map(|(idx, k)| {
            let mut next = digits_of(idx);
            next[k] += 1;
            let rho = kyfan_rho(&evaluated[idx].1, &evaluated[index_of(&next)].1)?;
            Ok(CubeEdge {
                from: evaluated[idx].0.clone(),
                axis: k,
                rho,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let points: Vec<CubePoint> = evaluated
        .into_iter()
        .map(|(t, _, law_gap)| CubePoint { t, law_gap })
        .collect();
    Ok(CubeReport {
        dimension: n,
        grid,
        max_law_gap: points
            .iter()
            .map(|p| p.law_gap.clone())
            .max()
            .unwrap_or_default(),
        max_adjacent_rho: edges
            .iter()
            .map(|e| e.rho.clone())
            .max()
            .unwrap_or_default(),
        points,
        adjacent_rho: edges,
    })
}
