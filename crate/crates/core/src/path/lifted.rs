use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{ensure_same_space, prokhorov, FiniteMetricSpace};
use crate::path::polygonal::{check_unit, validate_breakpoints, PolygonalPath};
use crate::path::segment::SegmentLift;
use crate::path::{verification_grid, LawPath, DEFAULT_GRID};
use crate::rational::Rational;
use crate::srv::{kyfan_rho, match_to_law, SimpleRandomVariable};

/// Chain of segment lifts joined at shared vertex variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPath {
    breakpoints: Vec<Rational>,
    vertices: Vec<SimpleRandomVariable>,
    pieces: Vec<SegmentLift>,
}

impl LiftedPath {
    /// Segment-lifts consecutive vertices over `0 = t_0 < ... < t_n = 1`.
    pub fn from_vertices(
        breakpoints: Vec<Rational>,
        vertices: Vec<SimpleRandomVariable>,
    ) -> Result<Self> {
        validate_breakpoints(&breakpoints)?;
        if vertices.len() != breakpoints.len() {
            return Err(Error::Domain(format!(
                "{} vertex variables for {} breakpoints",
                vertices.len(),
                breakpoints.len()
            )));
        }
        let pieces = (1..breakpoints.len())
            .map(|k| {
                SegmentLift::new(
                    vertices[k - 1].clone(),
                    vertices[k].clone(),
                    breakpoints[k - 1].clone(),
                    breakpoints[k].clone(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LiftedPath {
            breakpoints,
            vertices,
            pieces,
        })
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        self.vertices[0].space()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn vertices(&self) -> &[SimpleRandomVariable] {
        &self.vertices
    }

    pub fn pieces(&self) -> &[SegmentLift] {
        &self.pieces
    }

    pub fn start(&self) -> &SimpleRandomVariable {
        &self.vertices[0]
    }

    pub fn end(&self) -> &SimpleRandomVariable {
        self.vertices.last().expect("at least two vertices")
    }

    /// Index of the piece whose closed interval contains `t`, preferring the
    /// left piece at interior breakpoints.
    pub fn piece_index(&self, t: &Rational) -> Result<usize> {
        check_unit(t)?;
        Ok(match self.breakpoints.binary_search(t) {
            Ok(0) => 0,
            Ok(i) => i - 1,
            Err(i) => i - 1,
        })
    }

    pub fn eval(&self, t: &Rational) -> Result<SimpleRandomVariable> {
        check_unit(t)?;
        match self.breakpoints.binary_search(t) {
            Ok(i) => Ok(self.vertices[i].clone()),
            Err(i) => self.pieces[i - 1].eval(t),
        }
    }

    /// The law path, polygonal through the laws of the vertices.
    pub fn law_path(&self) -> PolygonalPath {
        PolygonalPath::new(
            self.breakpoints.clone(),
            self.vertices
                .iter()
                .map(SimpleRandomVariable::law)
                .collect(),
        )
        .expect("validated at construction")
    }
}

/// Lifts a polygonal with prescribed endpoint variables.
///
/// Interior vertices are chained, `V_{i+1} = match_to_law(V_i, mu_{i+1})`,
/// and the last segment ends at `x_end`.
pub fn lift_polygonal(
    beta: &PolygonalPath,
    x_start: &SimpleRandomVariable,
    x_end: &SimpleRandomVariable,
) -> Result<LiftedPath> {
    ensure_same_space(beta.space(), x_start.space(), "start variable")?;
    ensure_same_space(beta.space(), x_end.space(), "end variable")?;
    if &x_start.law() != beta.start() {
        return Err(Error::Precondition(
            "law of the start variable differs from the path at t = 0".into(),
        ));
    }
    if &x_end.law() != beta.end() {
        return Err(Error::Precondition(
            "law of the end variable differs from the path at t = 1".into(),
        ));
    }
    let n = beta.vertices().len();
    let mut vertices = Vec::with_capacity(n);
    vertices.push(x_start.clone());
    for mu in &beta.vertices()[1..n - 1] {
        let next = match_to_law(vertices.last().expect("non-empty"), mu)?;
        vertices.push(next);
    }
    vertices.push(x_end.clone());
    LiftedPath::from_vertices(beta.breakpoints().to_vec(), vertices)
}

/// Result of [`relift_near`].
#[derive(Debug, Clone)]
pub struct Relift {
    pub lift: LiftedPath,
    /// Largest Ky Fan distance between the old and new lifts over the grid.
    pub sup_rho: Rational,
    /// `5 * eps`.
    pub bound: Rational,
    pub grid: Vec<Rational>,
}

/// Breakpoints of `prev` with each piece cut into `k` equal parts, `k` the
/// least integer with `1/k < eps` (no cuts when `eps` is 0 or above 1).
fn refine(breakpoints: &[Rational], eps: &Rational) -> Vec<Rational> {
    let parts: i64 = if eps.is_zero() || eps > &Rational::one() {
        1
    } else {
        i64::try_from(eps.recip().floor()).expect("refinement factor fits in i64") + 1
    };
    let mut out = Vec::with_capacity((breakpoints.len() - 1) * parts as usize + 1);
    for w in breakpoints.windows(2) {
        let step = (&w[1] - &w[0]) * Rational::new(1, parts);
        for k in 0..parts {
            out.push(&w[0] + &step * Rational::from_integer(k));
        }
    }
    out.push(Rational::one());
    out
}

/// Lifts `beta` within Ky Fan distance `5 eps` of `prev`, keeping the
/// endpoint variables of `prev`.
///
/// `prev`'s pieces are cut so that `prev` moves by less than `eps` on each
/// refined piece (a segment lift moves at rate `1 / length`); the cuts are
/// merged with `beta`'s breakpoints so that `beta` is affine on every refined
/// piece. At interior refined breakpoints `Y_i = match_to_law(prev(t_i),
/// beta(t_i))`, and the new lift joins consecutive `Y_i` by segment lifts.
/// The requirement `q(law(prev(t)), beta(t)) <= eps` is checked on the
/// verification grid (uniform points plus every breakpoint involved).
pub fn relift_near(
    prev: &LiftedPath,
    beta: &PolygonalPath,
    eps: &Rational,
    grid_n: usize,
) -> Result<Relift> {
    ensure_same_space(prev.space(), beta.space(), "relift")?;
    if eps.is_negative() {
        return Err(Error::Domain(format!("negative tolerance {eps}")));
    }
    if &prev.start().law() != beta.start() || &prev.end().law() != beta.end() {
        return Err(Error::Precondition(
            "endpoint laws of the previous lift differ from the target polygonal".into(),
        ));
    }
    let mut refined = refine(prev.breakpoints(), eps);
    refined.extend(beta.breakpoints().iter().cloned());
    refined.sort();
    refined.dedup();

    let grid = verification_grid(grid_n, &[&refined]);
    let prev_values = grid
        .par_iter()
        .map(|t| prev.eval(t))
        .collect::<Result<Vec<_>>>()?;
    let targets = grid
        .par_iter()
        .map(|t| beta.eval(t))
        .collect::<Result<Vec<_>>>()?;
    let gaps = prev_values
        .par_iter()
        .zip(&targets)
        .map(|(x, mu)| prokhorov(&x.law(), mu))
        .collect::<Result<Vec<_>>>()?;
    if let Some((k, gap)) = gaps.iter().enumerate().find(|(_, g)| *g > eps) {
        return Err(Error::Precondition(format!(
            "q(law(prev(t)), beta(t)) = {gap} > {eps} at t = {}",
            grid[k]
        )));
    }

    let last = refined.len() - 1;
    let vertices = refined
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            if i == 0 {
                return Ok(prev.start().clone());
            }
            if i == last {
                return Ok(prev.end().clone());
            }
            let k = grid
                .binary_search(t)
                .expect("refined breakpoints are on the grid");
            match_to_law(&prev_values[k], &targets[k])
        })
        .collect::<Result<Vec<_>>>()?;
    let lift = LiftedPath::from_vertices(refined, vertices)?;

    let rhos = grid
        .par_iter()
        .zip(&prev_values)
        .map(|(t, x)| kyfan_rho(x, &lift.eval(t)?))
        .collect::<Result<Vec<_>>>()?;
    let sup_rho = rhos.into_iter().max().unwrap_or_default();
    let bound = Rational::from_integer(5) * eps;
    if sup_rho > bound {
        return Err(Error::Invariant(format!(
            "relift moved by {sup_rho} > 5 eps = {bound}"
        )));
    }
    Ok(Relift {
        lift,
        sup_rho,
        bound,
        grid,
    })
}

/// [`relift_near`] on the default grid.
pub fn relift_near_default(
    prev: &LiftedPath,
    beta: &PolygonalPath,
    eps: &Rational,
) -> Result<Relift> {
    relift_near(prev, beta, eps, DEFAULT_GRID)
}

impl LawPath for LiftedPath {
    fn space(&self) -> &Arc<FiniteMetricSpace> {
        LiftedPath::space(self)
    }

    fn law_at(&self, t: &Rational) -> Result<crate::metric::Measure> {
        Ok(self.eval(t)?.law())
    }

    fn breakpoints(&self) -> Vec<Rational> {
        self.breakpoints.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Measure;
    use crate::rational::q;
    use crate::srv::canonical_rv;

    fn two_point() -> Arc<FiniteMetricSpace> {
        let z = Rational::zero();
        let o = Rational::one();
        Arc::new(
            FiniteMetricSpace::new(
                vec!["a".into(), "b".into()],
                vec![vec![z.clone(), o.clone()], vec![o, z]],
            )
            .unwrap(),
        )
    }

    #[test]
    fn refine_cuts_pieces_below_eps() {
        let bp = vec![q(0, 1), q(1, 2), q(1, 1)];
        assert_eq!(refine(&bp, &q(6, 5)), bp);
        assert_eq!(refine(&bp, &Rational::zero()), bp);
        // 1/eps = 4 exactly: 4 parts give relative length 1/4, not < 1/4
        assert_eq!(refine(&bp, &q(1, 4)).len(), 2 * 5 + 1);
        assert_eq!(refine(&bp, &q(6, 25)).len(), 2 * 5 + 1);
    }

    #[test]
    fn single_segment_polygonal() {
        let s = two_point();
        let a = Measure::dirac(s.clone(), 0);
        let b = Measure::dirac(s.clone(), 1);
        let beta = PolygonalPath::segment(a.clone(), b.clone()).unwrap();
        let lift = lift_polygonal(&beta, &canonical_rv(&a), &canonical_rv(&b)).unwrap();
        assert_eq!(lift.pieces().len(), 1);
        let v = lift.eval(&q(1, 4)).unwrap();
        assert_eq!(v.law(), beta.eval(&q(1, 4)).unwrap());
        assert!(matches!(
            lift_polygonal(&beta, &canonical_rv(&b), &canonical_rv(&b)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn relift_identity_is_free() {
        let s = two_point();
        let a = Measure::dirac(s.clone(), 0);
        let b = Measure::dirac(s.clone(), 1);
        let mid = Measure::new(s.clone(), vec![q(1, 3), q(2, 3)]).unwrap();
        let beta = PolygonalPath::new(
            vec![q(0, 1), q(1, 3), q(1, 1)],
            vec![a.clone(), mid, b.clone()],
        )
        .unwrap();
        let prev = lift_polygonal(&beta, &canonical_rv(&a), &canonical_rv(&b)).unwrap();
        let r = relift_near(&prev, &beta, &Rational::zero(), 16).unwrap();
        assert_eq!(r.sup_rho, Rational::zero());
        assert_eq!(r.lift.start(), prev.start());
        assert_eq!(r.lift.end(), prev.end());
    }

    #[test]
    fn relift_perturbed_midpoint() {
        let s = two_point();
        let a = Measure::dirac(s.clone(), 0);
        let b = Measure::dirac(s.clone(), 1);
        let prev = lift_polygonal(
            &PolygonalPath::segment(a.clone(), b.clone()).unwrap(),
            &canonical_rv(&a),
            &canonical_rv(&b),
        )
        .unwrap();
        // midpoint moved by mass 1/10 at distance 1
        let bumped = Measure::new(s.clone(), vec![q(6, 10), q(4, 10)]).unwrap();
        let beta = PolygonalPath::new(vec![q(0, 1), q(1, 2), q(1, 1)], vec![a, bumped, b]).unwrap();
        let eps = q(1, 10);
        let r = relift_near(&prev, &beta, &eps, 40).unwrap();
        assert!(r.sup_rho <= q(1, 2));
        // exhaustive recomputation on an independent grid
        for k in 0..=120 {
            let t = q(k, 120);
            let new = r.lift.eval(&t).unwrap();
            assert_eq!(new.law(), beta.eval(&t).unwrap());
            assert!(kyfan_rho(&prev.eval(&t).unwrap(), &new).unwrap() <= q(1, 2));
        }
        // tolerance below the actual gap is refused
        assert!(matches!(
            relift_near(&prev, &beta, &q(1, 20), 40),
            Err(Error::Precondition(_))
        ));
    }
}
