use crate::error::{Error, Result};
use crate::metric::{ensure_same_space, FiniteMetricSpace, Measure};
use crate::path::certificate::{verify_lift, Certificate, LiftHistory};
use crate::path::lifted::{lift_polygonal, relift_near, LiftedPath};
use crate::path::polygonal::{approximate_polygonal, PolygonalPath, SampledPath};
use crate::path::LawPath;
use crate::rational::Rational;
use crate::srv::SimpleRandomVariable;
use std::sync::Arc;

/// Path of measures to be lifted.
#[derive(Debug, Clone)]
pub enum TargetPath {
    Polygonal(PolygonalPath),
    Sampled(SampledPath),
}

impl LawPath for TargetPath {
    fn space(&self) -> &Arc<FiniteMetricSpace> {
        match self {
            TargetPath::Polygonal(p) => p.space(),
            TargetPath::Sampled(p) => LawPath::space(p),
        }
    }

    fn law_at(&self, t: &Rational) -> Result<Measure> {
        match self {
            TargetPath::Polygonal(p) => p.eval(t),
            TargetPath::Sampled(p) => p.sample(t),
        }
    }

    fn breakpoints(&self) -> Vec<Rational> {
        match self {
            TargetPath::Polygonal(p) => p.breakpoints().to_vec(),
            TargetPath::Sampled(_) => Vec::new(),
        }
    }
}

/// Tolerance schedule `eps_n = tol * 5^(iterations - n)`, n = 1..=iterations.
pub fn epsilon_schedule(tol: &Rational, iterations: usize) -> Vec<Rational> {
    let five = Rational::from_integer(5);
    (0..iterations)
        .map(|n| tol * five.pow((iterations - 1 - n) as i32))
        .collect()
}

/// Lifts `alpha` with prescribed endpoint variables.
///
/// A polygonal target is lifted exactly in one step. A sampled target goes
/// through `iterations` rounds: round 1 lifts the polygonal approximation at
/// `eps_1`, and each later round relifts the previous lift onto the
/// approximation at `eps_{n+1} = eps_n / 5` with tolerance
/// `eps_n + eps_{n+1}`. The returned lift is an exact lift of the final
/// polygonal, which is within `tol` of `alpha`. The certificate records the
/// Ky Fan movement of each round against its `5 (eps_n + eps_{n+1})` budget.
pub fn lift_path(
    alpha: &TargetPath,
    x_start: &SimpleRandomVariable,
    x_end: &SimpleRandomVariable,
    tol: &Rational,
    iterations: usize,
    grid_n: usize,
) -> Result<(LiftedPath, Certificate)> {
    ensure_same_space(alpha.space(), x_start.space(), "start variable")?;
    ensure_same_space(alpha.space(), x_end.space(), "end variable")?;
    if x_start.law() != alpha.law_at(&Rational::zero())? {
        return Err(Error::Precondition(
            "law of the start variable differs from the path at t = 0".into(),
        ));
    }
    if x_end.law() != alpha.law_at(&Rational::one())? {
        return Err(Error::Precondition(
            "law of the end variable differs from the path at t = 1".into(),
        ));
    }

    let (lift, history) = match alpha {
        TargetPath::Polygonal(beta) => {
            let lift = lift_polygonal(beta, x_start, x_end)?;
            (lift, LiftHistory::default())
        }
        TargetPath::Sampled(sampled) => {
            if !tol.is_positive() {
                return Err(Error::Domain(format!("tolerance {tol} must be positive")));
            }
            if iterations == 0 {
                return Err(Error::Domain("at least one iteration is required".into()));
            }
            let epsilons = epsilon_schedule(tol, iterations);
            let beta = approximate_polygonal(sampled, &epsilons[0])?;
            let mut lift = lift_polygonal(&beta, x_start, x_end)?;
            let mut decay_table = Vec::new();
            let mut decay_budget = Vec::new();
            for w in epsilons.windows(2) {
                let beta = approximate_polygonal(sampled, &w[1])?;
                let eps = &w[0] + &w[1];
                let relift = relift_near(&lift, &beta, &eps, grid_n)?;
                decay_table.push(relift.sup_rho);
                decay_budget.push(relift.bound);
                lift = relift.lift;
            }
            let history = LiftHistory {
                law_gap_bound: tol.clone(),
                epsilons,
                decay_table,
                decay_budget,
            };
            (lift, history)
        }
    };

    let certificate = verify_lift(&lift, alpha, grid_n)?
        .with_history(&history)
        .prescribe_endpoints(&lift, x_start, x_end);
    Ok((lift, certificate))
}
