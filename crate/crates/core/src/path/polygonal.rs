use std::fmt;
use std::sync::Arc;

use crate::error::{Error, LipschitzViolation, Result};
use crate::metric::{ensure_same_space, prokhorov, FiniteMetricSpace, Measure};
use crate::path::LawPath;
use crate::rational::Rational;

/// Piecewise-affine path in measure space.
///
/// On `[t_i, t_{i+1}]` the path is
/// `((t_{i+1} - t) mu_i + (t - t_i) mu_{i+1}) / (t_{i+1} - t_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolygonalPath {
    space: Arc<FiniteMetricSpace>,
    breakpoints: Vec<Rational>,
    vertices: Vec<Measure>,
}

impl PolygonalPath {
    pub fn new(breakpoints: Vec<Rational>, vertices: Vec<Measure>) -> Result<Self> {
        let space = vertices
            .first()
            .ok_or_else(|| Error::Domain("polygonal path has no vertices".into()))?
            .space()
            .clone();
        validate_breakpoints(&breakpoints)?;
        if vertices.len() != breakpoints.len() {
            return Err(Error::Domain(format!(
                "{} vertices for {} breakpoints",
                vertices.len(),
                breakpoints.len()
            )));
        }
        for v in &vertices {
            ensure_same_space(&space, v.space(), "polygonal vertices")?;
        }
        Ok(PolygonalPath {
            space,
            breakpoints,
            vertices,
        })
    }

    /// Straight segment from `mu` at 0 to `nu` at 1.
    pub fn segment(mu: Measure, nu: Measure) -> Result<Self> {
        PolygonalPath::new(vec![Rational::zero(), Rational::one()], vec![mu, nu])
    }

    pub fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn vertices(&self) -> &[Measure] {
        &self.vertices
    }

    pub fn start(&self) -> &Measure {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Measure {
        self.vertices.last().expect("non-empty")
    }

    pub fn eval(&self, t: &Rational) -> Result<Measure> {
        check_unit(t)?;
        match self.breakpoints.binary_search(t) {
            Ok(i) => Ok(self.vertices[i].clone()),
            Err(i) => {
                let (a, b) = (&self.breakpoints[i - 1], &self.breakpoints[i]);
                let s = (t - a) / (b - a);
                self.vertices[i - 1].mixture(&self.vertices[i], &s)
            }
        }
    }
}

/// Free-function form of [`PolygonalPath::eval`].
pub fn polygonal_eval(beta: &PolygonalPath, t: &Rational) -> Result<Measure> {
    beta.eval(t)
}

impl LawPath for PolygonalPath {
    fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    fn law_at(&self, t: &Rational) -> Result<Measure> {
        self.eval(t)
    }

    fn breakpoints(&self) -> Vec<Rational> {
        self.breakpoints.clone()
    }
}

pub(crate) fn validate_breakpoints(breakpoints: &[Rational]) -> Result<()> {
    if breakpoints.len() < 2
        || !breakpoints[0].is_zero()
        || breakpoints.last() != Some(&Rational::one())
    {
        return Err(Error::Domain(
            "breakpoints must start at 0 and end at 1".into(),
        ));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "breakpoints must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub(crate) fn check_unit(t: &Rational) -> Result<()> {
    if t.is_negative() || t > &Rational::one() {
        Err(Error::Domain(format!("time {t} outside [0,1]")))
    } else {
        Ok(())
    }
}

pub type SampleFn = Arc<dyn Fn(&Rational) -> Measure + Send + Sync>;

#[derive(Clone)]
pub enum SampleSource {
    /// Piecewise-affine interpolation of a table of samples.
    Table(PolygonalPath),
    Function(SampleFn),
}

impl fmt::Debug for SampleSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSource::Table(p) => f.debug_tuple("Table").field(p).finish(),
            SampleSource::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Continuous path `t -> alpha(t)` known only through samples, with a
/// declared Lipschitz constant `L` for the Prokhorov metric:
/// `q(alpha(s), alpha(t)) <= L |s - t|`.
#[derive(Debug, Clone)]
pub struct SampledPath {
    space: Arc<FiniteMetricSpace>,
    source: SampleSource,
    lipschitz: Rational,
}

impl SampledPath {
    pub fn from_table(table: PolygonalPath, lipschitz: Rational) -> Result<Self> {
        if lipschitz.is_negative() {
            return Err(Error::Domain(format!(
                "negative Lipschitz constant {lipschitz}"
            )));
        }
        Ok(SampledPath {
            space: table.space().clone(),
            source: SampleSource::Table(table),
            lipschitz,
        })
    }

    pub fn from_fn(
        space: Arc<FiniteMetricSpace>,
        lipschitz: Rational,
        f: SampleFn,
    ) -> Result<Self> {
        if lipschitz.is_negative() {
            return Err(Error::Domain(format!(
                "negative Lipschitz constant {lipschitz}"
            )));
        }
        Ok(SampledPath {
            space,
            source: SampleSource::Function(f),
            lipschitz,
        })
    }

    pub fn lipschitz(&self) -> &Rational {
        &self.lipschitz
    }

    pub fn source(&self) -> &SampleSource {
        &self.source
    }

    pub fn sample(&self, t: &Rational) -> Result<Measure> {
        check_unit(t)?;
        match &self.source {
            SampleSource::Table(p) => p.eval(t),
            SampleSource::Function(f) => {
                let mu = f(t);
                ensure_same_space(&self.space, mu.space(), "sampled path value")?;
                Ok(mu)
            }
        }
    }

    /// Samples at strictly increasing `times` and checks the declared
    /// Lipschitz constant on every consecutive pair. By the triangle
    /// inequality this covers every pair of the queried times.
    pub fn sample_checked(&self, times: &[Rational]) -> Result<Vec<Measure>> {
        let values = times
            .iter()
            .map(|t| self.sample(t))
            .collect::<Result<Vec<_>>>()?;
        for k in 1..times.len() {
            let gap = prokhorov(&values[k - 1], &values[k])?;
            let bound = &self.lipschitz * (&times[k] - &times[k - 1]).abs();
            if gap > bound {
                return Err(Error::Lipschitz(Box::new(LipschitzViolation {
                    s: times[k - 1].clone(),
                    t: times[k].clone(),
                    gap,
                    bound,
                    lipschitz: self.lipschitz.clone(),
                })));
            }
        }
        Ok(values)
    }
}

impl LawPath for SampledPath {
    fn space(&self) -> &Arc<FiniteMetricSpace> {
        &self.space
    }

    fn law_at(&self, t: &Rational) -> Result<Measure> {
        self.sample(t)
    }
}

/// Polygonal through `alpha(i/N)`, `N = ceil(2L/eps)`, within Prokhorov
/// distance `2L/N <= eps` of `alpha` at every time.
pub fn approximate_polygonal(alpha: &SampledPath, eps: &Rational) -> Result<PolygonalPath> {
    if !eps.is_positive() {
        return Err(Error::Domain(format!(
            "approximation tolerance {eps} must be positive"
        )));
    }
    let n = (Rational::from_integer(2) * &alpha.lipschitz / eps).ceil();
    let n: i64 = i64::try_from(n.max(1.into()))
        .map_err(|_| Error::Domain("approximation grid too fine".into()))?;
    let times: Vec<Rational> = (0..=n).map(|i| Rational::new(i, n)).collect();
    let vertices = alpha.sample_checked(&times)?;
    PolygonalPath::new(times, vertices)
}
