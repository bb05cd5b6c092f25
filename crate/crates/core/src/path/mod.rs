//! Lifting paths of measures to paths of random variables.
//!
//! A *lift* of a path `t -> alpha(t)` of measures is a path `t -> X(t)` of
//! simple random variables on `[0,1)` with `law(X(t)) = alpha(t)` for every
//! `t`. Polygonal paths are lifted exactly by chaining [`SegmentLift`]s;
//! general paths are approached through polygonal approximations and repeated
//! relifting (see [`lift_path`]).

use std::sync::Arc;

use crate::error::Result;
use crate::metric::{FiniteMetricSpace, Measure};
use crate::rational::Rational;

mod certificate;
mod lifted;
mod pipeline;
mod polygonal;
mod segment;

pub use certificate::{verify_lift, Certificate, LiftHistory};
pub use lifted::{lift_polygonal, relift_near, relift_near_default, LiftedPath, Relift};
pub use pipeline::{epsilon_schedule, lift_path, TargetPath};
pub use polygonal::{
    approximate_polygonal, polygonal_eval, PolygonalPath, SampleFn, SampleSource, SampledPath,
};
pub use segment::{segment_eval, segment_lift, SegmentLift};

/// Uniform grid size used when none is given.
pub const DEFAULT_GRID: usize = 257;

/// A path of measures that can be evaluated at any rational time in `[0,1]`.
pub trait LawPath: Sync {
    fn space(&self) -> &Arc<FiniteMetricSpace>;

    fn law_at(&self, t: &Rational) -> Result<Measure>;

    /// Times that every verification grid should include.
    fn breakpoints(&self) -> Vec<Rational> {
        Vec::new()
    }
}

/// `i / grid_n` for `i = 0..=grid_n`, merged with `extra`, sorted and
/// deduplicated.
pub fn verification_grid(grid_n: usize, extra: &[&[Rational]]) -> Vec<Rational> {
    let n = grid_n.max(1) as i64;
    let mut grid: Vec<Rational> = (0..=n).map(|i| Rational::new(i, n)).collect();
    for times in extra {
        grid.extend(times.iter().cloned());
    }
    grid.sort();
    grid.dedup();
    grid
}
