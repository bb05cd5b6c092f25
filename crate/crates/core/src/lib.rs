//! Exact lifting of paths of finitely supported measures to paths of simple
//! random variables on the unit interval.
//!
//! Everything is computed in exact rational arithmetic. The probability space
//! is `[0,1)` with Lebesgue measure, events are finite unions of half-open
//! intervals ([`IntervalSet`]), and a simple random variable is a labeled
//! partition of `[0,1)` ([`SimpleRandomVariable`]).

pub mod cube;
pub mod error;
mod flow;
pub mod io;
pub mod metric;
pub mod omega;
pub mod path;
pub mod random;
pub mod rational;
pub mod selftest;
pub mod srv;

pub use cube::{cube_report, g_eval, g_lift_eval, CubeInterpolation, CubeLift, CubeReport};
pub use error::{Error, Result};
pub use metric::{
    kyfan_functional, mixture, prokhorov, prokhorov_coupling, prokhorov_subsets, validate_space,
    CouplingMatrix, FiniteMetricSpace, Measure, SUBSET_ORACLE_LIMIT,
};
pub use omega::IntervalSet;
pub use rational::Rational;
pub use srv::{canonical_rv, kyfan_rho, match_to_law, realize_coupling, SimpleRandomVariable};
