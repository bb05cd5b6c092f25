//! Randomized invariant suites behind the `selftest` subcommand.
//!
//! Each suite draws its instances from its own ChaCha stream derived from the
//! seed, so the summary text depends only on the seed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::{CubeInterpolation, CubeLift};
use crate::error::Result;
use crate::metric::{prokhorov, prokhorov_coupling, prokhorov_subsets};
use crate::path::{lift_path, lift_polygonal, relift_near, segment_lift, TargetPath};
use crate::random::*;
use crate::rational::Rational;
use crate::srv::{canonical_rv, kyfan_rho, match_to_law};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl Summary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed == s.total)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selftest seed {}", self.seed)?;
        for s in &self.suites {
            writeln!(
                f,
                "{:<22} {:>4}/{:<4} {}",
                s.name,
                s.passed,
                s.total,
                if s.passed == s.total { "ok" } else { "FAILED" }
            )?;
        }
        writeln!(
            f,
            "{}",
            if self.all_passed() {
                "all suites passed"
            } else {
                "some suites failed"
            }
        )
    }
}

type Check = fn(&mut ChaCha8Rng) -> Result<bool>;

const SUITES: &[(&str, usize, Check)] = &[
    ("strassen_equality", 100, strassen_equality),
    ("match_optimality", 100, match_optimality),
    ("kyfan_dominates_q", 100, kyfan_dominates_q),
    ("segment_law", 100, segment_law),
    ("segment_regularity", 100, segment_regularity),
    ("mixture_contraction", 100, mixture_contraction),
    ("polygonal_lift", 20, polygonal_lift),
    ("relift_bound", 20, relift_bound),
    ("pipeline", 3, pipeline),
    ("cube_law", 5, cube_law),
];

pub fn run(seed: u64) -> Summary {
    let suites = SUITES
        .iter()
        .enumerate()
        .map(|(k, &(name, total, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let passed = (0..total)
                .filter(|_| matches!(check(&mut rng), Ok(true)))
                .count();
            SuiteResult {
                name,
                passed,
                total,
            }
        })
        .collect();
    Summary { seed, suites }
}

fn strassen_equality(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = {
        let m = rng.gen_range(1..=8);
        random_space(rng, m)
    };
    let (mu, nu) = (random_measure(rng, &s), random_measure(rng, &s));
    let (q, pi) = prokhorov_coupling(&mu, &nu)?;
    Ok(q == prokhorov_subsets(&mu, &nu)? && pi.kyfan_functional() == q)
}

fn match_optimality(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = {
        let m = rng.gen_range(1..=6);
        random_space(rng, m)
    };
    let x = random_srv(rng, &s);
    let nu = random_measure(rng, &s);
    let y = match_to_law(&x, &nu)?;
    Ok(y.law() == nu && kyfan_rho(&x, &y)? == prokhorov(&x.law(), &nu)?)
}

fn kyfan_dominates_q(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = {
        let m = rng.gen_range(1..=6);
        random_space(rng, m)
    };
    let (x, y) = (random_srv(rng, &s), random_srv(rng, &s));
    Ok(prokhorov(&x.law(), &y.law())? <= kyfan_rho(&x, &y)?)
}

fn random_segment(rng: &mut ChaCha8Rng) -> Result<crate::path::SegmentLift> {
    let s = {
        let m = rng.gen_range(1..=5);
        random_space(rng, m)
    };
    let (x, y) = (random_srv(rng, &s), random_srv(rng, &s));
    let a = Rational::new(rng.gen_range(0..=3), 4);
    let b = &a + Rational::new(rng.gen_range(1..=4), 4);
    segment_lift(&x, &y, &a, &b)
}

fn segment_law(rng: &mut ChaCha8Rng) -> Result<bool> {
    let seg = random_segment(rng)?;
    let (xl, yl) = (seg.x().law(), seg.y().law());
    let mut ok = &seg.eval(seg.start())? == seg.x() && &seg.eval(seg.end())? == seg.y();
    for _ in 0..5 {
        let s = random_time(rng);
        let t = seg.start() + &s * seg.length();
        ok &= seg.eval(&t)?.law() == xl.mixture(&yl, &s)?;
    }
    Ok(ok)
}

fn segment_regularity(rng: &mut ChaCha8Rng) -> Result<bool> {
    let seg = random_segment(rng)?;
    let s = seg.start() + random_time(rng) * seg.length();
    let t = seg.start() + random_time(rng) * seg.length();
    let (xs, xt) = (seg.eval(&s)?, seg.eval(&t)?);
    let full = kyfan_rho(seg.x(), seg.y())?;
    Ok(kyfan_rho(&xs, &xt)? <= (&t - &s).abs() / seg.length() && kyfan_rho(seg.x(), &xt)? <= full)
}

fn mixture_contraction(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = {
        let m = rng.gen_range(1..=6);
        random_space(rng, m)
    };
    let (mu, nu) = (random_measure(rng, &s), random_measure(rng, &s));
    let t = random_time(rng);
    Ok(prokhorov(&nu, &nu.mixture(&mu, &t)?)? <= prokhorov(&nu, &mu)?)
}

fn polygonal_lift(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = {
        let m = rng.gen_range(3..=5);
        random_space(rng, m)
    };
    let beta = {
        let n = rng.gen_range(4..=8);
        random_polygonal(rng, &s, n)
    };
    let start = random_srv_with_law(rng, beta.start());
    let end = random_srv_with_law(rng, beta.end());
    let lift = lift_polygonal(&beta, &start, &end)?;
    let mut ok = lift.start() == &start && lift.end() == &end;
    for _ in 0..10 {
        let t = random_time(rng);
        ok &= lift.eval(&t)?.law() == beta.eval(&t)?;
    }
    Ok(ok)
}

fn relift_bound(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = {
        let m = rng.gen_range(2..=4);
        random_space(rng, m)
    };
    let inst = random_relift_instance(rng, &s);
    let r = relift_near(&inst.prev, &inst.beta, &inst.eps, 24)?;
    let t = random_time(rng);
    Ok(r.sup_rho <= Rational::from_integer(5) * &inst.eps
        && r.lift.eval(&t)?.law() == inst.beta.eval(&t)?)
}

fn pipeline(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = random_space(rng, 3);
    let alpha = random_lipschitz_path(rng, &s, &Rational::from_integer(2));
    let x0 = canonical_rv(&alpha.sample(&Rational::zero())?);
    let x1 = random_srv_with_law(rng, &alpha.sample(&Rational::one())?);
    let (_, cert) = lift_path(
        &TargetPath::Sampled(alpha),
        &x0,
        &x1,
        &Rational::new(1, 5),
        2,
        32,
    )?;
    Ok(cert.holds())
}

fn cube_law(rng: &mut ChaCha8Rng) -> Result<bool> {
    let s = random_space(rng, 4);
    let n = rng.gen_range(1..=3);
    let corners = (0..=n).map(|_| random_measure(rng, &s)).collect();
    let c = CubeInterpolation::new(corners)?;
    let lift = CubeLift::new(c.clone())?;
    let mut ok = true;
    for _ in 0..4 {
        let t: Vec<Rational> = (0..n).map(|_| random_time(rng)).collect();
        ok &= lift.eval(&t)?.law() == c.eval(&t)?;
    }
    Ok(ok)
}
