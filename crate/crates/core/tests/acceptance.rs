//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! criterion fails.

mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use measure_lift::cube::{CubeInterpolation, CubeLift};
use measure_lift::path::{
    approximate_polygonal, epsilon_schedule, lift_path, lift_polygonal, relift_near, segment_lift,
    verification_grid, TargetPath, DEFAULT_GRID,
};
use measure_lift::random::*;
use measure_lift::{
    canonical_rv, kyfan_rho, match_to_law, prokhorov_coupling, prokhorov_subsets, Error, Rational,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed <= Duration::from_secs(limit_s), || {
        format!("took {elapsed:.1?}, limit {limit_s} s")
    })
}

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xC0FFEE + criterion)
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let n = 500;
    for k in 0..n {
        let m = rng.gen_range(1..=8);
        let s = random_space(&mut rng, m);
        let (mu, nu) = (random_measure(&mut rng, &s), random_measure(&mut rng, &s));
        let (q, pi) = prokhorov_coupling(&mu, &nu).map_err(|e| e.to_string())?;
        let subsets = prokhorov_subsets(&mu, &nu).map_err(|e| e.to_string())?;
        let reference = oracle::q(&mu, &nu);
        ensure(q == subsets && q == reference, || {
            format!("instance {k}: coupling {q}, subsets {subsets}, oracle {reference}")
        })?;
        ensure(
            pi.row_marginal() == mu && pi.column_marginal() == nu && pi.kyfan_functional() == q,
            || format!("instance {k}: witness coupling is not optimal"),
        )?;
    }
    within(start.elapsed(), 60)?;
    Ok(format!("{n} instances, m <= 8, {:.1?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    let n = 500;
    for k in 0..n {
        let m = rng.gen_range(1..=6);
        let s = random_space(&mut rng, m);
        let x = random_srv(&mut rng, &s);
        let nu = random_measure(&mut rng, &s);
        let y = match_to_law(&x, &nu).map_err(|e| e.to_string())?;
        ensure(oracle::law(&y) == nu.weights(), || {
            format!("instance {k}: law of the match differs from nu")
        })?;
        let (rho, q) = (oracle::rho(&x, &y), oracle::q(&x.law(), &nu));
        ensure(rho == q, || format!("instance {k}: rho {rho} != q {q}"))?;

        let z = random_srv(&mut rng, &s);
        let (rho_xz, q_xz) = (oracle::rho(&x, &z), oracle::q(&x.law(), &z.law()));
        ensure(q_xz <= rho_xz, || {
            format!("instance {k}: q {q_xz} > rho {rho_xz}")
        })?;
        ensure(
            kyfan_rho(&x, &z).map_err(|e| e.to_string())? == rho_xz,
            || format!("instance {k}: kyfan_rho differs"),
        )?;
    }
    Ok(format!("{n} matches and {n} random pairs"))
}

fn random_segment(rng: &mut ChaCha8Rng) -> measure_lift::path::SegmentLift {
    let m = rng.gen_range(1..=5);
    let s = random_space(rng, m);
    let (x, y) = (random_srv(rng, &s), random_srv(rng, &s));
    let a = r(rng.gen_range(0..=5), 6);
    let b = &a + r(rng.gen_range(1..=7), 7);
    segment_lift(&x, &y, &a, &b).expect("a < b")
}

fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    let n = 500;
    let times = 10;
    for k in 0..n {
        let seg = random_segment(&mut rng);
        let (lx, ly) = (oracle::law(seg.x()), oracle::law(seg.y()));
        ensure(seg.eval(seg.start()).unwrap() == *seg.x(), || {
            format!("instance {k}: value at a is not X")
        })?;
        ensure(seg.eval(seg.end()).unwrap() == *seg.y(), || {
            format!("instance {k}: value at b is not Y")
        })?;
        for _ in 0..times {
            let s = random_time(&mut rng);
            let t = seg.start() + &s * seg.length();
            let v = seg.eval(&t).map_err(|e| e.to_string())?;
            ensure(oracle::law(&v) == oracle::mix(&lx, &ly, &s), || {
                format!("instance {k}: law at t = {t} is off")
            })?;
        }
    }
    Ok(format!("{n} segments x {times} times"))
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let n = 500;
    for k in 0..n {
        let seg = random_segment(&mut rng);
        let s = seg.start() + random_time(&mut rng) * seg.length();
        let t = seg.start() + random_time(&mut rng) * seg.length();
        let (vs, vt) = (seg.eval(&s).unwrap(), seg.eval(&t).unwrap());
        let rate = (&t - &s).abs() / seg.length();
        let moved = oracle::rho(&vs, &vt);
        ensure(moved <= rate, || {
            format!("instance {k}: rho {moved} > |t-s|/(b-a) = {rate}")
        })?;
        let (from_x, full) = (oracle::rho(seg.x(), &vt), oracle::rho(seg.x(), seg.y()));
        ensure(from_x <= full, || {
            format!("instance {k}: rho(X, a(t)) = {from_x} > rho(X, Y) = {full}")
        })?;
    }
    Ok(format!("{n} instances"))
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let n = 500;
    for k in 0..n {
        let m = rng.gen_range(1..=6);
        let s = random_space(&mut rng, m);
        let (mu, nu) = (random_measure(&mut rng, &s), random_measure(&mut rng, &s));
        let t = random_time(&mut rng);
        let mixed = nu.mixture(&mu, &t).unwrap();
        ensure(
            mixed.weights() == oracle::mix(nu.weights(), mu.weights(), &t),
            || format!("instance {k}: mixture"),
        )?;
        let (lhs, rhs) = (oracle::q(&nu, &mixed), oracle::q(&nu, &mu));
        ensure(lhs <= rhs, || format!("instance {k}: {lhs} > {rhs}"))?;
    }
    Ok(format!("{n} instances"))
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let n = 60;
    let times = 100;
    for k in 0..n {
        let m = rng.gen_range(3..=5);
        let s = random_space(&mut rng, m);
        let v = rng.gen_range(4..=8);
        let beta = random_polygonal(&mut rng, &s, v);
        let start = random_srv_with_law(&mut rng, beta.start());
        let end = random_srv_with_law(&mut rng, beta.end());
        let lift = lift_polygonal(&beta, &start, &end).map_err(|e| e.to_string())?;
        ensure(lift.start() == &start && lift.end() == &end, || {
            format!("instance {k}: endpoints moved")
        })?;
        for _ in 0..times {
            let t = r(rng.gen_range(0..=720), 720);
            let law = oracle::law(&lift.eval(&t).unwrap());
            ensure(law == beta.eval(&t).unwrap().weights(), || {
                format!("instance {k}: law at {t}")
            })?;
        }
        let wrong = random_measure(&mut rng, &s);
        if &wrong != beta.end() {
            let err = lift_polygonal(&beta, &start, &canonical_rv(&wrong)).unwrap_err();
            ensure(matches!(err, Error::Precondition(_)), || {
                format!("instance {k}: mismatch gave {err:?}")
            })?;
        }
    }
    Ok(format!(
        "{n} polygonals with 4-8 vertices x {times} times; mismatches rejected"
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let n = 200;
    let grid_n = 24;
    let mut worst = Rational::zero();
    for k in 0..n {
        let m = rng.gen_range(2..=5);
        let s = random_space(&mut rng, m);
        let inst = random_relift_instance(&mut rng, &s);
        let out = relift_near(&inst.prev, &inst.beta, &inst.eps, grid_n)
            .map_err(|e| format!("instance {k}: {e}"))?;
        let bound = Rational::from_integer(5) * &inst.eps;
        ensure(out.sup_rho <= bound, || {
            format!("instance {k}: sup rho {} > {bound}", out.sup_rho)
        })?;
        let grid = verification_grid(grid_n, &[out.lift.breakpoints(), inst.prev.breakpoints()]);
        let mut sup = Rational::zero();
        for t in &grid {
            let (old, new) = (inst.prev.eval(t).unwrap(), out.lift.eval(t).unwrap());
            ensure(
                oracle::law(&new) == inst.beta.eval(t).unwrap().weights(),
                || format!("instance {k}: law at {t}"),
            )?;
            let d = oracle::rho(&old, &new);
            if d > sup {
                sup = d;
            }
        }
        ensure(sup == out.sup_rho, || {
            format!(
                "instance {k}: recomputed sup {sup} != certified {}",
                out.sup_rho
            )
        })?;
        for _ in 0..5 {
            let t = random_time(&mut rng);
            ensure(
                oracle::law(&out.lift.eval(&t).unwrap()) == inst.beta.eval(&t).unwrap().weights(),
                || format!("instance {k}: law at off-grid {t}"),
            )?;
        }
        ensure(
            out.lift.start() == inst.prev.start() && out.lift.end() == inst.prev.end(),
            || format!("instance {k}: endpoints moved"),
        )?;
        let ratio = &out.sup_rho / &inst.eps;
        if ratio > worst {
            worst = ratio;
        }
    }
    Ok(format!(
        "{n} instances, worst sup rho / eps = {worst} (bound 5)"
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(8);
    let n = 20;
    let tol = r(1, 25);
    let iterations = 3;
    let l_max = Rational::from_integer(4);
    for k in 0..n {
        let m = rng.gen_range(2..=4);
        let s = random_space(&mut rng, m);
        let alpha = random_lipschitz_path(&mut rng, &s, &l_max);
        ensure(alpha.lipschitz() <= &l_max, || {
            format!("instance {k}: L too large")
        })?;
        let xs = random_srv_with_law(&mut rng, &alpha.sample(&Rational::zero()).unwrap());
        let xe = random_srv_with_law(&mut rng, &alpha.sample(&Rational::one()).unwrap());

        // rounds replayed step by step to watch the endpoints
        let eps = epsilon_schedule(&tol, iterations);
        let mut lift =
            lift_polygonal(&approximate_polygonal(&alpha, &eps[0]).unwrap(), &xs, &xe).unwrap();
        for w in eps.windows(2) {
            let beta = approximate_polygonal(&alpha, &w[1]).unwrap();
            lift = relift_near(&lift, &beta, &(&w[0] + &w[1]), DEFAULT_GRID)
                .map_err(|e| e.to_string())?
                .lift;
            ensure(lift.start() == &xs && lift.end() == &xe, || {
                format!("instance {k}: endpoints moved")
            })?;
        }

        let target = TargetPath::Sampled(alpha);
        let (piped, cert) = lift_path(&target, &xs, &xe, &tol, iterations, DEFAULT_GRID)
            .map_err(|e| format!("instance {k}: {e}"))?;
        ensure(piped == lift, || {
            format!("instance {k}: pipeline differs from the replay")
        })?;
        ensure(cert.max_law_gap <= tol, || {
            format!("instance {k}: law gap {}", cert.max_law_gap)
        })?;
        let budget: Vec<Rational> = eps
            .windows(2)
            .map(|w| Rational::from_integer(5) * (&w[0] + &w[1]))
            .collect();
        ensure(
            cert.decay_budget == budget && cert.decay_table.len() == iterations - 1,
            || format!("instance {k}: budget {:?}", cert.decay_budget),
        )?;
        ensure(
            budget
                .windows(2)
                .all(|b| &b[1] * Rational::from_integer(5) == b[0]),
            || "budget ratio".into(),
        )?;
        ensure(cert.decay_ok(), || {
            format!(
                "instance {k}: decay {:?} over {:?}",
                cert.decay_table, budget
            )
        })?;
        ensure(cert.endpoint_ok == [true, true] && cert.holds(), || {
            format!("instance {k}: certificate fails")
        })?;
    }
    within(start.elapsed(), 120)?;
    Ok(format!(
        "{n} paths, L <= 4, 3 iterations, tol 1/25, {:.1?}",
        start.elapsed()
    ))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(9);
    let axis: Vec<Rational> = (0..5).map(|k| r(k, 4)).collect();
    let mut points = 0;
    for n in [2usize, 3] {
        for rep in 0..3 {
            let s = random_space(&mut rng, 5);
            let corners: Vec<_> = (0..=n).map(|_| random_measure(&mut rng, &s)).collect();
            let c = CubeInterpolation::new(corners.clone()).unwrap();
            let lift = CubeLift::new(c.clone()).unwrap();
            let lower =
                CubeLift::new(CubeInterpolation::new(corners[..n].to_vec()).unwrap()).unwrap();
            for idx in 0..5usize.pow(n as u32) {
                let t: Vec<Rational> = (0..n)
                    .map(|k| axis[idx / 5usize.pow(k as u32) % 5].clone())
                    .collect();
                let x = lift.eval(&t).unwrap();
                let mut g = oracle::mix(corners[0].weights(), corners[1].weights(), &t[0]);
                for k in 1..n {
                    g = oracle::mix(&g, corners[k + 1].weights(), &t[k]);
                }
                ensure(oracle::law(&x) == g, || {
                    format!("n = {n}, rep {rep}: law at {t:?}")
                })?;
                points += 1;
                if t[n - 1].is_zero() {
                    let below = lower.eval(&t[..n - 1]).unwrap();
                    ensure(x == below, || format!("n = {n}: slice t_n = 0 at {t:?}"))?;
                }
                if t[n - 1] == Rational::one() {
                    ensure(oracle::law(&x) == corners[n].weights(), || {
                        format!("n = {n}: slice t_n = 1 at {t:?}")
                    })?;
                }
            }
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{points} grid points, n = 2 and 3, 5-point spaces, {:.1?}",
        start.elapsed()
    ))
}

fn criterion_10() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_measure-lift"))
            .args(["selftest", "--seed", "0"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("selftest exited with {}", out.status)
        })?;
        Ok::<_, String>(out.stdout)
    };
    let (a, b) = (run()?, run()?);
    ensure(a == b, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Strassen equality", criterion_1),
        ("match optimality", criterion_2),
        ("law-mixture identity", criterion_3),
        ("segment regularity", criterion_4),
        ("mixture contraction", criterion_5),
        ("polygonal lifting", criterion_6),
        ("relift bound", criterion_7),
        ("iterated pipeline", criterion_8),
        ("cube lifting", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
