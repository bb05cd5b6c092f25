use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use measure_lift::cube::{cube_report, CubeInterpolation, CubeLift, DEFAULT_CUBE_GRID};
use measure_lift::io::*;
use measure_lift::metric::{
    prokhorov, prokhorov_coupling, prokhorov_subsets, CouplingMatrix, SUBSET_ORACLE_LIMIT,
};
use measure_lift::path::LawPath;
use measure_lift::path::{
    lift_path, relift_near, segment_lift, verify_lift, Certificate, LiftHistory, TargetPath,
    DEFAULT_GRID,
};
use measure_lift::srv::{canonical_rv, kyfan_rho, match_to_law};
use measure_lift::{selftest, Error, Rational, Result};

#[derive(Parser, Debug)]
#[command(
    name = "measure-lift",
    version,
    about = "Exact liftings of paths of finitely supported measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Tolerance as a rational "p/q".
    #[arg(long, global = true)]
    tol: Option<Rational>,
    #[arg(long, global = true, default_value_t = 3)]
    iters: usize,
    /// Uniform grid size; defaults depend on the subcommand.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prokhorov distance between two measure files, by max flow and by subsets.
    Prokhorov { mu: PathBuf, nu: PathBuf },
    /// Ky Fan distance between the two variables of a pair file.
    Kyfan { pair: PathBuf },
    /// Variable with the given law closest to the given variable.
    Match { srv: PathBuf, measure: PathBuf },
    /// Segment lift of a pair file evaluated on a uniform grid.
    Segment {
        pair: PathBuf,
        #[arg(long, default_value = "0")]
        start: Rational,
        #[arg(long, default_value = "1")]
        end: Rational,
    },
    /// Lifts a path with prescribed (or canonical) endpoint variables.
    Lift {
        path: PathBuf,
        endpoints: Option<PathBuf>,
    },
    /// Relifts a lift onto a nearby polygonal path with tolerance --tol.
    Relift { lift: PathBuf, path: PathBuf },
    /// Recomputes the certificate of a lift against a path.
    Verify { lift: PathBuf, path: PathBuf },
    /// Grid report of the cube interpolation lift.
    Cube { corners: PathBuf },
    /// Runs the randomized invariant suites.
    Selftest,
}

#[derive(Serialize)]
struct ProkhorovReport {
    q_coupling: Rational,
    q_subsets: Option<Rational>,
    equal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    notice: Option<String>,
    coupling: Vec<Vec<Rational>>,
}

#[derive(Serialize)]
struct KyfanReport {
    rho: Rational,
    q_laws: Rational,
}

#[derive(Serialize)]
struct MatchReport {
    matched: SrvFile,
    rho: Rational,
    q: Rational,
}

#[derive(Serialize)]
struct SegmentPoint {
    t: Rational,
    blocks: BlocksRecord,
    law: Vec<Rational>,
    rho_from_start: Rational,
}

#[derive(Serialize)]
struct SegmentReport {
    start: Rational,
    end: Rational,
    points: Vec<SegmentPoint>,
}

#[derive(Serialize)]
struct LiftOutput {
    lift: LiftFile,
    certificate: Certificate,
}

#[derive(Serialize)]
struct ReliftOutput {
    lift: LiftFile,
    sup_rho: Rational,
    bound: Rational,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(cli: &Cli, value: &T) -> Result<()> {
    emit(cli, &to_json_string(value)?)
}

fn grid(cli: &Cli, default: usize) -> Result<usize> {
    let n = cli.grid.unwrap_or(default);
    if n < 2 {
        return Err(Error::Domain(format!("--grid must be at least 2, got {n}")));
    }
    Ok(n)
}

fn read_target(path: &Path) -> Result<TargetPath> {
    read_json::<PathFile>(path)?.into_target()
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Prokhorov { mu, nu } => {
            let mu = read_json::<MeasureFile>(mu)?.into_measure()?;
            let nu = read_json::<MeasureFile>(nu)?.into_measure()?;
            let (q, pi): (Rational, CouplingMatrix) = prokhorov_coupling(&mu, &nu)?;
            let (q_subsets, notice) = if mu.space().len() <= SUBSET_ORACLE_LIMIT {
                (Some(prokhorov_subsets(&mu, &nu)?), None)
            } else {
                let msg = format!(
                    "subset oracle disabled: {} points > {SUBSET_ORACLE_LIMIT}",
                    mu.space().len()
                );
                eprintln!("notice: {msg}");
                (None, Some(msg))
            };
            let equal = q_subsets.as_ref().map(|s| s == &q);
            emit_json(
                cli,
                &ProkhorovReport {
                    q_coupling: q,
                    q_subsets,
                    equal,
                    notice,
                    coupling: pi.mass().to_vec(),
                },
            )?;
            Ok(if equal == Some(false) { 3 } else { 0 })
        }
        Command::Kyfan { pair } => {
            let (x, y) = read_json::<PairFile>(pair)?.into_pair()?;
            emit_json(
                cli,
                &KyfanReport {
                    rho: kyfan_rho(&x, &y)?,
                    q_laws: prokhorov(&x.law(), &y.law())?,
                },
            )?;
            Ok(0)
        }
        Command::Match { srv, measure } => {
            let x = read_json::<SrvFile>(srv)?.into_srv()?;
            let nu = read_json::<MeasureFile>(measure)?.into_measure()?;
            let y = match_to_law(&x, &nu)?;
            let report = MatchReport {
                rho: kyfan_rho(&x, &y)?,
                q: prokhorov(&x.law(), &nu)?,
                matched: SrvFile::from_srv(&y),
            };
            emit_json(cli, &report)?;
            Ok(0)
        }
        Command::Segment { pair, start, end } => {
            let (x, y) = read_json::<PairFile>(pair)?.into_pair()?;
            let seg = segment_lift(&x, &y, start, end)?;
            let n = grid(cli, 8)? as i64;
            let points = (0..=n)
                .map(|k| {
                    let t = start + Rational::new(k, n) * seg.length();
                    let v = seg.eval(&t)?;
                    Ok(SegmentPoint {
                        law: v.law().weights().to_vec(),
                        rho_from_start: kyfan_rho(&x, &v)?,
                        blocks: BlocksRecord::from_srv(&v),
                        t,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            emit_json(
                cli,
                &SegmentReport {
                    start: start.clone(),
                    end: end.clone(),
                    points,
                },
            )?;
            Ok(0)
        }
        Command::Lift { path, endpoints } => {
            let alpha = read_target(path)?;
            let (xs, xe) = match endpoints {
                Some(file) => {
                    let e = read_json::<EndpointsFile>(file)?;
                    (e.start.to_srv(alpha.space())?, e.end.to_srv(alpha.space())?)
                }
                None => (
                    canonical_rv(&alpha.law_at(&Rational::zero())?),
                    canonical_rv(&alpha.law_at(&Rational::one())?),
                ),
            };
            let tol = cli.tol.clone().unwrap_or_else(|| Rational::new(1, 25));
            let (lift, certificate) =
                lift_path(&alpha, &xs, &xe, &tol, cli.iters, grid(cli, DEFAULT_GRID)?)?;
            let history = LiftHistory {
                law_gap_bound: certificate.law_gap_bound.clone(),
                epsilons: certificate.epsilons.clone(),
                decay_table: certificate.decay_table.clone(),
                decay_budget: certificate.decay_budget.clone(),
            };
            let holds = certificate.holds();
            emit_json(
                cli,
                &LiftOutput {
                    lift: LiftFile::from_lift(&lift, history),
                    certificate,
                },
            )?;
            Ok(if holds { 0 } else { 3 })
        }
        Command::Relift { lift, path } => {
            let (prev, _) = read_lift(lift)?;
            let beta = match read_target(path)? {
                TargetPath::Polygonal(beta) => beta,
                TargetPath::Sampled(_) => {
                    return Err(Error::Domain("relift needs a polygonal target path".into()))
                }
            };
            let eps = cli
                .tol
                .clone()
                .ok_or_else(|| Error::Domain("relift needs --tol".into()))?;
            let r = relift_near(&prev, &beta, &eps, grid(cli, DEFAULT_GRID)?)?;
            let history = LiftHistory::default();
            emit_json(
                cli,
                &ReliftOutput {
                    lift: LiftFile::from_lift(&r.lift, history),
                    sup_rho: r.sup_rho,
                    bound: r.bound,
                },
            )?;
            Ok(0)
        }
        Command::Verify { lift, path } => {
            let (lift, history) = read_lift(lift)?;
            let alpha = read_target(path)?;
            let certificate =
                verify_lift(&lift, &alpha, grid(cli, DEFAULT_GRID)?)?.with_history(&history);
            let holds = certificate.holds();
            emit_json(cli, &certificate)?;
            Ok(if holds { 0 } else { 3 })
        }
        Command::Cube { corners } => {
            let c = CubeInterpolation::new(read_json::<CornersFile>(corners)?.into_measures()?)?;
            let report = cube_report(&CubeLift::new(c)?, grid(cli, DEFAULT_CUBE_GRID)?)?;
            let exact = report.max_law_gap.is_zero();
            emit_json(cli, &report)?;
            Ok(if exact { 0 } else { 3 })
        }
        Command::Selftest => {
            let summary = selftest::run(cli.seed);
            emit(cli, &summary.to_string())?;
            Ok(if summary.all_passed() { 0 } else { 3 })
        }
    }
}

/// Accepts both a bare lift file and the output of `lift` / `relift`.
fn read_lift(path: &Path) -> Result<(measure_lift::path::LiftedPath, LiftHistory)> {
    let value: serde_json::Value = read_json(path)?;
    let inner = value.get("lift").cloned().unwrap_or(value);
    let file: LiftFile = serde_json::from_value(inner)
        .map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    file.into_lift()
}
