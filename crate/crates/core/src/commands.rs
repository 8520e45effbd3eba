//! The operations behind the command-line tool, usable directly from code.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{certify_datum, Certificate, Verdict};
use crate::config::{InitialData, RunConfig};
use crate::error::{Error, Result};
use crate::evolution::{linear_symbol, rhs, InterfaceField, RhsOptions, StepOptions, Stepper};
use crate::fluid::FluidConfig;
use crate::oracle;
use crate::spectral::{GridSpec, SpectralField};
use crate::trajectory::{run_with, Checkpoint, Trajectory, TrajectoryRow, TrajectorySink, RunOptions};
use crate::vorticity::{omega2_of_omega1, Omega2Method};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "MUSKAT_OUTPUT_DIR";

pub const CSV_HEADER: &str = "t,F01,F11,F21,F3half,L2nu,strip_radius,budget_s0_lhs,budget_s0_rhs,budget_s1_lhs,budget_s1_rhs,leakage";

fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.16e}"),
        _ => "nan".into(),
    }
}

/// One CSV line. The `F` columns are unweighted; `L2nu` carries the weight.
pub fn csv_line(r: &TrajectoryRow) -> String {
    let b = |s: usize| r.budget[s].map(|e| (e.lhs, e.rhs));
    [
        num(Some(r.t)),
        num(Some(r.plain.f01)),
        num(Some(r.plain.f11)),
        num(Some(r.plain.f21)),
        num(Some(r.plain.f3half)),
        num(Some(r.weighted.l2nu)),
        num(r.plain.strip_radius),
        num(b(0).map(|p| p.0)),
        num(b(0).map(|p| p.1)),
        num(b(1).map(|p| p.0)),
        num(b(1).map(|p| p.1)),
        num(Some(r.leakage)),
    ]
    .join(",")
}

/// Resolves the output directory: explicit flag, then config, then the
/// environment, then `./muskat-out`.
pub fn output_dir(flag: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.output.dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("muskat-out"))
}

#[derive(Clone, Debug, Default)]
pub struct RunRequest {
    pub output_dir: PathBuf,
    pub require_certificate: bool,
    pub resume: Option<PathBuf>,
}

#[derive(Serialize)]
struct CertificateSummary<'a> {
    verdict: Verdict,
    a0: f64,
    a1: f64,
    k0: f64,
    k1: f64,
    margins: Option<[f64; 3]>,
    reasons: &'a [String],
}

#[derive(Serialize)]
struct Metadata<'a> {
    config_hash: String,
    nu: f64,
    certificate: CertificateSummary<'a>,
    versions: Versions,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct Versions {
    muskat: &'static str,
    config_schema: u32,
    checkpoint: u32,
}

struct FileSink {
    csv: BufWriter<File>,
    dir: PathBuf,
}

impl TrajectorySink for FileSink {
    fn row(&mut self, row: &TrajectoryRow) -> Result<()> {
        writeln!(self.csv, "{}", csv_line(row))?;
        self.csv.flush()?;
        Ok(())
    }

    fn checkpoint(&mut self, cp: &Checkpoint) -> Result<()> {
        let path = self.dir.join(format!("checkpoint_{:010}.json", cp.step));
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(cp)?)?;
        fs::rename(tmp, path)?;
        Ok(())
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

/// Integrates the configured datum, writing `trajectory.csv`,
/// `metadata.json`, `timestamps.json` and periodic checkpoints.
pub fn cmd_run(cfg: &RunConfig, req: &RunRequest) -> Result<(Trajectory, Certificate)> {
    let started = unix_now();
    let fluid = cfg.fluid()?;
    let mut step_opts = cfg.solver.step_options();
    step_opts.linear_only = false;
    let f0 = cfg.initial_field()?;
    let cert = certify_datum(&f0, &fluid)?;
    if req.require_certificate && !cert.is_admissible() {
        return Err(Error::Inadmissible(cert.reasons.join("; ")));
    }
    let dir = &req.output_dir;
    fs::create_dir_all(dir)?;
    let hash = cfg.hash();
    let resume = match &req.resume {
        Some(p) => Some(serde_json::from_str::<Checkpoint>(&fs::read_to_string(p)?)?),
        None => None,
    };

    let csv_path = dir.join("trajectory.csv");
    let csv = match &resume {
        None => {
            let mut w = BufWriter::new(File::create(&csv_path)?);
            writeln!(w, "{CSV_HEADER}")?;
            w
        }
        Some(cp) => {
            // keep the rows up to the checkpoint, drop anything written after it
            let t_cp = cp.time()?;
            let old = fs::read_to_string(&csv_path).unwrap_or_default();
            let mut kept = vec![CSV_HEADER.to_string()];
            for line in old.lines().skip(1) {
                let t: f64 = line.split(',').next().and_then(|s| s.parse().ok()).unwrap_or(f64::INFINITY);
                if t <= t_cp {
                    kept.push(line.to_string());
                }
            }
            let mut w = BufWriter::new(File::create(&csv_path)?);
            for line in kept {
                writeln!(w, "{line}")?;
            }
            w
        }
    };

    let admissible = cert.is_admissible();
    let opts = RunOptions {
        step: step_opts,
        certificate: Some(cert.clone()),
        enforce_budget: admissible,
        config_hash: hash.clone(),
        resume,
    };
    let meta = Metadata {
        config_hash: hash,
        nu: if admissible { cert.nu } else { 0.0 },
        certificate: CertificateSummary {
            verdict: cert.verdict,
            a0: cert.a0,
            a1: cert.a1,
            k0: cert.k0,
            k1: cert.k1,
            margins: cert.margins,
            reasons: &cert.reasons,
        },
        versions: Versions {
            muskat: env!("CARGO_PKG_VERSION"),
            config_schema: crate::config::SCHEMA_VERSION,
            checkpoint: 1,
        },
        config: cfg,
    };
    fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&meta)? + "\n")?;

    let mut sink = FileSink {
        csv,
        dir: dir.clone(),
    };
    let result = run_with(&f0, &fluid, &cfg.schedule, &opts, &mut sink);
    sink.csv.flush()?;
    let stamps = serde_json::json!({ "started_unix": started, "finished_unix": unix_now() });
    fs::write(dir.join("timestamps.json"), serde_json::to_string_pretty(&stamps)? + "\n")?;
    Ok((result?, cert))
}

pub fn cmd_certify(cfg: &RunConfig) -> Result<Certificate> {
    certify_datum(&cfg.initial_field()?, &cfg.fluid()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionRow {
    pub k: i64,
    pub xi: f64,
    pub m_exact: f64,
    pub m_measured: Option<f64>,
    pub rel_err: Option<f64>,
}

/// Decay rate of a tiny single mode, `-ln(|c_k(T)|/|c_k(0)|)/T`, from the
/// full nonlinear integrator.
pub fn measured_decay_rate(
    grid: GridSpec,
    cfg: &FluidConfig,
    k: i64,
    amplitude: f64,
    dt: f64,
    steps: usize,
    opts: StepOptions,
) -> Result<f64> {
    let kap = grid.kappa();
    let f0 = SpectralField::from_fn(grid, |a| amplitude * (k as f64 * kap * a).cos());
    let stepper = Stepper::new(grid, dt, cfg, opts)?;
    let mut s = InterfaceField::new(f0.clone());
    for _ in 0..steps {
        s = stepper.step(&s)?;
    }
    let t = dt * steps as f64;
    Ok(-(s.f.mode(k).norm() / f0.mode(k).norm()).ln() / t)
}

/// Tabulates the linear symbol for `k = 1..=k_max`, optionally measuring each rate.
pub fn cmd_linear(cfg: &RunConfig, k_max: i64, measure: bool) -> Result<Vec<DispersionRow>> {
    let fluid = cfg.fluid()?;
    let grid = cfg.grid()?;
    let opts = cfg.solver.step_options();
    let ks: Vec<i64> = (1..=k_max).collect();
    let rows = ks
        .par_iter()
        .map(|&k| {
            let xi = k as f64 * grid.kappa();
            let m_exact = linear_symbol(xi, &fluid);
            let m_measured = if measure {
                Some(measured_decay_rate(grid, &fluid, k, 1e-6, 0.02, 5, opts)?)
            } else {
                None
            };
            let rel_err = m_measured.map(|m| ((m - m_exact) / m_exact).abs());
            Ok(DispersionRow { k, xi, m_exact, m_measured, rel_err })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn dispersion_csv(rows: &[DispersionRow]) -> String {
    let mut s = String::from("k,xi,m_exact,m_measured,rel_err\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.k,
            num(Some(r.xi)),
            num(Some(r.m_exact)),
            num(r.m_measured),
            num(r.rel_err)
        ));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    /// Max relative discrepancy per comparison, in a fixed order.
    pub discrepancies: Vec<(String, f64)>,
    pub bound: f64,
}

impl OracleReport {
    pub fn worst(&self) -> (&str, f64) {
        self.discrepancies
            .iter()
            .fold(("none", 0.0), |acc, (n, v)| if *v > acc.1 { (n, *v) } else { acc })
    }

    pub fn check(&self) -> Result<()> {
        let (what, value) = self.worst();
        if value > self.bound || value.is_nan() {
            Err(Error::OracleMismatch {
                what: what.into(),
                value,
                bound: self.bound,
            })
        } else {
            Ok(())
        }
    }
}

fn rel_sup(fast: &[f64], slow: &[f64]) -> f64 {
    let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = fast.iter().zip(slow).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if err == 0.0 {
        0.0
    } else {
        err / scale.max(f64::MIN_POSITIVE)
    }
}

/// Compares the fast paths with the brute-force oracle on one datum.
/// `corrupt` perturbs the fast right-hand side, to prove the detector fires.
pub fn oracle_report(f: &InterfaceField, fluid: &FluidConfig, picard_tol: f64, bound: f64, corrupt: bool) -> Result<OracleReport> {
    let opts = RhsOptions {
        picard: crate::vorticity::PicardOptions { tol: picard_tol, max_iter: 500 },
        n_terms: false,
    };
    let fast = rhs(f, fluid, &opts)?;
    let mut fast_rhs = fast.total.to_samples();
    if corrupt {
        fast_rhs.iter_mut().for_each(|v| *v *= 1.0 + 1e-3);
        if let Some(v) = fast_rhs.first_mut() {
            *v += 1e-3;
        }
    }
    let (w1, w2, _) = oracle::solve_vorticity(f, fluid, picard_tol, 500)?;
    let slow_rhs = oracle::quad_rhs_given(f, fluid, &w1, &w2)?;
    let fast_w1 = fast.vorticity.omega1.to_samples();
    let fast_w2 = fast.vorticity.omega2.to_samples();
    let quad_w2 = omega2_of_omega1(f, &fast.vorticity.omega1, fluid, Omega2Method::Quadrature, 1e-12)?.to_samples();
    let slow_w2_given = oracle::quad_omega2(f, &fast_w1, fluid)?;

    let mut d = vec![
        ("omega1".to_string(), rel_sup(&fast_w1, &w1)),
        ("omega2".to_string(), rel_sup(&fast_w2, &w2)),
        ("omega2 of omega1".to_string(), rel_sup(&quad_w2, &slow_w2_given)),
        ("rhs".to_string(), rel_sup(&fast_rhs, &slow_rhs)),
    ];
    match omega2_of_omega1(f, &fast.vorticity.omega1, fluid, Omega2Method::Series { n_max: None }, 1e-12) {
        Ok(series) => d.push(("omega2 series".into(), rel_sup(&series.to_samples(), &slow_w2_given))),
        Err(Error::MethodUnavailable(_)) => {}
        Err(e) => return Err(e),
    }
    let (tang, soil, normal) = oracle::br_residuals(f, &w1, &w2, fluid, &slow_rhs)?;
    let s1 = w1.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let s2 = w2.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let s3 = slow_rhs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let rel = |e: f64, s: f64| if e == 0.0 { 0.0 } else { e / s };
    d.push(("trace tangential".into(), rel(tang, s1)));
    d.push(("trace soil".into(), if fluid.a_kappa == 0.0 { 0.0 } else { rel(soil, s2) }));
    d.push(("trace normal".into(), rel(normal, s3)));
    Ok(OracleReport {
        discrepancies: d,
        bound,
    })
}

pub fn cmd_oracle_check(cfg: &RunConfig, corrupt: bool) -> Result<OracleReport> {
    let f = cfg.initial_field()?;
    oracle_report(&f, &cfg.fluid()?, cfg.solver.picard_tol, cfg.solver.oracle_tolerance, corrupt)
}

/// Outcome of one sweep member.
#[derive(Clone, Debug, Serialize)]
pub struct SweepOutcome {
    pub config: PathBuf,
    pub output_dir: PathBuf,
    pub exit_code: i32,
    pub message: String,
}

/// Runs independent configs in parallel, each into its own subdirectory.
pub fn cmd_sweep(configs: &[PathBuf], output_root: &Path, threads: usize, require_certificate: bool) -> Result<Vec<SweepOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let outcomes = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(i, path)| {
                let stem = path.file_stem().map_or_else(|| format!("run{i}"), |s| s.to_string_lossy().into_owned());
                let out = output_root.join(format!("{i:03}_{stem}"));
                let res = RunConfig::load(path).and_then(|cfg| {
                    let req = RunRequest {
                        output_dir: out.clone(),
                        require_certificate,
                        resume: None,
                    };
                    cmd_run(&cfg, &req)
                });
                let (exit_code, message) = match res {
                    Ok(_) => (0, "ok".to_string()),
                    Err(e) => (e.exit_code(), e.to_string()),
                };
                SweepOutcome {
                    config: path.clone(),
                    output_dir: out,
                    exit_code,
                    message,
                }
            })
            .collect()
    });
    Ok(outcomes)
}

/// Convenience for tests and examples: a config around a datum preset.
pub fn simple_config(fluid: FluidConfig, n: usize, length: f64, initial: InitialData, schedule: crate::trajectory::Schedule) -> RunConfig {
    RunConfig {
        schema_version: crate::config::SCHEMA_VERSION,
        fluid: fluid.into(),
        grid: crate::config::GridBlock { n, length },
        initial,
        schedule,
        solver: Default::default(),
        output: Default::default(),
        seed: 0,
    }
}

/// Exit code of a result, `0` on success.
pub fn exit_code<T>(r: &Result<T>) -> i32 {
    match r {
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::Schedule;
    use std::f64::consts::PI;

    fn fluid() -> FluidConfig {
        FluidConfig::new(0.5, 0.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(num(None), "nan");
        assert_eq!(num(Some(f64::NAN)), "nan");
        let s = num(Some(0.1));
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(CSV_HEADER.split(',').count(), 12);
    }

    #[test]
    fn classical_table_is_rho_xi() {
        let f = FluidConfig::new(0.0, 0.3, 2.0, 1.0).unwrap();
        let sch = Schedule { t_end: 0.1, dt: 0.1, snapshot_every: 1, checkpoint_every: None };
        let cfg = simple_config(f, 32, 2.0 * PI, InitialData::Zero, sch);
        for r in cmd_linear(&cfg, 6, false).unwrap() {
            assert_eq!(r.m_exact, 2.0 * r.xi);
        }
    }

    #[test]
    fn flat_oracle_is_exact() {
        let g = GridSpec::two_pi(32).unwrap();
        let f = InterfaceField::new(SpectralField::zeros(g));
        let rep = oracle_report(&f, &fluid(), 1e-13, 1e-6, false).unwrap();
        assert!(rep.discrepancies.iter().all(|(_, v)| *v == 0.0), "{rep:?}");
        let bad = oracle_report(&f, &fluid(), 1e-13, 1e-6, true).unwrap();
        assert!(matches!(bad.check(), Err(Error::OracleMismatch { .. })));
    }

    #[test]
    fn inadmissible_gate() {
        let sch = Schedule { t_end: 0.1, dt: 0.1, snapshot_every: 1, checkpoint_every: None };
        let cfg = simple_config(fluid(), 32, 2.0 * PI, InitialData::SingleMode { k: 1, amplitude: 0.9 }, sch);
        let dir = tempfile::tempdir().unwrap();
        let req = RunRequest {
            output_dir: dir.path().to_path_buf(),
            require_certificate: true,
            resume: None,
        };
        let err = cmd_run(&cfg, &req).unwrap_err();
        assert_eq!(err.exit_code(), 6);
    }
}
