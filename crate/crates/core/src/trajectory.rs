//! Time integration to `t_end` with norm monitoring, the running energy
//! budget, and bit-exact checkpoints.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certify::Certificate;
use crate::error::{Error, Result};
use crate::evolution::{InterfaceField, StepOptions, Stepper};
use crate::fluid::FluidConfig;
use crate::norms::{fourier_norm, norm_report, NormReport, NormSpec};
use crate::spectral::{GridSpec, SpectralField};

/// Relative slack allowed in the budget inequality.
pub const BUDGET_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub t_end: f64,
    pub dt: f64,
    /// Record a row every this many steps (and always at the last step).
    pub snapshot_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_every: Option<usize>,
}

impl Schedule {
    pub fn steps(&self) -> Result<u64> {
        if !(self.dt > 0.0 && self.t_end >= 0.0 && self.dt.is_finite() && self.t_end.is_finite()) {
            return Err(Error::Config(format!(
                "schedule needs dt > 0 and t_end >= 0 (dt = {}, t_end = {})",
                self.dt, self.t_end
            )));
        }
        if self.snapshot_every == 0 || self.checkpoint_every == Some(0) {
            return Err(Error::Config("snapshot and checkpoint intervals must be >= 1".into()));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) {
            return Err(Error::Config(format!(
                "t_end = {} is not a whole number of steps of {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetEntry {
    pub lhs: f64,
    pub rhs: f64,
}

impl BudgetEntry {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + BUDGET_SLACK)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: u64,
    pub t: f64,
    /// Norms with weight `e^{νt|ξ|}`.
    pub weighted: NormReport,
    /// Unweighted norms.
    pub plain: NormReport,
    /// `s = 0` and `s = 1`, present when a certificate supplied the margins.
    pub budget: [Option<BudgetEntry>; 2],
    pub leakage: f64,
    /// `ln(‖f‖²_{L²_ν}(t) / ‖f₀‖²_{L²})`.
    pub l2_growth: f64,
}

/// Budget accumulators carried across steps.
#[derive(Clone, Copy, Debug, PartialEq)]
struct BudgetState {
    nu: f64,
    /// `A_ρθ - A_ρσ_s - ν`, or `None` without a certificate.
    coef: Option<[f64; 2]>,
    rhs: [f64; 2],
    integral: [f64; 2],
    last: [f64; 2],
    l2_0: f64,
}

fn hex(v: f64) -> String {
    format!("{:016x}", v.to_bits())
}

fn unhex(s: &str) -> Result<f64> {
    u64::from_str_radix(s, 16)
        .map(f64::from_bits)
        .map_err(|e| Error::Config(format!("bad hex float '{s}': {e}")))
}

/// Everything needed to continue a run bit for bit. Doubles are stored as
/// the hex of their IEEE bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub version: u32,
    pub config_hash: String,
    pub step: u64,
    pub time: String,
    pub n: usize,
    pub length: String,
    /// `[re, im]` per coefficient, FFT order.
    pub coeffs: Vec<[String; 2]>,
    pub nu: String,
    pub coef: Option<[String; 2]>,
    pub rhs: [String; 2],
    pub integral: [String; 2],
    pub last: [String; 2],
    pub l2_0: String,
}

impl Checkpoint {
    fn capture(hash: &str, step: u64, f: &SpectralField, b: &BudgetState) -> Self {
        let pair = |a: [f64; 2]| [hex(a[0]), hex(a[1])];
        Self {
            version: 1,
            config_hash: hash.to_string(),
            step,
            time: hex(f.time),
            n: f.n(),
            length: hex(f.grid.length()),
            coeffs: f.coeffs.iter().map(|c| [hex(c.re), hex(c.im)]).collect(),
            nu: hex(b.nu),
            coef: b.coef.map(pair),
            rhs: pair(b.rhs),
            integral: pair(b.integral),
            last: pair(b.last),
            l2_0: hex(b.l2_0),
        }
    }

    pub fn time(&self) -> Result<f64> {
        unhex(&self.time)
    }

    pub fn state(&self) -> Result<InterfaceField> {
        let grid = GridSpec::new(self.n, unhex(&self.length)?)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|[re, im]| Ok(Complex64::new(unhex(re)?, unhex(im)?)))
            .collect::<Result<Vec<_>>>()?;
        let f = SpectralField::from_coeffs(grid, coeffs)?.with_time(self.time()?);
        Ok(InterfaceField::new(f))
    }

    fn budget(&self) -> Result<BudgetState> {
        let pair = |a: &[String; 2]| -> Result<[f64; 2]> { Ok([unhex(&a[0])?, unhex(&a[1])?]) };
        Ok(BudgetState {
            nu: unhex(&self.nu)?,
            coef: self.coef.as_ref().map(pair).transpose()?,
            rhs: pair(&self.rhs)?,
            integral: pair(&self.integral)?,
            last: pair(&self.last)?,
            l2_0: unhex(&self.l2_0)?,
        })
    }
}

/// Receives rows and checkpoints as they are produced.
pub trait TrajectorySink {
    fn row(&mut self, _row: &TrajectoryRow) -> Result<()> {
        Ok(())
    }
    fn checkpoint(&mut self, _cp: &Checkpoint) -> Result<()> {
        Ok(())
    }
}

impl TrajectorySink for () {}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub step: StepOptions,
    /// Source of `ν` and the budget margins. Without an admissible one the
    /// run uses `ν = 0` and skips the budget.
    pub certificate: Option<Certificate>,
    /// Stop with a budget error on the first violated row.
    pub enforce_budget: bool,
    pub config_hash: String,
    pub resume: Option<Checkpoint>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    pub final_state: InterfaceField,
    pub nu: f64,
    pub steps: u64,
}

fn weighted(field: &SpectralField, s: f64, nu: f64) -> Result<f64> {
    fourier_norm(field, &NormSpec::new(s, nu, field.time))
}

fn make_row(step: u64, f: &InterfaceField, b: &BudgetState) -> Result<TrajectoryRow> {
    let w = norm_report(&f.f, b.nu)?;
    let plain = norm_report(&f.f, 0.0)?;
    let mut budget = [None, None];
    if let Some(coef) = b.coef {
        let lhs = [w.f01, w.f11];
        for s in 0..2 {
            budget[s] = Some(BudgetEntry {
                lhs: lhs[s] + coef[s] * b.integral[s],
                rhs: b.rhs[s],
            });
        }
    }
    let l2_growth = if b.l2_0 > 0.0 {
        (w.l2nu * w.l2nu / (b.l2_0 * b.l2_0)).ln()
    } else {
        0.0
    };
    Ok(TrajectoryRow {
        step,
        t: f.time(),
        weighted: w,
        plain,
        budget,
        leakage: f.leakage(),
        l2_growth,
    })
}

/// Runs the schedule, streaming rows and checkpoints to `sink`.
pub fn run_with(
    f0: &InterfaceField,
    cfg: &FluidConfig,
    schedule: &Schedule,
    opts: &RunOptions,
    sink: &mut dyn TrajectorySink,
) -> Result<Trajectory> {
    cfg.validate()?;
    f0.check_geometry(cfg)?;
    let total = schedule.steps()?;
    let stepper = Stepper::new(f0.f.grid, schedule.dt, cfg, opts.step)?;

    let (mut state, mut b, start) = match &opts.resume {
        Some(cp) => {
            if cp.config_hash != opts.config_hash {
                return Err(Error::Config(format!(
                    "checkpoint belongs to config {} but this run is {}",
                    cp.config_hash, opts.config_hash
                )));
            }
            if cp.step > total {
                return Err(Error::Config("checkpoint lies beyond t_end".into()));
            }
            (cp.state()?, cp.budget()?, cp.step)
        }
        None => {
            let cert = opts.certificate.as_ref().filter(|c| c.is_admissible());
            let nu = cert.map_or(0.0, |c| c.nu);
            let coef = cert.and_then(|c| c.margins).map(|m| [m[0] - nu, m[1] - nu]);
            let f = f0.f.clone().with_time(0.0);
            let b = BudgetState {
                nu,
                coef,
                rhs: [weighted(&f, 0.0, 0.0)?, weighted(&f, 1.0, 0.0)?],
                integral: [0.0; 2],
                last: [weighted(&f, 1.0, nu)?, weighted(&f, 2.0, nu)?],
                l2_0: crate::norms::weighted_l2(&f, &NormSpec::plain(0.0))?,
            };
            (InterfaceField::new(f), b, 0)
        }
    };

    let mut rows = Vec::new();
    let mut emit = |row: TrajectoryRow, sink: &mut dyn TrajectorySink| -> Result<()> {
        sink.row(&row)?;
        if opts.enforce_budget {
            for (s, e) in row.budget.iter().enumerate() {
                if let Some(e) = e.filter(|e| !e.holds()) {
                    return Err(Error::Budget {
                        time: row.t,
                        s: s as u8,
                        lhs: e.lhs,
                        rhs: e.rhs,
                    });
                }
            }
        }
        rows.push(row);
        Ok(())
    };

    if opts.resume.is_none() {
        emit(make_row(0, &state, &b)?, sink)?;
    }
    for step in start + 1..=total {
        let mut next = stepper.step(&state)?;
        next.f.time = step as f64 * schedule.dt;
        let cur = [weighted(&next.f, 1.0, b.nu)?, weighted(&next.f, 2.0, b.nu)?];
        for s in 0..2 {
            b.integral[s] += 0.5 * schedule.dt * (b.last[s] + cur[s]);
        }
        b.last = cur;
        state = next;
        if step % schedule.snapshot_every as u64 == 0 || step == total {
            emit(make_row(step, &state, &b)?, sink)?;
        }
        if let Some(every) = schedule.checkpoint_every {
            if step % every as u64 == 0 {
                sink.checkpoint(&Checkpoint::capture(&opts.config_hash, step, &state.f, &b))?;
            }
        }
    }
    Ok(Trajectory {
        rows,
        final_state: state,
        nu: b.nu,
        steps: total,
    })
}

/// Runs the schedule and collects the rows.
pub fn run(f0: &InterfaceField, cfg: &FluidConfig, schedule: &Schedule, opts: &RunOptions) -> Result<Trajectory> {
    run_with(f0, cfg, schedule, opts, &mut ())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Keep(Vec<Checkpoint>);
    impl TrajectorySink for Keep {
        fn checkpoint(&mut self, cp: &Checkpoint) -> Result<()> {
            self.0.push(cp.clone());
            Ok(())
        }
    }

    fn cfg() -> FluidConfig {
        FluidConfig::new(0.5, 0.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn zero_datum_stays_zero() {
        let g = GridSpec::two_pi(32).unwrap();
        let f0 = InterfaceField::new(SpectralField::zeros(g));
        let sch = Schedule { t_end: 0.5, dt: 0.1, snapshot_every: 1, checkpoint_every: None };
        let tr = run(&f0, &cfg(), &sch, &RunOptions::default()).unwrap();
        assert_eq!(tr.rows.len(), 6);
        assert!(tr.rows.iter().all(|r| r.plain.f01 == 0.0 && r.weighted.f11 == 0.0));
    }

    #[test]
    fn schedule_validation() {
        let bad = Schedule { t_end: 1.0, dt: 0.3, snapshot_every: 1, checkpoint_every: None };
        assert!(matches!(bad.steps(), Err(Error::Config(_))));
        let ok = Schedule { t_end: 1.0, dt: 0.1, snapshot_every: 1, checkpoint_every: None };
        assert_eq!(ok.steps().unwrap(), 10);
    }

    #[test]
    fn hex_round_trip() {
        for v in [0.0, -0.0, 1.0 / 3.0, f64::MIN_POSITIVE, -1e300] {
            assert_eq!(unhex(&hex(v)).unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn restart_is_bitwise() {
        let g = GridSpec::two_pi(32).unwrap();
        let f0 = InterfaceField::new(SpectralField::from_fn(g, |a| 0.02 * a.cos() + 0.01 * (2.0 * a).sin()));
        let cert = crate::certify::certify_datum(&f0, &cfg()).unwrap();
        let sch = Schedule { t_end: 0.4, dt: 0.05, snapshot_every: 2, checkpoint_every: Some(4) };
        let opts = RunOptions { certificate: Some(cert), config_hash: "h".into(), ..Default::default() };
        let mut keep = Keep(Vec::new());
        let full = run_with(&f0, &cfg(), &sch, &opts, &mut keep).unwrap();
        let cp = keep.0[0].clone();
        assert_eq!(cp.step, 4);
        let resumed = run(&f0, &cfg(), &sch, &RunOptions { resume: Some(cp), ..opts.clone() }).unwrap();
        assert_eq!(resumed.final_state.f.coeffs, full.final_state.f.coeffs);
        let tail: Vec<_> = full.rows.iter().filter(|r| r.step > 4).cloned().collect();
        assert_eq!(resumed.rows, tail);
        let wrong = RunOptions { config_hash: "other".into(), resume: Some(keep.0[0].clone()), ..opts };
        assert!(matches!(run(&f0, &cfg(), &sch, &wrong), Err(Error::Config(_))));
    }

    #[test]
    fn budget_holds_on_small_datum() {
        let g = GridSpec::two_pi(32).unwrap();
        let f0 = InterfaceField::new(SpectralField::from_fn(g, |a| 0.02 * a.cos()));
        let cert = crate::certify::certify_datum(&f0, &cfg()).unwrap();
        assert!(cert.is_admissible());
        let sch = Schedule { t_end: 1.0, dt: 0.05, snapshot_every: 1, checkpoint_every: None };
        let opts = RunOptions { certificate: Some(cert), enforce_budget: true, ..Default::default() };
        let tr = run(&f0, &cfg(), &sch, &opts).unwrap();
        assert!(tr.nu > 0.0);
        for r in &tr.rows {
            assert!(r.budget.iter().all(|e| e.unwrap().holds()));
        }
    }
}
