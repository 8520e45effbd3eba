//! Run configuration: strict JSON, named initial-data presets, and the
//! config hash that ties outputs and checkpoints to their inputs.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::{InterfaceField, Scheme, StepOptions};
use crate::fluid::{FluidConfig, PhysicalParams};
use crate::norms::{fourier_norm, NormSpec};
use crate::spectral::{forward, GridSpec, SpectralField};
use crate::trajectory::Schedule;
use crate::vorticity::PicardOptions;

pub const SCHEMA_VERSION: u32 = 1;

/// Either the dimensionless constants or the raw physical parameters (or
/// both, in which case they must agree exactly).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_rho: Option<f64>,
    pub h2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalParams>,
}

impl FluidBlock {
    pub fn resolve(&self) -> Result<FluidConfig> {
        let given = (self.a_kappa, self.a_mu, self.a_rho);
        match (self.physical, given) {
            (Some(p), _) => {
                let cfg = FluidConfig::from_physical(p, self.h2)?;
                let pairs = [
                    ("a_kappa", self.a_kappa, cfg.a_kappa),
                    ("a_mu", self.a_mu, cfg.a_mu),
                    ("a_rho", self.a_rho, cfg.a_rho),
                ];
                for (name, stated, derived) in pairs {
                    if let Some(v) = stated.filter(|v| *v != derived) {
                        return Err(Error::Config(format!(
                            "{name} = {v} contradicts the physical parameters ({derived})"
                        )));
                    }
                }
                Ok(cfg)
            }
            (None, (Some(k), Some(m), Some(r))) => FluidConfig::new(k, m, r, self.h2),
            _ => Err(Error::Config(
                "fluid block needs a_kappa, a_mu and a_rho, or a physical block".into(),
            )),
        }
    }
}

impl From<FluidConfig> for FluidBlock {
    fn from(c: FluidConfig) -> Self {
        Self {
            a_kappa: Some(c.a_kappa),
            a_mu: Some(c.a_mu),
            a_rho: Some(c.a_rho),
            h2: c.h2,
            physical: c.physical,
        }
    }
}

fn two_pi() -> f64 {
    2.0 * PI
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub n: usize,
    #[serde(default = "two_pi")]
    pub length: f64,
}

/// Named initial data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// `amplitude · cos(k κ α)`.
    SingleMode { k: i64, amplitude: f64 },
    /// `amplitude · exp(-(α/width)²)`.
    GaussianBump { width: f64, amplitude: f64 },
    /// Coefficients `∝ ξ^{-exponent}` on `1 ≤ k ≤ k_max` with a cosine taper
    /// over the top `taper` fraction, scaled to the given `F^{1,1}` norm.
    PowerLaw {
        exponent: f64,
        f11: f64,
        #[serde(default)]
        k_max: Option<usize>,
        #[serde(default)]
        taper: Option<f64>,
    },
    /// Random phases with amplitudes `amplitude · e^{-decay·k}`, from the config seed.
    RandomModes { modes: usize, amplitude: f64, decay: f64 },
    /// JSON array of `n` samples at the grid nodes.
    FromFile { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub picard_tol: f64,
    pub max_iter: usize,
    pub scheme: Scheme,
    pub cfl_bound: f64,
    pub filter_level: f64,
    /// Bound used by the oracle cross-check.
    pub oracle_tolerance: f64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let s = StepOptions::default();
        Self {
            picard_tol: s.picard.tol,
            max_iter: s.picard.max_iter,
            scheme: s.scheme,
            cfl_bound: s.cfl_bound,
            filter_level: s.filter_level,
            oracle_tolerance: 1e-6,
        }
    }
}

impl SolverBlock {
    pub fn picard(&self) -> PicardOptions {
        PicardOptions {
            tol: self.picard_tol,
            max_iter: self.max_iter,
        }
    }

    pub fn step_options(&self) -> StepOptions {
        StepOptions {
            scheme: self.scheme,
            picard: self.picard(),
            cfl_bound: self.cfl_bound,
            filter_level: self.filter_level,
            linear_only: false,
        }
    }
}

/// Not part of the config hash.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

fn schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "schema")]
    pub schema_version: u32,
    pub fluid: FluidBlock,
    pub grid: GridBlock,
    pub initial: InitialData,
    pub schedule: Schedule,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        // relative data paths are relative to the config file
        if let InitialData::FromFile { path: p } = &mut cfg.initial {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.fluid.resolve()?;
        self.grid()?;
        self.schedule.steps()?;
        let s = &self.solver;
        if !(s.picard_tol > 0.0 && s.max_iter > 0 && s.cfl_bound > 0.0 && s.filter_level >= 0.0 && s.oracle_tolerance > 0.0) {
            return Err(Error::Config("solver tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn fluid(&self) -> Result<FluidConfig> {
        self.fluid.resolve()
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.length)
    }

    pub fn initial_field(&self) -> Result<InterfaceField> {
        build_initial(&self.initial, self.grid()?, self.seed).map(InterfaceField::new)
    }

    /// SHA-256 of the canonical JSON with the output block removed.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputBlock::default();
        let text = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn build_initial(spec: &InitialData, grid: GridSpec, seed: u64) -> Result<SpectralField> {
    let kap = grid.kappa();
    let nyq = (grid.n() / 2) as i64;
    match spec {
        InitialData::Zero => Ok(SpectralField::zeros(grid)),
        InitialData::SingleMode { k, amplitude } => {
            if k.abs() >= nyq {
                return Err(Error::Config(format!("mode {k} is not below the Nyquist mode {nyq}")));
            }
            let kf = *k as f64;
            Ok(SpectralField::from_fn(grid, |a| amplitude * (kf * kap * a).cos()))
        }
        InitialData::GaussianBump { width, amplitude } => {
            if !(*width > 0.0) {
                return Err(Error::Config("gaussian width must be > 0".into()));
            }
            Ok(SpectralField::from_fn(grid, |a| amplitude * (-(a / width).powi(2)).exp()))
        }
        InitialData::PowerLaw { exponent, f11, k_max, taper } => {
            let k_max = k_max.unwrap_or(grid.n() / 3).min(grid.n() / 2 - 1);
            let taper = taper.unwrap_or(0.2);
            if k_max == 0 || !(0.0..=1.0).contains(&taper) {
                return Err(Error::Config("power_law needs k_max >= 1 and taper in [0, 1]".into()));
            }
            let mut f = SpectralField::zeros(grid);
            let start = (1.0 - taper) * k_max as f64;
            for k in 1..=k_max {
                let kf = k as f64;
                let roll = if kf <= start || taper == 0.0 {
                    1.0
                } else {
                    let s = (kf - start) / (k_max as f64 + 1.0 - start);
                    (0.5 * PI * s).cos().powi(2)
                };
                let c = (kf * kap).powf(-exponent) * roll;
                f.set_mode(k as i64, Complex64::new(c, 0.0));
                f.set_mode(-(k as i64), Complex64::new(c, 0.0));
            }
            let norm = fourier_norm(&f, &NormSpec::plain(1.0))?;
            Ok(f.scale(f11 / norm))
        }
        InitialData::RandomModes { modes, amplitude, decay } => {
            if *modes as i64 >= nyq {
                return Err(Error::Config("random_modes needs modes below Nyquist".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut f = SpectralField::zeros(grid);
            for k in 1..=*modes as i64 {
                let phase: f64 = rng.gen_range(0.0..2.0 * PI);
                let c = Complex64::from_polar(amplitude * (-decay * k as f64).exp(), phase);
                f.set_mode(k, c);
                f.set_mode(-k, c.conj());
            }
            Ok(f)
        }
        InitialData::FromFile { path } => {
            let text = std::fs::read_to_string(path)?;
            let samples: Vec<f64> = serde_json::from_str(&text)?;
            forward(&samples, grid)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "fluid": {"a_kappa": 0.5, "a_mu": 0.2, "a_rho": 1.0, "h2": 1.0},
        "grid": {"n": 64},
        "initial": {"kind": "single_mode", "k": 1, "amplitude": 0.01},
        "schedule": {"t_end": 1.0, "dt": 0.1, "snapshot_every": 1}
    }"#;

    #[test]
    fn parses_and_hashes() {
        let c = RunConfig::from_json(BASE).unwrap();
        assert_eq!(c.grid.length, 2.0 * PI);
        let mut d = c.clone();
        d.output.dir = Some("elsewhere".into());
        assert_eq!(c.hash(), d.hash());
        d.seed = 7;
        assert_ne!(c.hash(), d.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = BASE.replace("\"n\": 64", "\"n\": 64, \"points\": 3");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Json(_))));
        let bad = BASE.replace("\"h2\": 1.0}", "\"h2\": 1.0, \"g\": 9.8}");
        assert!(RunConfig::from_json(&bad).is_err());
    }

    #[test]
    fn rechecks_physics() {
        let bad = BASE.replace("\"a_mu\": 0.2", "\"a_mu\": 1.2");
        assert!(matches!(RunConfig::from_json(&bad), Err(Error::Config(_))));
        let phys = BASE.replace(
            "\"a_kappa\": 0.5, \"a_mu\": 0.2, \"a_rho\": 1.0,",
            "\"a_kappa\": 0.5, \"physical\": {\"kappa1\": 3.0, \"kappa2\": 1.0, \"mu1\": 1.0, \"mu2\": 1.0, \"rho1\": 1.0, \"rho2\": 2.0, \"g\": 1.0},",
        );
        let c = RunConfig::from_json(&phys).unwrap();
        assert_eq!(c.fluid().unwrap().a_kappa, 0.5);
        assert_eq!(c.fluid().unwrap().a_rho, 1.5);
        let clash = phys.replace("\"a_kappa\": 0.5", "\"a_kappa\": 0.4");
        assert!(RunConfig::from_json(&clash).is_err());
    }

    #[test]
    fn presets() {
        let g = GridSpec::two_pi(64).unwrap();
        let p = build_initial(&InitialData::PowerLaw { exponent: 0.9, f11: 0.1, k_max: None, taper: None }, g, 0).unwrap();
        assert!((fourier_norm(&p, &NormSpec::plain(1.0)).unwrap() - 0.1).abs() < 1e-14);
        let a = build_initial(&InitialData::RandomModes { modes: 5, amplitude: 0.1, decay: 0.5 }, g, 3).unwrap();
        let b = build_initial(&InitialData::RandomModes { modes: 5, amplitude: 0.1, decay: 0.5 }, g, 3).unwrap();
        assert_eq!(a, b);
        assert!(build_initial(&InitialData::SingleMode { k: 32, amplitude: 1.0 }, g, 0).is_err());
    }
}
