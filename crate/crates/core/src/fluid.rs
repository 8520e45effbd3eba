use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raw physical inputs. The A-constants are derived from these.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub kappa1: f64,
    pub kappa2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub g: f64,
}

/// Dimensionless contrasts of the two-fluid, two-permeability system.
///
/// `a_rho = 0` is allowed and means no gravity forcing (the flat state is
/// then the only dynamics); negative values are the unstable regime and are
/// rejected.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluidConfig {
    pub a_kappa: f64,
    pub a_mu: f64,
    pub a_rho: f64,
    pub h2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<PhysicalParams>,
}

impl FluidConfig {
    pub fn new(a_kappa: f64, a_mu: f64, a_rho: f64, h2: f64) -> Result<Self> {
        let cfg = Self {
            a_kappa,
            a_mu,
            a_rho,
            h2,
            physical: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_physical(p: PhysicalParams, h2: f64) -> Result<Self> {
        let all = [p.kappa1, p.kappa2, p.mu1, p.mu2];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(
                "permeabilities and viscosities must be positive".into(),
            ));
        }
        let a_kappa = (p.kappa1 - p.kappa2) / (p.kappa1 + p.kappa2);
        let a_mu = (p.mu1 - p.mu2) / (p.mu1 + p.mu2);
        let a_rho = p.g * p.kappa1 * (p.rho2 - p.rho1) / (p.mu1 + p.mu2);
        let cfg = Self {
            a_kappa,
            a_mu,
            a_rho,
            h2,
            physical: Some(p),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a_kappa, self.a_mu, self.a_rho, self.h2]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("fluid constants must be finite".into()));
        }
        if self.a_kappa.abs() >= 1.0 {
            return Err(Error::Config(format!("|a_kappa| must be < 1, got {}", self.a_kappa)));
        }
        if self.a_mu.abs() >= 1.0 {
            return Err(Error::Config(format!("|a_mu| must be < 1, got {}", self.a_mu)));
        }
        if self.a_rho < 0.0 {
            return Err(Error::Config(format!(
                "a_rho must be >= 0 (stable stratification), got {}",
                self.a_rho
            )));
        }
        if self.h2 <= 0.0 {
            return Err(Error::Config(format!("h2 must be > 0, got {}", self.h2)));
        }
        Ok(())
    }

    /// Product `A_κ A_μ`, whose modulus stays below one.
    pub fn coupling(&self) -> f64 {
        self.a_kappa * self.a_mu
    }
}
