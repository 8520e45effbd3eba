//! Explicit constants behind the medium-size global existence result:
//! the dissipation floor `θ`, the constants `C₀…C₁₄`, `λ₀…λ₇`, the
//! nonlinear rates `σ₀, σ₁, σ₂`, the size thresholds `(k₀, k₁)` and
//! per-datum certificates.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::InterfaceField;
use crate::fluid::FluidConfig;
use crate::norms::{fourier_norm, NormSpec};

/// Every series is summed until its rigorous tail bound drops below this.
pub const TAIL_TARGET: f64 = 1e-12;

const MAX_TERMS: usize = 2_000_000;

/// A series value together with the bound on the discarded tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    pub tail: f64,
    pub terms: usize,
}

/// `Σ_{n ≥ start} n^p r_n x^{n-shift}` with `r_n = n^n e^{-n}/n!` (`r_0 = 1`).
///
/// Uses `r_n ≤ (2πn)^{-1/2}`; past `N` the majorant terms shrink at least
/// geometrically with ratio `x((N+2)/(N+1))^p`.
fn stirling_series(x: f64, p: i32, shift: i32, start: usize) -> Option<SeriesSum> {
    if !(0.0..1.0).contains(&x) {
        return None;
    }
    let mut value = 0.0;
    let mut ln_fact = 0.0;
    for n in 0..MAX_TERMS {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        if n >= start {
            let nf = n as f64;
            let e = n as i32 - shift;
            let term = if n == 0 {
                if e == 0 {
                    1.0
                } else {
                    0.0
                }
            } else if x == 0.0 {
                if e == 0 {
                    nf.powi(p) * (nf * nf.ln() - nf - ln_fact).exp()
                } else {
                    0.0
                }
            } else {
                (p as f64 * nf.ln() + nf * nf.ln() - nf - ln_fact + e as f64 * x.ln()).exp()
            };
            value += term;
        }
        if n + 1 >= start.max(1) {
            let m = (n + 1) as f64;
            if x == 0.0 && n as i32 + 1 > shift {
                return Some(SeriesSum {
                    value,
                    tail: 0.0,
                    terms: n + 1,
                });
            }
            let rho = x * ((m + 1.0) / m).powi(p);
            if rho < 1.0 {
                let first = m.powi(p) * x.powf(m - shift as f64) / (2.0 * PI * m).sqrt();
                let tail = first / (1.0 - rho);
                if tail < TAIL_TARGET {
                    return Some(SeriesSum {
                        value,
                        tail,
                        terms: n + 1,
                    });
                }
            }
        }
    }
    None
}

/// `Σ_{n≥1} n ((n-½)/(e h₂))^{n-½} a₀^{n-1} / n!` (the `F^{1/2,1}` factor excluded).
fn half_order_series(a0: f64, h2: f64) -> Option<SeriesSum> {
    let x = a0 / h2;
    if !(0.0..1.0).contains(&x) {
        return None;
    }
    let mut value = 0.0;
    let mut ln_fact = 0.0;
    for n in 1..MAX_TERMS {
        let nf = n as f64;
        ln_fact += nf.ln();
        let m = nf - 0.5;
        let pow = if n == 1 { 0.0 } else { (nf - 1.0) * a0.ln() };
        value += (nf.ln() + m * (m.ln() - 1.0 - h2.ln()) - ln_fact + pow).exp();
        if x == 0.0 {
            return Some(SeriesSum {
                value,
                tail: 0.0,
                terms: 1,
            });
        }
        // term_n ≤ x^{n-1}/sqrt(π h₂) by Stirling and Gautschi
        let tail = x.powf(nf) / ((PI * h2).sqrt() * (1.0 - x));
        if tail < TAIL_TARGET {
            return Some(SeriesSum {
                value,
                tail,
                terms: n,
            });
        }
    }
    None
}

fn invert(name: &str, denom: f64) -> Result<f64> {
    if denom > 0.0 && denom.is_finite() {
        Ok(1.0 / denom)
    } else {
        Err(Error::Regime(format!(
            "{name} is undefined: its denominator is {denom:.6e} <= 0"
        )))
    }
}

fn divergent(what: &str, a0: f64, a1: f64, h2: f64) -> Error {
    Error::DivergentSeries(format!(
        "{what} at a0 = {a0:.6e}, a1 = {a1:.6e} (needs a0 < h2 = {h2}, a1 < 1)"
    ))
}

/// `inf_ξ (1 - A_κ(1-A_μ)/(e^{2h₂|ξ|} - A_κA_μ))` in closed form.
pub fn theta_closed_form(cfg: &FluidConfig) -> f64 {
    let num = cfg.a_kappa * (1.0 - cfg.a_mu);
    if num >= 0.0 {
        1.0 - num / (1.0 - cfg.coupling())
    } else {
        1.0
    }
}

/// The same infimum by scanning `ξ ∈ [0, 50]` with step `1e-3`, together with
/// the `ξ → ∞` limit (which is 1).
pub fn theta_scan(cfg: &FluidConfig) -> f64 {
    let num = cfg.a_kappa * (1.0 - cfg.a_mu);
    let c = cfg.coupling();
    let mut best = 1.0f64;
    for i in 0..=50_000 {
        let xi = i as f64 * 1e-3;
        best = best.min(1.0 - num / ((2.0 * cfg.h2 * xi).exp() - c));
    }
    best
}

/// Closed-form `θ`, cross-checked against the grid scan.
pub fn theta(cfg: &FluidConfig) -> Result<f64> {
    let closed = theta_closed_form(cfg);
    let scan = theta_scan(cfg);
    if (closed - scan).abs() > 1e-9 {
        return Err(Error::Consistency(format!(
            "theta closed form {closed} disagrees with scan {scan}"
        )));
    }
    Ok(closed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantLedger {
    pub a0: f64,
    pub a1: f64,
    pub theta: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c9: f64,
    pub c11: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub lambda4: f64,
    pub lambda5: f64,
    pub lambda6: f64,
    pub lambda7: f64,
    pub sigma0: f64,
    pub sigma1: f64,
    /// Tail bound of each summed series, keyed by constant name.
    pub tails: Vec<(String, f64)>,
    #[serde(skip)]
    pub(crate) cfg: Option<FluidConfig>,
    #[serde(skip)]
    pub(crate) c2_over_a0: f64,
}

/// Constants that additionally depend on `‖f‖_{F^{3/2,1}}` and `‖f‖_{F^{1/2,1}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2Constants {
    pub f3half: f64,
    pub fhalf: f64,
    pub c7: f64,
    pub c8: f64,
    pub c10: f64,
    pub c12: f64,
    pub c13: f64,
    pub c14: f64,
    pub sigma2: f64,
}

/// Evaluates the constants at `a0 = ‖f‖_{F^{0,1}}`, `a1 = ‖f‖_{F^{1,1}}`.
pub fn ledger(a0: f64, a1: f64, cfg: &FluidConfig) -> Result<ConstantLedger> {
    if !(a0 >= 0.0 && a1 >= 0.0) {
        return Err(Error::Domain(format!("norms must be >= 0, got ({a0}, {a1})")));
    }
    let ak = cfg.a_kappa.abs();
    let am = cfg.a_mu.abs();
    let h2 = cfg.h2;
    let x = a0 / h2;
    if !(a1 < 1.0) {
        return Err(divergent("C6", a0, a1, h2));
    }
    let s0 = stirling_series(x, 0, 0, 0).ok_or_else(|| divergent("C0", a0, a1, h2))?;
    let s2 = stirling_series(x, 1, 0, 1).ok_or_else(|| divergent("C2", a0, a1, h2))?;
    let s2a = stirling_series(x, 1, 1, 1).ok_or_else(|| divergent("C2/a0", a0, a1, h2))?;
    let y = 0.5 * x;
    let l4a = stirling_series(y, 1, 0, 1).ok_or_else(|| divergent("lambda4", a0, a1, h2))?;
    let l4b = stirling_series(y, 0, 0, 1).ok_or_else(|| divergent("lambda4", a0, a1, h2))?;

    let theta = theta(cfg)?;
    let c0 = s0.value;
    let c2 = s2.value;
    let q = 1.0 - a1 * a1;
    let c6 = a1 / q;
    let c1 = invert("C1", 1.0 - am * (2.0 * a1 / q + ak * c0 * c0 * (1.0 + a1)))?;
    let c3 = 1.0
        + 2.0 * am * c1
            * (a1 * (1.0 + a1 * a1) / (q * q)
                + 0.5 * ak * c0 * ((c0 + 2.0 * c2) * a1 + c2 * (1.0 + a1)));
    let c4 = c2 + c0 * c3;
    let cc = cfg.coupling();
    let c5 = cc.abs() / (1.0 - cc);
    let lambda0 = c0 * (c0 + c2 + c4) * a1;
    let lambda1 = 4.0 * c6 + 2.0 * ak * c0 * (c0 * a1 + (c0 - 1.0));
    let lambda2 = 2.0 * (c0 - 1.0) * c3 + 2.0 * c2;
    let lambda3 = 4.0 * (1.0 + a1 * a1) / (q * q) * a1
        + 4.0 * c3 * c6
        + 2.0 * ak * c0 * (c0 + c2 + c4) * a1
        + 2.0 * ak * (c0 * c2 + (c0 - 1.0) * c4);
    let opm = (1.0 + cfg.a_mu).abs();
    let sigma0 = c1
        * ((c6 + ak * c0 * c0) * a1
            + 0.5 * opm * (2.0 * ak * (c0 - 1.0) + c5 * (2.0 * ak * (c0 - 1.0) + lambda1))
            + 2.0 * PI * ak * c0 * (c0 - 1.0)
            + am * lambda1
            + c6 * a1);
    // C6²/a1 written without the division so the a1 → 0 limit is exact
    let c6_sq_over_a1 = a1 / (q * q);
    let sigma1 = c1
        * (2.0 * (1.0 + 0.5 * c3 * q) * c6 * c6
            + ak * lambda0
            + 0.5 * opm * (ak * lambda2 + c5 * (ak * lambda2 + lambda3))
            + 2.0 * PI * ak * (c0 * c2 + (c0 * c0 - 1.0) * c4)
            + 0.5 * am * lambda3
            + c3 * c6 * a1
            + 2.0 * c6_sq_over_a1);
    let lambda4 = 0.5 * (l4a.value + l4b.value);
    let lambda5 = 2.0 * c6 + a1 * (c0 + c2);
    let lambda6 = 2.0 * (1.0 + a1 * a1) / (q * q) + c0;
    let lambda7 = c0 - 1.0 + c2;
    let c9 = c0 * (1.0 + a1);
    let c11 = invert("C11", 1.0 - am * c6 - ak * am * c0 * c9)?;

    Ok(ConstantLedger {
        a0,
        a1,
        theta,
        c0,
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        c9,
        c11,
        lambda0,
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        lambda5,
        lambda6,
        lambda7,
        sigma0,
        sigma1,
        tails: vec![
            ("C0".into(), s0.tail),
            ("C2".into(), s2.tail),
            ("C2/a0".into(), s2a.tail / h2),
            ("lambda4".into(), 0.5 * (l4a.tail + l4b.tail)),
        ],
        cfg: Some(*cfg),
        c2_over_a0: s2a.value / h2,
    })
}

impl ConstantLedger {
    /// Constants that also need `‖f‖_{F^{3/2,1}}` and `‖f‖_{F^{1/2,1}}`. Without
    /// the latter, the interpolation bound `sqrt(a0 a1)` stands in.
    pub fn l2_constants(&self, f3half: f64, fhalf: Option<f64>) -> Result<L2Constants> {
        let cfg = self.cfg.expect("ledger built through ledger()");
        let ak = cfg.a_kappa.abs();
        let am = cfg.a_mu.abs();
        let a1 = self.a1;
        let fhalf = fhalf.unwrap_or_else(|| (self.a0 * a1).sqrt());
        let q = 1.0 - a1 * a1;
        let c8s = half_order_series(self.a0, cfg.h2)
            .ok_or_else(|| divergent("C8", self.a0, a1, cfg.h2))?;
        let c7 = (1.0 + a1 * a1) / (q * q) * f3half;
        let c8 = c8s.value * fhalf;
        let c10 = self.c2_over_a0 * fhalf * (1.0 + a1) + self.c0 * f3half;
        let c12 = invert("C12", 1.0 - am * (self.c6 + ak * (self.c0 + c8) * self.c9))?;
        let c13 = am * self.c11 * (c7 + ak * (self.c0 + c8) * c10);
        let c14 = self.c9 * c12 * c13 + c10 * self.c11;
        let opm = (1.0 + cfg.a_mu).abs();
        let sigma2 = c12 * (self.c6 + self.c0 + self.c2) * a1
            + opm
                * c12
                * (2.0 * ak * self.lambda4
                    + self.c5 * (self.lambda5 + ak * (self.lambda7 * self.c9 + self.lambda4)))
            + 2.0 * PI * ak * (self.c0 - 1.0 + self.c2) * self.c9 * c12
            + self.c6 * c12 * a1
            + 2.0 * self.lambda5 * c12
            + 2.0 * ak * self.lambda7 * self.c9 * c12;
        Ok(L2Constants {
            f3half,
            fhalf,
            c7,
            c8,
            c10,
            c12,
            c13,
            c14,
            sigma2,
        })
    }
}

/// `min_s (θ - σ_s)` at `(a0, a1)`, or `None` outside the ledger.
fn min_gap(a0: f64, a1: f64, cfg: &FluidConfig) -> Option<f64> {
    let l = ledger(a0, a1, cfg).ok()?;
    let s2 = l.l2_constants(0.0, None).ok()?.sigma2;
    let g = (l.theta - l.sigma0).min(l.theta - l.sigma1).min(l.theta - s2);
    g.is_finite().then_some(g)
}

/// Size thresholds `(k0, k1)` by bisection along `(τ h₂, τ)`, with a 1% haircut.
pub fn thresholds(cfg: &FluidConfig) -> Result<(f64, f64)> {
    thresholds_with_tau(cfg).map(|(k0, k1, _)| (k0, k1))
}

/// As [`thresholds`], also returning the unshrunk bisection point `τ*`.
pub fn thresholds_with_tau(cfg: &FluidConfig) -> Result<(f64, f64, f64)> {
    let ok = |tau: f64| min_gap(tau * cfg.h2, tau, cfg).map_or(false, |g| g > 0.0);
    let mut lo = 1e-6;
    if !ok(lo) {
        return Err(Error::Regime(format!(
            "no admissible size: theta - sigma_s <= 0 already at tau = {lo}"
        )));
    }
    let mut hi = 1.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = lo;
    Ok((0.99 * tau * cfg.h2, 0.99 * tau, tau))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Admissible,
    Inadmissible,
    OutOfLedger,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub cfg: FluidConfig,
    pub a0: f64,
    pub a1: f64,
    pub f3half: f64,
    pub fhalf: f64,
    pub ledger: Option<ConstantLedger>,
    pub l2: Option<L2Constants>,
    /// `A_ρ(θ - σ_s)` for `s = 0, 1`, and `A_ρ(θ - σ₂) - ε` for `s = 2`.
    pub margins: Option<[f64; 3]>,
    pub epsilon: f64,
    pub nu: f64,
    pub k0: f64,
    pub k1: f64,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl Certificate {
    pub fn is_admissible(&self) -> bool {
        self.verdict == Verdict::Admissible
    }

    /// Human-readable margin table.
    pub fn table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("a0 = {:.6e}  (k0 = {:.6e})\n", self.a0, self.k0));
        s.push_str(&format!("a1 = {:.6e}  (k1 = {:.6e})\n", self.a1, self.k1));
        if let (Some(l), Some(m)) = (&self.ledger, &self.margins) {
            let s2 = self.l2.as_ref().map_or(f64::NAN, |c| c.sigma2);
            s.push_str(&format!("theta = {:.6}\n", l.theta));
            s.push_str("  s   sigma_s        margin\n");
            for (i, sig) in [l.sigma0, l.sigma1, s2].iter().enumerate() {
                s.push_str(&format!("  {i}   {sig:<13.6e}  {:.6e}\n", m[i]));
            }
        }
        s.push_str(&format!("nu = {:.6e}\nverdict: {:?}\n", self.nu, self.verdict));
        for r in &self.reasons {
            s.push_str(&format!("  - {r}\n"));
        }
        s
    }
}

/// Full certificate for an initial datum.
pub fn certify_datum(f0: &InterfaceField, cfg: &FluidConfig) -> Result<Certificate> {
    cfg.validate()?;
    f0.check_geometry(cfg)?;
    let norm = |s| fourier_norm(&f0.f, &NormSpec::plain(s));
    let (a0, a1, f3half, fhalf) = (norm(0.0)?, norm(1.0)?, norm(1.5)?, norm(0.5)?);
    let th = theta(cfg)?;
    let epsilon = 1e-3 * cfg.a_rho * th;
    let (k0, k1) = match thresholds(cfg) {
        Ok(k) => k,
        Err(Error::Regime(_)) => (0.0, 0.0),
        Err(e) => return Err(e),
    };
    let mut reasons = Vec::new();
    if a0 >= k0 {
        reasons.push(format!("a0 = {a0:.6e} is not below k0 = {k0:.6e}"));
    }
    if a1 >= k1 {
        reasons.push(format!("a1 = {a1:.6e} is not below k1 = {k1:.6e}"));
    }
    let evaluated = ledger(a0, a1, cfg).and_then(|l| {
        let c = l.l2_constants(f3half, Some(fhalf))?;
        Ok((l, c))
    });
    let (ledger, l2) = match evaluated {
        Ok(v) => v,
        Err(Error::DivergentSeries(msg)) | Err(Error::Regime(msg)) => {
            reasons.push(msg);
            return Ok(Certificate {
                schema_version: 1,
                cfg: *cfg,
                a0,
                a1,
                f3half,
                fhalf,
                ledger: None,
                l2: None,
                margins: None,
                epsilon,
                nu: 0.0,
                k0,
                k1,
                verdict: Verdict::OutOfLedger,
                reasons,
            });
        }
        Err(e) => return Err(e),
    };
    let m0 = cfg.a_rho * (th - ledger.sigma0);
    let m1 = cfg.a_rho * (th - ledger.sigma1);
    let m2 = cfg.a_rho * (th - l2.sigma2) - epsilon;
    let margins = [m0, m1, m2];
    for (s, m) in margins.iter().enumerate() {
        if !(*m > 0.0) {
            reasons.push(format!("margin for s = {s} is {m:.6e} <= 0"));
        }
    }
    let nu = if m0 > 0.0 && m1 > 0.0 {
        0.5 * m0.min(m1)
    } else {
        0.0
    };
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    if !(nu < min_margin) {
        reasons.push(format!("nu = {nu:.6e} is not below the smallest margin {min_margin:.6e}"));
    }
    let verdict = if reasons.is_empty() {
        Verdict::Admissible
    } else {
        Verdict::Inadmissible
    };
    Ok(Certificate {
        schema_version: 1,
        cfg: *cfg,
        a0,
        a1,
        f3half,
        fhalf,
        ledger: Some(ledger),
        l2: Some(l2),
        margins: Some(margins),
        epsilon,
        nu,
        k0,
        k1,
        verdict,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GridSpec, SpectralField};

    fn cfg() -> FluidConfig {
        FluidConfig::new(0.5, 0.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn origin_values() {
        let c = cfg();
        let l = ledger(0.0, 0.0, &c).unwrap();
        assert_eq!(l.c0, 1.0);
        assert_eq!(l.c2, 0.0);
        assert_eq!(l.c6, 0.0);
        assert_eq!(l.sigma0, 0.0);
        assert_eq!(l.sigma1, 0.0);
        assert!((l.c1 - 1.0 / (1.0 - 0.1)).abs() < 1e-15);
        let l2 = l.l2_constants(0.0, None).unwrap();
        assert_eq!(l2.sigma2, 0.0);
    }

    #[test]
    fn c0_at_half_depth_matches_extended_precision() {
        // mpmath, 40 digits: Σ n^n/(e^n n!) 2^{-n}
        let l = ledger(0.5, 0.0, &cfg()).unwrap();
        assert!((l.c0 - 1.302_017_135_572_102_8).abs() < 1e-12, "{}", l.c0);
        assert!(l.tails.iter().all(|(_, t)| *t < TAIL_TARGET));
    }

    #[test]
    fn divergent_outside_radius() {
        assert!(matches!(ledger(1.0, 0.1, &cfg()), Err(Error::DivergentSeries(_))));
        assert!(matches!(ledger(0.1, 1.0, &cfg()), Err(Error::DivergentSeries(_))));
    }

    #[test]
    fn theta_examples() {
        let t = |ak, am, h| theta(&FluidConfig::new(ak, am, 1.0, h).unwrap()).unwrap();
        assert_eq!(t(0.0, 0.3, 1.0), 1.0);
        assert!((t(0.5, 0.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(t(-0.5, 0.0, 1.0), 1.0);
        assert!((theta_scan(&FluidConfig::new(0.5, 0.0, 1.0, 1.0).unwrap()) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn theta_lattice() {
        for &ak in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
            for &am in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
                for &h in &[0.5, 1.0, 2.0] {
                    let c = FluidConfig::new(ak, am, 1.0, h).unwrap();
                    let th = theta(&c).unwrap();
                    assert!(th > 0.0 && th < 2.0);
                }
            }
        }
    }

    #[test]
    fn shrinking_sequence_vanishes_monotonically() {
        let c = cfg();
        let mut prev = [f64::INFINITY; 3];
        for j in 0..=40 {
            let s = 2f64.powi(-j);
            let l = ledger(0.5 * s, 0.5 * s, &c).unwrap();
            let s2 = l.l2_constants(0.0, None).unwrap().sigma2;
            let now = [l.sigma0, l.sigma1, s2];
            for i in 0..3 {
                assert!(now[i] < prev[i], "sigma{i} not decreasing at j={j}");
            }
            prev = now;
        }
        assert!(prev.iter().all(|v| *v < 1e-10), "{prev:?}");
    }

    #[test]
    fn limits_at_tiny_norms() {
        let c = cfg();
        let l = ledger(1e-12, 1e-12, &c).unwrap();
        let lim = 1.0 / (1.0 - 0.1);
        assert!((l.c3 - 1.0).abs() < 1e-8);
        assert!((l.c4 - 1.0).abs() < 1e-8);
        assert!((l.c1 - lim).abs() < 1e-8);
        for v in [l.lambda0, l.lambda1, l.lambda2, l.lambda3] {
            assert!(v.abs() < 1e-8);
        }
        let l2 = l.l2_constants(1e-12, None).unwrap();
        assert!((l2.c12 - lim).abs() < 1e-8);
        assert!(l.sigma0 < 1e-8 && l.sigma1 < 1e-8 && l2.sigma2 < 1e-8);
    }

    #[test]
    fn thresholds_respect_margins() {
        for &(ak, am) in &[(0.0, 0.0), (0.5, 0.2), (-0.7, 0.6), (0.9, -0.9)] {
            let c = FluidConfig::new(ak, am, 1.0, 1.3).unwrap();
            let (k0, k1) = thresholds(&c).unwrap();
            assert!(k0 > 0.0 && k1 > 0.0 && k0 < c.h2 && k1 < 1.0);
            let g = min_gap(k0, k1, &c).unwrap();
            assert!(g > 0.0);
        }
    }

    #[test]
    fn thresholds_monotone_in_kappa() {
        for &am in &[-0.8, -0.4, 0.0, 0.4, 0.8] {
            let mut prev = f64::INFINITY;
            for &ak in &[0.0, 0.2, 0.4, 0.6, 0.8] {
                let (_, _, tau) = thresholds_with_tau(&FluidConfig::new(ak, am, 1.0, 1.0).unwrap()).unwrap();
                assert!(tau <= prev * (1.0 + 1e-12), "am={am} ak={ak}");
                prev = tau;
            }
        }
    }

    #[test]
    fn certificates() {
        let c = cfg();
        let g = GridSpec::two_pi(64).unwrap();
        let zero = InterfaceField::new(SpectralField::zeros(g));
        let z = certify_datum(&zero, &c).unwrap();
        assert!(z.is_admissible());
        let th = theta(&c).unwrap();
        for m in &z.margins.unwrap()[..2] {
            assert!((m - th).abs() < 1e-15);
        }
        let small = InterfaceField::new(SpectralField::from_fn(g, |a| 0.01 * a.cos()));
        let s = certify_datum(&small, &c).unwrap();
        assert!(s.is_admissible(), "{}", s.table());
        assert!(s.nu > 0.0 && s.nu < s.margins.unwrap()[1]);
        let big = InterfaceField::new(SpectralField::from_fn(g, |a| 0.9 * a.cos()));
        let b = certify_datum(&big, &c).unwrap();
        assert_eq!(b.verdict, Verdict::OutOfLedger);
    }
}
