//! The interface equation: right-hand side assembly, its exact linear symbol
//! and the exponential time integrators.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluid::FluidConfig;
use crate::norms::{fourier_norm, NormSpec};
use crate::spectral::{conj_poisson_hat, forward, hilbert, inverse, sgn, SpectralField};
use crate::vorticity::{Discretization, PicardOptions, VorticityPair};

/// Graph height `f(α, t)` of the fluid interface.
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceField {
    pub f: SpectralField,
}

impl InterfaceField {
    pub fn new(f: SpectralField) -> Self {
        Self { f }
    }

    pub fn time(&self) -> f64 {
        self.f.time
    }

    pub fn samples(&self) -> Vec<f64> {
        inverse(&self.f)
    }

    /// The interface must stay strictly above the permeability jump.
    pub fn check_geometry(&self, cfg: &FluidConfig) -> Result<()> {
        self.check_geometry_samples(&self.samples(), cfg)
    }

    pub(crate) fn check_geometry_samples(&self, samples: &[f64], cfg: &FluidConfig) -> Result<()> {
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("interface samples are not finite".into()));
        }
        let gap = samples.iter().fold(f64::INFINITY, |m, v| m.min(v + cfg.h2));
        if gap > 0.0 {
            Ok(())
        } else {
            Err(Error::Geometry { min_gap: gap })
        }
    }

    /// Largest `|f|` in the outer tenth of the period on either side. A
    /// localized datum that spreads into this band feels its periodic images.
    pub fn leakage(&self) -> f64 {
        let g = self.f.grid;
        let band = 0.4 * g.length();
        self.samples()
            .iter()
            .enumerate()
            .filter(|(j, _)| g.node(*j).abs() >= band)
            .fold(0.0, |m, (_, v)| m.max(v.abs()))
    }
}

/// `m(ξ) = A_ρ|ξ|(1 - A_κ(1-A_μ)/(e^{2h₂|ξ|} - A_κA_μ))`; the linearized
/// evolution is `∂_t f̂ = -m(ξ) f̂`.
pub fn linear_symbol(xi: f64, cfg: &FluidConfig) -> f64 {
    let x = xi.abs();
    if x == 0.0 {
        return 0.0;
    }
    let frac = cfg.a_kappa * (1.0 - cfg.a_mu) / ((2.0 * cfg.h2 * x).exp() - cfg.coupling());
    cfg.a_rho * x * (1.0 - frac)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RhsOptions {
    pub picard: PicardOptions,
    /// Also split the remainder into its named nonlinear pieces.
    pub n_terms: bool,
}

/// Nonlinear pieces of the remainder, all in Fourier space.
#[derive(Clone, Debug)]
pub struct NTerms {
    pub n0: SpectralField,
    pub n1: SpectralField,
    pub n2: SpectralField,
    pub n3: SpectralField,
    pub n4: SpectralField,
    pub n_omega1: SpectralField,
    pub n_omega2: SpectralField,
}

#[derive(Clone, Debug)]
pub struct RhsBreakdown {
    pub i1: SpectralField,
    pub i2: SpectralField,
    pub i3: SpectralField,
    pub i4: SpectralField,
    /// `(I₁+I₂+I₃+I₄)/2π`.
    pub total: SpectralField,
    /// `-m(ξ) f̂`.
    pub linear_part: SpectralField,
    /// `total - linear_part`, not yet dealiased.
    pub nonlinear_part: SpectralField,
    pub n_terms: Option<NTerms>,
    pub vorticity: VorticityPair,
}

fn pointwise(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

pub fn rhs(f: &InterfaceField, cfg: &FluidConfig, opts: &RhsOptions) -> Result<RhsBreakdown> {
    let disc = Discretization::new(f, cfg)?;
    let grid = disc.grid;
    let time = f.time();
    let solved = disc.picard(cfg, &opts.picard)?;
    let t = &disc.tables;
    let (w1, w2) = (&solved.w1, &solved.w2);

    let w1_hat = forward(w1, grid)?;
    let w2_hat = forward(w2, grid)?;
    let n0_raw = forward(&t.apply_odd(&t.k0, w1), grid)?;
    let i1 = hilbert(&w1_hat).scale(PI).add(&n0_raw);
    let i2 = forward(&pointwise(&disc.fp, &t.apply_odd(&t.c1, w1)), grid)?;
    let h2 = cfg.h2;
    let n4_raw = forward(&t.apply_all(&t.n4, w2), grid)?;
    let i3 = w2_hat
        .apply_multiplier(|xi| conj_poisson_hat(h2, xi).expect("h2 > 0"))
        .add(&n4_raw);
    let i4 = forward(&pointwise(&disc.fp, &t.apply_all(&t.c2, w2)), grid)?;

    let total = i1.add(&i2).add(&i3).add(&i4).scale(0.5 / PI);
    let linear_part = f.f.apply_multiplier(|xi| Complex64::new(-linear_symbol(xi, cfg), 0.0));
    let nonlinear_part = total.sub(&linear_part);

    let n_terms = opts.n_terms.then(|| {
        let c = cfg.coupling();
        let e = |xi: f64| (-h2 * xi.abs()).exp();
        let big_e = |xi: f64| (2.0 * h2 * xi.abs()).exp();
        let lin_w2 = w1_hat.apply_multiplier(|xi| Complex64::new(-cfg.a_kappa * e(xi), 0.0));
        let lin_w1 = w2_hat
            .apply_multiplier(|xi| Complex64::new(-cfg.a_mu * e(xi), 0.0))
            .add(&f.f.apply_multiplier(|xi| Complex64::new(0.0, -2.0 * cfg.a_rho * xi)));
        let n_omega1 = w1_hat.sub(&lin_w1);
        let n_omega2 = w2_hat.sub(&lin_w2);
        let half_i = |xi: f64| Complex64::new(0.0, 0.5 * sgn(xi));
        NTerms {
            n0: n0_raw.scale(0.5 / PI),
            n1: n_omega2.apply_multiplier(|xi| -half_i(xi) * e(xi)),
            n2: n_omega1.apply_multiplier(|xi| half_i(xi) * cfg.a_kappa / (big_e(xi) - c)),
            n3: n_omega2.apply_multiplier(|xi| half_i(xi) * c * e(xi) / (big_e(xi) - c)),
            n4: n4_raw.scale(0.5 / PI),
            n_omega1,
            n_omega2,
        }
    });

    Ok(RhsBreakdown {
        i1: i1.with_time(time),
        i2: i2.with_time(time),
        i3: i3.with_time(time),
        i4: i4.with_time(time),
        total: total.with_time(time),
        linear_part: linear_part.with_time(time),
        nonlinear_part: nonlinear_part.with_time(time),
        n_terms,
        vorticity: solved.into_pair(grid, time)?,
    })
}

/// `φ_k(z) = Σ_j z^j/(j+k)!` for `k = 0..=3`.
pub fn phi_functions(z: f64) -> [f64; 4] {
    if z.abs() < 0.5 {
        // 20 terms leave a remainder below 0.5^20/20! here
        let mut out = [0.0; 4];
        for (k, o) in out.iter_mut().enumerate() {
            let mut term = 1.0 / (1..=k).product::<usize>() as f64;
            let mut acc = term;
            for j in 1..20 {
                term *= z / (j + k) as f64;
                acc += term;
            }
            *o = acc;
        }
        out
    } else {
        let p0 = z.exp();
        let p1 = (p0 - 1.0) / z;
        let p2 = (p1 - 1.0) / z;
        let p3 = (p2 - 0.5) / z;
        [p0, p1, p2, p3]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Etdrk2,
    Etdrk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepOptions {
    pub scheme: Scheme,
    pub picard: PicardOptions,
    /// Bound on `dt · A_ρ · ξ_cut · ‖f‖_{F^{1,1}}`.
    pub cfl_bound: f64,
    /// Coefficients below this fraction of the largest one are zeroed after
    /// every step, so exponential weights never amplify round-off.
    pub filter_level: f64,
    /// Drop the nonlinear remainder (pure integrating-factor run).
    pub linear_only: bool,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            scheme: Scheme::Etdrk2,
            picard: PicardOptions::default(),
            cfl_bound: 1.0,
            filter_level: 1e-13,
            linear_only: false,
        }
    }
}

/// Exponential integrator with the linear factors precomputed for one `dt`.
pub struct Stepper {
    cfg: FluidConfig,
    dt: f64,
    opts: StepOptions,
    xi_cut: f64,
    /// Per mode: `e^{z}`, `e^{z/2}`, and the scheme's weights.
    e_full: Vec<f64>,
    e_half: Vec<f64>,
    w: Vec<[f64; 4]>,
}

impl Stepper {
    pub fn new(grid: crate::spectral::GridSpec, dt: f64, cfg: &FluidConfig, opts: StepOptions) -> Result<Self> {
        cfg.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::StepSize { dt, limit: f64::INFINITY });
        }
        let n = grid.n();
        let mut e_full = Vec::with_capacity(n);
        let mut e_half = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        for idx in 0..n {
            let z = -linear_symbol(grid.wavenumber(idx), cfg) * dt;
            let p = phi_functions(z);
            let ph = phi_functions(0.5 * z);
            e_full.push(p[0]);
            e_half.push(ph[0]);
            w.push(match opts.scheme {
                Scheme::Etdrk2 => [p[1], p[2], 0.0, 0.0],
                Scheme::Etdrk4 => [
                    ph[1],
                    p[1] - 3.0 * p[2] + 4.0 * p[3],
                    p[2] - 2.0 * p[3],
                    -p[2] + 4.0 * p[3],
                ],
            });
        }
        Ok(Self {
            cfg: *cfg,
            dt,
            opts,
            xi_cut: (n / 3) as f64 * grid.kappa(),
            e_full,
            e_half,
            w,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn nonlinear(&self, f: &SpectralField) -> Result<Vec<Complex64>> {
        if self.opts.linear_only {
            return Ok(vec![Complex64::new(0.0, 0.0); f.n()]);
        }
        let opts = RhsOptions {
            picard: self.opts.picard,
            n_terms: false,
        };
        Ok(rhs(&InterfaceField::new(f.clone()), &self.cfg, &opts)?
            .nonlinear_part
            .dealias()
            .coeffs)
    }

    fn guard(&self, f: &SpectralField) -> Result<()> {
        let a1 = fourier_norm(f, &NormSpec::plain(1.0))?;
        let speed = self.cfg.a_rho * self.xi_cut * a1;
        if self.dt * speed > self.opts.cfl_bound {
            return Err(Error::StepSize {
                dt: self.dt,
                limit: self.opts.cfl_bound / speed,
            });
        }
        Ok(())
    }

    fn field(&self, like: &SpectralField, coeffs: Vec<Complex64>) -> SpectralField {
        SpectralField {
            grid: like.grid,
            coeffs,
            time: like.time,
        }
    }

    /// Advances by one step. Time becomes `state.time() + dt`.
    pub fn step(&self, state: &InterfaceField) -> Result<InterfaceField> {
        let u = &state.f;
        self.guard(u)?;
        let dt = self.dt;
        let n = u.n();
        let nu = self.nonlinear(u)?;
        let mut out = match self.opts.scheme {
            Scheme::Etdrk2 => {
                let a: Vec<Complex64> = (0..n)
                    .map(|k| u.coeffs[k] * self.e_full[k] + nu[k] * (dt * self.w[k][0]))
                    .collect();
                let na = self.nonlinear(&self.field(u, a.clone()))?;
                (0..n)
                    .map(|k| a[k] + (na[k] - nu[k]) * (dt * self.w[k][1]))
                    .collect::<Vec<_>>()
            }
            Scheme::Etdrk4 => {
                let hd = 0.5 * dt;
                let a: Vec<Complex64> = (0..n)
                    .map(|k| u.coeffs[k] * self.e_half[k] + nu[k] * (hd * self.w[k][0]))
                    .collect();
                let na = self.nonlinear(&self.field(u, a.clone()))?;
                let b: Vec<Complex64> = (0..n)
                    .map(|k| u.coeffs[k] * self.e_half[k] + na[k] * (hd * self.w[k][0]))
                    .collect();
                let nb = self.nonlinear(&self.field(u, b))?;
                let c: Vec<Complex64> = (0..n)
                    .map(|k| a[k] * self.e_half[k] + (nb[k] * 2.0 - nu[k]) * (hd * self.w[k][0]))
                    .collect();
                let nc = self.nonlinear(&self.field(u, c))?;
                (0..n)
                    .map(|k| {
                        let [_, f1, f2, f3] = self.w[k];
                        u.coeffs[k] * self.e_full[k]
                            + (nu[k] * f1 + (na[k] + nb[k]) * (2.0 * f2) + nc[k] * f3) * dt
                    })
                    .collect()
            }
        };
        let time = u.time + dt;
        if out.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::BlowUp {
                time,
                last_valid: Box::new(u.clone()),
            });
        }
        let top = out.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let floor = self.opts.filter_level * top;
        for c in out.iter_mut() {
            if c.norm() < floor {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        Ok(InterfaceField::new(SpectralField {
            grid: u.grid,
            coeffs: out,
            time,
        }))
    }
}

/// One step from scratch. Prefer [`Stepper`] when taking many steps.
pub fn step(state: &InterfaceField, dt: f64, cfg: &FluidConfig, opts: StepOptions) -> Result<InterfaceField> {
    Stepper::new(state.f.grid, dt, cfg, opts)?.step(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn cfg() -> FluidConfig {
        FluidConfig::new(0.5, 0.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn symbol_values() {
        // mpmath, 30 digits
        assert!((linear_symbol(1.0, &cfg()) - 0.945_123_210_115_136_5).abs() < 1e-15);
        assert!((linear_symbol(-2.0, &cfg()) - 1.985_320_602_634_888_3).abs() < 1e-14);
        assert_eq!(linear_symbol(0.0, &cfg()), 0.0);
        let classical = FluidConfig::new(0.0, 0.3, 2.0, 1.0).unwrap();
        assert_eq!(linear_symbol(3.0, &classical), 6.0);
    }

    #[test]
    fn phi_branches_agree() {
        for &z in &[-0.5, -0.49999, -1e-5, 1e-5, 0.3, -3.0] {
            let p = phi_functions(z);
            if z.abs() > 1e-3 {
                assert!((p[1] - (z.exp() - 1.0) / z).abs() < 1e-13);
                assert!((p[2] - (z.exp() - 1.0 - z) / (z * z)).abs() < 1e-12);
            }
        }
        let a = phi_functions(-0.4999999);
        let b = phi_functions(-0.5000001);
        for k in 0..4 {
            assert!((a[k] - b[k]).abs() < 1e-6);
        }
        assert_eq!(phi_functions(0.0), [1.0, 1.0, 0.5, 1.0 / 6.0]);
    }

    #[test]
    fn flat_interface_is_stationary() {
        let g = GridSpec::two_pi(64).unwrap();
        let f = InterfaceField::new(SpectralField::zeros(g));
        let r = rhs(&f, &cfg(), &RhsOptions::default()).unwrap();
        assert!(r.total.max_abs_coeff() < 1e-14);
        let s = step(&f, 0.1, &cfg(), StepOptions::default()).unwrap();
        assert_eq!(s.f.max_abs_coeff(), 0.0);
    }

    #[test]
    fn no_gravity_no_motion() {
        let g = GridSpec::two_pi(64).unwrap();
        let c = FluidConfig::new(0.5, 0.2, 0.0, 1.0).unwrap();
        let f = InterfaceField::new(SpectralField::from_fn(g, |a| 0.1 * a.cos() + 0.05 * (2.0 * a).sin()));
        let r = rhs(&f, &c, &RhsOptions::default()).unwrap();
        assert_eq!(r.total.max_abs_coeff(), 0.0);
    }

    #[test]
    fn tiny_mode_follows_symbol() {
        let g = GridSpec::two_pi(64).unwrap();
        let eps = 1e-6;
        let f = InterfaceField::new(SpectralField::from_fn(g, |a| eps * (2.0 * a).cos()));
        let r = rhs(&f, &cfg(), &RhsOptions::default()).unwrap();
        let want = -linear_symbol(2.0, &cfg()) * f.f.mode(2).re;
        let got = r.total.mode(2).re;
        assert!(((got - want) / want).abs() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn breakdown_identities() {
        let g = GridSpec::two_pi(64).unwrap();
        let c = cfg();
        let f = InterfaceField::new(SpectralField::from_fn(g, |a| 0.05 * a.cos() + 0.02 * (3.0 * a).sin()));
        let opts = RhsOptions {
            n_terms: true,
            ..Default::default()
        };
        let r = rhs(&f, &c, &opts).unwrap();
        let sum = r.i1.add(&r.i2).add(&r.i3).add(&r.i4);
        let back = r.linear_part.add(&r.nonlinear_part).scale(2.0 * PI);
        assert!(sum.sub(&back).max_abs_coeff() < 1e-13);

        let n = r.n_terms.unwrap();
        let i24 = r.i2.add(&r.i4).scale(0.5 / PI);
        let bracket = n.n1.add(&n.n2).sub(&n.n3).scale(1.0 - c.a_mu);
        let last = n
            .n_omega1
            .apply_multiplier(|xi| Complex64::new(0.0, -0.5 * sgn(xi)));
        let rebuilt = r
            .linear_part
            .add(&i24)
            .add(&n.n0)
            .add(&bracket)
            .add(&n.n4)
            .add(&last);
        let mut diff = r.total.sub(&rebuilt);
        diff.coeffs[g.nyquist_index()] = Complex64::new(0.0, 0.0);
        assert!(diff.max_abs_coeff() < 1e-13, "{}", diff.max_abs_coeff());
    }

    #[test]
    fn integrating_factor_is_exact() {
        let g = GridSpec::two_pi(32).unwrap();
        let c = cfg();
        let f = InterfaceField::new(SpectralField::from_fn(g, |a| 0.3 * (3.0 * a).cos()));
        let opts = StepOptions {
            linear_only: true,
            ..Default::default()
        };
        for scheme in [Scheme::Etdrk2, Scheme::Etdrk4] {
            let st = Stepper::new(g, 0.05, &c, StepOptions { scheme, ..opts }).unwrap();
            let mut s = f.clone();
            for _ in 0..10 {
                s = st.step(&s).unwrap();
            }
            let want = 0.15 * (-linear_symbol(3.0, &c) * 0.5).exp();
            assert!((s.f.mode(3).re - want).abs() < 1e-12 * 0.15);
        }
    }

    #[test]
    fn cfl_guard_trips() {
        let g = GridSpec::two_pi(32).unwrap();
        let f = InterfaceField::new(SpectralField::from_fn(g, |a| 0.1 * a.cos()));
        let err = step(&f, 100.0, &cfg(), StepOptions::default()).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. }));
        assert!(matches!(
            step(&f, -1.0, &cfg(), StepOptions::default()),
            Err(Error::StepSize { .. })
        ));
    }

    #[test]
    fn geometry_violation() {
        let g = GridSpec::two_pi(32).unwrap();
        let f = InterfaceField::new(SpectralField::from_fn(g, |a| 1.5 * a.cos()));
        assert!(matches!(
            rhs(&f, &cfg(), &RhsOptions::default()),
            Err(Error::Geometry { .. })
        ));
    }
}
