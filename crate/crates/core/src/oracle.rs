//! Slow reference evaluators. Every nonlocal operator is summed directly over
//! all source points with kernels written through the complex cotangent
//! `Σ_m 1/(z + mL) = (π/L) cot(πz/L)`, independently of the fast tables.
//! Derivatives use the dense periodic differentiation matrix, not the FFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::InterfaceField;
use crate::fluid::FluidConfig;
use crate::spectral::GridSpec;

/// Which of the four interface integrals to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    I1,
    I2,
    I3,
    I4,
}

/// Where the Birkhoff–Rott velocity is traced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    FluidCurve,
    SoilLine,
}

/// Periodized `1/(β + i d)` summed over images, times `(π/L)`.
fn cot_sum(length: f64, beta: f64, d: f64) -> Complex64 {
    let z = Complex64::new(beta, d) * (PI / length);
    z.cos() / z.sin() * (PI / length)
}

/// `(Σ β/(β²+d²), Σ d/(β²+d²))` over all periodic images.
fn pair_kernels(length: f64, beta: f64, d: f64) -> (f64, f64) {
    let c = cot_sum(length, beta, d);
    (c.re, -c.im)
}

struct Geometry {
    n: usize,
    h: f64,
    length: f64,
    alpha: Vec<f64>,
    f: Vec<f64>,
    fp: Vec<f64>,
}

/// Dense spectral derivative: `D_ij = (κ/2)(-1)^{i-j} cot(κ(α_i-α_j)/2)`.
fn dense_derivative(grid: &GridSpec, f: &[f64]) -> Vec<f64> {
    let n = grid.n();
    let k = grid.kappa();
    let h = grid.spacing();
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (j, fj) in f.iter().enumerate() {
                if i != j {
                    let d = i as i64 - j as i64;
                    let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    acc += sign * 0.5 * k / (0.5 * k * d as f64 * h).tan() * fj;
                }
            }
            acc
        })
        .collect()
}

impl Geometry {
    fn new(field: &InterfaceField, cfg: &FluidConfig) -> Result<Self> {
        let grid = field.f.grid;
        let f = field.samples();
        field.check_geometry_samples(&f, cfg)?;
        Ok(Self {
            n: grid.n(),
            h: grid.spacing(),
            length: grid.length(),
            alpha: grid.nodes(),
            fp: dense_derivative(&grid, &f),
            f,
        })
    }

    fn beta(&self, i: usize, j: usize) -> f64 {
        self.alpha[i] - self.alpha[j]
    }

    /// Odd-offset pairs carry weight `2h`; even offsets (including `β = 0`) are skipped.
    fn singular_sum(&self, i: usize, g: impl Fn(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for j in (0..self.n).filter(|j| (i + self.n - j) % 2 == 1) {
            acc += g(j);
        }
        2.0 * self.h * acc
    }

    fn smooth_sum(&self, g: impl Fn(usize) -> f64) -> f64 {
        self.h * (0..self.n).map(g).sum::<f64>()
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.n {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "expected {} samples, got {}",
                self.n,
                v.len()
            )))
        }
    }

    fn term(&self, cfg: &FluidConfig, which: Term, w: &[f64], i: usize) -> f64 {
        let l = self.length;
        match which {
            Term::I1 => self.singular_sum(i, |j| pair_kernels(l, self.beta(i, j), self.f[i] - self.f[j]).0 * w[j]),
            Term::I2 => {
                self.fp[i]
                    * self.singular_sum(i, |j| pair_kernels(l, self.beta(i, j), self.f[i] - self.f[j]).1 * w[j])
            }
            Term::I3 => {
                let a = self.f[i] + cfg.h2;
                self.smooth_sum(|j| pair_kernels(l, self.beta(i, j), a).0 * w[j])
            }
            Term::I4 => {
                let a = self.f[i] + cfg.h2;
                self.fp[i] * self.smooth_sum(|j| pair_kernels(l, self.beta(i, j), a).1 * w[j])
            }
        }
    }

    fn omega2(&self, cfg: &FluidConfig, w1: &[f64]) -> Vec<f64> {
        (0..self.n)
            .into_par_iter()
            .map(|i| {
                let s = self.smooth_sum(|j| {
                    pair_kernels(self.length, self.beta(i, j), self.f[j] + cfg.h2).1 * w1[j]
                });
                -cfg.a_kappa / PI * s
            })
            .collect()
    }

    fn omega1_map(&self, cfg: &FluidConfig, w1: &[f64], w2: &[f64]) -> Vec<f64> {
        (0..self.n)
            .into_par_iter()
            .map(|i| {
                let l = self.length;
                let sing = self.singular_sum(i, |j| {
                    let (s, c) = pair_kernels(l, self.beta(i, j), self.f[i] - self.f[j]);
                    (self.fp[i] * s - c) * w1[j]
                });
                let a = self.f[i] + cfg.h2;
                let smooth = self.smooth_sum(|j| {
                    let (s, c) = pair_kernels(l, self.beta(i, j), a);
                    (self.fp[i] * s - c) * w2[j]
                });
                cfg.a_mu / PI * (sing + smooth) - 2.0 * cfg.a_rho * self.fp[i]
            })
            .collect()
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// One interface integral `I_k` at every node.
pub fn quad_i(field: &InterfaceField, w: &[f64], cfg: &FluidConfig, which: Term) -> Result<Vec<f64>> {
    let g = Geometry::new(field, cfg)?;
    g.check_len(w)?;
    Ok((0..g.n).into_par_iter().map(|i| g.term(cfg, which, w, i)).collect())
}

/// `ω₂` from `ω₁` by direct summation.
pub fn quad_omega2(field: &InterfaceField, w1: &[f64], cfg: &FluidConfig) -> Result<Vec<f64>> {
    let g = Geometry::new(field, cfg)?;
    g.check_len(w1)?;
    Ok(g.omega2(cfg, w1))
}

/// `Ω₂` from `Ω₁` by direct summation.
pub fn quad_big_omega2(field: &InterfaceField, big1: &[f64], cfg: &FluidConfig) -> Result<Vec<f64>> {
    let g = Geometry::new(field, cfg)?;
    g.check_len(big1)?;
    Ok((0..g.n)
        .into_par_iter()
        .map(|i| {
            let s = g.smooth_sum(|j| {
                let (sk, ck) = pair_kernels(g.length, g.beta(i, j), g.f[j] + cfg.h2);
                (ck + g.fp[j] * sk) * big1[j]
            });
            -cfg.a_kappa / PI * s
        })
        .collect())
}

/// Brute-force Picard solve of the vorticity system; returns `(ω₁, ω₂, iterations)`.
pub fn solve_vorticity(
    field: &InterfaceField,
    cfg: &FluidConfig,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let g = Geometry::new(field, cfg)?;
    let mut w1: Vec<f64> = g.fp.iter().map(|d| -2.0 * cfg.a_rho * d).collect();
    let mut history = Vec::new();
    for it in 1..=max_iter.max(1) {
        let w2 = g.omega2(cfg, &w1);
        let next = g.omega1_map(cfg, &w1, &w2);
        let change = sup_diff(&next, &w1);
        history.push(change);
        w1 = next;
        if !change.is_finite() {
            break;
        }
        if change < tol {
            let w2 = g.omega2(cfg, &w1);
            return Ok((w1, w2, it));
        }
    }
    Err(Error::Divergence { history })
}

/// `(I₁+I₂+I₃+I₄)/2π` at every node, with the vorticity solved by the oracle.
pub fn quad_rhs(field: &InterfaceField, cfg: &FluidConfig, tol: f64) -> Result<Vec<f64>> {
    let (w1, w2, _) = solve_vorticity(field, cfg, tol, 500)?;
    quad_rhs_given(field, cfg, &w1, &w2)
}

/// `(I₁+I₂+I₃+I₄)/2π` for given vorticity samples.
pub fn quad_rhs_given(field: &InterfaceField, cfg: &FluidConfig, w1: &[f64], w2: &[f64]) -> Result<Vec<f64>> {
    let g = Geometry::new(field, cfg)?;
    g.check_len(w1)?;
    g.check_len(w2)?;
    Ok((0..g.n)
        .into_par_iter()
        .map(|i| {
            let s = g.term(cfg, Term::I1, w1, i)
                + g.term(cfg, Term::I2, w1, i)
                + g.term(cfg, Term::I3, w2, i)
                + g.term(cfg, Term::I4, w2, i);
            s / (2.0 * PI)
        })
        .collect())
}

/// Birkhoff–Rott velocity `(u, v)` of both vortex sheets, traced on the
/// fluid curve or on the soil line. Self-induced parts are principal values.
pub fn quad_br_trace(
    field: &InterfaceField,
    w1: &[f64],
    w2: &[f64],
    cfg: &FluidConfig,
    target: Target,
) -> Result<Vec<(f64, f64)>> {
    let g = Geometry::new(field, cfg)?;
    g.check_len(w1)?;
    g.check_len(w2)?;
    let curve: Vec<Complex64> = (0..g.n).map(|j| Complex64::new(g.alpha[j], g.f[j])).collect();
    let soil: Vec<Complex64> = (0..g.n).map(|j| Complex64::new(g.alpha[j], -cfg.h2)).collect();
    let l = g.length;
    let cot = |w: Complex64| cot_sum(l, w.re, w.im);
    Ok((0..g.n)
        .into_par_iter()
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            let (x, own, own_w, other, other_w) = match target {
                Target::FluidCurve => (curve[i], &curve, w1, &soil, w2),
                Target::SoilLine => (soil[i], &soil, w2, &curve, w1),
            };
            for j in (0..g.n).filter(|j| (i + g.n - j) % 2 == 1) {
                acc += cot(x - own[j]) * (2.0 * g.h * own_w[j]);
            }
            for j in 0..g.n {
                acc += cot(x - other[j]) * (g.h * other_w[j]);
            }
            // u - iv = (1/2πi) ∫ ω / (x - z)
            let conj_u = acc / Complex64::new(0.0, 2.0 * PI);
            (conj_u.re, -conj_u.im)
        })
        .collect())
}

/// Defining-equation residuals of a solved pair through the velocity traces:
/// `(tangential on the curve, tangential on the soil line, normal velocity minus rhs)`,
/// each a sup over nodes.
pub fn br_residuals(field: &InterfaceField, w1: &[f64], w2: &[f64], cfg: &FluidConfig, rhs: &[f64]) -> Result<(f64, f64, f64)> {
    let g = Geometry::new(field, cfg)?;
    let on_curve = quad_br_trace(field, w1, w2, cfg, Target::FluidCurve)?;
    let on_soil = quad_br_trace(field, w1, w2, cfg, Target::SoilLine)?;
    let mut tang = 0.0f64;
    let mut soil = 0.0f64;
    let mut normal = 0.0f64;
    for i in 0..g.n {
        let (u, v) = on_curve[i];
        let t = 2.0 * cfg.a_mu * (u + g.fp[i] * v) - 2.0 * cfg.a_rho * g.fp[i];
        tang = tang.max((t - w1[i]).abs());
        let s = -2.0 * cfg.a_kappa * on_soil[i].0;
        soil = soil.max((s - w2[i]).abs());
        normal = normal.max((v - g.fp[i] * u - rhs[i]).abs());
    }
    Ok((tang, soil, normal))
}

/// Numerical whole-line transforms of `a/(x²+a²)` and `x/(x²+a²)` at `ξ`,
/// i.e. `∫ K(x) e^{-iξx} dx`. The tails are summed over half-period
/// intervals with repeated averaging of the alternating partial sums.
pub fn fourier_transform_kernels(a: f64, xi: f64) -> Result<(f64, Complex64)> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("kernel transforms need a > 0, got {a}")));
    }
    if xi == 0.0 {
        // x = a tan θ maps the even kernel to a constant over (-π/2, π/2);
        // the odd kernel integrates to zero in the principal-value sense
        let even = simpson(|_| 1.0, -PI / 2.0, PI / 2.0, 2000);
        return Ok((even, Complex64::new(0.0, 0.0)));
    }
    let k = xi.abs();
    let half = PI / k;
    let even = |x: f64| 2.0 * a / (x * x + a * a) * (k * x).cos();
    let odd = |x: f64| 2.0 * x / (x * x + a * a) * (k * x).sin();
    // cos changes sign at (m+½)π/k, sin at mπ/k
    let cos_part = alternating_tail(even, 0.5 * half, half);
    let sin_part = alternating_tail(odd, half, half);
    let first_cos = simpson(even, 0.0, 0.5 * half, 2000);
    let first_sin = simpson(odd, 0.0, half, 2000);
    let re = first_cos + cos_part;
    let im = -(first_sin + sin_part) * xi.signum();
    Ok((re, Complex64::new(0.0, im)))
}

fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let m = panels + panels % 2;
    let h = (b - a) / m as f64;
    let mut acc = g(a) + g(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `∫_{start}^∞ g` where `g` alternates sign on consecutive intervals of `width`.
fn alternating_tail(g: impl Fn(f64) -> f64, start: f64, width: f64) -> f64 {
    const INTERVALS: usize = 64;
    let mut partial = Vec::with_capacity(INTERVALS);
    let mut acc = 0.0;
    for m in 0..INTERVALS {
        let lo = start + m as f64 * width;
        acc += simpson(&g, lo, lo + width, 2000);
        partial.push(acc);
    }
    // repeated averaging of neighbouring partial sums (Euler transform)
    let mut level = partial;
    while level.len() > 1 {
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    level[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{hilbert, SpectralField};

    fn cfg() -> FluidConfig {
        FluidConfig::new(0.5, 0.2, 1.0, 1.0).unwrap()
    }

    #[test]
    fn flat_i1_is_pi_hilbert() {
        let g = GridSpec::two_pi(128).unwrap();
        let f = InterfaceField::new(SpectralField::zeros(g));
        let w = SpectralField::from_fn(g, |a| a.cos());
        let i1 = quad_i(&f, &w.to_samples(), &cfg(), Term::I1).unwrap();
        let want = hilbert(&w).to_samples();
        for (q, s) in i1.iter().zip(&want) {
            assert!((q - PI * s).abs() < 1e-10);
        }
        let i2 = quad_i(&f, &w.to_samples(), &cfg(), Term::I2).unwrap();
        assert!(i2.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn flat_i3_matches_multiplier() {
        let g = GridSpec::two_pi(128).unwrap();
        let f = InterfaceField::new(SpectralField::zeros(g));
        let w = SpectralField::from_fn(g, |a| a.cos());
        let i3 = quad_i(&f, &w.to_samples(), &cfg(), Term::I3).unwrap();
        // -iπ sgn(ξ) e^{-h₂|ξ|} on cos gives π e^{-h₂} sin
        for (j, v) in i3.iter().enumerate() {
            let want = PI * (-1.0f64).exp() * g.node(j).sin();
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_derivative_of_trig() {
        let g = GridSpec::new(64, 9.0).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|a| (2.0 * g.kappa() * a).sin()).collect();
        let d = dense_derivative(&g, &f);
        for (j, v) in d.iter().enumerate() {
            let want = 2.0 * g.kappa() * (2.0 * g.kappa() * g.node(j)).cos();
            assert!((v - want).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_vorticity_zero_velocity() {
        let g = GridSpec::two_pi(32).unwrap();
        let f = InterfaceField::new(SpectralField::from_fn(g, |a| 0.1 * a.cos()));
        let z = vec![0.0; 32];
        for t in [Target::FluidCurve, Target::SoilLine] {
            let u = quad_br_trace(&f, &z, &z, &cfg(), t).unwrap();
            assert!(u.iter().all(|&(a, b)| a == 0.0 && b == 0.0));
        }
    }

    #[test]
    fn kernel_transforms() {
        for &a in &[0.5, 1.0, 2.0] {
            for &xi in &[-4.0, -1.5, 0.0, 0.25, 2.0, 4.0] {
                let (p, q) = fourier_transform_kernels(a, xi).unwrap();
                let want_p = PI * (-a * f64::abs(xi)).exp();
                assert!(((p - want_p) / want_p).abs() < 1e-4, "a={a} xi={xi} {p} {want_p}");
                let want_q = -PI * xi.signum() * (-a * f64::abs(xi)).exp();
                let want_q = if xi == 0.0 { 0.0 } else { want_q };
                assert!((q.im - want_q).abs() <= 1e-4 * want_q.abs().max(1e-300) || (xi == 0.0 && q.im == 0.0));
            }
        }
    }
}
