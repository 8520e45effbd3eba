//! Weighted Wiener norms `Σ e^{νt|ξ|}|ξ|^s|c_k|`, the weighted `L²` norm,
//! interpolation checks, strip-radius estimates and decay-rate fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Largest admissible exponent `ν t ξ_max` before the weight is refused.
pub const WEIGHT_EXPONENT_LIMIT: f64 = 700.0;

/// Amplitude below which coefficients are treated as round-off.
pub const NOISE_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec {
    pub s: f64,
    pub nu: f64,
    pub time: f64,
}

impl NormSpec {
    pub fn new(s: f64, nu: f64, time: f64) -> Self {
        Self { s, nu, time }
    }

    pub fn plain(s: f64) -> Self {
        Self::new(s, 0.0, 0.0)
    }

    fn check(&self, field: &SpectralField) -> Result<()> {
        if self.s < 0.0 || self.nu < 0.0 || self.time < 0.0 {
            return Err(Error::Domain(format!(
                "norm parameters must be nonnegative (s={}, nu={}, t={})",
                self.s, self.nu, self.time
            )));
        }
        let e = self.nu * self.time * field.grid.xi_max();
        if e > WEIGHT_EXPONENT_LIMIT {
            return Err(Error::Range(format!(
                "weight exponent nu*t*xi_max = {e:.1} exceeds {WEIGHT_EXPONENT_LIMIT}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub f01: f64,
    pub f11: f64,
    pub f21: f64,
    pub f3half: f64,
    pub l2nu: f64,
    /// `None` when too few modes sit above the noise floor.
    pub strip_radius: Option<f64>,
    pub time: f64,
}

pub fn fourier_norm(field: &SpectralField, spec: &NormSpec) -> Result<f64> {
    spec.check(field)?;
    let g = &field.grid;
    let mut sum = 0.0;
    for (idx, c) in field.coeffs.iter().enumerate() {
        let xi = g.wavenumber(idx).abs();
        let w = if xi == 0.0 {
            if spec.s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (spec.nu * spec.time * xi).exp() * xi.powf(spec.s)
        };
        sum += w * c.norm();
    }
    Ok(sum)
}

/// `L²_ν` norm scaled by the period so that `ν = 0` is the physical norm.
pub fn weighted_l2(field: &SpectralField, spec: &NormSpec) -> Result<f64> {
    spec.check(field)?;
    let g = &field.grid;
    let sum: f64 = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, c)| (2.0 * spec.nu * spec.time * g.wavenumber(idx).abs()).exp() * c.norm_sqr())
        .sum();
    Ok((g.length() * sum).sqrt())
}

/// Least-squares slope of `-log|c_k|` against `ξ_k` over positive modes
/// `k >= k_min` above the noise floor. Needs at least eight such modes.
pub fn strip_radius(field: &SpectralField, k_min: usize) -> Option<f64> {
    let g = &field.grid;
    let pts: Vec<(f64, f64)> = (k_min.max(1)..g.n() / 2)
        .filter_map(|k| {
            let a = field.coeffs[k].norm();
            (a > NOISE_FLOOR).then(|| (g.wavenumber(k), -a.ln()))
        })
        .collect();
    if pts.len() < 8 {
        return None;
    }
    let (slope, _) = linear_fit(&pts);
    Some(slope.max(0.0))
}

/// Returns `(slope, intercept)` of the ordinary least-squares line.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// Exponent `β` of the best fit `value ≈ C(1+t)^β` in log-log space.
pub fn decay_fit(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 10 {
        return Err(Error::Domain(format!(
            "decay_fit needs at least 10 samples, got {}",
            series.len()
        )));
    }
    if let Some(&(t, v)) = series.iter().find(|(t, v)| !(*v > 0.0) || *t < 0.0) {
        return Err(Error::Domain(format!(
            "decay_fit needs positive values and t >= 0 (t={t}, value={v})"
        )));
    }
    let tmin = series.iter().map(|p| 1.0 + p.0).fold(f64::INFINITY, f64::min);
    let tmax = series.iter().map(|p| 1.0 + p.0).fold(0.0, f64::max);
    if tmax < 10.0 * tmin {
        return Err(Error::Domain("decay_fit needs samples spanning a decade".into()));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|&(t, v)| ((1.0 + t).ln(), v.ln())).collect();
    Ok(linear_fit(&pts).0)
}

/// Checks `‖g‖_s ≤ ‖g‖_{s1}^θ ‖g‖_{s2}^{1-θ}` with `s = θ s1 + (1-θ) s2`.
pub fn check_interpolation(
    field: &SpectralField,
    s1: f64,
    s: f64,
    s2: f64,
    nu: f64,
    time: f64,
) -> Result<bool> {
    if !(s1 <= s && s <= s2) {
        return Err(Error::Domain(format!(
            "interpolation needs s1 <= s <= s2, got ({s1}, {s}, {s2})"
        )));
    }
    let mid = fourier_norm(field, &NormSpec::new(s, nu, time))?;
    if s1 == s2 {
        return Ok(true);
    }
    let theta = (s2 - s) / (s2 - s1);
    let lo = fourier_norm(field, &NormSpec::new(s1, nu, time))?;
    let hi = fourier_norm(field, &NormSpec::new(s2, nu, time))?;
    let bound = lo.powf(theta) * hi.powf(1.0 - theta);
    Ok(mid <= bound * (1.0 + 1e-9) + f64::MIN_POSITIVE)
}

/// All norms the trajectory monitor records, weighted with `ν` at the field's time.
pub fn norm_report(field: &SpectralField, nu: f64) -> Result<NormReport> {
    let t = field.time;
    let n = |s| fourier_norm(field, &NormSpec::new(s, nu, t));
    Ok(NormReport {
        f01: n(0.0)?,
        f11: n(1.0)?,
        f21: n(2.0)?,
        f3half: n(1.5)?,
        l2nu: weighted_l2(field, &NormSpec::new(0.0, nu, t))?,
        strip_radius: strip_radius(field, 1),
        time: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{forward, product_dealiased, GridSpec};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(g: GridSpec, modes: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::zeros(g);
        for k in 1..=modes as i64 {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                * (-(k as f64) * 0.1).exp();
            f.set_mode(k, c);
            f.set_mode(-k, c.conj());
        }
        f.set_mode(0, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        f
    }

    #[test]
    fn cosine_norms() {
        let g = GridSpec::two_pi(64).unwrap();
        let f = SpectralField::from_fn(g, f64::cos);
        assert!((fourier_norm(&f, &NormSpec::plain(0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((fourier_norm(&f, &NormSpec::plain(1.0)).unwrap() - 1.0).abs() < 1e-12);
        let f2 = SpectralField::from_fn(g, |a| (2.0 * a).cos());
        // larger weights would amplify roundoff in the empty modes
        let v = fourier_norm(&f2, &NormSpec::new(1.0, 0.05, 1.0)).unwrap();
        assert!((v - 2.0 * (0.1f64).exp()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn overflow_guard() {
        let g = GridSpec::two_pi(64).unwrap();
        let f = SpectralField::from_fn(g, f64::cos);
        assert!(matches!(
            fourier_norm(&f, &NormSpec::new(0.0, 100.0, 1.0)),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn l2_examples() {
        let g = GridSpec::two_pi(64).unwrap();
        let f = SpectralField::from_fn(g, f64::cos);
        assert!((weighted_l2(&f, &NormSpec::plain(0.0)).unwrap() - PI.sqrt()).abs() < 1e-12);
        assert_eq!(weighted_l2(&SpectralField::zeros(g), &NormSpec::plain(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn l2_matches_trapezoid() {
        let g = GridSpec::new(128, 3.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..128).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = forward(&x, g).unwrap();
        let quad = (x.iter().map(|v| v * v).sum::<f64>() * g.spacing()).sqrt();
        let l2 = weighted_l2(&f, &NormSpec::plain(0.0)).unwrap();
        assert!((l2 - quad).abs() < 1e-10 * quad);
    }

    fn synthetic(g: GridSpec, amp: impl Fn(f64) -> f64) -> SpectralField {
        let mut f = SpectralField::zeros(g);
        for k in 1..(g.n() / 2) as i64 {
            let c = Complex64::new(amp(g.kappa() * k as f64), 0.0);
            f.set_mode(k, c);
            f.set_mode(-k, c);
        }
        f
    }

    #[test]
    fn strip_radius_examples() {
        let g = GridSpec::two_pi(128).unwrap();
        let r = strip_radius(&synthetic(g, |x| (-0.7 * x).exp()), 1).unwrap();
        assert!((r - 0.7).abs() < 1e-6);
        // algebraic decay has no strip; the linear fit flattens as the band widens
        let wide = GridSpec::two_pi(1024).unwrap();
        let alg = strip_radius(&synthetic(wide, |x| x.powi(-4)), 1).unwrap();
        assert!(alg < 0.05, "{alg}");
        assert!(strip_radius(&synthetic(g, |_| 1e-15), 1).is_none());
    }

    #[test]
    fn decay_fit_examples() {
        let ts: Vec<f64> = (0..20).map(|i| 10f64.powf(i as f64 * 0.12)).collect();
        let s1: Vec<_> = ts.iter().map(|&t| (t, 1.0 / (1.0 + t))).collect();
        let s2: Vec<_> = ts.iter().map(|&t| (t, 3.0 * (1.0 + t).powi(-2))).collect();
        let s3: Vec<_> = ts.iter().map(|&t| (t, 4.2)).collect();
        assert!((decay_fit(&s1).unwrap() + 1.0).abs() < 1e-8);
        assert!((decay_fit(&s2).unwrap() + 2.0).abs() < 1e-8);
        assert!(decay_fit(&s3).unwrap().abs() < 1e-10);
        let mut bad = s1.clone();
        bad[3].1 = 0.0;
        assert!(decay_fit(&bad).is_err());
        assert!(decay_fit(&s1[..5]).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let g = GridSpec::two_pi(128).unwrap();
        let single = SpectralField::from_fn(g, |a| (3.0 * a).cos());
        assert!(check_interpolation(&single, 0.0, 1.0, 2.0, 0.0, 0.0).unwrap());
        let f = random_field(g, 64, 1);
        assert!(check_interpolation(&f, 0.0, 1.0, 2.0, 0.0, 0.0).unwrap());
        assert!(check_interpolation(&f, 1.0, 0.5, 2.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn single_mode_interpolation_is_tight() {
        let g = GridSpec::two_pi(64).unwrap();
        let f = SpectralField::from_fn(g, |a| 0.3 * (5.0 * a).cos());
        let n = |s| fourier_norm(&f, &NormSpec::plain(s)).unwrap();
        assert!((n(1.0) - (n(0.0) * n(2.0)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn interpolation_sweep() {
        let g = GridSpec::two_pi(64).unwrap();
        for seed in 0..1000 {
            let f = random_field(g, 31, seed);
            for &(a, b, c) in &[(0.0, 0.5, 1.0), (0.0, 1.0, 2.0), (1.0, 1.5, 2.0)] {
                assert!(check_interpolation(&f, a, b, c, 0.1, 1.0).unwrap());
            }
        }
    }

    #[test]
    fn product_rule_and_exponential_splitting() {
        let g = GridSpec::two_pi(128).unwrap();
        for seed in 0..50 {
            let a = random_field(g, 40, seed).dealias();
            let b = random_field(g, 40, seed + 1000).dealias();
            let ab = product_dealiased(&a, &b);
            let n = |f: &SpectralField, s, nu, t| fourier_norm(f, &NormSpec::new(s, nu, t)).unwrap();
            let lhs = n(&ab, 1.0, 0.0, 0.0);
            let rhs = n(&a, 1.0, 0.0, 0.0) * n(&b, 0.0, 0.0, 0.0) + n(&a, 0.0, 0.0, 0.0) * n(&b, 1.0, 0.0, 0.0);
            assert!(lhs <= rhs * (1.0 + 1e-12));
            let lhs = n(&ab, 0.0, 0.5, 2.0);
            assert!(lhs <= n(&a, 0.0, 0.5, 2.0) * n(&b, 0.0, 0.5, 2.0) * (1.0 + 1e-12));
        }
    }

    proptest::proptest! {
        #[test]
        fn norm_is_homogeneous_and_subadditive(seed in 0u64..500, lam in -3.0f64..3.0) {
            let g = GridSpec::two_pi(64).unwrap();
            let a = random_field(g, 20, seed);
            let b = random_field(g, 20, seed + 7);
            let spec = NormSpec::new(1.0, 0.2, 1.5);
            let na = fourier_norm(&a, &spec).unwrap();
            let nb = fourier_norm(&b, &spec).unwrap();
            let nl = fourier_norm(&a.scale(lam), &spec).unwrap();
            proptest::prop_assert!((nl - lam.abs() * na).abs() <= 1e-12 * na.max(1.0));
            proptest::prop_assert!(fourier_norm(&a.add(&b), &spec).unwrap() <= (na + nb) * (1.0 + 1e-14));
        }
    }
}
