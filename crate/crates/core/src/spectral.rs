//! Periodic collocation grid, the transform pair and Fourier multipliers.
//!
//! Nodes sit at `α_j = -L/2 + j·L/n`, so `α = 0` is the node `j = n/2` and
//! reflections `α → -α` map the grid onto itself. Coefficients follow the
//! Fourier-series convention `f(α) = Σ_k c_k e^{iξ_k α}` with `ξ_k = 2πk/L`,
//! stored in FFT order (non-negative modes first, Nyquist at index `n/2`).

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_points: usize,
    domain_length: f64,
}

impl GridSpec {
    pub fn new(n_points: usize, domain_length: f64) -> Result<Self> {
        if n_points < 4 || n_points % 2 != 0 {
            return Err(Error::Config(format!(
                "n_points must be an even integer >= 4, got {n_points}"
            )));
        }
        if !(domain_length.is_finite() && domain_length > 0.0) {
            return Err(Error::Config(format!(
                "domain_length must be finite and positive, got {domain_length}"
            )));
        }
        Ok(Self {
            n_points,
            domain_length,
        })
    }

    /// Grid on `[-π, π)`.
    pub fn two_pi(n_points: usize) -> Result<Self> {
        Self::new(n_points, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n_points
    }

    pub fn length(&self) -> f64 {
        self.domain_length
    }

    pub fn spacing(&self) -> f64 {
        self.domain_length / self.n_points as f64
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn kappa(&self) -> f64 {
        2.0 * PI / self.domain_length
    }

    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.domain_length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Index of the node at `α = 0`.
    pub fn origin_index(&self) -> usize {
        self.n_points / 2
    }

    /// Signed mode number stored at FFT index `idx`; the Nyquist slot is `+n/2`.
    pub fn mode(&self, idx: usize) -> i64 {
        if idx <= self.n_points / 2 {
            idx as i64
        } else {
            idx as i64 - self.n_points as i64
        }
    }

    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.kappa() * self.mode(idx) as f64
    }

    pub fn index_of(&self, k: i64) -> usize {
        let n = self.n_points as i64;
        k.rem_euclid(n) as usize
    }

    /// Largest `|ξ_k|` on the grid (the Nyquist wavenumber).
    pub fn xi_max(&self) -> f64 {
        self.kappa() * (self.n_points / 2) as f64
    }

    pub fn nyquist_index(&self) -> usize {
        self.n_points / 2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub grid: GridSpec,
    pub coeffs: Vec<Complex64>,
    pub time: f64,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n()],
            time: 0.0,
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::Config(format!(
                "expected {} coefficients, got {}",
                grid.n(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid,
            coeffs,
            time: 0.0,
        })
    }

    /// Samples a real function at the nodes and transforms it.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        forward(&samples, grid).expect("sample count matches grid")
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Coefficient of signed mode `k`.
    pub fn mode(&self, k: i64) -> Complex64 {
        self.coeffs[self.grid.index_of(k)]
    }

    pub fn set_mode(&mut self, k: i64, value: Complex64) {
        let idx = self.grid.index_of(k);
        self.coeffs[idx] = value;
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn to_samples(&self) -> Vec<f64> {
        inverse(self)
    }

    /// Applies a multiplier `μ(ξ)` mode by mode and zeroes the Nyquist slot.
    pub fn apply_multiplier(&self, mult: impl Fn(f64) -> Complex64) -> Self {
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            *c *= mult(self.grid.wavenumber(idx));
        }
        out.coeffs[self.grid.nyquist_index()] = Complex64::new(0.0, 0.0);
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= b;
        }
        out
    }

    /// Zeroes every mode with `|k| > n/3` (the 2/3 rule).
    pub fn dealias(&self) -> Self {
        let cut = (self.n() / 3) as i64;
        let mut out = self.clone();
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            if self.grid.mode(idx).abs() > cut {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest violation of `c_{-k} = conj(c_k)`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n();
        let mut worst = self.coeffs[0].im.abs();
        for idx in 1..n {
            let d = (self.coeffs[idx] - self.coeffs[n - idx].conj()).norm();
            worst = worst.max(d);
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Transforms real samples to Fourier-series coefficients.
pub fn forward(samples: &[f64], grid: GridSpec) -> Result<SpectralField> {
    let n = grid.n();
    if samples.len() != n {
        return Err(Error::Config(format!(
            "sample count {} does not match grid size {n}",
            samples.len()
        )));
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let inv_n = 1.0 / n as f64;
    for (idx, c) in buf.iter_mut().enumerate() {
        // nodes start at -L/2, which contributes (-1)^k
        let sign = if idx % 2 == 0 { inv_n } else { -inv_n };
        *c *= sign;
    }
    // exact reality symmetry (roundoff in the FFT may leave tiny asymmetry)
    let mut field = SpectralField::from_coeffs(grid, buf)?;
    symmetrize(&mut field);
    Ok(field)
}

fn symmetrize(field: &mut SpectralField) {
    let n = field.n();
    field.coeffs[0].im = 0.0;
    field.coeffs[n / 2].im = 0.0;
    for idx in 1..n / 2 {
        let a = field.coeffs[idx];
        let b = field.coeffs[n - idx].conj();
        let m = (a + b) * 0.5;
        field.coeffs[idx] = m;
        field.coeffs[n - idx] = m.conj();
    }
}

/// Evaluates the real field at the grid nodes.
pub fn inverse(field: &SpectralField) -> Vec<f64> {
    let mut buf: Vec<Complex64> = field
        .coeffs
        .iter()
        .enumerate()
        .map(|(idx, &c)| if idx % 2 == 0 { c } else { -c })
        .collect();
    fft_in_place(&mut buf, true);
    buf.into_iter().map(|c| c.re).collect()
}

pub fn hilbert(field: &SpectralField) -> SpectralField {
    field.apply_multiplier(|xi| Complex64::new(0.0, -sgn(xi)))
}

pub fn derivative(field: &SpectralField) -> SpectralField {
    field.apply_multiplier(|xi| Complex64::new(0.0, xi))
}

/// Mean-free antiderivative: `c_k / (iξ_k)` for `k ≠ 0`, zero mean.
pub fn antiderivative(field: &SpectralField) -> SpectralField {
    field.apply_multiplier(|xi| {
        if xi == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0 / xi)
        }
    })
}

/// Pointwise product with the 2/3 rule applied to inputs and output.
pub fn product_dealiased(a: &SpectralField, b: &SpectralField) -> SpectralField {
    let pa = a.dealias().to_samples();
    let pb = b.dealias().to_samples();
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    forward(&prod, a.grid)
        .expect("same grid")
        .dealias()
        .with_time(a.time)
}

pub(crate) fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Whole-line transform of `a/(x²+a²)`: `π e^{-a|ξ|}`.
pub fn poisson_hat(a: f64, xi: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("poisson_hat needs a > 0, got {a}")));
    }
    Ok(PI * (-a * xi.abs()).exp())
}

/// Whole-line transform of `x/(x²+a²)`: `-iπ sgn(ξ) e^{-a|ξ|}`, with `sgn(0) = 0`.
pub fn conj_poisson_hat(a: f64, xi: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!(
            "conj_poisson_hat needs a > 0, got {a}"
        )));
    }
    Ok(Complex64::new(0.0, -PI * sgn(xi) * (-a * xi.abs()).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_samples(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn constant_has_only_mean() {
        let g = GridSpec::two_pi(32).unwrap();
        let f = forward(&vec![1.0; 32], g).unwrap();
        assert!((f.coeffs[0].re - 1.0).abs() < 1e-15);
        assert!(f.coeffs[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn cosine_splits_into_two_halves() {
        let g = GridSpec::two_pi(64).unwrap();
        let f = SpectralField::from_fn(g, f64::cos);
        for k in -31..=32i64 {
            let want = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((f.mode(k) - Complex64::new(want, 0.0)).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn round_trip_random() {
        for &n in &[32usize, 128, 512, 4096] {
            let g = GridSpec::new(n, 7.3).unwrap();
            let x = random_samples(n, n as u64);
            let y = inverse(&forward(&x, g).unwrap());
            let err = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn length_mismatch_is_config_error() {
        let g = GridSpec::two_pi(16).unwrap();
        assert!(matches!(forward(&[0.0; 8], g), Err(Error::Config(_))));
    }

    #[test]
    fn odd_grid_rejected() {
        assert!(GridSpec::new(15, 1.0).is_err());
        assert!(GridSpec::new(16, 0.0).is_err());
    }

    #[test]
    fn hilbert_of_cos3_is_sin3() {
        let g = GridSpec::two_pi(64).unwrap();
        let h = hilbert(&SpectralField::from_fn(g, |a| (3.0 * a).cos())).to_samples();
        for (a, v) in g.nodes().iter().zip(&h) {
            assert!((v - (3.0 * a).sin()).abs() < 1e-12);
        }
        let c = hilbert(&SpectralField::from_fn(g, |_| 2.5));
        assert!(c.max_abs_coeff() == 0.0);
    }

    #[test]
    fn double_hilbert_removes_mean_and_flips_sign() {
        let g = GridSpec::new(128, 3.0).unwrap();
        let f = forward(&random_samples(128, 9), g).unwrap();
        let hh = hilbert(&hilbert(&f));
        let mut want = f.scale(-1.0);
        want.coeffs[0] = Complex64::new(0.0, 0.0);
        want.coeffs[64] = Complex64::new(0.0, 0.0);
        assert!(hh.sub(&want).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn hilbert_is_isometry_on_mean_free() {
        let g = GridSpec::new(256, 5.0).unwrap();
        let mut f = forward(&random_samples(256, 4), g).unwrap();
        f.coeffs[0] = Complex64::new(0.0, 0.0);
        f.coeffs[128] = Complex64::new(0.0, 0.0);
        let e = |x: &SpectralField| x.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((e(&f) - e(&hilbert(&f))).abs() < 1e-14 * e(&f));
    }

    #[test]
    fn derivative_examples() {
        let g = GridSpec::two_pi(64).unwrap();
        let d = derivative(&SpectralField::from_fn(g, f64::sin)).to_samples();
        for (a, v) in g.nodes().iter().zip(&d) {
            assert!((v - a.cos()).abs() < 1e-12);
        }
        assert_eq!(derivative(&SpectralField::from_fn(g, |_| 4.0)).max_abs_coeff(), 0.0);
    }

    #[test]
    fn derivative_matches_fourth_order_differences() {
        // e^{sin α}: spectral derivative vs a 4th-order stencil on a fine grid
        let g = GridSpec::two_pi(256).unwrap();
        let d = derivative(&SpectralField::from_fn(g, |a| a.sin().exp())).to_samples();
        let h = 1e-3;
        let f = |a: f64| a.sin().exp();
        for (a, v) in g.nodes().iter().zip(&d) {
            let fd = (-f(a + 2.0 * h) + 8.0 * f(a + h) - 8.0 * f(a - h) + f(a - 2.0 * h)) / (12.0 * h);
            assert!((v - fd).abs() < 1e-8 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let g = GridSpec::new(128, 4.0).unwrap();
        let mut f = forward(&random_samples(128, 2), g).unwrap();
        f.coeffs[0] = Complex64::new(0.0, 0.0);
        f.coeffs[64] = Complex64::new(0.0, 0.0);
        let back = derivative(&antiderivative(&f));
        assert!(back.sub(&f).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn kernel_transform_closed_forms() {
        assert!((poisson_hat(1.0, 0.0).unwrap() - PI).abs() < 1e-15);
        assert!((poisson_hat(2.0, 0.0).unwrap() - PI).abs() < 1e-15);
        assert_eq!(conj_poisson_hat(1.0, 0.0).unwrap(), Complex64::new(0.0, 0.0));
        let v = conj_poisson_hat(1.0, 1.0).unwrap();
        assert!((v - Complex64::new(0.0, -PI * (-1.0f64).exp())).norm() < 1e-15);
        assert!(poisson_hat(0.0, 1.0).is_err());
        assert!(conj_poisson_hat(-1.0, 1.0).is_err());
    }

    #[test]
    fn reflection_maps_grid_to_itself() {
        let g = GridSpec::new(64, 3.0).unwrap();
        let nodes = g.nodes();
        assert_eq!(nodes[g.origin_index()], 0.0);
        for j in 1..64 {
            assert!((nodes[j] + nodes[64 - j]).abs() < 1e-14 || j == 32);
        }
    }

    proptest::proptest! {
        #[test]
        fn conj_poisson_is_odd(a in 0.1f64..5.0, xi in -10.0f64..10.0) {
            let p = conj_poisson_hat(a, xi).unwrap();
            let m = conj_poisson_hat(a, -xi).unwrap();
            proptest::prop_assert!((p + m).norm() == 0.0);
            proptest::prop_assert!((p - m.conj()).norm() == 0.0);
        }

        #[test]
        fn forward_is_real_symmetric(seed in 0u64..1000) {
            let g = GridSpec::new(64, 2.0).unwrap();
            let f = forward(&random_samples(64, seed), g).unwrap();
            proptest::prop_assert!(f.symmetry_defect() == 0.0);
        }
    }
}
