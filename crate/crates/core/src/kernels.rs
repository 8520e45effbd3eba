//! Periodized kernel tables for the fast path.
//!
//! Every whole-line kernel is summed over all periodic images in closed form,
//! so quadrature over one period is exact in the image sum. With `κ = 2π/L`,
//! `s(β) = sin²(κβ/2)` and `D(y) = 2(sinh²(κy/2) + s(β))`:
//!
//! ```text
//! Σ_m (β+mL)/((β+mL)²+y²) = (π/L) sin(κβ) / D(y)
//! Σ_m y/((β+mL)²+y²)      = (π/L) sinh(κy) / D(y)
//! ```
//!
//! Kernels with a `1/β` singularity are integrated with the alternating-point
//! trapezoid rule (odd offsets only, weight `2h`), which is exact for the
//! periodic Hilbert kernel on every resolved mode. Smooth kernels use the
//! plain trapezoid rule.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::spectral::GridSpec;

/// Rows are processed in parallel once a table is at least this wide.
const PAR_MIN: usize = 128;

pub(crate) struct OffsetTrig {
    pub sin_b: Vec<f64>,
    pub sin_half_sq: Vec<f64>,
}

impl OffsetTrig {
    pub fn new(grid: &GridSpec) -> Self {
        let n = grid.n();
        let k = grid.kappa();
        let h = grid.spacing();
        let mut sin_b = Vec::with_capacity(n);
        let mut sin_half_sq = Vec::with_capacity(n);
        for o in 0..n {
            let b = o as f64 * h;
            sin_b.push((k * b).sin());
            let s = (0.5 * k * b).sin();
            sin_half_sq.push(s * s);
        }
        Self { sin_b, sin_half_sq }
    }
}

pub(crate) struct KernelTables {
    pub n: usize,
    pub h: f64,
    /// `1/β`-singular tables over odd offsets, `n × n/2`.
    pub s1: Vec<f64>,
    pub c1: Vec<f64>,
    /// Singular sine kernel minus the periodic Hilbert kernel.
    pub k0: Vec<f64>,
    /// Smooth tables over all offsets, `n × n`, evaluated at the target depth.
    pub s2: Vec<f64>,
    pub c2: Vec<f64>,
    /// Target-depth sine kernel minus the flat-depth one.
    pub n4: Vec<f64>,
    /// Smooth Poisson table at the source depth.
    pub p: Vec<f64>,
}

fn fill_rows(table: &mut [f64], width: usize, row: impl Fn(usize, &mut [f64]) + Sync) {
    if table.len() / width.max(1) >= PAR_MIN {
        table
            .par_chunks_mut(width)
            .enumerate()
            .for_each(|(i, r)| row(i, r));
    } else {
        table
            .chunks_mut(width)
            .enumerate()
            .for_each(|(i, r)| row(i, r));
    }
}

impl KernelTables {
    pub fn build(grid: &GridSpec, f: &[f64], h2: f64) -> Self {
        let n = grid.n();
        let half = n / 2;
        let kap = grid.kappa();
        let pre = PI / grid.length();
        let trig = OffsetTrig::new(grid);
        let depth: Vec<f64> = f.iter().map(|v| v + h2).collect();
        let sh_sq: Vec<f64> = depth
            .iter()
            .map(|a| {
                let s = (0.5 * kap * a).sinh();
                s * s
            })
            .collect();
        let sh_full: Vec<f64> = depth.iter().map(|a| (kap * a).sinh()).collect();
        let sh_flat = {
            let s = (0.5 * kap * h2).sinh();
            s * s
        };

        let mut s1 = vec![0.0; n * half];
        let mut c1 = vec![0.0; n * half];
        let mut k0 = vec![0.0; n * half];
        let singular = |i: usize, o: usize| {
            let j = (i + n - o) % n;
            let d = f[i] - f[j];
            let sd = (0.5 * kap * d).sinh();
            let sd2 = sd * sd;
            let sq = trig.sin_half_sq[o];
            let den = 2.0 * (sd2 + sq);
            let sb = trig.sin_b[o];
            (
                pre * sb / den,
                pre * (kap * d).sinh() / den,
                -pre * sb * sd2 / (den * sq),
            )
        };
        fill_rows(&mut s1, half, |i, r| {
            for (m, v) in r.iter_mut().enumerate() {
                *v = singular(i, 2 * m + 1).0;
            }
        });
        fill_rows(&mut c1, half, |i, r| {
            for (m, v) in r.iter_mut().enumerate() {
                *v = singular(i, 2 * m + 1).1;
            }
        });
        fill_rows(&mut k0, half, |i, r| {
            for (m, v) in r.iter_mut().enumerate() {
                *v = singular(i, 2 * m + 1).2;
            }
        });

        let mut s2 = vec![0.0; n * n];
        let mut c2 = vec![0.0; n * n];
        let mut n4 = vec![0.0; n * n];
        let mut p = vec![0.0; n * n];
        fill_rows(&mut s2, n, |i, r| {
            for (o, v) in r.iter_mut().enumerate() {
                *v = pre * trig.sin_b[o] / (2.0 * (sh_sq[i] + trig.sin_half_sq[o]));
            }
        });
        fill_rows(&mut c2, n, |i, r| {
            for (o, v) in r.iter_mut().enumerate() {
                *v = pre * sh_full[i] / (2.0 * (sh_sq[i] + trig.sin_half_sq[o]));
            }
        });
        fill_rows(&mut n4, n, |i, r| {
            // sinh²(κh/2) - sinh²(κa/2) = sinh(κ(h-a)/2) sinh(κ(h+a)/2), no cancellation
            let num = 2.0 * (0.5 * kap * (h2 - depth[i])).sinh() * (0.5 * kap * (h2 + depth[i])).sinh();
            for (o, v) in r.iter_mut().enumerate() {
                let da = 2.0 * (sh_sq[i] + trig.sin_half_sq[o]);
                let dh = 2.0 * (sh_flat + trig.sin_half_sq[o]);
                *v = pre * trig.sin_b[o] * num / (da * dh);
            }
        });
        fill_rows(&mut p, n, |i, r| {
            for (o, v) in r.iter_mut().enumerate() {
                let j = (i + n - o) % n;
                *v = pre * sh_full[j] / (2.0 * (sh_sq[j] + trig.sin_half_sq[o]));
            }
        });

        Self {
            n,
            h: grid.spacing(),
            s1,
            c1,
            k0,
            s2,
            c2,
            n4,
            p,
        }
    }

    /// `out_i = 2h Σ_{o odd} K[i,o] g[i-o]`.
    pub fn apply_odd(&self, table: &[f64], g: &[f64]) -> Vec<f64> {
        let n = self.n;
        let half = n / 2;
        let w = 2.0 * self.h;
        let row = |i: usize, out: &mut f64| {
            let r = &table[i * half..(i + 1) * half];
            let mut acc = 0.0;
            for (m, k) in r.iter().enumerate() {
                acc += k * g[(i + n - 2 * m - 1) % n];
            }
            *out = w * acc;
        };
        let mut out = vec![0.0; n];
        if n >= PAR_MIN {
            out.par_iter_mut().enumerate().for_each(|(i, o)| row(i, o));
        } else {
            out.iter_mut().enumerate().for_each(|(i, o)| row(i, o));
        }
        out
    }

    /// `out_i = h Σ_o K[i,o] g[i-o]`.
    pub fn apply_all(&self, table: &[f64], g: &[f64]) -> Vec<f64> {
        let n = self.n;
        let w = self.h;
        let row = |i: usize, out: &mut f64| {
            let r = &table[i * n..(i + 1) * n];
            // split the wrap-around so the inner loops are contiguous
            let mut acc = 0.0;
            for o in 0..=i {
                acc += r[o] * g[i - o];
            }
            for o in i + 1..n {
                acc += r[o] * g[i + n - o];
            }
            *out = w * acc;
        };
        let mut out = vec![0.0; n];
        if n >= PAR_MIN {
            out.par_iter_mut().enumerate().for_each(|(i, o)| row(i, o));
        } else {
            out.iter_mut().enumerate().for_each(|(i, o)| row(i, o));
        }
        out
    }
}
