//! Long run of an admissible power-law datum: algebraic decay of the
//! Lipschitz-level norm, the energy budget and the growing analyticity strip.
//!
//! `cargo run --release --example decay_run -- [t_end] [n]`

use std::f64::consts::PI;

use muskat::certify::{certify_datum, thresholds};
use muskat::config::{build_initial, InitialData};
use muskat::evolution::InterfaceField;
use muskat::fluid::FluidConfig;
use muskat::norms::{decay_fit, fourier_norm, NormSpec};
use muskat::spectral::GridSpec;
use muskat::trajectory::{run, RunOptions, Schedule};

fn main() -> muskat::Result<()> {
    let mut args = std::env::args().skip(1);
    let t_end: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let cfg = FluidConfig::new(0.5, 0.2, 1.0, 1.0)?;
    let grid = GridSpec::new(n, 2.0 * PI * 96.0)?;
    let datum = InitialData::PowerLaw { exponent: 0.9, f11: 1.0, k_max: None, taper: None };
    let raw = build_initial(&datum, grid, 0)?;
    // half of the admissibility thresholds
    let (k0, k1) = thresholds(&cfg)?;
    let a0 = fourier_norm(&raw, &NormSpec::plain(0.0))?;
    let a1 = fourier_norm(&raw, &NormSpec::plain(1.0))?;
    let f0 = InterfaceField::new(raw.scale(0.5 * (k0 / a0).min(k1 / a1)));
    let cert = certify_datum(&f0, &cfg)?;
    print!("{}", cert.table());

    let sch = Schedule { t_end, dt: 0.2, snapshot_every: 5, checkpoint_every: None };
    let opts = RunOptions { certificate: Some(cert), enforce_budget: true, ..Default::default() };
    let tr = run(&f0, &cfg, &sch, &opts)?;
    println!("{:>7} {:>12} {:>12} {:>10}", "t", "F11", "F01", "strip");
    for r in &tr.rows {
        println!(
            "{:>7.2} {:>12.6e} {:>12.6e} {:>10.4}",
            r.t,
            r.plain.f11,
            r.plain.f01,
            r.plain.strip_radius.unwrap_or(f64::NAN)
        );
    }
    let series: Vec<(f64, f64)> = tr.rows.iter().filter(|r| r.t >= 1.0).map(|r| (r.t, r.plain.f11)).collect();
    if let Ok(p) = decay_fit(&series) {
        println!("fitted exponent of F11 over [1, {t_end}]: {p:.4}");
    }
    Ok(())
}
