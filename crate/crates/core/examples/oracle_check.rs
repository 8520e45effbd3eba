//! Fast paths against the brute-force oracle on a gaussian bump.

use muskat::commands::oracle_report;
use muskat::config::{build_initial, InitialData};
use muskat::evolution::InterfaceField;
use muskat::fluid::FluidConfig;
use muskat::spectral::GridSpec;

fn main() -> muskat::Result<()> {
    let cfg = FluidConfig::new(0.5, 0.2, 1.0, 1.0)?;
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(128);
    let grid = GridSpec::new(n, 20.0)?;
    let datum = InitialData::GaussianBump { width: 1.0, amplitude: 0.1 };
    let f = InterfaceField::new(build_initial(&datum, grid, 0)?);
    let rep = oracle_report(&f, &cfg, 1e-14, 1e-6, false)?;
    for (what, v) in &rep.discrepancies {
        println!("{what:<18} {v:.3e}");
    }
    rep.check()?;
    println!("all below {:.0e}", rep.bound);
    Ok(())
}
