//! Linear symbol against rates measured from tiny single modes.
//!
//! `cargo run --release --example linear_dispersion`

use muskat::commands::measured_decay_rate;
use muskat::evolution::{linear_symbol, StepOptions};
use muskat::fluid::FluidConfig;
use muskat::spectral::GridSpec;

fn main() -> muskat::Result<()> {
    let cfg = FluidConfig::new(0.5, 0.2, 1.0, 1.0)?;
    let classical = FluidConfig::new(0.0, 0.2, 1.0, 1.0)?;
    let grid = GridSpec::two_pi(128)?;
    println!("{:>2} {:>12} {:>12} {:>10} {:>12}", "k", "m(k)", "measured", "rel err", "A_rho|k|");
    for k in 1..=8 {
        let xi = k as f64;
        let exact = linear_symbol(xi, &cfg);
        let got = measured_decay_rate(grid, &cfg, k, 1e-6, 0.02, 5, StepOptions::default())?;
        println!(
            "{k:>2} {exact:>12.8} {got:>12.8} {:>10.2e} {:>12.8}",
            ((got - exact) / exact).abs(),
            linear_symbol(xi, &classical)
        );
    }
    Ok(())
}
