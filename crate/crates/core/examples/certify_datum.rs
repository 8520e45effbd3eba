//! Certificate for a small cosine and for a datum outside the ledger.

use muskat::certify::{certify_datum, thresholds};
use muskat::evolution::InterfaceField;
use muskat::fluid::FluidConfig;
use muskat::spectral::{GridSpec, SpectralField};

fn main() -> muskat::Result<()> {
    let cfg = FluidConfig::new(0.5, 0.2, 1.0, 1.0)?;
    let (k0, k1) = thresholds(&cfg)?;
    println!("thresholds: k0 = {k0:.6e}, k1 = {k1:.6e}\n");

    let grid = GridSpec::two_pi(64)?;
    for amp in [0.01, 0.9] {
        let f0 = InterfaceField::new(SpectralField::from_fn(grid, |a| amp * a.cos()));
        let cert = certify_datum(&f0, &cfg)?;
        println!("f0 = {amp} cos(a)");
        print!("{}", cert.table());
        println!();
    }
    let small = InterfaceField::new(SpectralField::from_fn(grid, |a| 0.01 * a.cos()));
    println!("{}", serde_json::to_string_pretty(&certify_datum(&small, &cfg)?)?);
    Ok(())
}
