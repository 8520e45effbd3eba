//! Ledger constants near the origin and the threshold over a parameter lattice.

use muskat::certify::{ledger, theta, theta_scan, thresholds};
use muskat::fluid::FluidConfig;

fn main() -> muskat::Result<()> {
    let cfg = FluidConfig::new(0.5, 0.2, 1.0, 1.0)?;
    for &(a0, a1) in &[(0.0, 0.0), (1e-3, 1e-3), (0.05, 0.05), (0.2, 0.1)] {
        let l = ledger(a0, a1, &cfg)?;
        println!(
            "a0={a0:<6} a1={a1:<6} C0={:.6} C1={:.6} C3={:.6} sigma0={:.3e} sigma1={:.3e}",
            l.c0, l.c1, l.c3, l.sigma0, l.sigma1
        );
    }
    println!("\n a_kappa   a_mu     theta    scan      k0          k1");
    for &ak in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
        for &am in &[-0.5, 0.5] {
            let c = FluidConfig::new(ak, am, 1.0, 1.0)?;
            let (k0, k1) = thresholds(&c)?;
            println!(
                "{ak:>8} {am:>6} {:>9.6} {:>9.6} {k0:>11.4e} {k1:>11.4e}",
                theta(&c)?,
                theta_scan(&c)
            );
        }
    }
    Ok(())
}
