//! Wiener norms, the weighted L2 norm, and the strip radius of an analytic profile.

use muskat::norms::{check_interpolation, fourier_norm, norm_report, strip_radius, NormSpec};
use muskat::spectral::{GridSpec, SpectralField};

fn main() -> muskat::Result<()> {
    let grid = GridSpec::two_pi(256)?;
    // Poisson-kernel profile: coefficients r^|k|, strip radius -ln r
    let r: f64 = 0.6;
    let f = SpectralField::from_fn(grid, |a| (1.0 - r * r) / (1.0 - 2.0 * r * a.cos() + r * r) - 1.0);
    println!("{:?}", norm_report(&f, 0.0)?);
    println!("strip radius {:.6} (exact {:.6})", strip_radius(&f, 1).unwrap_or(f64::NAN), -r.ln());
    for nu in [0.0, 0.1, 0.3] {
        let w = fourier_norm(&f, &NormSpec::new(1.0, nu, 1.0))?;
        println!("F^(1,1) with nu t = {nu}: {w:.6}");
    }
    println!("interpolation 0 <= 1 <= 2 holds: {}", check_interpolation(&f, 0.0, 1.0, 2.0, 0.1, 1.0)?);
    Ok(())
}
