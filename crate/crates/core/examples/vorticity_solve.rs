//! Vortex-sheet strengths for a wavy interface, their potentials, and the
//! a-priori bounds.

use muskat::evolution::InterfaceField;
use muskat::fluid::FluidConfig;
use muskat::norms::{fourier_norm, NormSpec};
use muskat::spectral::{GridSpec, SpectralField};
use muskat::vorticity::{omega2_of_omega1, potentials, solve_vorticity, vorticity_bound_check, Omega2Method};

fn main() -> muskat::Result<()> {
    let cfg = FluidConfig::new(0.5, 0.2, 1.0, 1.0)?;
    let grid = GridSpec::two_pi(128)?;
    let f = InterfaceField::new(SpectralField::from_fn(grid, |a| 0.05 * a.cos() + 0.01 * (3.0 * a).sin()));

    let pair = solve_vorticity(&f, &cfg, 1e-13, 200)?;
    println!("Picard: {} iterations, contraction {:?}", pair.iterations, pair.contraction);
    for (i, r) in pair.residual_history.iter().enumerate() {
        println!("  {i:>2} {r:.3e}");
    }

    let series = omega2_of_omega1(&f, &pair.omega1, &cfg, Omega2Method::Series { n_max: None }, 1e-12)?;
    let gap = fourier_norm(&series.sub(&pair.omega2), &NormSpec::plain(0.0))?;
    println!("series vs quadrature omega2: {gap:.3e}");

    let pot = potentials(&pair, &f, &cfg)?;
    println!("mean of Omega1: {:.6e}", pot.big_omega1.mean());

    let report = vorticity_bound_check(&pair, &f, &cfg, 0.0, 0.0)?;
    for c in &report.checks {
        println!("{:<11} {:.4e} <= {:.4e}  {}", c.name, c.lhs, c.rhs, if c.pass { "ok" } else { "FAIL" });
    }
    Ok(())
}
