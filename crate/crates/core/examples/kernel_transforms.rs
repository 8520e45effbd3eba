//! Whole-line transforms of the Poisson kernel and its conjugate, numerically
//! and in closed form.

use muskat::oracle::fourier_transform_kernels;
use muskat::spectral::{conj_poisson_hat, poisson_hat};

fn main() -> muskat::Result<()> {
    println!("{:>4} {:>5} {:>14} {:>14} {:>14} {:>14}", "a", "xi", "P numeric", "P closed", "Q numeric", "Q closed");
    for a in [0.5, 1.0, 2.0] {
        for xi in [-4.0, -2.0, -0.5, 0.0, 0.5, 2.0, 4.0] {
            let (p, q) = fourier_transform_kernels(a, xi)?;
            println!(
                "{a:>4} {xi:>5} {p:>14.8e} {:>14.8e} {:>14.8e} {:>14.8e}",
                poisson_hat(a, xi)?,
                q.im,
                conj_poisson_hat(a, xi)?.im
            );
        }
    }
    Ok(())
}
