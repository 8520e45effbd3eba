//! Pseudo-spectral simulation of a two-fluid interface in a porous medium
//! whose permeability jumps across a horizontal line below it, together with
//! an explicit constant ledger that certifies small initial data.
//!
//! The examples directory is the front door:
//!
//! | example | shows |
//! |---|---|
//! | `linear_dispersion` | linear symbol against measured modal rates |
//! | `vorticity_solve` | Picard solve for the two vortex sheets, potentials, a-priori bounds |
//! | `oracle_check` | fast paths against brute-force quadrature |
//! | `kernel_transforms` | whole-line transforms of the Poisson kernels, numeric and closed form |
//! | `norms_and_strip` | Wiener norms and the analyticity strip |
//! | `constant_ledger` | ledger constants and admissibility thresholds |
//! | `certify_datum` | certificate for a concrete datum |
//! | `decay_run` | long run with budget monitor and decay fit |
//! | `checkpoint_restart` | bit-exact resume from a checkpoint |
//! | `physical_config` | JSON config from physical parameters |
//!
//! Grids are periodic with nodes `α_j = -L/2 + jL/n`; spectral coefficients
//! are stored in FFT order and normalized so that `f(α) = Σ f̂_k e^{iξ_k α}`.

pub mod certify;
pub mod commands;
pub mod config;
pub mod error;
pub mod evolution;
pub mod fluid;
mod kernels;
pub mod norms;
pub mod oracle;
pub mod spectral;
pub mod trajectory;
pub mod vorticity;

pub use error::{Error, Result};
