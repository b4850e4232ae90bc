//! Finite-size ground truth, independent of the closed forms it checks.
//!
//! * [`ed`]: dense exact diagonalization of the periodic transverse-field
//!   chain, `L ≤ 12`.
//! * [`contour`]: the spherical-model partition function as an exact
//!   one-dimensional contour integral on a finite lattice.
//! * [`sphere_mc`]: Monte Carlo over the constraint sphere `Σ r² = N`.
//!
//! Everything here is `f64`.

pub mod contour;
pub mod ed;
pub mod sphere_mc;

pub use contour::{contour_partition, ContourResult, ContourSpec};
pub use ed::{ed_correlation, ed_free_energy, ChainSpec, EdCorrelation, MAX_CHAIN_SITES, MIN_CHAIN_SITES};
pub use sphere_mc::{sphere_mc_partition, sphere_log_area, McEstimate, MCSpec, MIN_SAMPLES};

use crate::error::{Error, Result};
use crate::spherical::SphericalParams;

/// The oracles also admit `J = 0` (decoupled spins) for closed-form checks.
pub(crate) fn validate_oracle_params(p: &SphericalParams<f64>) -> Result<()> {
    let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
    if !finite_nonneg(p.j) || !finite_nonneg(p.b) || !finite_nonneg(p.h) {
        return Err(Error::invalid("J, B and H must be finite and non-negative"));
    }
    if !(p.beta > 0.0) || !p.beta.is_finite() {
        return Err(Error::invalid("beta must be positive and finite"));
    }
    Ok(())
}
