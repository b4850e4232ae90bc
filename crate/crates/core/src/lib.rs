//! Numerics for two exactly solvable quantum models.
//!
//! * [`ising_chain`]: the one-dimensional transverse-field Ising chain, with its
//!   dispersion, free energy, ground-state energy and zero-field susceptibility.
//! * [`toeplitz`]: the zero-temperature `σˣσˣ` correlation of the chain as a
//!   Toeplitz determinant, and its infinite-separation limit.
//! * [`spherical`]: the quantum spherical model with transverse field on a
//!   periodic hypercubic lattice, solved by a saddle point of `φ(w)`.
//! * [`oracles`]: finite-size ground truth (dense exact diagonalization,
//!   direct contour integration, Monte Carlo on the constraint sphere).
//!
//! The analytic modules are generic over the scalar type through [`Real`];
//! the `*64` aliases below fix it to `f64`. The oracles work in `f64` only.

// `!(x > 0.0)` is how parameters reject NaN; quadrature nodes are quoted to
// full published precision.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod acceptance;
pub mod error;
pub mod ising_chain;
pub mod numerics;
pub mod oracles;
pub mod scalar;
pub mod spherical;
pub mod toeplitz;

pub use error::{Error, Result};
pub use scalar::Real;

pub type IsingParams64 = ising_chain::IsingParams<f64>;
pub type SphericalParams64 = spherical::SphericalParams<f64>;
pub type SaddleSolution64 = spherical::SaddleSolution<f64>;
pub type FreeEnergyResult64 = FreeEnergyResult<f64>;
pub type CorrelationQuery64 = toeplitz::CorrelationQuery<f64>;
pub type CorrelationResult64 = toeplitz::CorrelationResult<f64>;

pub type IsingParams32 = ising_chain::IsingParams<f32>;
pub type SphericalParams32 = spherical::SphericalParams<f32>;

/// How a free energy value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Saddle,
    Oracle,
    ClosedForm,
}

/// A free energy per site together with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyResult<T> {
    pub value: T,
    pub err_est: T,
    pub method: Method,
}
