//! Thermodynamics of the transverse-field Ising chain
//! `H = −J Σ σˣₙσˣₙ₊₁ + B Σ σᶻₙ` at zero longitudinal field.
//!
//! Every quantity is a Brillouin-zone average of the single-mode dispersion
//! `Δ(x) = √(J² + B² − 2BJ cos x)`.

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::scalar::{log_2cosh, Real};
use crate::{FreeEnergyResult, Method};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingParams<T> {
    /// Coupling `J > 0`.
    pub j: T,
    /// Transverse field `B ≥ 0`.
    pub b: T,
    /// Inverse temperature `β > 0`.
    pub beta: T,
}

impl<T: Real> IsingParams<T> {
    pub fn new(j: T, b: T, beta: T) -> Result<Self> {
        let p = IsingParams { j, b, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        validate_couplings(self.j, self.b)?;
        if !(self.beta > T::zero()) || !self.beta.is_finite() {
            return Err(Error::invalid("beta must be positive and finite"));
        }
        Ok(())
    }
}

fn validate_couplings<T: Real>(j: T, b: T) -> Result<()> {
    if !(j > T::zero()) || !j.is_finite() {
        return Err(Error::invalid("J must be positive and finite"));
    }
    if !(b >= T::zero()) || !b.is_finite() {
        return Err(Error::invalid("B must be non-negative and finite"));
    }
    Ok(())
}

/// Test hook for the `check` command's sensitivity probe: when armed,
/// [`dispersion`] returns `−Δ`.
#[doc(hidden)]
pub mod mutation {
    use std::sync::atomic::{AtomicBool, Ordering};

    static FLIP_DISPERSION_SIGN: AtomicBool = AtomicBool::new(false);

    pub fn set_dispersion_sign_flip(on: bool) {
        FLIP_DISPERSION_SIGN.store(on, Ordering::SeqCst);
    }

    pub(crate) fn dispersion_sign_flipped() -> bool {
        FLIP_DISPERSION_SIGN.load(Ordering::Relaxed)
    }
}

/// Single-mode energy `Δ(x)`; lies in `[|J − B|, J + B]`.
pub fn dispersion<T: Real>(j: T, b: T, x: T) -> T {
    let two = T::lit(2.0);
    // (J − B)² + 2BJ(1 − cos x) keeps the gap exact near x = 0
    let half = T::lit(0.5) * x;
    let s = half.sin();
    let squared = (j - b) * (j - b) + two * two * b * j * s * s;
    let delta = squared.max(T::zero()).sqrt();
    if mutation::dispersion_sign_flipped() {
        -delta
    } else {
        delta
    }
}

/// Free energy per site `f(β, J, B) = −(1/2πβ) ∫₀^{2π} log(2 cosh βΔ(x)) dx`.
pub fn free_energy<T: Real>(params: &IsingParams<T>, spec: &QuadratureSpec) -> Result<FreeEnergyResult<T>> {
    params.validate()?;
    let IsingParams { j, b, beta } = *params;
    // Δ(x) = Δ(2π − x): integrate over half the zone.
    let r = integrate(|x| log_2cosh(beta * dispersion(j, b, x)), T::zero(), T::PI(), spec)?;
    let scale = -T::one() / (T::PI() * beta);
    Ok(FreeEnergyResult {
        value: scale * r.value,
        err_est: scale.abs() * r.err_est,
        method: Method::Quadrature,
    })
}

/// Ground-state energy per site `f∞ = −(1/2π) ∫₀^{2π} Δ(x) dx`, computed
/// directly rather than as a large-β limit.
pub fn ground_energy<T: Real>(j: T, b: T, spec: &QuadratureSpec) -> Result<FreeEnergyResult<T>> {
    validate_couplings(j, b)?;
    ground_energy_any_sign(j, b, spec)
}

// f∞ is even in B, which the susceptibility stencil relies on.
fn ground_energy_any_sign<T: Real>(j: T, b: T, spec: &QuadratureSpec) -> Result<FreeEnergyResult<T>> {
    let r = integrate(|x| dispersion(j, b, x), T::zero(), T::PI(), spec)?;
    Ok(FreeEnergyResult {
        value: -r.value / T::PI(),
        err_est: r.err_est / T::PI(),
        method: Method::Quadrature,
    })
}

/// Zero-field susceptibility `−∂²f∞/∂B²` at `B = 0`, by a five-point
/// second difference with step `h = 10⁻³·max(J, 1)`. Equals `1/(2J)`.
pub fn susceptibility_at_zero_field<T: Real>(j: T, spec: &QuadratureSpec) -> Result<T> {
    validate_couplings(j, T::zero())?;
    let h = T::lit(1e-3) * j.max(T::one());
    let f = |b: T| ground_energy_any_sign(j, b, spec).map(|r| r.value);
    let (f0, f1, f2) = (f(T::zero())?, f(h)?, f(h + h)?);
    let (fm1, fm2) = (f(-h)?, f(-(h + h))?);
    let second = (-f2 + T::lit(16.0) * f1 - T::lit(30.0) * f0 + T::lit(16.0) * fm1 - fm2)
        / (T::lit(12.0) * h * h);
    Ok(-second)
}
