//! Exact finite-`N` spherical-model partition function as a single
//! vertical contour integral.
//!
//! Inserting `δ(Σr² − N) = (1/2πi) ∫ e^{v(N − Σr²)} dv` and doing the
//! Gaussian integrals mode by mode gives
//!
//! ```text
//! Z_N = (π^{3N/2} / 2πi) ∫_{c−i∞}^{c+i∞} I(v) dv
//! log I(v) = N v − N log v + N(βB)²/(4v) + N(βH)²/(4(v − βJd))
//!            − ½ Σ_ω log(v − βJ Σ cos ω)
//! ```
//!
//! for any `c` right of the spectral edge `βJd`. This is the integral over
//! `w = v/βJ − d` written in `v` so that `J = 0` is allowed. `I(c̄ + is) =
//! conj I(c + is)`, so only `s ≥ 0` is integrated. On the contour
//! `|I(c+is)/I(c)| ≤ K s^{−3N/2}` with `K = c^N Π (c − βJ Σcos ω)^{½}`,
//! which bounds the discarded tail.

use num_complex::Complex64;

use super::validate_oracle_params;
use crate::error::{Error, Result};
use crate::numerics::{find_min_convex_with_derivative, integrate, QuadratureSpec, RootSpec};
use crate::spherical::{FiniteSpectrum, LatticeSpec, SphericalParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub quadrature: QuadratureSpec,
    pub root: RootSpec,
    /// Contour abscissa as a multiple of the saddle distance from the edge.
    pub abscissa_scale: f64,
    /// Give up when the tail bound is still too large at this height.
    pub t_max: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            quadrature: QuadratureSpec::default(),
            root: RootSpec::default(),
            abscissa_scale: 1.0,
            t_max: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourResult {
    pub log_z: f64,
    /// Absolute error estimate on `log_z`.
    pub err_est: f64,
    /// Abscissa `c` in the `v` variable.
    pub abscissa: f64,
    /// Height at which the tail was cut.
    pub t_cut: f64,
}

struct Integrand {
    n: f64,
    edge: f64,
    b2: f64,
    h2: f64,
    /// (βJ Σ cos ω, multiplicity), zero mode first
    modes: Vec<(f64, f64)>,
}

impl Integrand {
    fn new(params: &SphericalParams<f64>, lattice: &LatticeSpec) -> Self {
        let bj = params.beta * params.j;
        let d = lattice.d as f64;
        let mut sums: Vec<f64> = FiniteSpectrum::<f64>::new(*lattice)
            .mode_sums()
            .iter()
            .filter(|&&m| m != d)
            .copied()
            .collect();
        sums.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut modes = vec![(bj * d, 1.0)];
        let mut others: Vec<(f64, f64)> = Vec::new();
        for m in sums {
            match others.last_mut() {
                Some((last, count)) if (*last - bj * m).abs() <= 1e-13 * bj.max(1.0) => *count += 1.0,
                _ => others.push((bj * m, 1.0)),
            }
        }
        modes.extend(others);
        Integrand {
            n: lattice.n as f64,
            edge: if bj > 0.0 { bj * d } else { 0.0 },
            b2: (params.beta * params.b).powi(2),
            h2: (params.beta * params.h).powi(2),
            modes,
        }
    }

    fn log_value(&self, v: Complex64) -> Complex64 {
        let n = self.n;
        let zero = v - self.modes[0].0;
        let mut acc = n * v - n * v.ln() + n * self.b2 / (4.0 * v);
        if self.h2 > 0.0 {
            acc += n * self.h2 / (4.0 * zero);
        }
        let spectral: Complex64 = self.modes.iter().map(|&(m, k)| k * (v - m).ln()).sum();
        acc - 0.5 * spectral
    }

    /// `(1/N) d/dv log I` on the real axis.
    fn real_derivative(&self, v: f64) -> f64 {
        let zero = v - self.modes[0].0;
        let spectral: f64 = self.modes.iter().map(|&(m, k)| k / (v - m)).sum();
        let mut g = 1.0 - 1.0 / v - self.b2 / (4.0 * v * v) - spectral / (2.0 * self.n);
        if self.h2 > 0.0 {
            g -= self.h2 / (4.0 * zero * zero);
        }
        g
    }

    fn real_second_derivative(&self, v: f64) -> f64 {
        let zero = v - self.modes[0].0;
        let spectral: f64 = self.modes.iter().map(|&(m, k)| k / (v - m).powi(2)).sum();
        let mut g = 1.0 / (v * v) + self.b2 / (2.0 * v * v * v) + spectral / (2.0 * self.n);
        if self.h2 > 0.0 {
            g += self.h2 / (2.0 * zero * zero * zero);
        }
        g
    }

    fn log_tail_constant(&self, c: f64) -> f64 {
        self.n * c.ln() + 0.5 * self.modes.iter().map(|&(m, k)| k * (c - m).ln()).sum::<f64>()
    }

    /// Real saddle of `log I` right of the edge, as a distance from the edge.
    fn saddle_distance(&self, root: &RootSpec) -> Result<f64> {
        let scale = self.edge.max(1.0);
        let mut lo = 0.5 * scale;
        while self.real_derivative(self.edge + lo) >= 0.0 {
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::Bracket { lo, hi: lo });
            }
        }
        let mut hi = 2.0 * scale;
        while self.real_derivative(self.edge + hi) <= 0.0 {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Bracket { lo, hi });
            }
        }
        let g = |x: f64| self.log_value(Complex64::new(self.edge + x, 0.0)).re / self.n;
        let dg = |x: f64| self.real_derivative(self.edge + x);
        Ok(find_min_convex_with_derivative(g, dg, (lo, hi), root)?.x_min)
    }
}

/// `log Z_N` for the spherical model on a finite periodic lattice.
///
/// Unlike [`SphericalParams::new`], `J = 0` is accepted here.
pub fn contour_partition(
    params: &SphericalParams<f64>,
    lattice: &LatticeSpec,
    spec: &ContourSpec,
) -> Result<ContourResult> {
    validate_oracle_params(params)?;
    if params.d != lattice.d {
        return Err(Error::invalid("lattice dimension does not match params.d"));
    }
    if !(spec.abscissa_scale > 0.0) || !spec.abscissa_scale.is_finite() {
        return Err(Error::invalid("abscissa_scale must be positive"));
    }
    let f = Integrand::new(params, lattice);
    let n = f.n;
    let x0 = f.saddle_distance(&spec.root)?;
    let c = f.edge + spec.abscissa_scale * x0;
    let log_ic = f.log_value(Complex64::new(c, 0.0));
    let ratio = |s: f64| (f.log_value(Complex64::new(c, s)) - log_ic).exp().re;

    let p = 1.5 * n;
    let log_k = f.log_tail_constant(c);
    let tail = |t: f64| (log_k - (p - 1.0) * t.ln()).exp() / (p - 1.0);

    let width = 1.0 / (n * f.real_second_derivative(c)).sqrt();
    let mut a = 0.0;
    let mut b = 4.0 * width;
    let (mut total, mut err) = (0.0, 0.0);
    loop {
        let seg = integrate(ratio, a, b, &spec.quadrature)?;
        total += seg.value;
        err += seg.err_est;
        let t = tail(b);
        if total > 0.0 && t <= spec.quadrature.rel_tol * total && b >= 4.0 * width {
            err += t;
            break;
        }
        if b > spec.t_max {
            return Err(Error::NonConvergence {
                iterations: 0,
                err_est: t,
            });
        }
        a = b;
        b *= 2.0;
    }
    if !(total > 0.0) {
        return Err(Error::Domain(format!("contour integral is not positive: {total:e}")));
    }
    let pi = std::f64::consts::PI;
    Ok(ContourResult {
        log_z: (1.5 * n - 1.0) * pi.ln() + log_ic.re + total.ln(),
        err_est: err / total,
        abscissa: c,
        t_cut: b,
    })
}
