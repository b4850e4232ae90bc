//! Monte Carlo over the constraint sphere `Σ r² = N` in `3N` dimensions.
//!
//! `∫ d^{3N}r δ(|r|² − N) e^{E(r)} = A_{3N}(√N)/(2√N) · E_sphere[e^{E}]`
//! where the `1/(2√N)` comes from `|∇|r|²| = 2|r|` and `A` is the surface
//! area. The exponent is `E = βJ Σ_bonds z_j z_k + β Σ_j (B x_j + H z_j)`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::validate_oracle_params;
use crate::error::{Error, Result};
use crate::numerics::RandomStream;
use crate::spherical::{LatticeSpec, SphericalParams};

pub const MIN_SAMPLES: usize = 10_000;
pub const MAX_SITES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCSpec {
    pub samples: usize,
    pub stream: RandomStream,
    pub batch_size: usize,
}

impl MCSpec {
    pub fn new(samples: usize, stream: RandomStream, batch_size: usize) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::invalid(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
        }
        Self::exploratory(samples, stream, batch_size)
    }

    /// Like [`MCSpec::new`] without the sample floor, for quick looks whose
    /// error bars are not meant to decide anything.
    pub fn exploratory(samples: usize, stream: RandomStream, batch_size: usize) -> Result<Self> {
        if batch_size == 0 || samples < 2 * batch_size {
            return Err(Error::invalid("need at least two batches of at least one sample"));
        }
        Ok(MCSpec {
            samples,
            stream,
            batch_size,
        })
    }

    pub fn batches(&self) -> usize {
        self.samples.div_ceil(self.batch_size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub log_z: f64,
    /// Standard error of `log_z`, from the spread of batch means.
    pub std_err: f64,
    pub samples: usize,
    pub batches: usize,
}

/// `log` of the surface area of the radius-`r` sphere in `n` dimensions.
pub fn sphere_log_area(n: usize, r: f64) -> f64 {
    let half = 0.5 * n as f64;
    std::f64::consts::LN_2 + half * std::f64::consts::PI.ln() + (n as f64 - 1.0) * r.ln() - libm::lgamma(half)
}

struct Batch {
    shift: f64,
    sum: f64,
    count: usize,
}

fn run_batch(
    params: &SphericalParams<f64>,
    bonds: &[(usize, usize)],
    n: usize,
    stream: RandomStream,
    count: usize,
) -> Batch {
    let mut rng = stream.rng();
    let radius = (n as f64).sqrt();
    let mut r = vec![0.0f64; 3 * n];
    let mut exponents = Vec::with_capacity(count);
    for _ in 0..count {
        let mut norm2 = 0.0;
        for x in r.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm2 += *x * *x;
        }
        let scale = radius / norm2.sqrt();
        // layout: site j owns (x, y, z) at 3j..3j+3
        let coupling: f64 = bonds.iter().map(|&(a, b)| r[3 * a + 2] * r[3 * b + 2]).sum();
        let (mut sx, mut sz) = (0.0, 0.0);
        for j in 0..n {
            sx += r[3 * j];
            sz += r[3 * j + 2];
        }
        let e = params.beta * (params.j * coupling * scale * scale + (params.b * sx + params.h * sz) * scale);
        exponents.push(e);
    }
    let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum = exponents.iter().map(|e| (e - shift).exp()).sum();
    Batch { shift, sum, count }
}

/// Monte Carlo estimate of `log Z_N`, reproducible for a given [`MCSpec`]
/// regardless of thread count.
pub fn sphere_mc_partition(params: &SphericalParams<f64>, lattice: &LatticeSpec, mc: &MCSpec) -> Result<McEstimate> {
    validate_oracle_params(params)?;
    if params.d != lattice.d {
        return Err(Error::invalid("lattice dimension does not match params.d"));
    }
    if lattice.n > MAX_SITES {
        return Err(Error::DimensionCap {
            requested: lattice.n,
            max: MAX_SITES,
        });
    }
    let n = lattice.n;
    let bonds = lattice.bonds();
    let nb = mc.batches();
    let batches: Vec<Batch> = (0..nb)
        .into_par_iter()
        .map(|i| {
            let count = mc.batch_size.min(mc.samples - i * mc.batch_size);
            run_batch(params, &bonds, n, mc.stream.substream(i as u64), count)
        })
        .collect();

    let shift = batches.iter().map(|b| b.shift).fold(f64::NEG_INFINITY, f64::max);
    let means: Vec<(f64, f64)> = batches
        .iter()
        .map(|b| ((b.sum * (b.shift - shift).exp()) / b.count as f64, b.count as f64))
        .collect();
    let total: f64 = means.iter().map(|m| m.1).sum();
    let mean = means.iter().map(|(m, c)| m * c).sum::<f64>() / total;
    let spread: f64 = means.iter().map(|(m, c)| (c * (m - mean)).powi(2)).sum();
    let var_mean = spread / (total * total) * nb as f64 / (nb as f64 - 1.0);

    let nf = n as f64;
    let log_measure = sphere_log_area(3 * n, nf.sqrt()) - (2.0 * nf.sqrt()).ln();
    Ok(McEstimate {
        log_z: log_measure + shift + mean.ln(),
        std_err: var_mean.sqrt() / mean,
        samples: mc.samples,
        batches: nb,
    })
}
