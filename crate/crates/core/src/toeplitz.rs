//! Zero-temperature `⟨σˣⱼσˣₖ⟩` of the transverse-field chain as an `n × n`
//! Toeplitz determinant, `n = |j − k|`.
//!
//! The matrix is `T_ij = c_{i−j}`, where `c_m` are the Fourier coefficients
//! of the symbol `φ(θ) = [(1 − k e^{−iθ}) / (1 − k e^{iθ})]^{1/2}` with
//! `k = B/J`. For `k < 1` the determinant tends to `(1 − k²)^{1/4}`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::scalar::Real;

/// Largest separation evaluated with a dense determinant.
pub const MAX_SEPARATION: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationQuery<T> {
    /// `B/J ≥ 0`.
    pub k_ratio: T,
    /// Separation `n ≥ 1`.
    pub n: usize,
}

impl<T: Real> CorrelationQuery<T> {
    pub fn new(k_ratio: T, n: usize) -> Result<Self> {
        if !(k_ratio >= T::zero()) || !k_ratio.is_finite() {
            return Err(Error::invalid("k_ratio must be non-negative and finite"));
        }
        if n == 0 {
            return Err(Error::invalid("separation n must be at least 1"));
        }
        if n > MAX_SEPARATION {
            return Err(Error::CapExceeded {
                requested: n,
                cap: MAX_SEPARATION,
            });
        }
        Ok(CorrelationQuery { k_ratio, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult<T> {
    pub n: usize,
    pub det_value: T,
    pub szego_limit: T,
}

/// Fourier coefficients `c_m`, `m ∈ [−n, n]`, of the correlation symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCoefficients<T> {
    n: usize,
    values: Vec<T>,
    /// Largest imaginary part encountered; zero up to quadrature error.
    pub max_imag: T,
    pub err_est: T,
}

impl<T: Real> SymbolCoefficients<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `c_m` for `|m| ≤ n`.
    pub fn get(&self, m: isize) -> T {
        let idx = m + self.n as isize;
        assert!(idx >= 0 && (idx as usize) < self.values.len(), "coefficient index {m} out of range");
        self.values[idx as usize]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }
}

/// The symbol `φ(θ)`.
///
/// For `k ≤ 1` this is the principal square root, `φ(0) = 1`. For `k > 1`
/// the principal root jumps where the ratio crosses the negative axis; the
/// branch continuous in `θ` and equal to 1 at `θ = π` is used instead, which
/// is `−e^{−iθ}·[(1 − e^{iθ}/k) / (1 − e^{−iθ}/k)]^{1/2}`.
pub fn symbol<T: Real>(k: T, theta: T) -> Complex<T> {
    let e = Complex::new(theta.cos(), theta.sin());
    let one = Complex::new(T::one(), T::zero());
    if k <= T::one() {
        // (1 − k e^{−iθ}) / (1 − k e^{iθ}) = e^{−2i arg z} with z = 1 − k e^{iθ}
        let z = one - e * k;
        let r = z.norm();
        if r == T::zero() {
            return one;
        }
        z.conj() / r
    } else {
        let y = one - e.conj() / k;
        -(e.conj() * y.conj() / y.norm())
    }
}

/// Fourier coefficients `c_m = (1/2π) ∫₀^{2π} φ(θ) e^{−imθ} dθ` for
/// `m ∈ [−n, n]`, real and imaginary parts integrated separately.
///
/// Away from `k = 1` the symbol is analytic on the circle and the trapezoid
/// rule converges geometrically; nodes are doubled until all coefficients
/// settle. At `k = 1` the symbol has a jump and adaptive Gauss–Kronrod
/// quadrature is used per coefficient.
pub fn symbol_fourier_coefficients<T: Real>(
    k_ratio: T,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<SymbolCoefficients<T>> {
    if !(k_ratio >= T::zero()) || !k_ratio.is_finite() {
        return Err(Error::invalid("k_ratio must be non-negative and finite"));
    }
    let len = 2 * n + 1;
    if k_ratio == T::zero() {
        let mut values = vec![T::zero(); len];
        values[n] = T::one();
        return Ok(SymbolCoefficients {
            n,
            values,
            max_imag: T::zero(),
            err_est: T::zero(),
        });
    }
    let coeffs = if k_ratio == T::one() {
        None
    } else {
        trapezoid_coefficients(k_ratio, n, spec)
    };
    let (coeffs, err_est) = match coeffs {
        Some(c) => c,
        None => adaptive_coefficients(k_ratio, n, spec)?,
    };
    let max_imag = coeffs.iter().fold(T::zero(), |acc, c| acc.max(c.im.abs()));
    Ok(SymbolCoefficients {
        n,
        values: coeffs.iter().map(|c| c.re).collect(),
        max_imag,
        err_est,
    })
}

const MAX_TRAPEZOID_NODES: usize = 1 << 20;

fn trapezoid_coefficients<T: Real>(
    k: T,
    n: usize,
    spec: &QuadratureSpec,
) -> Option<(Vec<Complex<T>>, T)> {
    let len = 2 * n + 1;
    let mut nodes = (4 * n + 32).next_power_of_two();
    // sums over the current node set, scaled by the node count at the end
    let mut sums = vec![Complex::new(T::zero(), T::zero()); len];
    accumulate(k, n, nodes, 0, 1, &mut sums);
    let mut previous: Vec<Complex<T>> = sums.iter().map(|s| *s / T::from_usize_lossy(nodes)).collect();
    while nodes < MAX_TRAPEZOID_NODES {
        // new nodes are the odd multiples of 2π/(2·nodes)
        accumulate(k, n, 2 * nodes, 1, 2, &mut sums);
        nodes *= 2;
        let current: Vec<Complex<T>> = sums.iter().map(|s| *s / T::from_usize_lossy(nodes)).collect();
        let change = current
            .iter()
            .zip(&previous)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm()));
        if change <= T::lit(spec.abs_tol).max(T::lit(100.0) * T::epsilon()) {
            return Some((current, change));
        }
        previous = current;
    }
    None
}

fn accumulate<T: Real>(k: T, n: usize, nodes: usize, start: usize, step: usize, sums: &mut [Complex<T>]) {
    let h = T::TAU() / T::from_usize_lossy(nodes);
    for j in (start..nodes).step_by(step) {
        let theta = h * T::from_usize_lossy(j);
        let value = symbol(k, theta);
        // e^{−imθ} for m = −n..=n by rotation from e^{inθ}
        let rot = Complex::new(theta.cos(), -theta.sin());
        let nt = T::from_usize_lossy(n) * theta;
        let mut phase = Complex::new(nt.cos(), nt.sin());
        for s in sums.iter_mut() {
            *s = *s + value * phase;
            phase = phase * rot;
        }
    }
}

fn adaptive_coefficients<T: Real>(
    k: T,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<(Vec<Complex<T>>, T)> {
    let mut out = Vec::with_capacity(2 * n + 1);
    let mut err = T::zero();
    let wide = QuadratureSpec {
        max_subdivisions: spec.max_subdivisions.max(64 * (n + 1)),
        ..*spec
    };
    for m in -(n as isize)..=(n as isize) {
        let mf = T::from_isize(m).unwrap();
        let term = |theta: T| symbol(k, theta) * Complex::new((mf * theta).cos(), -(mf * theta).sin());
        let re = integrate(|t| term(t).re, T::zero(), T::TAU(), &wide)?;
        let im = integrate(|t| term(t).im, T::zero(), T::TAU(), &wide)?;
        err = err.max((re.err_est + im.err_est) / T::TAU());
        out.push(Complex::new(re.value, im.value) / T::TAU());
    }
    Ok((out, err))
}

/// Infinite-separation limit: `(1 − k²)^{1/4}` for `k < 1`, else 0.
pub fn szego_limit<T: Real>(k_ratio: T) -> T {
    if k_ratio < T::one() {
        (T::one() - k_ratio * k_ratio).sqrt().sqrt()
    } else {
        T::zero()
    }
}

/// Determinant of the `n × n` leading block of the Toeplitz matrix built
/// from `coeffs`.
pub fn toeplitz_determinant<T: Real>(coeffs: &SymbolCoefficients<T>, n: usize) -> T {
    assert!(n <= coeffs.n(), "need coefficients up to |m| = {n}");
    let mut a: Vec<T> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(coeffs.get(i as isize - j as isize));
        }
    }
    lu_determinant(&mut a, n)
}

/// Dense LU with partial pivoting; `a` is row-major and is overwritten.
fn lu_determinant<T: Real>(a: &mut [T], n: usize) -> T {
    let mut det = T::one();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().partial_cmp(&a[s * n + col].abs()).unwrap())
            .unwrap();
        let pivot = a[pivot_row * n + col];
        if pivot == T::zero() {
            return T::zero();
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(col * n + c, pivot_row * n + c);
            }
            det = -det;
        }
        det = det * pivot;
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor != T::zero() {
                for c in col + 1..n {
                    a[r * n + c] = a[r * n + c] - factor * a[col * n + c];
                }
            }
        }
    }
    det
}

/// `⟨σˣ₀σˣₙ⟩` at zero temperature for the queried ratio and separation.
pub fn correlation_determinant<T: Real>(
    query: &CorrelationQuery<T>,
    spec: &QuadratureSpec,
) -> Result<CorrelationResult<T>> {
    let query = CorrelationQuery::new(query.k_ratio, query.n)?;
    let coeffs = symbol_fourier_coefficients(query.k_ratio, query.n, spec)?;
    Ok(CorrelationResult {
        n: query.n,
        det_value: toeplitz_determinant(&coeffs, query.n),
        szego_limit: szego_limit(query.k_ratio),
    })
}

/// Correlations for every separation `1..=n_max`, sharing one coefficient
/// table.
pub fn correlation_sequence<T: Real>(
    k_ratio: T,
    n_max: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<CorrelationResult<T>>> {
    CorrelationQuery::new(k_ratio, n_max)?;
    let coeffs = symbol_fourier_coefficients(k_ratio, n_max, spec)?;
    let limit = szego_limit(k_ratio);
    Ok((1..=n_max)
        .map(|n| CorrelationResult {
            n,
            det_value: toeplitz_determinant(&coeffs, n),
            szego_limit: limit,
        })
        .collect())
}
