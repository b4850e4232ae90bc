//! Per-site log-determinant of the cyclic coupling matrix, with `βJ`
//! factored out: `S(w) = (1/N) Σ_ω log(w + d − Σⱼ cos ωⱼ)` on a periodic
//! `L^d` lattice, and its `L → ∞` limit
//! `(2π)^{−d} ∫ log(w + d − Σⱼ cos ωⱼ) d^dω`.

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::scalar::Real;

/// Highest dimension supported by the thermodynamic-limit integrals.
pub const MAX_LIMIT_DIMENSION: usize = 3;

/// Periodic hypercubic lattice of side `L` in `d` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct LatticeSpec {
    pub d: usize,
    pub l: usize,
    pub n: usize,
}

impl LatticeSpec {
    pub fn new(d: usize, l: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        if l < 3 {
            // L = 2 doubles bonds, L = 1 makes self-bonds
            return Err(Error::invalid("lattice side L must be at least 3"));
        }
        let exp = u32::try_from(d).map_err(|_| Error::invalid("dimension too large"))?;
        let n = l
            .checked_pow(exp)
            .ok_or_else(|| Error::invalid(format!("L^d overflows for L = {l}, d = {d}")))?;
        Ok(LatticeSpec { d, l, n })
    }

    /// Site index to lattice coordinates.
    pub fn coords(&self, mut site: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            c.push(site % self.l);
            site /= self.l;
        }
        c
    }

    /// Each unordered nearest-neighbour pair once: `d·N` bonds.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.d * self.n);
        let mut stride = 1;
        for _ in 0..self.d {
            for site in 0..self.n {
                let x = (site / stride) % self.l;
                let next = if x + 1 == self.l { site + stride - self.l * stride } else { site + stride };
                out.push((site, next));
            }
            stride *= self.l;
        }
        out
    }
}

/// `Σⱼ cos ωⱼ` for every plane-wave mode of the lattice.
#[derive(Debug, Clone)]
pub struct FiniteSpectrum<T> {
    lattice: LatticeSpec,
    mode_sums: Vec<T>,
}

impl<T: Real> FiniteSpectrum<T> {
    pub fn new(lattice: LatticeSpec) -> Self {
        let l = lattice.l;
        let cosines: Vec<T> = (0..l)
            .map(|k| (T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(l)).cos())
            .collect();
        let mut mode_sums = vec![T::zero()];
        for _ in 0..lattice.d {
            mode_sums = mode_sums
                .iter()
                .flat_map(|s| cosines.iter().map(move |c| *s + *c))
                .collect();
        }
        FiniteSpectrum { lattice, mode_sums }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn mode_sums(&self) -> &[T] {
        &self.mode_sums
    }

    fn check(&self, w: T) -> Result<T> {
        if !(w > T::zero()) {
            return Err(Error::Domain(format!(
                "spectrum argument w = {:e} must be positive (zero mode reaches w)",
                w.to_f64_lossy()
            )));
        }
        Ok(w + T::from_usize_lossy(self.lattice.d))
    }

    pub fn value(&self, w: T) -> Result<T> {
        let u = self.check(w)?;
        // the zero mode is evaluated as log(w) exactly
        let sum = self.mode_sums.iter().fold(T::zero(), |acc, s| acc + mode_argument(u, w, *s, self.lattice.d).ln());
        Ok(sum / T::from_usize_lossy(self.lattice.n))
    }

    pub fn derivative(&self, w: T) -> Result<T> {
        let u = self.check(w)?;
        let sum = self.mode_sums.iter().fold(T::zero(), |acc, s| acc + mode_argument(u, w, *s, self.lattice.d).recip());
        Ok(sum / T::from_usize_lossy(self.lattice.n))
    }
}

fn mode_argument<T: Real>(u: T, w: T, mode_sum: T, d: usize) -> T {
    if mode_sum == T::from_usize_lossy(d) {
        w
    } else {
        u - mode_sum
    }
}

/// `S(w)` on a finite lattice.
pub fn spectrum_term_finite<T: Real>(lattice: &LatticeSpec, w: T) -> Result<T> {
    FiniteSpectrum::new(*lattice).value(w)
}

/// `(1/2π) ∫ log(c − cos ω) dω = log((c + √(c² − 1))/2)` for `c ≥ 1`.
fn log_average_1d<T: Real>(c_minus_one: T) -> T {
    let c = T::one() + c_minus_one;
    ((c + (c_minus_one * (c + T::one())).sqrt()) * T::lit(0.5)).ln()
}

/// `(1/2π) ∫ dω / (c − cos ω) = 1/√(c² − 1)`.
fn inverse_average_1d<T: Real>(c_minus_one: T) -> T {
    (c_minus_one * (c_minus_one + T::lit(2.0))).sqrt().recip()
}

/// Thermodynamic-limit spectrum term for `d ≤ 3`. The innermost angle is
/// integrated in closed form and the remaining `d − 1` by nested adaptive
/// quadrature over `[0, π]` (the integrand is even in every angle).
pub fn spectrum_term_limit<T: Real>(d: usize, w: T, spec: &QuadratureSpec) -> Result<T> {
    limit_average(d, w, spec, log_average_1d)
}

/// `dS/dw` in the thermodynamic limit; diverges as `w → 0` for `d ≤ 2`.
pub fn spectrum_derivative_limit<T: Real>(d: usize, w: T, spec: &QuadratureSpec) -> Result<T> {
    limit_average(d, w, spec, inverse_average_1d)
}

fn limit_average<T: Real>(d: usize, w: T, spec: &QuadratureSpec, inner: fn(T) -> T) -> Result<T> {
    if d == 0 {
        return Err(Error::invalid("dimension d must be at least 1"));
    }
    if d > MAX_LIMIT_DIMENSION {
        return Err(Error::DimensionCap {
            requested: d,
            max: MAX_LIMIT_DIMENSION,
        });
    }
    if !(w >= T::zero()) {
        return Err(Error::Domain(format!("w = {:e} must be non-negative", w.to_f64_lossy())));
    }
    // c − 1 for the innermost angle, given the outer angles: w + Σ (1 − cos a)
    let one_minus_cos = |a: T| {
        let s = (T::lit(0.5) * a).sin();
        T::lit(2.0) * s * s
    };
    let pi = T::PI();
    match d {
        1 => Ok(inner(w)),
        2 => integrate(|a| inner(w + one_minus_cos(a)), T::zero(), pi, spec).map(|r| r.value / pi),
        _ => {
            let failure = std::cell::RefCell::new(None);
            let outer = integrate(
                |a| {
                    let shift = w + one_minus_cos(a);
                    match integrate(|b| inner(shift + one_minus_cos(b)), T::zero(), pi, spec) {
                        Ok(r) => r.value,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            T::zero()
                        }
                    }
                },
                T::zero(),
                pi,
                spec,
            );
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            outer.map(|r| r.value / (pi * pi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomStream;
    use rand::Rng;
    use rayon::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn lattice_validation() {
        assert_eq!(LatticeSpec::new(3, 4).unwrap().n, 64);
        assert!(LatticeSpec::new(1, 2).is_err());
        assert!(LatticeSpec::new(0, 4).is_err());
        assert!(LatticeSpec::new(64, 1000).is_err());
    }

    #[test]
    fn bonds_are_unique_nearest_neighbours() {
        let lat = LatticeSpec::new(2, 3).unwrap();
        let bonds = lat.bonds();
        assert_eq!(bonds.len(), 18);
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &bonds {
            let key = (a.min(b), a.max(b));
            assert!(seen.insert(key), "duplicate bond {key:?}");
            let (ca, cb) = (lat.coords(a), lat.coords(b));
            let diff: usize = ca
                .iter()
                .zip(&cb)
                .map(|(x, y)| {
                    let d = (*x as isize - *y as isize).rem_euclid(3) as usize;
                    d.min(3 - d)
                })
                .sum();
            assert_eq!(diff, 1);
        }
    }

    #[test]
    fn finite_term_hand_enumerations() {
        let four = LatticeSpec::new(1, 4).unwrap();
        let expected = (1f64.ln() + 2f64.ln() + 3f64.ln() + 2f64.ln()) / 4.0;
        assert!((spectrum_term_finite(&four, 1.0f64).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.621_226_6).abs() < 1e-6);

        let three = LatticeSpec::new(1, 3).unwrap();
        let expected = (2f64.ln() + 2.0 * 3.5f64.ln()) / 3.0;
        assert!((spectrum_term_finite(&three, 2.0f64).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn finite_term_large_w_asymptote() {
        for &(d, l) in &[(1, 5), (2, 4), (3, 3)] {
            let lat = LatticeSpec::new(d, l).unwrap();
            let w = 1e8f64;
            // S(w) − log w = log(1 + d/w) + O(1/w²)
            assert!((spectrum_term_finite(&lat, w).unwrap() - w.ln()).abs() < 1e-7);
        }
    }

    #[test]
    fn finite_term_rejects_non_positive_w() {
        let lat = LatticeSpec::new(1, 4).unwrap();
        assert!(matches!(spectrum_term_finite(&lat, 0.0f64), Err(Error::Domain(_))));
        assert!(spectrum_term_finite(&lat, -0.5f64).is_err());
    }

    #[test]
    fn limit_term_one_dimension_closed_form() {
        // log((2 + √3)/2) at w = 1
        let v = spectrum_term_limit(1, 1.0f64, &spec()).unwrap();
        assert!((v - ((2.0 + 3f64.sqrt()) / 2.0).ln()).abs() < 1e-15);
        assert!((v - 0.623_810_2).abs() < 1e-6);
        // independent check of the closed form by quadrature
        let q = integrate(|x: f64| (2.0 - x.cos()).ln(), 0.0, std::f64::consts::TAU, &spec()).unwrap();
        assert!((q.value / std::f64::consts::TAU - v).abs() < 1e-12);
    }

    #[test]
    fn finite_term_converges_to_limit() {
        let limit = spectrum_term_limit(1, 1.0f64, &spec()).unwrap();
        let at = |l| spectrum_term_finite(&LatticeSpec::new(1, l).unwrap(), 1.0f64).unwrap();
        assert!((at(64) - limit).abs() < 1e-3);
        assert!((at(256) - limit).abs() < 1e-5);
        for d in 1..=2 {
            let limit = spectrum_term_limit(d, 0.5f64, &spec()).unwrap();
            let gaps: Vec<f64> = [8, 16, 32, 64]
                .iter()
                .map(|&l| (spectrum_term_finite(&LatticeSpec::new(d, l).unwrap(), 0.5).unwrap() - limit).abs())
                .collect();
            for g in gaps.windows(2) {
                assert!(g[1] < g[0], "d={d}: {gaps:?}");
            }
        }
    }

    #[test]
    fn limit_derivative_matches_finite_difference() {
        for d in 1..=3 {
            let w = 0.7f64;
            let h = 1e-5;
            let fd = (spectrum_term_limit(d, w + h, &spec()).unwrap() - spectrum_term_limit(d, w - h, &spec()).unwrap())
                / (2.0 * h);
            let an = spectrum_derivative_limit(d, w, &spec()).unwrap();
            assert!((fd - an).abs() < 1e-7, "d={d}: {fd} vs {an}");
        }
    }

    #[test]
    fn two_dimensional_limit_matches_monte_carlo() {
        let v = spectrum_term_limit(2, 1.0f64, &spec()).unwrap();
        let root = RandomStream::new(2024, 2);
        let batches = 100u64;
        let per = 100_000usize;
        let stats: Vec<(f64, f64)> = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = root.substream(b).rng();
                let (mut s, mut s2) = (0.0, 0.0);
                for _ in 0..per {
                    let a: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    let c: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    let x = (3.0 - a.cos() - c.cos()).ln();
                    s += x;
                    s2 += x * x;
                }
                (s, s2)
            })
            .collect();
        let n = (batches as usize * per) as f64;
        let (s, s2) = stats.iter().fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
        let mean = s / n;
        let se = ((s2 / n - mean * mean) / n).sqrt();
        assert!((mean - v).abs() < 3.0 * se, "{v} vs {mean} ± {se}");
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            spectrum_term_limit(4, 1.0f64, &spec()),
            Err(Error::DimensionCap { requested: 4, max: 3 })
        ));
    }
}
