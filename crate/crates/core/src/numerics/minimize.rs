use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance contract for [`find_min_convex`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub x_tol: f64,
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootSpec {
    fn default() -> Self {
        RootSpec {
            x_tol: 1e-13,
            f_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl RootSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_tol > 0.0) || !(self.f_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::invalid("root-finding tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub x_min: T,
    pub g_min: T,
    /// Derivative at `x_min` (analytic or central difference).
    pub derivative: T,
    pub iterations: usize,
}

/// Minimizes a strictly convex `g` on `bracket` using a central-difference
/// derivative. See [`find_min_convex_with_derivative`].
pub fn find_min_convex<T, G>(g: G, bracket: (T, T), spec: &RootSpec) -> Result<Minimum<T>>
where
    T: Real,
    G: Fn(T) -> T,
{
    let (lo, hi) = bracket;
    let dg = |x: T| numeric_derivative(&g, x, lo, hi);
    find_min_convex_with_derivative(&g, dg, bracket, spec)
}

/// Minimizes a strictly convex `g` on `bracket` by bisection on the sign of
/// `dg`.
///
/// Stops once the bracket is narrower than `x_tol·max(1, |x|)`, so results
/// from different valid brackets agree to `x_tol`. `f_tol` decides whether a
/// bracket end with a vanishing derivative is itself the minimizer. If `dg` is not finite at a probe point the search
/// falls back to golden-section on `g` over the remaining bracket.
pub fn find_min_convex_with_derivative<T, G, D>(
    g: G,
    dg: D,
    bracket: (T, T),
    spec: &RootSpec,
) -> Result<Minimum<T>>
where
    T: Real,
    G: Fn(T) -> T,
    D: Fn(T) -> T,
{
    spec.validate()?;
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::invalid("bracket must satisfy lo < hi"));
    }
    let bracket_error = || Error::Bracket {
        lo: bracket.0.to_f64_lossy(),
        hi: bracket.1.to_f64_lossy(),
    };
    let f_tol = T::lit(spec.f_tol);
    let x_tol = T::lit(spec.x_tol);

    let d_lo = dg(lo);
    let d_hi = dg(hi);
    if d_lo.is_finite() && d_hi.is_finite() {
        if d_lo >= T::zero() && d_hi >= T::zero() || d_lo <= T::zero() && d_hi <= T::zero() {
            // A vanishing derivative at an end point is still a valid minimum.
            if d_lo.abs() <= f_tol {
                return Ok(done(&g, lo, d_lo, 0));
            }
            if d_hi.abs() <= f_tol {
                return Ok(done(&g, hi, d_hi, 0));
            }
            return Err(bracket_error());
        }
    } else if d_lo.is_finite() && d_lo >= T::zero() || d_hi.is_finite() && d_hi <= T::zero() {
        return Err(bracket_error());
    }

    let half = T::lit(0.5);
    for it in 1..=spec.max_iter {
        let mid = half * (lo + hi);
        let d = dg(mid);
        if !d.is_finite() {
            return golden_section(&g, &dg, lo, hi, spec, it);
        }
        if d == T::zero() || hi - lo <= x_tol * T::one().max(mid.abs()) {
            return Ok(done(&g, mid, d, it));
        }
        if d < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence {
        iterations: spec.max_iter,
        err_est: (hi - lo).to_f64_lossy(),
    })
}

fn done<T: Real, G: Fn(T) -> T>(g: &G, x: T, d: T, iterations: usize) -> Minimum<T> {
    Minimum {
        x_min: x,
        g_min: g(x),
        derivative: d,
        iterations,
    }
}

fn golden_section<T, G, D>(
    g: &G,
    dg: &D,
    mut lo: T,
    mut hi: T,
    spec: &RootSpec,
    used: usize,
) -> Result<Minimum<T>>
where
    T: Real,
    G: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    // Function values cannot resolve the minimizer below ~sqrt(eps).
    let x_tol = T::lit(spec.x_tol).max(T::epsilon().sqrt());
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for it in used..=spec.max_iter {
        let mid = T::lit(0.5) * (lo + hi);
        if hi - lo <= x_tol * T::one().max(mid.abs()) {
            return Ok(done(g, mid, dg(mid), it));
        }
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        }
    }
    Err(Error::NonConvergence {
        iterations: spec.max_iter,
        err_est: (hi - lo).to_f64_lossy(),
    })
}

/// Central difference kept inside `[lo, hi]`; one-sided near the ends.
fn numeric_derivative<T: Real, G: Fn(T) -> T>(g: &G, x: T, lo: T, hi: T) -> T {
    let h = T::epsilon().cbrt() * T::one().max(x.abs());
    let room_left = x - lo;
    let room_right = hi - x;
    if room_left >= h && room_right >= h {
        (g(x + h) - g(x - h)) / (h + h)
    } else if room_right >= room_left {
        let h = h.min(T::lit(0.5) * room_right);
        (g(x + h) - g(x)) / h
    } else {
        let h = h.min(T::lit(0.5) * room_left);
        (g(x) - g(x - h)) / h
    }
}
