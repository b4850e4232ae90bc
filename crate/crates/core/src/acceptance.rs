//! The acceptance suite: numbered end-to-end checks of the closed forms
//! against each other and against the finite-size oracles.
//!
//! Each criterion has a runtime budget; exceeding it is a failure.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ising_chain::{self, IsingParams};
use crate::numerics::{integrate, QuadratureSpec, RandomStream, RootSpec};
use crate::oracles::{self, ChainSpec, ContourSpec, MCSpec};
use crate::spherical::{self, LatticeSpec, SaddleFunction, SolverSpec, SpectrumMode, SphericalParams};
use crate::toeplitz::{self, CorrelationQuery};

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    /// Lower-case keywords matched by [`run`]'s filter.
    pub tags: &'static [&'static str],
    pub budget: Duration,
    check: fn() -> Result<Verdict>,
}

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} {:>8.2}s / {:>4}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

pub fn criteria() -> Vec<Criterion> {
    let secs = Duration::from_secs;
    vec![
        Criterion {
            id: 1,
            name: "tfim-ground-energy",
            tags: &["tfim", "chain"],
            budget: secs(1),
            check: tfim_ground_energy,
        },
        Criterion {
            id: 2,
            name: "tfim-duality",
            tags: &["tfim", "chain"],
            budget: secs(5),
            check: tfim_duality,
        },
        Criterion {
            id: 3,
            name: "szego-limit",
            tags: &["tfim", "toeplitz", "correlation"],
            budget: secs(5),
            check: szego_limit,
        },
        Criterion {
            id: 4,
            name: "ed-cross-check",
            tags: &["tfim", "oracle", "ed"],
            budget: secs(60),
            check: ed_cross_check,
        },
        Criterion {
            id: 5,
            name: "spherical-ground-energy",
            tags: &["spherical"],
            budget: secs(60),
            check: spherical_ground_energy,
        },
        Criterion {
            id: 6,
            name: "saddle-limit",
            tags: &["spherical"],
            budget: secs(1),
            check: saddle_limit,
        },
        Criterion {
            id: 7,
            name: "susceptibility",
            tags: &["tfim", "spherical", "susceptibility"],
            budget: secs(10),
            check: susceptibility,
        },
        Criterion {
            id: 8,
            name: "oracle-consistency",
            tags: &["spherical", "oracle"],
            budget: secs(120),
            check: oracle_consistency,
        },
        Criterion {
            id: 9,
            name: "finite-temperature-approach",
            tags: &["tfim", "spherical"],
            budget: secs(10),
            check: finite_temperature_approach,
        },
        Criterion {
            id: 10,
            name: "property-suites",
            tags: &["properties", "spherical", "toeplitz", "numerics"],
            budget: secs(60),
            check: property_suites,
        },
    ]
}

impl Criterion {
    /// Filter by id (`"7"`), tag or name substring; case-insensitive.
    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.trim().to_ascii_lowercase();
        f.parse::<u8>().map(|id| id == self.id).unwrap_or(false)
            || self.name.contains(&f)
            || self.tags.iter().any(|t| *t == f)
    }

    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let verdict = (self.check)().unwrap_or_else(|e| Verdict::new(false, format!("error: {e}")));
        let elapsed = start.elapsed();
        let mut detail = verdict.detail;
        let in_budget = elapsed <= self.budget;
        if !in_budget {
            detail.push_str("; over runtime budget");
        }
        Outcome {
            id: self.id,
            name: self.name,
            passed: verdict.passed && in_budget,
            detail,
            elapsed,
            budget: self.budget,
        }
    }
}

/// Runs the selected criteria in order, calling `report` after each.
pub fn run(filter: Option<&str>, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    criteria()
        .iter()
        .filter(|c| filter.is_none_or(|f| c.matches(f)))
        .map(|c| {
            let o = c.run();
            report(&o);
            o
        })
        .collect()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn root() -> RootSpec {
    RootSpec::default()
}

fn tfim_ground_energy() -> Result<Verdict> {
    let e0 = ising_chain::ground_energy(1.0f64, 0.0, &quad())?.value;
    let e1 = ising_chain::ground_energy(1.0f64, 1.0, &quad())?.value;
    let critical = -4.0 / std::f64::consts::PI;
    let passed = (e0 + 1.0).abs() < 1e-12 && (e1 - critical).abs() < 1e-10;
    Ok(Verdict::new(
        passed,
        format!("f(B=0) = {e0:.15}, f(B=J) = {e1:.15} (−4/π = {critical:.15})"),
    ))
}

fn tfim_duality() -> Result<Verdict> {
    let couplings = [0.2, 0.5, 1.0, 1.7, 3.0];
    let mut worst: f64 = 0.0;
    for &j in &couplings {
        for &b in &couplings {
            for &beta in &[0.3, 1.0, 5.0] {
                let f = ising_chain::free_energy(&IsingParams::<f64>::new(j, b, beta)?, &quad())?.value;
                let g = ising_chain::free_energy(&IsingParams::<f64>::new(b, j, beta)?, &quad())?.value;
                worst = worst.max((f - g).abs());
            }
        }
    }
    Ok(Verdict::new(worst < 1e-10, format!("max |f(J,B) − f(B,J)| = {worst:.2e} over 75 points")))
}

fn szego_limit() -> Result<Verdict> {
    let ordered = toeplitz::correlation_determinant(&CorrelationQuery::<f64>::new(0.6, 20)?, &quad())?;
    let disordered = toeplitz::correlation_determinant(&CorrelationQuery::<f64>::new(1.2, 64)?, &quad())?;
    let limit = 0.64f64.powf(0.25);
    let passed = (ordered.det_value - limit).abs() < 1e-3 && disordered.det_value.abs() < 1e-3;
    Ok(Verdict::new(
        passed,
        format!(
            "D20(k=0.6) = {:.6} vs {limit:.6}; D64(k=1.2) = {:.2e}",
            ordered.det_value, disordered.det_value
        ),
    ))
}

fn ed_cross_check() -> Result<Verdict> {
    let ed = oracles::ed_free_energy(&ChainSpec::new(12, 1.0, 0.5, 20.0)?)?;
    let exact = ising_chain::ground_energy(1.0f64, 0.5, &quad())?.value;
    let corr = oracles::ed_correlation(&ChainSpec::new(12, 1.0, 0.6, 50.0)?, 0, 2)?;
    let det = toeplitz::correlation_determinant(&CorrelationQuery::<f64>::new(0.6, 2)?, &quad())?.det_value;
    let passed = (ed - exact).abs() < 5e-3 && (corr.value - det).abs() < 1e-2;
    Ok(Verdict::new(
        passed,
        format!(
            "ED f = {ed:.6} vs {exact:.6}; ED <σσ>(2) = {:.6} vs D2 = {det:.6} (β·gap = {:.1})",
            corr.value, corr.beta_gap
        ),
    ))
}

/// The closed-form zero-temperature free energy of the spherical model.
fn spherical_closed_form(j: f64, b: f64, d: usize) -> f64 {
    let jd = j * d as f64;
    if b > 2.0 * jd {
        -b
    } else {
        -jd - b * b / (4.0 * jd)
    }
}

fn spherical_ground_energy() -> Result<Verdict> {
    let mut worst: f64 = 0.0;
    for &j in &[0.5, 1.0, 2.0] {
        for d in 1..=3usize {
            for &r in &[0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
                let b = r * 2.0 * j * d as f64;
                let got = spherical::ground_energy_zero_field_limit(j, b, d, &root())?.value;
                worst = worst.max((got - spherical_closed_form(j, b, d)).abs());
            }
        }
    }
    let (mut jump, mut kink): (f64, f64) = (0.0, 0.0);
    let delta = 1e-6;
    for &j in &[0.5, 1.0, 2.0] {
        for d in 1..=3usize {
            let bc = 2.0 * j * d as f64;
            let f = |b: f64| spherical::ground_energy(j, b, 0.0, d, &root());
            let (below, at, above) = (f(bc - delta)?, f(bc)?, f(bc + delta)?);
            jump = jump.max((f(bc * (1.0 - 1e-12))? - f(bc * (1.0 + 1e-12))?).abs());
            kink = kink.max(((at - below) / delta - (above - at) / delta).abs());
        }
    }
    let passed = worst < 1e-6 && jump < 1e-5 && kink < 1e-5;
    Ok(Verdict::new(
        passed,
        format!("max error {worst:.2e} over 63 points; at B=2Jd jump {jump:.1e}, slope jump {kink:.1e}"),
    ))
}

fn saddle_limit() -> Result<Verdict> {
    let p = SphericalParams::<f64>::new(1.0, 4.0, 0.0, 1, 1e3)?;
    let sol = spherical::solve_saddle(&p, SpectrumMode::Limit, &SolverSpec::default())?;
    let u0 = sol.w0 + 1.0;
    Ok(Verdict::new((u0 - 2.0).abs() < 1e-3, format!("u0 = {u0:.9} at β = 1000")))
}

fn susceptibility() -> Result<Verdict> {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(j, d) in &[(1.0f64, 1usize), (1.0, 3), (2.0, 2)] {
        let chain = ising_chain::susceptibility_at_zero_field(j, &quad())?;
        let sph = spherical::susceptibility_at_zero_field(j, d, &root())?;
        passed &= (chain - 0.5 / j).abs() < 1e-4;
        passed &= (sph - 0.5 / (j * d as f64)).abs() < 1e-6;
        parts.push(format!("J={j} d={d}: chain {chain:.7}, spherical {sph:.7}"));
    }
    let chain = ising_chain::susceptibility_at_zero_field(1.0f64, &quad())?;
    let sph = spherical::susceptibility_at_zero_field(1.0f64, 1, &root())?;
    passed &= (chain - sph).abs() < 1e-4;
    Ok(Verdict::new(passed, parts.join("; ")))
}

fn oracle_consistency() -> Result<Verdict> {
    let lattice = LatticeSpec::new(1, 4)?;
    let p = SphericalParams::<f64>::new(1.0, 1.0, 0.5, 1, 0.5)?;
    let contour = oracles::contour_partition(&p, &lattice, &ContourSpec::default())?;
    let shifted = oracles::contour_partition(
        &p,
        &lattice,
        &ContourSpec {
            abscissa_scale: 1.5,
            ..ContourSpec::default()
        },
    )?;
    let mc = MCSpec::new(1_000_000, RandomStream::new(2024, 0), 10_000)?;
    let est = oracles::sphere_mc_partition(&p, &lattice, &mc)?;
    let sigma = (est.std_err.powi(2) + contour.err_est.powi(2)).sqrt();
    let agreement = (est.log_z - contour.log_z).abs();
    let shift = (contour.log_z - shifted.log_z).abs();

    // J = 0, B = H = 0: Z = π^{3N/2} N^{3N/2 − 1} / Γ(3N/2)
    let free = SphericalParams {
        j: 0.0,
        b: 0.0,
        h: 0.0,
        d: 1,
        beta: 1.0,
    };
    let free_z = oracles::contour_partition(&free, &lattice, &ContourSpec::default())?.log_z;
    let exact = 6.0 * std::f64::consts::PI.ln() + 5.0 * 4f64.ln() - libm::lgamma(6.0);
    let closed = (free_z - exact).abs();

    let passed = agreement < 3.0 * sigma && shift < 1e-8 && closed < 1e-10;
    Ok(Verdict::new(
        passed,
        format!(
            "contour {:.8} vs MC {:.8} ± {:.1e} ({:.2}σ); abscissa shift {shift:.1e}; J=0 error {closed:.1e}",
            contour.log_z,
            est.log_z,
            est.std_err,
            agreement / sigma
        ),
    ))
}

fn finite_temperature_approach() -> Result<Verdict> {
    let mut values: Vec<f64> = Vec::new();
    for &beta in &[10.0, 20.0, 40.0] {
        let p = SphericalParams::<f64>::new(1.0, 5.0, 0.0, 1, beta)?;
        values.push(spherical::free_energy_finite_beta(&p, SpectrumMode::Limit, &SolverSpec::default())?.value);
    }
    let gaps: Vec<f64> = values.iter().map(|f| (f + 5.0).abs()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] < w[0]);
    let tf = ising_chain::free_energy(&IsingParams::<f64>::new(1.0, 0.5, 20.0)?, &quad())?.value;
    let t0 = ising_chain::ground_energy(1.0f64, 0.5, &quad())?.value;
    let passed = monotone && gaps[2] < 0.2 && (tf - t0).abs() < 1e-6;
    Ok(Verdict::new(
        passed,
        format!(
            "spherical f(β=10,20,40) = {:.6}, {:.6}, {:.6}; TFIM |f(20) − f∞| = {:.1e}",
            values[0],
            values[1],
            values[2],
            (tf - t0).abs()
        ),
    ))
}

const PROPERTY_TRIALS: usize = 100;

fn property_suites() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures = [0usize; 4];

    for _ in 0..PROPERTY_TRIALS {
        let d = rng.random_range(1..=3usize);
        let p = SphericalParams::<f64>::new(
            rng.random_range(0.2..3.0),
            rng.random_range(0.0..6.0),
            rng.random_range(0.0..1.0),
            d,
            rng.random_range(0.1..20.0),
        )?;
        let w: f64 = rng.random_range(0.01..10.0);
        let f = SaddleFunction::new(&p, SpectrumMode::Finite(LatticeSpec::new(d, 4)?), &quad())?;
        let step = 0.05 * w;
        if !(f.value(w + step)? - 2.0 * f.value(w)? + f.value(w - step)? > 0.0) {
            failures[0] += 1;
        }
    }

    for _ in 0..PROPERTY_TRIALS {
        let k: f64 = rng.random_range(0.01..0.95);
        let seq = toeplitz::correlation_sequence(k, 32, &quad())?;
        if seq.windows(2).any(|w| w[1].det_value > w[0].det_value + 1e-13) {
            failures[1] += 1;
        }
    }

    let s = quad();
    for _ in 0..PROPERTY_TRIALS {
        let mut coeffs = || -> Vec<f64> { (0..rng.random_range(1..8)).map(|_| rng.random_range(-3.0..3.0)).collect() };
        let (cp, cq) = (coeffs(), coeffs());
        let poly = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, a| acc * x + a);
        let (alpha, beta): (f64, f64) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let a: f64 = rng.random_range(-2.0..0.0);
        let b = a + rng.random_range(0.1..3.0);
        let ip = integrate(|x| poly(&cp, x), a, b, &s)?.value;
        let iq = integrate(|x| poly(&cq, x), a, b, &s)?.value;
        let ic = integrate(|x| alpha * poly(&cp, x) + beta * poly(&cq, x), a, b, &s)?.value;
        if (ic - (alpha * ip + beta * iq)).abs() > 10.0 * s.abs_tol {
            failures[2] += 1;
        }
    }

    for _ in 0..PROPERTY_TRIALS {
        let stream = RandomStream::new(rng.random(), rng.random());
        let draw = |s: RandomStream| -> Vec<u64> {
            let mut r = s.rng();
            (0..16).map(|_| r.random::<f64>().to_bits()).collect()
        };
        let sub = rng.random_range(0..1000u64);
        if draw(stream) != draw(stream) || draw(stream.substream(sub)) != draw(stream.substream(sub)) {
            failures[3] += 1;
        }
    }

    let total: usize = failures.iter().sum();
    Ok(Verdict::new(
        total == 0,
        format!(
            "failures over {PROPERTY_TRIALS} trials each: convexity {}, monotonicity {}, linearity {}, determinism {}",
            failures[0], failures[1], failures[2], failures[3]
        ),
    ))
}
