use super::*;
use proptest::prelude::*;

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn solver() -> SolverSpec {
    SolverSpec::default()
}

fn root() -> RootSpec {
    RootSpec::default()
}

fn params(j: f64, b: f64, h: f64, d: usize, beta: f64) -> SphericalParams<f64> {
    SphericalParams::new(j, b, h, d, beta).unwrap()
}

/// Zero-temperature energy from the uniform spin configuration: with
/// x² + z² = 1 per site, −max over x of [Jd(1 − x²) + Bx].
fn uniform_configuration_energy(j: f64, b: f64, d: usize) -> f64 {
    let jd = j * d as f64;
    let x = (b / (2.0 * jd)).min(1.0);
    -(jd * (1.0 - x * x) + b * x)
}

#[test]
fn phi_is_convex_at_probe_points() {
    let p = params(1.0, 1.0, 0.01, 1, 2.0);
    let f = SaddleFunction::new(&p, SpectrumMode::Limit, &quad()).unwrap();
    for &w in &[0.1, 0.5, 1.0, 5.0] {
        let h = 1e-3 * w;
        let second = f.value(w + h).unwrap() - 2.0 * f.value(w).unwrap() + f.value(w - h).unwrap();
        assert!(second > 0.0, "w={w}: {second}");
    }
}

#[test]
fn phi_large_w_asymptote_and_pole() {
    let p = params(1.0, 1.0, 0.5, 1, 2.0);
    let w = 1e6;
    let ratio = phi(&p, SpectrumMode::Limit, w, &quad()).unwrap() / (2.0 * w);
    assert!((ratio - 1.0).abs() < 1e-4, "{ratio}");
    assert!(phi(&p, SpectrumMode::Limit, 1e-12, &quad()).unwrap() > 1e10);
    assert!(matches!(phi(&p, SpectrumMode::Limit, 0.0, &quad()), Err(Error::Domain(_))));
}

#[test]
fn phi_derivative_matches_finite_difference() {
    let lattice = LatticeSpec::new(2, 5).unwrap();
    for mode in [SpectrumMode::Limit, SpectrumMode::Finite(lattice)] {
        let f = SaddleFunction::new(&params(1.3, 0.7, 0.2, 2, 1.7), mode, &quad()).unwrap();
        for &w in &[0.05, 0.4, 2.0] {
            let h = 1e-6;
            let fd = (f.value(w + h).unwrap() - f.value(w - h).unwrap()) / (2.0 * h);
            assert!((fd - f.derivative(w).unwrap()).abs() < 1e-5, "w={w}");
        }
    }
}

#[test]
fn finite_mode_requires_matching_dimension() {
    let lattice = LatticeSpec::new(2, 4).unwrap();
    assert!(SaddleFunction::new(&params(1.0, 1.0, 0.1, 1, 1.0), SpectrumMode::Finite(lattice), &quad()).is_err());
    assert!(matches!(
        SaddleFunction::new(&params(1.0, 1.0, 0.1, 4, 1.0), SpectrumMode::Limit, &quad()),
        Err(Error::DimensionCap { .. })
    ));
}

#[test]
fn saddle_tends_to_half_field_over_coupling() {
    let at = |beta| solve_saddle(&params(1.0, 4.0, 0.0, 1, beta), SpectrumMode::Limit, &solver()).unwrap();
    let s50 = at(50.0);
    assert_eq!(s50.status, SaddleStatus::Interior);
    assert!((s50.w0 + 1.0 - 2.0).abs() < 0.05, "{}", s50.w0);
    let s1000 = at(1000.0);
    assert!((s1000.w0 + 1.0 - 2.0).abs() < 1e-3, "{}", s1000.w0);
    assert!((s1000.w0 + 1.0 - 2.0).abs() < (s50.w0 + 1.0 - 2.0).abs());
}

#[test]
fn saddle_collapses_to_edge_as_field_vanishes() {
    let w = |h| solve_saddle(&params(1.0, 1.0, h, 1, 1e4), SpectrumMode::Limit, &solver()).unwrap().w0;
    let (a, b) = (w(1e-3), w(1e-4));
    assert!(a < 0.02 && b < a, "{a} {b}");

    let w2 = |h| solve_saddle(&params(1.0, 0.0, h, 2, 1e4), SpectrumMode::Limit, &solver()).unwrap().w0;
    let seq = [w2(1e-2), w2(1e-3), w2(1e-4)];
    assert!(seq[0] > seq[1] && seq[1] > seq[2], "{seq:?}");
}

#[test]
fn saddle_is_a_minimum() {
    let lattice = LatticeSpec::new(1, 16).unwrap();
    let cases = [
        (params(1.0, 4.0, 0.0, 1, 5.0), SpectrumMode::Limit),
        (params(1.0, 1.0, 0.5, 1, 0.5), SpectrumMode::Finite(LatticeSpec::new(1, 4).unwrap())),
        (params(0.5, 1.0, 0.1, 2, 3.0), SpectrumMode::Limit),
        (params(1.0, 0.5, 0.0, 1, 2.0), SpectrumMode::Finite(lattice)),
        (params(1.0, 7.0, 0.0, 3, 2.0), SpectrumMode::Limit),
    ];
    for (p, mode) in cases {
        let f = SaddleFunction::new(&p, mode, &quad()).unwrap();
        let s = f.solve(&root()).unwrap();
        assert_eq!(s.status, SaddleStatus::Interior);
        let delta = 10.0 * root().x_tol * s.w0.max(1.0);
        let slack = 8.0 * f64::EPSILON * s.phi_at_w0.abs().max(1.0);
        assert!(s.phi_at_w0 <= f.value(s.w0 + delta).unwrap() + slack);
        assert!(s.phi_at_w0 <= f.value(s.w0 - delta).unwrap() + slack);
        // derivative vanishes up to the bracket resolution
        let scale = p.beta * p.j + 1.0;
        assert!(s.derivative.abs() <= 1e-8 * scale, "{p:?}: {}", s.derivative);
    }
}

#[test]
fn three_dimensional_saddle_sticks_to_edge_at_low_temperature() {
    let s = solve_saddle(&params(1.0, 0.0, 0.0, 3, 2.0), SpectrumMode::Limit, &solver()).unwrap();
    assert_eq!(s.status, SaddleStatus::Edge);
    assert_eq!(s.w0, 0.0);
    let f = SaddleFunction::new(&params(1.0, 0.0, 0.0, 3, 2.0), SpectrumMode::Limit, &quad()).unwrap();
    assert!((s.phi_at_w0 - f.value(0.0).unwrap()).abs() < 1e-14);
    // hot enough to keep the saddle off the edge
    let hot = solve_saddle(&params(1.0, 0.0, 0.0, 3, 0.3), SpectrumMode::Limit, &solver()).unwrap();
    assert_eq!(hot.status, SaddleStatus::Interior);
    assert!(hot.w0 > 0.0);
}

#[test]
fn ground_energy_closed_points() {
    assert!((ground_energy(1.0f64, 0.0, 0.0, 3, &root()).unwrap() + 3.0).abs() < 1e-14);
    assert!((ground_energy(1.0f64, 5.0, 0.0, 1, &root()).unwrap() + 5.0).abs() < 1e-12);
    assert!((ground_energy(1.0f64, 1.0, 0.0, 1, &root()).unwrap() + 1.25).abs() < 1e-14);
    assert!((ground_energy_zero_field_limit(1.0f64, 0.0, 3, &root()).unwrap().value + 3.0).abs() < 1e-6);
    assert!((ground_energy_zero_field_limit(1.0f64, 5.0, 1, &root()).unwrap().value + 5.0).abs() < 1e-6);
    assert!((ground_energy_zero_field_limit(1.0f64, 1.0, 1, &root()).unwrap().value + 1.25).abs() < 1e-6);
    for d in 1..=3 {
        let b = 2.0 * d as f64;
        let at = ground_energy(1.0f64, b, 0.0, d, &root()).unwrap();
        let below = ground_energy(1.0f64, b * (1.0 - 1e-13), 0.0, d, &root()).unwrap();
        let above = ground_energy(1.0f64, b * (1.0 + 1e-13), 0.0, d, &root()).unwrap();
        assert!((at + b).abs() < 1e-12);
        assert!((below - above).abs() < 1e-11);
    }
}

#[test]
fn ground_energy_reproduces_closed_form_on_grid() {
    let mut worst: f64 = 0.0;
    for &j in &[0.5, 1.0, 2.0] {
        for d in 1..=3usize {
            for &r in &[0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0] {
                let b = r * 2.0 * j * d as f64;
                let expected = uniform_configuration_energy(j, b, d);
                let got = ground_energy_zero_field_limit(j, b, d, &root()).unwrap().value;
                worst = worst.max((got - expected).abs());
            }
        }
    }
    assert!(worst < 1e-6, "max error {worst:e}");
}

#[test]
fn ground_energy_derivative_is_continuous_at_branch_point() {
    for &(j, d) in &[(1.0, 1usize), (0.5, 3), (2.0, 2)] {
        let bc = 2.0 * j * d as f64;
        let delta = 1e-6;
        let f = |b: f64| ground_energy(j, b, 0.0, d, &root()).unwrap();
        let left = (f(bc) - f(bc - delta)) / delta;
        let right = (f(bc + delta) - f(bc)) / delta;
        assert!((left - right).abs() < 1e-5, "{left} {right}");
        assert!((right + 1.0).abs() < 1e-5);
    }
}

#[test]
fn ground_energy_nonincreasing_in_field() {
    for d in 1..=3 {
        let mut prev = f64::INFINITY;
        for k in 0..=80 {
            let b = 0.1 * k as f64;
            let e = ground_energy(1.0f64, b, 1e-4, d, &root()).unwrap();
            assert!(e <= prev + 1e-15, "d={d} B={b}");
            prev = e;
        }
    }
}

#[test]
fn ground_state_edge_and_interior() {
    let g = ground_state(1.0f64, 1.0, 0.0, 1, &root()).unwrap();
    assert_eq!(g.status, SaddleStatus::Edge);
    let g = ground_state(1.0f64, 5.0, 0.0, 1, &root()).unwrap();
    assert_eq!(g.status, SaddleStatus::Interior);
    assert!((g.w0 + 1.0 - 2.5).abs() < 1e-10);
}

#[test]
fn susceptibility_matches_inverse_two_j_d() {
    for &(j, d, expected) in &[(1.0f64, 1usize, 0.5), (1.0, 3, 1.0 / 6.0), (2.0, 2, 0.125)] {
        let chi = susceptibility_at_zero_field(j, d, &root()).unwrap();
        assert!((chi - expected).abs() < 1e-6, "J={j} d={d}: {chi}");
    }
}

#[test]
fn finite_beta_free_energy_approaches_ground_energy() {
    let f = |beta| free_energy_finite_beta(&params(1.0, 5.0, 0.0, 1, beta), SpectrumMode::Limit, &solver()).unwrap().value;
    let seq = [f(10.0), f(20.0), f(40.0)];
    let gaps: Vec<f64> = seq.iter().map(|v| (v + 5.0).abs()).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{seq:?}");
    assert!(gaps[2] < 0.2);

    let cold = free_energy_finite_beta(&params(1.0, 1.0, 1e-4, 1, 1e4), SpectrumMode::Limit, &solver()).unwrap();
    assert!((cold.value + 1.25).abs() < 1e-2, "{}", cold.value);
}

#[test]
fn finite_lattice_matches_thermodynamic_limit() {
    let p = params(1.0, 3.0, 0.0, 1, 5.0);
    let lattice = LatticeSpec::new(1, 64).unwrap();
    let a = free_energy_finite_beta(&p, SpectrumMode::Finite(lattice), &solver()).unwrap();
    let b = free_energy_finite_beta(&p, SpectrumMode::Limit, &solver()).unwrap();
    assert!((a.value - b.value).abs() < 1e-3, "{} vs {}", a.value, b.value);
}

#[test]
fn single_precision_ground_energy() {
    let e: f32 = ground_energy(1.0f32, 1.0, 0.0, 1, &root()).unwrap();
    assert!((e + 1.25).abs() < 1e-6);
    let chi: f32 = susceptibility_at_zero_field(1.0f32, 1, &root()).unwrap();
    assert!((chi - 0.5).abs() < 1e-3);
}

#[test]
fn rejects_invalid_parameters() {
    assert!(SphericalParams::new(0.0, 1.0, 0.0, 1, 1.0).is_err());
    assert!(SphericalParams::new(1.0, -1.0, 0.0, 1, 1.0).is_err());
    assert!(SphericalParams::new(1.0, 1.0, -0.1, 1, 1.0).is_err());
    assert!(SphericalParams::new(1.0, 1.0, 0.0, 0, 1.0).is_err());
    assert!(SphericalParams::new(1.0, 1.0, 0.0, 1, 0.0).is_err());
    assert!(ground_energy(1.0f64, -1.0, 0.0, 1, &root()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn phi_strictly_convex_for_random_parameters(
        j in 0.2f64..3.0,
        b in 0.0f64..6.0,
        h in 0.0f64..1.0,
        d in 1usize..=3,
        beta in 0.1f64..20.0,
        w in 0.01f64..10.0,
    ) {
        let p = params(j, b, h, d, beta);
        let lattice = LatticeSpec::new(d, 4).unwrap();
        let f = SaddleFunction::new(&p, SpectrumMode::Finite(lattice), &quad()).unwrap();
        let step = 0.05 * w;
        let second = f.value(w + step).unwrap() - 2.0 * f.value(w).unwrap() + f.value(w - step).unwrap();
        prop_assert!(second > 0.0);
    }
}
