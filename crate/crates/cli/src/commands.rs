use rayon::prelude::*;
use serde_json::{json, Map, Value};

use qsm_core::acceptance;
use qsm_core::ising_chain::{self, IsingParams};
use qsm_core::numerics::{QuadratureSpec, RandomStream};
use qsm_core::oracles::{self, ChainSpec, ContourSpec, MCSpec, MIN_SAMPLES};
use qsm_core::spherical::{self, LatticeSpec, SaddleStatus, SolverSpec, SpectrumMode, SphericalParams};
use qsm_core::toeplitz;

use crate::args::{
    CheckArgs, Common, Mode, Scan, SphericalArgs, SphericalOracleArgs, TfimCorrelationArgs, TfimEdArgs,
    TfimFreeEnergyArgs,
};
use crate::output::{Cell, Table};
use crate::CliError;

/// What the process should report besides the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    CheckFailed,
    Mismatch,
}

pub struct Report {
    pub table: Table,
    pub verdict: Verdict,
}

impl Report {
    fn ok(table: Table) -> Self {
        Report {
            table,
            verdict: Verdict::Ok,
        }
    }
}

fn config(common: &Common, entries: &[(&str, Value)]) -> Map<String, Value> {
    let mut map: Map<String, Value> = entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    map.insert("format".into(), json!(format!("{:?}", common.format).to_lowercase()));
    map.insert("threads".into(), json!(rayon::current_num_threads()));
    map.insert("seed".into(), json!(common.seed));
    map
}

fn field_points(b: Option<f64>, scan: Option<Scan>) -> Vec<f64> {
    match (scan, b) {
        (Some(s), _) => s.points(),
        (None, Some(b)) => vec![b],
        (None, None) => unreachable!("clap requires --B or --scan"),
    }
}

/// Evaluates `f` at every point in parallel; rows come back in grid order and
/// the reported error is the first one by grid index.
fn scan_rows<F>(points: &[f64], f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64) -> Result<Vec<Cell>, CliError> + Sync,
{
    let results: Vec<_> = points.par_iter().map(|&b| f(b)).collect();
    results.into_iter().collect()
}

pub fn tfim_free_energy(args: &TfimFreeEnergyArgs, common: &Common) -> Result<Report, CliError> {
    let quad = QuadratureSpec::default();
    let cfg = config(
        common,
        &[
            ("J", json!(args.j)),
            ("B", json!(args.b)),
            ("beta", json!(args.beta)),
            ("ground", json!(args.ground)),
            ("scan", json!(args.scan.map(|s| s.to_string()))),
            ("abs_tol", json!(quad.abs_tol)),
            ("rel_tol", json!(quad.rel_tol)),
        ],
    );
    let mut table = Table::new(
        "tfim free-energy",
        cfg,
        vec![("B", "energy"), ("beta", "1/energy"), ("f", "energy/site"), ("err_est", "energy/site")],
    );
    let points = field_points(args.b, args.scan);
    let rows = scan_rows(&points, |b| {
        let (beta, r) = match args.beta {
            None => (f64::INFINITY, ising_chain::ground_energy(args.j, b, &quad)?),
            Some(beta) => (beta, ising_chain::free_energy(&IsingParams::new(args.j, b, beta)?, &quad)?),
        };
        Ok(vec![b.into(), beta.into(), r.value.into(), r.err_est.into()])
    })?;
    table.rows = rows;
    Ok(Report::ok(table))
}

pub fn tfim_correlation(args: &TfimCorrelationArgs, common: &Common) -> Result<Report, CliError> {
    let quad = QuadratureSpec::default();
    let cfg = config(
        common,
        &[
            ("k", json!(args.k)),
            ("n_max", json!(args.n_max)),
            ("abs_tol", json!(quad.abs_tol)),
            ("rel_tol", json!(quad.rel_tol)),
        ],
    );
    let mut table = Table::new(
        "tfim correlation",
        cfg,
        vec![("n", "sites"), ("det_value", "-"), ("szego_limit", "-")],
    );
    for r in toeplitz::correlation_sequence(args.k, args.n_max, &quad)? {
        table.push(vec![r.n.into(), r.det_value.into(), r.szego_limit.into()]);
    }
    Ok(Report::ok(table))
}

fn status_name(s: SaddleStatus) -> &'static str {
    match s {
        SaddleStatus::Interior => "interior",
        SaddleStatus::Edge => "edge",
    }
}

pub fn spherical(args: &SphericalArgs, common: &Common) -> Result<Report, CliError> {
    let solver = SolverSpec::default();
    let cfg = config(
        common,
        &[
            ("J", json!(args.j)),
            ("B", json!(args.b)),
            ("H", json!(args.h)),
            ("d", json!(args.d)),
            ("beta", json!(args.beta)),
            ("ground", json!(args.ground)),
            ("mode", json!(args.mode.to_string())),
            ("scan", json!(args.scan.map(|s| s.to_string()))),
            ("abs_tol", json!(solver.quadrature.abs_tol)),
            ("x_tol", json!(solver.root.x_tol)),
        ],
    );
    let mode = match args.mode {
        Mode::Limit => SpectrumMode::Limit,
        Mode::Finite(_) if args.ground => {
            return Err(CliError::Usage("--ground is the thermodynamic limit; use --mode limit".into()))
        }
        Mode::Finite(l) => SpectrumMode::Finite(LatticeSpec::new(args.d, l)?),
    };
    let mut table = Table::new(
        "spherical",
        cfg,
        vec![
            ("B", "energy"),
            ("H", "energy"),
            ("beta", "1/energy"),
            ("w0", "-"),
            ("f", "energy/site"),
            ("err_est", "energy/site"),
            ("status", "-"),
        ],
    );
    let points = field_points(args.b, args.scan);
    table.rows = scan_rows(&points, |b| {
        let row = match args.beta {
            None => {
                let g = spherical::ground_state(args.j, b, args.h, args.d, &solver.root)?;
                let err = f64::EPSILON * g.energy.abs();
                vec![
                    b.into(),
                    args.h.into(),
                    f64::INFINITY.into(),
                    g.w0.into(),
                    g.energy.into(),
                    err.into(),
                    status_name(g.status).into(),
                ]
            }
            Some(beta) => {
                let p = SphericalParams::new(args.j, b, args.h, args.d, beta)?;
                let sol = spherical::solve_saddle(&p, mode, &solver)?;
                let f = spherical::free_energy_finite_beta(&p, mode, &solver)?;
                vec![
                    b.into(),
                    args.h.into(),
                    beta.into(),
                    sol.w0.into(),
                    f.value.into(),
                    f.err_est.into(),
                    status_name(sol.status).into(),
                ]
            }
        };
        Ok(row)
    })?;
    Ok(Report::ok(table))
}

const COMPARISON_COLUMNS: [(&str, &str); 8] = [
    ("quantity", "-"),
    ("value", "-"),
    ("err_est", "-"),
    ("reference", "-"),
    ("reference_err", "-"),
    ("difference", "-"),
    ("tolerance", "-"),
    ("status", "-"),
];

fn verdict_of(table: &Table) -> Verdict {
    let col = table.column("status").expect("comparison tables carry a status column");
    if table.rows.iter().any(|r| r[col] == Cell::from("fail")) {
        Verdict::Mismatch
    } else {
        Verdict::Ok
    }
}

pub fn oracle_tfim_ed(args: &TfimEdArgs, common: &Common) -> Result<Report, CliError> {
    let quad = QuadratureSpec::default();
    let cfg = config(
        common,
        &[
            ("L", json!(args.l)),
            ("J", json!(args.j)),
            ("B", json!(args.b)),
            ("beta", json!(args.beta)),
            ("sep", json!(args.sep)),
            ("tol", json!(args.tol)),
            ("corr_tol", json!(args.corr_tol)),
        ],
    );
    let spec = ChainSpec::new(args.l, args.j, args.b, args.beta)?;
    let mut columns = COMPARISON_COLUMNS.to_vec();
    columns[1].1 = "energy/site";
    columns.push(("beta_gap", "-"));
    let mut table = Table::new("oracle tfim-ed", cfg, columns);

    let status = |diff: f64, tol: f64| if diff.abs() <= tol { "pass" } else { "fail" };
    // the thermodynamic free energy is even in B
    let b = args.b.abs();
    let ed = oracles::ed_free_energy(&spec)?;
    let exact = ising_chain::free_energy(&IsingParams::new(args.j, b, args.beta)?, &quad)?;
    let err = 10.0 * f64::EPSILON * (args.j.abs() + b);
    table.push(vec![
        "free_energy".into(),
        ed.into(),
        err.into(),
        exact.value.into(),
        exact.err_est.into(),
        (ed - exact.value).into(),
        args.tol.into(),
        status(ed - exact.value, args.tol).into(),
        f64::NAN.into(),
    ]);

    if let Some(n) = args.sep {
        let c = oracles::ed_correlation(&spec, 0, n)?;
        let query = toeplitz::CorrelationQuery::new(b / args.j, n)?;
        let det = toeplitz::correlation_determinant(&query, &quad)?.det_value;
        table.push(vec![
            "correlation".into(),
            c.value.into(),
            err.into(),
            det.into(),
            0.0.into(),
            (c.value - det).into(),
            args.corr_tol.into(),
            status(c.value - det, args.corr_tol).into(),
            c.beta_gap.into(),
        ]);
    }
    let verdict = verdict_of(&table);
    Ok(Report { table, verdict })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primary {
    Contour,
    MonteCarlo,
}

/// Both spherical oracles, reported from the point of view of `primary`.
///
/// The comparison is decided at three combined standard errors, and is
/// `inconclusive` when that interval is wider than `--tol`.
pub fn oracle_spherical(args: &SphericalOracleArgs, common: &Common, primary: Primary) -> Result<Report, CliError> {
    let batch = args
        .batch_size
        .unwrap_or_else(|| (args.samples / 100).clamp(1, 10_000));
    let stream = RandomStream::new(common.seed, 0);
    let exploratory = args.samples < MIN_SAMPLES;
    let name = match primary {
        Primary::Contour => "oracle spherical-contour",
        Primary::MonteCarlo => "oracle spherical-mc",
    };
    let cfg = config(
        common,
        &[
            ("d", json!(args.d)),
            ("L", json!(args.l)),
            ("J", json!(args.j)),
            ("B", json!(args.b)),
            ("H", json!(args.h)),
            ("beta", json!(args.beta)),
            ("samples", json!(args.samples)),
            ("batch_size", json!(batch)),
            ("exploratory", json!(exploratory)),
            ("tol", json!(args.tol)),
        ],
    );
    let params = SphericalParams {
        j: args.j,
        b: args.b,
        h: args.h,
        d: args.d,
        beta: args.beta,
    };
    let lattice = LatticeSpec::new(args.d, args.l)?;
    let mc_spec = if exploratory {
        MCSpec::exploratory(args.samples, stream, batch)?
    } else {
        MCSpec::new(args.samples, stream, batch)?
    };
    let contour = oracles::contour_partition(&params, &lattice, &ContourSpec::default())?;
    let mc = match oracles::sphere_mc_partition(&params, &lattice, &mc_spec) {
        Ok(m) => Some(m),
        // too many sites for Monte Carlo: the contour value stands alone
        Err(qsm_core::Error::DimensionCap { .. }) if primary == Primary::Contour => None,
        Err(e) => return Err(e.into()),
    };

    let mut columns = COMPARISON_COLUMNS.to_vec();
    columns[1].1 = "log Z";
    let mut table = Table::new(name, cfg, columns);
    let (value, err, reference, reference_err) = match (primary, mc) {
        (Primary::Contour, Some(m)) => (contour.log_z, contour.err_est, m.log_z, m.std_err),
        (Primary::Contour, None) => (contour.log_z, contour.err_est, f64::NAN, f64::NAN),
        (Primary::MonteCarlo, Some(m)) => (m.log_z, m.std_err, contour.log_z, contour.err_est),
        (Primary::MonteCarlo, None) => unreachable!("Monte Carlo errors are returned above"),
    };
    let diff = value - reference;
    let window = 3.0 * (err * err + reference_err * reference_err).sqrt();
    let status = if reference.is_nan() {
        "n/a"
    } else if window > args.tol {
        "inconclusive"
    } else if diff.abs() <= window {
        "pass"
    } else {
        "fail"
    };
    table.push(vec![
        "log_z".into(),
        value.into(),
        err.into(),
        reference.into(),
        reference_err.into(),
        diff.into(),
        window.into(),
        status.into(),
    ]);
    let verdict = verdict_of(&table);
    Ok(Report { table, verdict })
}

pub fn check(args: &CheckArgs, common: &Common) -> Result<Report, CliError> {
    if args.mutate_dispersion_sign {
        ising_chain::mutation::set_dispersion_sign_flip(true);
    }
    let filter = args.filter.as_deref();
    if let Some(f) = filter {
        if !acceptance::criteria().iter().any(|c| c.matches(f)) {
            return Err(CliError::Usage(format!("no acceptance criterion matches {f:?}")));
        }
    }
    let cfg = config(
        common,
        &[
            ("filter", json!(args.filter)),
            ("mutate_dispersion_sign", json!(args.mutate_dispersion_sign)),
        ],
    );
    let outcomes = acceptance::run(filter, |o| eprintln!("{o}"));
    let mut table = Table::new(
        "check",
        cfg,
        vec![
            ("id", "-"),
            ("criterion", "-"),
            ("status", "-"),
            ("elapsed", "s"),
            ("budget", "s"),
            ("detail", "-"),
        ],
    );
    for o in &outcomes {
        table.push(vec![
            o.id.into(),
            o.name.into(),
            if o.passed { "pass" } else { "fail" }.into(),
            o.elapsed.as_secs_f64().into(),
            o.budget.as_secs_f64().into(),
            o.detail.clone().into(),
        ]);
    }
    let verdict = if outcomes.iter().all(|o| o.passed) {
        Verdict::Ok
    } else {
        Verdict::CheckFailed
    };
    Ok(Report { table, verdict })
}
