//! `qsm`: compute, scan and cross-check the transverse-field Ising chain and
//! the quantum spherical model.
//!
//! Exit codes: 0 ok, 1 acceptance failure, 2 usage or invalid input,
//! 3 numerical nonconvergence, 4 oracle mismatch.

mod args;
mod commands;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Oracle, Tfim};
use commands::{Primary, Report, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qsm_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use qsm_core::Error as E;
        match self {
            CliError::Core(E::NonConvergence { .. } | E::Bracket { .. }) => 3,
            CliError::Core(_) | CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }
}

fn run(cli: &Cli) -> Result<Verdict, CliError> {
    if let Some(n) = cli.common.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let common = &cli.common;
    let report: Report = match &cli.command {
        Command::Tfim(Tfim::FreeEnergy(a)) => commands::tfim_free_energy(a, common)?,
        Command::Tfim(Tfim::Correlation(a)) => commands::tfim_correlation(a, common)?,
        Command::Spherical(a) => commands::spherical(a, common)?,
        Command::Oracle(Oracle::TfimEd(a)) => commands::oracle_tfim_ed(a, common)?,
        Command::Oracle(Oracle::SphericalContour(a)) => commands::oracle_spherical(a, common, Primary::Contour)?,
        Command::Oracle(Oracle::SphericalMc(a)) => commands::oracle_spherical(a, common, Primary::MonteCarlo)?,
        Command::Check(a) => commands::check(a, common)?,
    };
    match &common.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            report.table.write(common.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            report.table.write(common.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(report.verdict)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::CheckFailed) => {
            eprintln!("qsm: acceptance criteria failed");
            ExitCode::from(1)
        }
        Ok(Verdict::Mismatch) => {
            eprintln!("qsm: oracle comparison failed");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("qsm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_failure_class() {
        let core = |e| CliError::Core(e).exit_code();
        assert_eq!(core(qsm_core::Error::NonConvergence { iterations: 3, err_est: 1.0 }), 3);
        assert_eq!(core(qsm_core::Error::Bracket { lo: 0.0, hi: 1.0 }), 3);
        assert_eq!(core(qsm_core::Error::InvalidParameter("x".into())), 2);
        assert_eq!(core(qsm_core::Error::DimensionCap { requested: 13, max: 12 }), 2);
        assert_eq!(core(qsm_core::Error::CapExceeded { requested: 300, cap: 256 }), 2);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
    }
}
