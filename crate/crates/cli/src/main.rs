//! `nhforce`: run scenarios, solve the force-matching condition, sweep τ and
//! run the property suite.
//!
//! Exit codes: 0 success, 1 no match / failed verification, 2 malformed input,
//! 3 numerical divergence, 4 invalid physical parameters.

mod commands;
mod error;
mod scenario;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nhforce_core::verify::SuiteConfig;
use nhforce_core::FamilyId;

use crate::commands::MatchArgs;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "nhforce", version, about = "Deformation forces versus accelerated-frame forces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario file and write its CSV trajectory (or two, for "both").
    Run { scenario: PathBuf },
    /// Solve G ≡ H for one deformation family.
    #[command(allow_negative_numbers = true)]
    Match {
        #[arg(value_parser = parse_family)]
        family: FamilyId,
        kappa: f64,
        f1: f64,
        f2: f64,
        f3: f64,
        mass: f64,
        /// Time scale: positive number or "inf".
        #[arg(long, default_value = "inf", value_parser = parse_tau)]
        tau: TauArg,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Compare finite-τ runs of a scenario's family against its τ → ∞ limit.
    SweepTau {
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        taus: Vec<f64>,
    },
    /// Run the bracket, Jacobi and contraction property suite.
    Verify {
        #[arg(long, default_value_t = SuiteConfig::default().samples)]
        samples: usize,
        #[arg(long, default_value_t = SuiteConfig::default().seed)]
        seed: u64,
    },
}

fn parse_family(s: &str) -> Result<FamilyId, String> {
    s.parse().map_err(|e: nhforce_core::Error| e.to_string())
}

/// `None` is τ = ∞; the sign is checked later (exit 4, not 2).
#[derive(Debug, Clone, Copy)]
struct TauArg(Option<f64>);

fn parse_tau(s: &str) -> Result<TauArg, String> {
    if s.trim().eq_ignore_ascii_case("inf") {
        return Ok(TauArg(None));
    }
    s.trim()
        .parse::<f64>()
        .map(|v| TauArg(Some(v)))
        .map_err(|e| format!("{e} (expected a number or \"inf\")"))
}

fn dispatch(command: Command) -> Result<u8, CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Run { scenario } => commands::run(&scenario, &mut out).map(|_| 0),
        Command::Match { family, kappa, f1, f2, f3, mass, tau, json } => {
            let args = MatchArgs { family, kappa, force: [f1, f2, f3], mass, tau: tau.0 };
            commands::match_family(&args, json, &mut out).map(|found| if found { 0 } else { 1 })
        }
        Command::SweepTau { scenario, taus } => {
            let table = commands::sweep_tau(&scenario, &taus)?;
            commands::print_sweep(&table, &mut out);
            Ok(0)
        }
        Command::Verify { samples, seed } => {
            let config = SuiteConfig { samples, seed, ..SuiteConfig::default() };
            let report = commands::verify(&config, &mut out)?;
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => {
            let _ = io::stdout().flush();
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
