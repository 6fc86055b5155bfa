use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mdqed::config::{load_scenario, Format};
use mdqed::run::{run_scenario, Command, RunOptions};

#[derive(Parser)]
#[command(name = "mdqed", version, about = "Field quantization in dispersive magnetodielectric media")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Susceptibility kernels and spectra, Kramers-Kronig and noise checks.
    Chi(Args),
    /// Couplings rebuilt from the dissipative spectrum.
    InvertChi(Args),
    /// Photon mode coefficients.
    Modes(Args),
    /// Equal-time commutators, vacuum spectra and Maxwell residuals.
    Commutators(Args),
    /// The full suite.
    Verify(Args),
    /// Conducting-medium modes and kernel decomposition.
    Conductor(Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Args {
    /// Scenario file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format; overrides the config.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// SI constants instead of natural units.
    #[arg(long)]
    si: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Chi(a) => (Command::Chi, a),
        Sub::InvertChi(a) => (Command::InvertChi, a),
        Sub::Modes(a) => (Command::Modes, a),
        Sub::Commutators(a) => (Command::Commutators, a),
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Conductor(a) => (Command::Conductor, a),
    };
    let cfg = match load_scenario(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let opts = RunOptions {
        command,
        si: args.si,
        out: args.out,
        format: args.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }),
    };
    match run_scenario(&cfg, &opts) {
        Ok(m) => {
            for c in &m.checks {
                let status = if c.passed { "PASS" } else { "FAIL" };
                let detail = match (&c.error_kind, c.max_error, c.tolerance) {
                    (Some(kind), _, _) => format!("{kind}: {}", c.error.as_deref().unwrap_or("")),
                    (None, Some(e), Some(t)) => format!("max error {e:.3e} (tol {t:.1e})"),
                    _ => String::new(),
                };
                println!("{status} {} {detail}", c.name);
            }
            ExitCode::from(m.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
