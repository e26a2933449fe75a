//! `retroatom`: retrodictive state assignment for a decaying two-level atom.

mod commands;
mod error;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use retroatom::channels::ChannelKind;
use retroatom::scenarios::FigureId;

use crate::error::CliError;

/// Environment variable multiplying every internal tolerance (testing only).
pub const TOL_OVERRIDE_VAR: &str = "RETROATOM_TOL_OVERRIDE";

#[derive(Parser, Debug)]
#[command(name = "retroatom", version, about = "Retrodiction for a two-level atom in open-system evolution")]
pub struct Cli {
    /// Reserved for a future configuration file; currently rejected.
    #[arg(long, global = true, value_name = "PATH")]
    json_config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Retrodictive density matrix at the preparation time for one outcome.
    Retrodict {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Measured POM element: preset or inline JSON.
        #[arg(long, value_name = "PRESET|JSON")]
        pom: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Preparation probabilities, retrodictive and by forward Bayes.
    Posterior {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, value_name = "PRESET|JSON")]
        pom: String,
        /// Preparation ensemble: preset or inline JSON list of {label, op}.
        #[arg(long, value_name = "PRESET|JSON")]
        ensemble: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Data series for one figure panel.
    Figure {
        #[arg(value_parser = parse_figure, value_name = "ID")]
        id: FigureId,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        nbar: f64,
        /// Drive strength; defaults to 4 gamma.
        #[arg(long)]
        v: Option<f64>,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Upper end of the tau grid; defaults to 6/gamma for figure 1 and 5/gamma otherwise.
        #[arg(long)]
        tau_max: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the invariant suite and the printed-formula audit.
    Check {
        /// Machine-readable report.
        #[arg(long)]
        json: bool,
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ChannelArgs {
    #[arg(long, value_parser = parse_channel, default_value = "spontaneous")]
    pub channel: ChannelKind,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Mean thermal photon number (thermal channel).
    #[arg(long, default_value_t = 0.0)]
    pub nbar: f64,
    /// Drive strength (driven channel).
    #[arg(long, default_value_t = 0.0)]
    pub v: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tau: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FaultArg {
    ThermalCoherence,
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse().map_err(|_| format!("expected one of spontaneous, thermal, driven; got `{s}`"))
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: retroatom::Error| e.to_string())
}

fn tolerance_scale() -> Result<f64, CliError> {
    match std::env::var(TOL_OVERRIDE_VAR) {
        Err(_) => Ok(1.0),
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite() && *x > 0.0)
            .ok_or_else(|| CliError::Config(format!("{TOL_OVERRIDE_VAR} must be a positive number, got `{v}`"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.json_config.is_some() {
        return Err(CliError::Config("--json-config is reserved and not supported in this version".into()));
    }
    let scale = tolerance_scale()?;
    match cli.command {
        Command::Retrodict { channel, pom, out } => commands::retrodict(&channel, &pom, &out, scale),
        Command::Posterior { channel, pom, ensemble, out } => {
            commands::posterior(&channel, &pom, &ensemble, &out, scale)
        }
        Command::Figure { id, gamma, nbar, v, points, tau_max, out } => {
            let params = retroatom::FigureParams { gamma, nbar, v: v.unwrap_or(4.0 * gamma) };
            commands::figure(id, &params, points, tau_max, &out)
        }
        Command::Check { json, output, inject_fault } => {
            let fault = inject_fault.map(|FaultArg::ThermalCoherence| retroatom::selfcheck::Fault::ThermalCoherence);
            commands::check(json, output.as_deref(), fault, scale)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("retroatom: {e}");
            e.exit_code()
        }
    }
}
