mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dipole_core::report::{config_hash, render_csv, render_json, Provenance};
use dipole_core::Error;

use config::{Cli, Command, Format};

const EXIT_USAGE: u8 = 2;
const EXIT_SINGULAR: u8 = 3;
const EXIT_VERIFY: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Singular { .. } => EXIT_SINGULAR,
        Error::InvalidParameter(_) | Error::UnitMismatch { .. } | Error::Domain(_) => EXIT_USAGE,
        _ => 1,
    }
}

fn command_line(cmd: &Command) -> String {
    match cmd {
        Command::Figure { id, .. } => format!("figure {id}"),
        Command::Dispersion { .. } => "dispersion".into(),
        Command::Energy { residual: true, .. } => "energy --residual".into(),
        Command::Energy { .. } => "energy".into(),
        Command::Estimate { .. } => "estimate".into(),
        Command::Verify { .. } => "verify".into(),
        Command::Cooling { .. } => "cooling".into(),
    }
}

fn run(cmd: &Command) -> Result<ExitCode, Error> {
    let c = cmd.common();
    let outcome = match cmd {
        Command::Figure { id, common } => commands::figure_cmd(*id, common)?,
        Command::Dispersion { common } => commands::dispersion_cmd(common)?,
        Command::Energy { residual, common } => commands::energy_cmd(*residual, common)?,
        Command::Estimate { common } => commands::estimate_cmd(common)?,
        Command::Verify { common } => commands::verify_cmd(common)?,
        Command::Cooling { ratio_range, common } => commands::cooling_cmd(*ratio_range, common)?,
    };
    let default_format = if matches!(cmd, Command::Verify { .. }) { Format::Json } else { Format::Csv };
    let prov = Provenance {
        tool: "dipole".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command_line(cmd),
        config_hash: config_hash(cmd)?,
        contributions: c.contrib.unwrap_or(dipole_core::dispersions::Contributions::ALL).label(),
    };
    let text = match c.format.unwrap_or(default_format) {
        Format::Csv => render_csv(&outcome.records, &prov),
        Format::Json => render_json(&outcome.records, &prov),
    };
    let written = match &c.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("dipole: cannot write output: {e}");
        return Ok(ExitCode::from(1));
    }
    Ok(if outcome.failed { ExitCode::from(EXIT_VERIFY) } else { ExitCode::SUCCESS })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dipole: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
