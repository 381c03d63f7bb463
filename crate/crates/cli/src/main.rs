mod commands;
mod config;
mod dot;
mod error;
mod io;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{Cli, Command, RunConfig};
use crate::error::{CliError, CliResult};

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = RunConfig::resolve(cli.command.options())?;
    let art = match &cli.command {
        Command::Analyze(_) => commands::analyze(&cfg)?,
        Command::Minreal(_) => commands::minreal(&cfg)?,
        Command::Reduce(_) => commands::reduce(&cfg)?,
        Command::Error(_) => commands::error(&cfg)?,
        Command::ExportDot(_) => commands::export_dot(&cfg)?,
    };
    art.write(cfg.out.as_deref())?;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(art.stdout.as_bytes());
    Ok(())
}

fn fail(err: &CliError) -> ExitCode {
    let mut text = serde_json::to_string_pretty(&err.to_json()).expect("error json");
    text.push('\n');
    let _ = std::io::stderr().write_all(text.as_bytes());
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(&CliError::Usage(e.to_string().trim_end().to_string())),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
