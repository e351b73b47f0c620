mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};
use thiserror::Error;

use args::Cli;
use report::{Inputs, Report, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Output(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let mut outcome = commands::run(&cli.command, &mut inputs);

    // Primary output first, so a failed write still shows up in the report.
    let mut stdout_taken = false;
    if let Ok(o) = &outcome {
        if let Some(p) = &o.payload {
            match &p.output {
                Some(path) => {
                    if let Err(e) = write_file(path, &p.text) {
                        outcome = Err(e);
                    }
                }
                // With --json the payload is carried inside the report.
                None if !cli.json => {
                    print!("{}", p.text);
                    stdout_taken = true;
                }
                None => {}
            }
        }
    }

    let (code, parameters, result) = match &outcome {
        Ok(o) => (i32::from(!o.holds), o.parameters.clone(), o.result.clone()),
        Err(e) => (
            e.exit_code(),
            Value::Null,
            json!({ "error": e.to_string() }),
        ),
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: commands::command_name(&cli.command).to_string(),
        inputs: std::mem::take(&mut inputs.read),
        parameters,
        result,
        exit_code: code,
        wall_time_ms: start.elapsed().as_millis(),
    };
    let mut code = code;
    if let Some(path) = &cli.report {
        if let Err(e) = write_file(path, &report.to_json()) {
            eprintln!("error: {e}");
            code = e.exit_code();
        }
    }
    match &outcome {
        Err(e) => {
            eprintln!("error: {e}");
            if cli.json {
                print!("{}", report.to_json());
            }
        }
        Ok(_) if cli.json => print!("{}", report.to_json()),
        Ok(o) if !stdout_taken => print!("{}", o.summary),
        Ok(_) => {}
    }
    let _ = std::io::stdout().flush();
    ExitCode::from(code as u8)
}
