//! Command-line front end.
//!
//! ```text
//! cyclet <command> [--config FILE] [--set key=value ...] [--format json|csv] [--out PATH]
//! ```
//!
//! Exit status is 0 on success, 1 for configuration or domain errors and 2
//! for numerical failures, in which case the report is still written with
//! the failures listed under `diagnostics.errors`.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde_json::Value;

pub use config::{CommandKind, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cyclet", version, about = "Envelope-theory levels of cyclic N-body systems")]
struct Args {
    command: CommandKind,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration field by dotted path, e.g. `kinetics.a=0.5`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                return EXIT_CONFIG;
            }
            let _ = stdout.write_all(text.as_bytes());
            return EXIT_OK;
        }
    };
    match execute(&args, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
    }
}

fn execute(args: &Args, stdout: &mut dyn Write, stderr: &mut dyn Write) -> crate::Result<i32> {
    let mut cfg = config::load(args.config.as_deref(), &args.set)?;
    cfg.command = Some(args.command);
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }

    let report = commands::build(args.command, &cfg)?;
    let echo = serde_json::to_value(&cfg).unwrap_or(Value::Null);
    let text = output::render(args.command.name(), echo, &report, cfg.output.format);

    match &cfg.output.path {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| crate::Error::Domain(format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| crate::Error::Domain(format!("cannot write output: {e}")))?,
    }

    if report.has_failures() {
        for err in &report.errors {
            let index = err["index"].as_u64().unwrap_or(0);
            let message = err["message"].as_str().unwrap_or("numerical failure");
            let _ = writeln!(stderr, "row {index}: {message}");
        }
        return Ok(EXIT_NUMERICAL);
    }
    Ok(EXIT_OK)
}
