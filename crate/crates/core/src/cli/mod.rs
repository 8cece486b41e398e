//! The `jcm-ladder` command line.
//!
//! Exit codes: 0 all checks pass, 1 a gated check failed, 2 usage or
//! configuration error, 3 numeric domain error. Errors are written to the
//! error stream as one JSON object.

mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::JcmError;
pub use config::{resolve, CommonArgs, Format, RunConfig, TOLERANCE_ENV};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "jcm-ladder", version, about = "Jaynes-Cummings shift operators: spectra, residual checks and CHSH values")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground energy and dressed-pair energies and mixing angles.
    Spectrum(CommonArgs),
    /// Block matrix elements of b and b†, with ladder residuals.
    Ladder(CommonArgs),
    /// Full residual suite.
    Verify(CommonArgs),
    /// Deformed-algebra generators and their residuals.
    Algebra(CommonArgs),
    /// CHSH values of the dressed states.
    Bell(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(a)
            | Command::Ladder(a)
            | Command::Verify(a)
            | Command::Algebra(a)
            | Command::Bell(a) => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage {
        message: String,
        field: Option<String>,
    },
    Config {
        message: String,
        field: Option<String>,
        line: Option<usize>,
        column: Option<usize>,
    },
    Numeric(JcmError),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => EXIT_NUMERIC,
            _ => EXIT_USAGE,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage { .. } => "usage",
            CliError::Config { .. } => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }
}

impl From<JcmError> for CliError {
    fn from(e: JcmError) -> Self {
        if e.is_numeric_domain() {
            CliError::Numeric(e)
        } else {
            CliError::Usage {
                message: e.to_string(),
                field: None,
            }
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    field: Option<&'a str>,
    line: Option<usize>,
    column: Option<usize>,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    tool: &'a str,
    version: &'a str,
    error: ErrorBody<'a>,
    exit_code: i32,
}

fn write_error(err: &CliError, stderr: &mut dyn Write) {
    let (message, field, line, column) = match err {
        CliError::Usage { message, field } => (message.clone(), field.as_deref(), None, None),
        CliError::Config {
            message,
            field,
            line,
            column,
        } => (message.clone(), field.as_deref(), *line, *column),
        CliError::Numeric(e) => (e.to_string(), None, None, None),
        CliError::Io(m) => (m.clone(), None, None, None),
    };
    let report = ErrorReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        error: ErrorBody {
            kind: err.kind(),
            message,
            field,
            line,
            column,
        },
        exit_code: err.exit_code(),
    };
    let _ = serde_json::to_writer(&mut *stderr, &report);
    let _ = stderr.write_all(b"\n");
}

/// Run one invocation. `env_tolerance` stands in for the global tolerance
/// environment variable so callers can run in-process.
pub fn run_with<I, T>(
    argv: I,
    env_tolerance: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return EXIT_PASS;
            }
            let err = CliError::Usage {
                message: e.render().to_string().trim_end().to_string(),
                field: None,
            };
            write_error(&err, stderr);
            return err.exit_code();
        }
    };

    let result = resolve(cli.command.args(), env_tolerance)
        .and_then(|cfg| commands::execute(&cli.command, &cfg).map(|out| (cfg, out)))
        .and_then(|(cfg, out)| {
            match &cfg.out {
                Some(path) => std::fs::write(path, &out.bytes)
                    .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
                None => stdout
                    .write_all(&out.bytes)
                    .map_err(|e| CliError::Io(format!("cannot write output: {e}")))?,
            }
            Ok(out.pass)
        });

    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(err) => {
            write_error(&err, stderr);
            err.exit_code()
        }
    }
}

/// Run with the process environment and standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(TOLERANCE_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_with(argv, env.as_deref(), &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}
