//! Spec-file driven front end for `skew-core`.
//!
//! [`run_cli`] parses arguments, executes one subcommand and returns the exit
//! code together with the text written to stdout/stderr, so the binary and
//! the tests share one code path.

pub mod commands;
pub mod model;
pub mod spec;

use std::path::Path;

use clap::Parser;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use commands::{Cli, Cmd};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] spec::ParseError),
    #[error("line {line}: {source}")]
    Build { line: usize, source: skew_core::Error },
    #[error(transparent)]
    Core(#[from] skew_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

fn core_exit(e: &skew_core::Error) -> i32 {
    use skew_core::Error as E;
    match e {
        E::Scalar(_) | E::Precondition(_) => EXIT_INPUT,
        E::Unsupported(_) | E::BoundExceeded(_) => EXIT_UNSUPPORTED,
        E::Invariant(_) | E::RingMismatch(_) => EXIT_INVARIANT,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) | CliError::Usage(_) => EXIT_INPUT,
            CliError::Build { source, .. } | CliError::Core(source) => core_exit(source),
        }
    }
}

/// Result of one command before it is rendered.
#[derive(Debug, Default)]
pub struct Outcome {
    pub result: serde_json::Value,
    pub text: String,
    pub warnings: Vec<String>,
    pub caveats: Vec<String>,
}

/// Machine-readable report printed under `--json`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs_digest: String,
    pub result: serde_json::Value,
    pub warnings: Vec<String>,
    pub caveats: Vec<String>,
    pub exit_status: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// SHA-256 over the command description and the contents of every input file.
fn digest(cmd: &Cmd) -> String {
    let mut h = Sha256::new();
    h.update(format!("{cmd:?}").as_bytes());
    for p in cmd.input_files() {
        h.update([0u8]);
        match std::fs::read(p) {
            Ok(bytes) => h.update(&bytes),
            Err(_) => h.update(b"<unreadable>"),
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn unix_stamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("unix:{secs}")
}

/// Runs the CLI on `args` (including the program name).
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput { code, stdout: String::new(), stderr: text }
            } else {
                CliOutput { code, stdout: text, stderr: String::new() }
            };
        }
    };
    let res = commands::execute(&cli.cmd);
    let code = res.as_ref().map_or_else(|e| e.exit_code(), |_| EXIT_OK);
    if cli.json {
        let (outcome, error) = match res {
            Ok(o) => (o, None),
            Err(e) => (Outcome::default(), Some(e.to_string())),
        };
        let report = Report {
            command: cli.cmd.name().to_string(),
            inputs_digest: digest(&cli.cmd),
            result: outcome.result,
            warnings: outcome.warnings,
            caveats: outcome.caveats,
            exit_status: code,
            error,
            stamp: cli.stamp.then(unix_stamp),
        };
        let mut stdout = serde_json::to_string_pretty(&report).expect("report serializes");
        stdout.push('\n');
        return CliOutput { code, stdout, stderr: String::new() };
    }
    match res {
        Ok(o) => {
            let mut stdout = o.text;
            for w in &o.warnings {
                stdout.push_str(&format!("warning: {w}\n"));
            }
            if cli.stamp {
                stdout.push_str(&format!("stamp: {}\n", unix_stamp()));
            }
            CliOutput { code, stdout, stderr: String::new() }
        }
        Err(e) => CliOutput { code, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
