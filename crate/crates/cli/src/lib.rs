//! The `colorcenter` command line, as a library so it can be driven
//! in-process by tests.
//!
//! Exit codes: 0 success, 1 domain error (the inputs parse but the request
//! is physically or logically invalid), 2 usage, parse or I/O error.

pub mod args;
mod commands;
pub mod config;
mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::Parser;

use colorcenter::io::{decode, ParseDiagnostic, ParseResult, ReportEnvelope};

use args::{Cli, Format};
use config::{Settings, CONFIG_ENV};

pub use render::render_text;

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Located failure in an input file or argument.
    Parse { source: String, diag: ParseDiagnostic },
    Domain(String),
    Io { path: String, message: String },
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Parse { source, diag } => {
                write!(f, "{source}:{}:{}: error: {}", diag.line, diag.column, diag.message)?;
                if let Some(p) = &diag.pointer {
                    write!(f, " (at {p})")?;
                }
                Ok(())
            }
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Io { path, message } => write!(f, "{path}: error: {message}"),
        }
    }
}

pub(crate) fn domain(e: impl fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

/// Per-invocation state: resolved settings and the inputs read so far.
pub(crate) struct Ctx {
    pub settings: Settings,
    inputs: BTreeMap<String, Vec<u8>>,
}

impl Ctx {
    /// Read a UTF-8 input, remembering its fingerprint under `role`.
    pub fn read(&mut self, role: &str, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        let text = decode(&bytes).map_err(|d| parse_error(path, d))?.to_string();
        self.inputs.insert(role.to_string(), bytes);
        Ok(text)
    }

    pub fn parsed<T>(&self, path: &Path, r: ParseResult<T>) -> Result<T, CliError> {
        r.map_err(|d| parse_error(path, d))
    }
}

fn parse_error(path: &Path, diag: ParseDiagnostic) -> CliError {
    CliError::Parse { source: path.display().to_string(), diag }
}

pub(crate) struct Report {
    pub envelope: ReportEnvelope,
    /// Extra files requested by the command (path, contents).
    pub artifacts: Vec<(PathBuf, String)>,
}

fn resolve_settings(cli: &Cli, env_config: Option<PathBuf>) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = cli.global.config.clone().or(env_config) {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        s.apply_toml(&text).map_err(|(line, column, m)| parse_error(&path, ParseDiagnostic::error(line, column, m)))?;
    }
    for kv in &cli.global.set {
        s.apply_override(kv).map_err(|m| CliError::Usage(format!("--set {kv}: {m}")))?;
    }
    Ok(s)
}

fn execute(cli: &Cli, env_config: Option<PathBuf>) -> Result<String, CliError> {
    let settings = resolve_settings(cli, env_config)?;
    let mut ctx = Ctx { settings, inputs: BTreeMap::new() };
    let report = match cli.global.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n as usize)
                .build()
                .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
            pool.install(|| commands::dispatch(&cli.command, &mut ctx))?
        }
        None => commands::dispatch(&cli.command, &mut ctx)?,
    };
    let mut envelope = report.envelope.unit("policy", colorcenter::units::UNITS_POLICY);
    for (role, bytes) in &ctx.inputs {
        envelope = envelope.input(role, bytes);
    }
    for (path, contents) in &report.artifacts {
        write_file(path, contents)?;
    }
    let out = match cli.global.format {
        Format::Json => envelope.to_json(),
        Format::Text => render_text(&envelope),
    };
    match &cli.global.output {
        Some(p) => {
            write_file(p, &out)?;
            Ok(String::new())
        }
        None => Ok(out),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })
}

/// Run with the config path taken from `$COLORCENTER_CONFIG`.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, std::env::var_os(CONFIG_ENV).map(PathBuf::from))
}

/// Run with an explicit stand-in for `$COLORCENTER_CONFIG`.
pub fn run_with_env<I, T>(args: I, env_config: Option<PathBuf>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli, env_config) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome { code: e.code(), stdout: String::new(), stderr: format!("{e}\n") },
    }
}
