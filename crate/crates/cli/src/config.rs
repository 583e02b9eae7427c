use std::fmt;
use std::path::Path;

use serde::Serialize;

use lipminor::levy::LevyModel;
use lipminor::Error;

use crate::{Cli, ModelArgs};

pub const SCHEMA: u32 = 1;

/// Provenance written into every output: the parsed command line and the library version.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a> {
    pub schema: u32,
    pub library_version: &'static str,
    pub threads: usize,
    #[serde(flatten)]
    pub cli: &'a Cli,
}

impl<'a> RunConfig<'a> {
    pub fn new(cli: &'a Cli) -> Self {
        RunConfig {
            schema: SCHEMA,
            library_version: env!("CARGO_PKG_VERSION"),
            threads: rayon::current_num_threads(),
            cli,
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("run config serialises")
    }
}

/// Caps the worker pool at `LIPMINOR_THREADS` when set.
pub fn init_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("LIPMINOR_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("LIPMINOR_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("cannot configure {n} worker threads: {e}")))
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input: parse errors, invalid parameters, unreadable files.
    Input(String),
    /// A computation did not reach a trustworthy answer.
    Numerical(String),
    /// Checks ran and at least one failed.
    Acceptance(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Acceptance(_) => 1,
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Numerical(m) | Failure::Acceptance(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::Contaminated(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Model from `--model` (inline JSON if it starts with `{`, else a file) or
/// unit-variance Brownian motion with drift `--beta`.
pub fn load_model(args: &ModelArgs) -> Result<LevyModel, Failure> {
    match (&args.model, args.beta) {
        (Some(spec), _) => {
            let text = if spec.trim_start().starts_with('{') {
                spec.clone()
            } else {
                std::fs::read_to_string(spec).map_err(|e| Failure::Input(format!("cannot read model file {spec}: {e}")))?
            };
            LevyModel::from_json(&text).map_err(|e| Failure::Input(format!("model: {e}")))
        }
        (None, beta) => Ok(LevyModel::brownian(1.0, beta.unwrap_or(0.0))),
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Writes `<path>.json` next to a CSV output.
pub fn write_sidecar(csv_path: &Path, provenance: &serde_json::Value) -> Result<(), Failure> {
    let mut name = csv_path.as_os_str().to_owned();
    name.push(".json");
    write_json(Path::new(&name), &serde_json::json!({ "provenance": provenance }))
}
