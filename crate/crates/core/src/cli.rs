//! Command implementations behind the `spacs` binary. Argument parsing
//! lives in the binary; everything here takes plain paths and strings so it
//! can be driven from tests.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::json;

use crate::canonical;
use crate::error::Error;
use crate::scenarios::{self, ScenarioConfig, SweepParam};
use crate::verify;

/// Failure of a command, with its process exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
    pub path: Option<String>,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "usage".into(), message: message.into(), path: None }
    }

    fn io(what: &Path, err: std::io::Error) -> Self {
        Self { code: 2, kind: "io".into(), message: format!("{}: {err}", what.display()), path: None }
    }

    /// Machine-readable error object, one line.
    pub fn to_json(&self) -> String {
        let mut obj = json!({"error": {"kind": self.kind, "message": self.message, "exit_code": self.code}});
        if let Some(p) = &self.path {
            obj["error"]["path"] = json!(p);
        }
        obj.to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let path = match &e {
            Error::Config { path, .. } => Some(path.clone()),
            _ => None,
        };
        Self { code: e.exit_code(), kind: e.kind().into(), message: e.to_string(), path }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(ScenarioConfig::from_json(&text)?)
}

/// Writes `text` to `out`, or to standard output when `out` is `None` or `-`.
pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) if p != Path::new("-") => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        _ => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

pub fn simulate(config: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let report = scenarios::run(&load_config(config)?)?;
    write_output(out, &report.to_canonical_json())
}

/// Parses a comma-separated list of numbers.
pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::usage(format!("`{s}` is not a number"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(CliError::usage("no sweep values given"));
    }
    Ok(values)
}

/// Sweep output: canonical JSON with every report, or a CSV table with one
/// row per value and herald.
pub fn sweep_text(config: &ScenarioConfig, param: &str, values: &[f64], format: Format) -> Result<String, CliError> {
    let p: SweepParam = param.parse().map_err(|e: Error| CliError::usage(e.to_string()))?;
    let reports = scenarios::sweep(config, p, values)?;
    Ok(match format {
        Format::Json => {
            let doc = json!({
                "schema": "spacs-sim/sweep/v1",
                "parameter": p.name(),
                "values": values,
                "reports": reports,
            });
            canonical::to_canonical_json(&doc)
        }
        Format::Csv => {
            let mut out = String::from("value,herald,probability,defined\n");
            for (v, r) in values.iter().zip(&reports) {
                for h in &r.heralds {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        canonical::format_float(*v),
                        h.name,
                        canonical::format_float(h.probability),
                        h.defined
                    ));
                }
            }
            out
        }
    })
}

pub fn sweep(config: &Path, param: &str, values: &str, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let cfg = load_config(config)?;
    let text = sweep_text(&cfg, param, &parse_values(values)?, format)?;
    write_output(out, &text)
}

pub fn wigner(config: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let grid = scenarios::wigner_grid(&load_config(config)?)?;
    write_output(out, &grid.to_csv())
}

/// Runs the verification suite, prints the table and returns the exit status.
pub fn verify() -> i32 {
    let v = verify::run_all();
    print!("{v}");
    if v.all_passed() {
        0
    } else {
        1
    }
}

pub fn schema() -> String {
    canonical::to_canonical_json(&scenarios::config_schema())
}
