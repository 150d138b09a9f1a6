//! Report envelope and output routing.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::{CliError, CliResult, GlobalArgs};

/// The JSON document every command produces.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    /// Which result of the underlying theory the run exercises.
    pub anchor: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub game: Value,
    pub params: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &'static str, anchor: &'static str, seed: u64) -> Self {
        Report { command, anchor, seed, game: Value::Null, params: json!({}), result: Value::Null, elapsed_ms: None }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are always serializable");
        s.push('\n');
        s
    }
}

/// Everything a command produced.
#[derive(Clone, Debug)]
pub struct Output {
    pub report: Report,
    pub csv: Option<String>,
    /// File content for `gen`, written in place of the report.
    pub artifact: Option<String>,
    /// One-line human summary.
    pub summary: String,
}

impl Output {
    pub fn new(report: Report, summary: String) -> Self {
        Output { report, csv: None, artifact: None, summary }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_artifact(mut self, artifact: String) -> Self {
        self.artifact = Some(artifact);
        self
    }

    pub(crate) fn set_elapsed(&mut self, ms: f64) {
        self.report.elapsed_ms = Some(ms);
    }

    pub(crate) fn write(&self, global: &GlobalArgs) -> CliResult<()> {
        let json = self.report.to_json();
        match (&self.artifact, &global.out) {
            (Some(artifact), Some(path)) => {
                write_file(path, artifact)?;
                if global.json {
                    print!("{json}");
                } else if !global.quiet {
                    println!("{}", self.summary);
                }
            }
            (Some(artifact), None) => {
                print!("{artifact}");
                if !artifact.ends_with('\n') {
                    println!();
                }
            }
            (None, Some(path)) => {
                write_file(path, &json)?;
                if global.json {
                    print!("{json}");
                } else if !global.quiet {
                    println!("{}", self.summary);
                }
            }
            (None, None) => print!("{json}"),
        }
        if let Some(csv) = &self.csv {
            let target = global.csv.clone().or_else(|| global.out.as_ref().map(|p| p.with_extension("csv")));
            if let (Some(path), None) = (target, &self.artifact) {
                write_file(&path, csv)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn write_file(path: &Path, content: &str) -> CliResult<()> {
    std::fs::write(path, content).map_err(|source| CliError::Io { path: PathBuf::from(path), source })
}

pub(crate) fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: PathBuf::from(path), source })
}

pub(crate) fn to_value<S: Serialize>(value: &S) -> Value {
    serde_json::to_value(value).expect("report values are always serializable")
}
