//! Versioned JSON envelopes and CSV helpers for command output.

use std::path::Path;

use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::error::{Error, Result};
use crate::rank1::StateVector;

/// Bumped on any change to a JSON field or CSV column.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    config_hash: String,
    config: &'a RunConfig,
    result: &'a T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvFile {
    pub name: String,
    pub content: String,
}

/// Everything a command emits; the binary decides where it goes.
#[derive(Clone, Debug)]
pub struct CommandOutput {
    pub command: Command,
    pub json: String,
    pub csv: Vec<CsvFile>,
}

impl CommandOutput {
    pub fn new<T: Serialize>(command: Command, config: &RunConfig, result: &T) -> Result<Self> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.name(),
            config_hash: config.hash(),
            config,
            result,
        };
        let mut json = serde_json::to_string_pretty(&env).map_err(|e| Error::Numeric(e.to_string()))?;
        json.push('\n');
        Ok(Self { command, json, csv: Vec::new() })
    }

    pub fn with_csv(mut self, name: &str, content: String) -> Self {
        self.csv.push(CsvFile { name: name.into(), content });
        self
    }

    /// The CSV printed for `--format csv`: the first one registered.
    pub fn primary_csv(&self) -> Option<&CsvFile> {
        self.csv.first()
    }

    /// Writes `<command>.json` and every CSV into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.json", self.command.name())), &self.json)?;
        for f in &self.csv {
            std::fs::write(dir.join(&f.name), &f.content)?;
        }
        Ok(())
    }
}

pub fn csv_string<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Numeric(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// `j,x_j,re,im` rows of a state.
pub fn state_csv(state: &StateVector) -> Result<String> {
    csv_string(
        &["j", "x_j", "re", "im"],
        state.amplitudes.iter().enumerate().map(|(j, a)| {
            vec![j.to_string(), state.grid.x(j).to_string(), a.re.to_string(), a.im.to_string()]
        }),
    )
}
