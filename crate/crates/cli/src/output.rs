use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Failure, Outcome};

/// A CSV table with a fixed header.
#[derive(Debug)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: ToString>(header: &[S]) -> Table {
        Table { header: header.iter().map(ToString::to_string).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip decimal, switching to exponent form for very large
/// or small magnitudes. Non-finite values print as `inf`, `-inf`, `nan`.
pub fn num(x: f64) -> String {
    if x == 0.0 || (1e-4..1e15).contains(&x.abs()) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// What a command produced. `exit` is nonzero when the command ran to the
/// end but the result itself is a failure (a rejected potential, an oracle
/// disagreement); the artifact is still written.
#[derive(Debug)]
pub struct Artifact {
    pub json: Value,
    pub table: Option<Table>,
    /// Extra sidecar entries.
    pub meta: Map<String, Value>,
    pub exit: u8,
    /// Human summary for stderr.
    pub notes: Vec<String>,
}

impl Artifact {
    pub fn json(json: Value) -> Artifact {
        Artifact { json, table: None, meta: Map::new(), exit: 0, notes: Vec::new() }
    }

    pub fn with_table(mut self, table: Table) -> Artifact {
        self.table = Some(table);
        self
    }

    /// The data file contents in `format` (CSV when a table exists, else JSON, by default).
    pub fn render(&self, format: Option<Format>) -> Outcome<(Format, String)> {
        let format = format.unwrap_or(if self.table.is_some() { Format::Csv } else { Format::Json });
        match format {
            Format::Csv => match &self.table {
                Some(t) => Ok((format, t.render())),
                None => Err(Failure::Validation("this command has no CSV output; use --format json".into())),
            },
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| Failure::Io(e.to_string()))?;
                s.push('\n');
                Ok((format, s))
            }
        }
    }
}

pub fn write_file(path: &Path, contents: &str) -> Outcome<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// `<out>.meta.json`
pub fn sidecar_path(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    name.into()
}
