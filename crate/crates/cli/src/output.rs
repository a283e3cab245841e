use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::{Format, OutputArgs};
use crate::CliError;

/// Result rows plus the configuration that produced them. JSON output
/// carries everything; CSV output carries the rows only.
#[derive(Debug, Default)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub summary: Option<Value>,
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(command: &str, config: impl Serialize) -> Self {
        Self { command: command.to_string(), config: to_value(config), ..Default::default() }
    }

    pub fn columns(mut self, columns: &[&str]) -> Self {
        self.columns = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn summary(mut self, summary: impl Serialize) -> Self {
        self.summary = Some(to_value(summary));
        self
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
            .collect();
        let mut out = Map::new();
        out.insert("command".into(), Value::String(self.command.clone()));
        out.insert("config".into(), self.config.clone());
        if let Some(s) = &self.summary {
            out.insert("summary".into(), s.clone());
        }
        out.insert("rows".into(), Value::Array(rows));
        Value::Object(out)
    }

    pub fn write(&self, output: &OutputArgs) -> Result<(), CliError> {
        with_writer(output.out.as_deref(), |w| match output.format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &self.to_json()).map_err(io::Error::from)?;
                writeln!(w)
            }
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(w);
                csv.write_record(&self.columns)?;
                for row in &self.rows {
                    csv.write_record(row.iter().map(cell))?;
                }
                csv.flush()
            }
        })
    }
}

pub fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Runs `f` against the file at `path`, or standard output.
pub fn with_writer<F>(path: Option<&Path>, f: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let result = match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush())
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w).and_then(|_| w.flush())
        }
    };
    match result {
        // a closed pipe (`sentlin ... | head`) is not a failure
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| CliError::Runtime(format!("writing output: {e}"))),
    }
}
