//! Output paths, table writers and the metadata sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use qwalk_thermo::output::fmt_f64;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub fn resolve_out(out: Option<&Path>, stem: &str, format: Format) -> PathBuf {
    out.map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", format.extension())))
}

/// `envelope.csv` becomes `envelope.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

pub fn finish(path: &Path, mut w: BufWriter<File>) -> Result<(), CliError> {
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(path, e.into()))?;
    writeln!(w).map_err(|e| CliError::io(path, e))?;
    finish(path, w)
}

/// JSON stand-in for a float that may be infinite.
pub fn extended(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(fmt_f64(x))
    }
}

/// Writes rows of flat records either as CSV (header from the first row's
/// field order) or as a JSON array.
pub fn write_table<T: Serialize>(path: &Path, rows: &[T], format: Format) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let mut w = create(path)?;
            serde_json::to_writer(&mut w, rows).map_err(|e| CliError::io(path, e.into()))?;
            writeln!(w).map_err(|e| CliError::io(path, e))?;
            finish(path, w)
        }
        Format::Csv => {
            let mut w = create(path)?;
            let io = |e| CliError::io(path, e);
            let mut header_written = false;
            for row in rows {
                let Value::Object(map) = serde_json::to_value(row).expect("rows are records")
                else {
                    unreachable!("table rows serialize to objects")
                };
                if !header_written {
                    let names: Vec<&str> = map.keys().map(String::as_str).collect();
                    writeln!(w, "{}", names.join(",")).map_err(io)?;
                    header_written = true;
                }
                let cells: Vec<String> = map.values().map(csv_cell).collect();
                writeln!(w, "{}", cells.join(",")).map_err(io)?;
            }
            finish(path, w)
        }
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => fmt_f64(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "nan".to_string(),
        other => other.to_string(),
    }
}

#[derive(Serialize)]
struct Meta<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    outputs: Vec<String>,
}

/// `<out>.meta.json` next to the primary output.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".meta.json");
    out.with_file_name(name)
}

pub fn write_meta<C: Serialize>(
    primary: &Path,
    command: &str,
    config: &C,
    outputs: &[&Path],
) -> Result<(), CliError> {
    let meta = Meta {
        tool: "qwalk-thermo",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config,
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    write_json(&meta_path(primary), &meta)
}
