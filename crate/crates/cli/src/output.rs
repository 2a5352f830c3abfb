use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use epicongress::{Error, Result};

use crate::args::OutFormat;

/// Data produced by a command, before formatting.
pub enum Data {
    /// A single result; csv flattens it into one row.
    Record(Value),
    /// Header and rows.
    Table(Vec<String>, Vec<Vec<Value>>),
    /// Preformatted csv alongside its json form, for tables whose csv
    /// layout is fixed elsewhere.
    Prebuilt { csv: Vec<u8>, json: Value },
}

impl Data {
    pub fn record<T: Serialize>(v: &T) -> Result<Self> {
        Ok(Data::Record(to_value(v)?))
    }

    pub fn table<T: Serialize>(rows: &[T]) -> Result<Self> {
        let rows: Vec<Value> = rows.iter().map(to_value).collect::<Result<_>>()?;
        let header: Vec<String> = match rows.first() {
            Some(Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        };
        let cells = rows
            .iter()
            .map(|row| header.iter().map(|h| row[h].clone()).collect())
            .collect();
        Ok(Data::Table(header, cells))
    }
}

/// serde_json turns NaN and infinities into null. No output field is
/// optional, so any null means a non-finite number leaked.
fn check_finite(v: &Value, path: &str) -> Result<()> {
    match v {
        Value::Null => Err(Error::Numerical(format!("non-finite value at {path}"))),
        Value::Array(xs) => xs
            .iter()
            .enumerate()
            .try_for_each(|(i, x)| check_finite(x, &format!("{path}[{i}]"))),
        Value::Object(m) => m
            .iter()
            .try_for_each(|(k, x)| check_finite(x, &format!("{path}.{k}"))),
        _ => Ok(()),
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    let v = serde_json::to_value(v).map_err(|e| Error::Numerical(e.to_string()))?;
    check_finite(&v, "$")?;
    Ok(v)
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

fn write_csv(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(io::Error::other(e));
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(io::Error::other(e.to_string())))
}

pub fn render(data: &Data, format: OutFormat) -> Result<Vec<u8>> {
    let json = |v: &Value| -> Result<Vec<u8>> {
        let mut bytes =
            serde_json::to_vec_pretty(v).map_err(|e| Error::Numerical(e.to_string()))?;
        bytes.push(b'\n');
        Ok(bytes)
    };
    match (data, format) {
        (Data::Record(v), OutFormat::Json) => json(v),
        (Data::Record(v), OutFormat::Csv) => {
            let mut pairs = Vec::new();
            flatten("", v, &mut pairs);
            let (header, row): (Vec<String>, Vec<String>) = pairs.into_iter().unzip();
            write_csv(&header, &[row])
        }
        (Data::Table(header, rows), OutFormat::Json) => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|r| Value::Object(header.iter().cloned().zip(r.iter().cloned()).collect()))
                .collect();
            json(&Value::Array(objects))
        }
        (Data::Table(header, rows), OutFormat::Csv) => {
            let rows: Vec<Vec<String>> =
                rows.iter().map(|r| r.iter().map(cell).collect()).collect();
            write_csv(header, &rows)
        }
        (Data::Prebuilt { json: v, .. }, OutFormat::Json) => json(v),
        (Data::Prebuilt { csv, .. }, OutFormat::Csv) => Ok(csv.clone()),
    }
}

/// What was run, so that a result can be reproduced.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    pub format: OutFormat,
    pub parameters: Value,
    pub duration_secs: f64,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes the data to `output` (or stdout) and the manifest beside it (or
/// to stderr).
pub fn emit(bytes: &[u8], manifest: &RunManifest, output: Option<&Path>) -> Result<()> {
    let manifest_json =
        serde_json::to_string_pretty(manifest).map_err(|e| Error::Numerical(e.to_string()))?;
    match output {
        Some(path) => {
            File::create(path)?.write_all(bytes)?;
            let mut m = File::create(manifest_path(path))?;
            m.write_all(manifest_json.as_bytes())?;
            m.write_all(b"\n")?;
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            let compact =
                serde_json::to_string(manifest).map_err(|e| Error::Numerical(e.to_string()))?;
            eprintln!("manifest: {compact}");
        }
    }
    Ok(())
}
