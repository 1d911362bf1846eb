use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::CliError;
use crate::Format;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "DIMER_EXPANSION_OUT_DIR";

/// A flat table for CSV output.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub result: Value,
    pub table: Option<Table>,
}

impl Report {
    pub fn json(result: Value) -> Self {
        Self {
            result,
            table: None,
        }
    }
}

pub fn manifest(command: &str, config: Value) -> Value {
    json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
    })
}

/// Renders the report; keys come out sorted because `serde_json` maps are
/// ordered.
pub fn render(
    command: &str,
    config: Value,
    report: Report,
    format: Format,
) -> Result<String, CliError> {
    let manifest = manifest(command, config);
    match format {
        Format::Json => {
            let doc = json!({ "manifest": manifest, "result": report.result });
            Ok(serde_json::to_string_pretty(&doc).expect("values always serialize") + "\n")
        }
        Format::Csv => {
            let table = report.table.ok_or_else(|| {
                CliError::Config(format!("csv output is not available for `{command}`"))
            })?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers).map_err(csv_err)?;
            for row in &table.rows {
                w.write_record(row).map_err(csv_err)?;
            }
            let body =
                String::from_utf8(w.into_inner().map_err(|e| csv_err(e.into_error().into()))?)
                    .expect("csv output is utf-8");
            Ok(format!("# manifest: {manifest}\n{body}"))
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Config(format!("csv: {e}"))
}

/// `--out`, else `$DIMER_EXPANSION_OUT_DIR/<command>.<ext>`, else stdout.
pub fn destination(out: Option<&Path>, command: &str, format: Format) -> Option<PathBuf> {
    if let Some(p) = out {
        return Some(p.to_path_buf());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
    let ext = match format {
        Format::Json => "json",
        Format::Csv => "csv",
    };
    Some(PathBuf::from(dir).join(format!("{command}.{ext}")))
}

pub fn write(dest: Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match dest {
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "stdout".into(),
                    source,
                })?;
        }
        Some(path) => {
            let io = |source| CliError::Io {
                path: path.display().to_string(),
                source,
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(io)?;
            }
            fs::write(&path, text).map_err(io)?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}
