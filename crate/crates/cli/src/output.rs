//! CSV tables with a JSON metadata record next to each.

use serde_json::json;
use std::path::{Path, PathBuf};

use crate::{Cell, CliError, Dataset, RunConfig};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(f) => format_float(*f),
        Cell::Text(s) => s.clone(),
    }
}

pub fn to_csv_bytes(ds: &Dataset) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(&ds.columns).map_err(io)?;
    for row in &ds.rows {
        w.write_record(row.iter().map(format_cell)).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

#[derive(Debug, Clone)]
pub struct RunInfo {
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub threads: usize,
}

pub fn metadata(ds: &Dataset, config: &RunConfig, info: &RunInfo) -> serde_json::Value {
    json!({
        "dataset": ds.name,
        "columns": ds.columns,
        "rows": ds.rows.len(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed,
        "threads": info.threads,
        "started_unix": info.started_unix,
        "wall_clock_seconds": info.wall_clock_seconds,
        "config": config,
        "config_text": config.to_config_text(),
        "extra": ds.extra,
    })
}

/// Writes `<name>.csv` and `<name>.json` into `dir`; returns the CSV paths.
pub fn write_all(
    dir: &Path,
    datasets: &[Dataset],
    config: &RunConfig,
    info: &RunInfo,
) -> Result<Vec<PathBuf>, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Runtime(format!("{}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut paths = Vec::new();
    for ds in datasets {
        let csv_path = dir.join(format!("{}.csv", ds.name));
        std::fs::write(&csv_path, to_csv_bytes(ds)?).map_err(|e| io(&csv_path, e))?;
        let meta_path = dir.join(format!("{}.json", ds.name));
        let text = serde_json::to_string_pretty(&metadata(ds, config, info))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(&meta_path, text + "\n").map_err(|e| io(&meta_path, e))?;
        paths.push(csv_path);
    }
    Ok(paths)
}
