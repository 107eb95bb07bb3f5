//! Result persistence: a directory with the config copy, a JSON summary and one CSV per series.

use std::fs;
use std::path::{Path, PathBuf};

use super::document::{ResultDocument, Series};
use crate::error::{Error, Result};

/// Series kinds with a documented column contract.
pub const PLOT_KINDS: &[&str] = &[
    "corner-u12-vs-r",
    "edge-coefficient",
    "refinement",
    "eigen-vs-mesh",
    "hessian-trend",
];

pub fn write_series(series: &Series, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&series.columns)?;
    for row in &series.rows {
        w.write_record(row.iter().map(|v| v.map(|x| format!("{x:e}")).unwrap_or_default()))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `config.json`, `summary.json` and `<series>.csv` for every series into `dir`.
pub fn write_result(doc: &ResultDocument, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    let cfg = dir.join("config.json");
    fs::write(&cfg, serde_json::to_string_pretty(&doc.config)?)?;
    out.push(cfg);
    let summary = dir.join("summary.json");
    fs::write(&summary, serde_json::to_string_pretty(doc)?)?;
    out.push(summary);
    for (name, s) in &doc.series {
        let p = dir.join(format!("{name}.csv"));
        write_series(s, &p)?;
        out.push(p);
    }
    Ok(out)
}

/// Writes one series as `<dir>/<kind>.csv`.
pub fn emit_plot_data(doc: &ResultDocument, kind: &str, dir: &Path) -> Result<PathBuf> {
    let s = doc.series.get(kind).ok_or_else(|| {
        Error::SeriesMissing(format!(
            "{kind} (available: {:?})",
            doc.series.keys().collect::<Vec<_>>()
        ))
    })?;
    fs::create_dir_all(dir)?;
    let p = dir.join(format!("{kind}.csv"));
    write_series(s, &p)?;
    Ok(p)
}

pub fn read_result(dir: &Path) -> Result<ResultDocument> {
    let text = fs::read_to_string(dir.join("summary.json"))?;
    Ok(serde_json::from_str(&text)?)
}
