//! Plot-ready data files. CSV files open with `#` comment lines giving the
//! schema version, units, conventions and the resolved parameter set, then a
//! single column-name row. Nothing time- or host-dependent is written, so
//! identical configs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{Format, ParamsConfig, Quantity, RunConfig, SCHEMA_VERSION};
use crate::error::{CliError, Result};
use crate::sweep::OutputRecord;

pub const UNITS: &str = "frequencies are value/2pi in MHz; times in ns; phases in rad; E_N in nats";
pub const CONVENTIONS: &str =
    "symmetric-ordered characteristic functions; beta = (x + i p)/sqrt(2); W normalized over dx dp";

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v.is_nan() {
        "nan".into()
    } else if a == 0.0 || (1e-4..1e7).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), fmt_f64)
}

/// Header lines shared by every file: schema, units and resolved parameters.
pub fn common_header(title: &str, cfg: &RunConfig) -> Vec<String> {
    let params = serde_json::to_string(&cfg.params.resolved()).expect("params serialize");
    let mut lines = vec![
        format!("magtele {title}"),
        format!("schema_version: {SCHEMA_VERSION}"),
        format!("generator: magtele {}", env!("CARGO_PKG_VERSION")),
        format!("units: {UNITS}"),
        format!("conventions: {CONVENTIONS}"),
        format!("params: {params}"),
        format!("input: {}", serde_json::to_string(&cfg.input).expect("input serializes")),
        format!("cutoff: {}", cfg.cutoff),
        format!("tmsv_uses_reduced_lambda: {}", cfg.tmsv_uses_reduced_lambda),
    ];
    if let Some(meta) = &cfg.metadata {
        lines.push(format!("metadata: {meta}"));
    }
    lines
}

pub fn write_csv(path: &Path, header: &[String], columns: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut buf = String::new();
    for line in header {
        buf.push_str("# ");
        buf.push_str(line);
        buf.push('\n');
    }
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut push = |rec: &[String]| w.write_record(rec).map_err(|e| CliError::io(path, e.into()));
    push(columns)?;
    for row in rows {
        push(row)?;
    }
    let body = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    buf.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    write_file(path, buf.as_bytes())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("dataset serializes");
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct AxisInfo {
    name: &'static str,
    unit: &'static str,
}

#[derive(Serialize)]
struct SweepDataset<'a> {
    schema_version: u32,
    dataset: &'a str,
    quantity: Quantity,
    units: &'static str,
    conventions: &'static str,
    axis: Option<AxisInfo>,
    params: ParamsConfig,
    input: &'a magtele::InputStateSpec,
    cutoff: usize,
    quadrature: &'a magtele::QuadratureSettings,
    tmsv_uses_reduced_lambda: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    metadata: Option<&'a serde_json::Value>,
    records: &'a [OutputRecord],
}

fn quantity_prefix(q: Quantity) -> &'static str {
    match q {
        Quantity::Fidelity => "F",
        Quantity::Entanglement => "E_N",
    }
}

/// Writes `<stem>.csv` and/or `<stem>.json` in `dir`.
pub fn write_sweep(cfg: &RunConfig, records: &[OutputRecord], dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if cfg.formats.contains(&Format::Csv) {
        let path = dir.join(format!("{stem}.csv"));
        let mut header = common_header(stem, cfg);
        header.push(format!("quantity: {}", quantity_prefix(cfg.quantity)));
        if let Some(s) = &cfg.sweep {
            header.push(format!("sweep: {} from {} to {} in {} points [{}]", s.axis.name(), s.start, s.stop, s.points, s.axis.unit()));
        }
        header.push("value columns hold the closed form unless it is flagged, then the quadrature oracle".into());
        let mut warnings: Vec<(&str, Vec<usize>)> = Vec::new();
        for rec in records {
            for w in &rec.warnings {
                match warnings.iter_mut().find(|(text, _)| text == w) {
                    Some((_, idx)) => idx.push(rec.index),
                    None => warnings.push((w, vec![rec.index])),
                }
            }
        }
        for (text, idx) in warnings {
            let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            header.push(format!("warning at index {}: {text}", idx.join(" ")));
        }
        let axis = cfg.sweep.as_ref().map_or("point", |s| s.axis.name());
        let mut columns: Vec<String> =
            ["index", axis, "r", "lambda", "theta", "lambda_prime", "gamma", "p_sub"].iter().map(|s| s.to_string()).collect();
        let q = quantity_prefix(cfg.quantity);
        for r in &cfg.resources {
            for suffix in ["", "_analytic", "_oracle", "_difference", "_flagged", "_method"] {
                columns.push(format!("{q}_{}{suffix}", r.name()));
            }
        }
        let rows: Vec<Vec<String>> = records
            .iter()
            .map(|rec| {
                let d = &rec.derived;
                let mut row = vec![
                    rec.index.to_string(),
                    fmt_f64(rec.sweep_value.unwrap_or(rec.index as f64)),
                    fmt_f64(d.r),
                    fmt_f64(d.lambda),
                    fmt_f64(d.theta),
                    fmt_f64(d.lambda_prime),
                    fmt_f64(d.gamma),
                    fmt_f64(d.p_sub),
                ];
                for res in &rec.results {
                    row.push(fmt_f64(res.value));
                    row.push(fmt_opt(res.analytic));
                    row.push(fmt_opt(res.oracle));
                    row.push(fmt_opt(res.difference));
                    row.push(u8::from(res.flagged).to_string());
                    row.push(serde_json::to_value(res.method).expect("method").as_str().unwrap_or("").to_string());
                }
                row
            })
            .collect();
        write_csv(&path, &header, &columns, &rows)?;
        written.push(path);
    }
    if cfg.formats.contains(&Format::Json) {
        let path = dir.join(format!("{stem}.json"));
        let dataset = SweepDataset {
            schema_version: SCHEMA_VERSION,
            dataset: stem,
            quantity: cfg.quantity,
            units: UNITS,
            conventions: CONVENTIONS,
            axis: cfg.sweep.as_ref().map(|s| AxisInfo { name: s.axis.name(), unit: s.axis.unit() }),
            params: cfg.params.resolved(),
            input: &cfg.input,
            cutoff: cfg.cutoff,
            quadrature: &cfg.quadrature,
            tmsv_uses_reduced_lambda: cfg.tmsv_uses_reduced_lambda,
            metadata: cfg.metadata.as_ref(),
            records,
        };
        write_json(&path, &dataset)?;
        written.push(path);
    }
    Ok(written)
}
