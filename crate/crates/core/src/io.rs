//! File formats: graph JSON, signal CSV, filter JSON and sweep CSV.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::filters::{FilterFile, FilterSpec};
use crate::graph::Graph;
use crate::linalg::Cx;
use crate::stability::StabilityRecord;

pub const SWEEP_HEADER: &str = "magnitude_target,trial,norm_E,rel_norm_E,norm_shift,op_err,bound,seminorm,mean_rel_signal_err,max_rel_signal_err,trial_seed";

/// Lossless decimal form of `x`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    coords: Option<Vec<[f64; 2]>>,
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let file: GraphFile = serde_json::from_str(text)?;
    Graph::from_edges(file.n, &file.edges, file.coords)
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    parse_graph(&fs::read_to_string(path)?)
}

/// `{"n": .., "edges": [[i, j, w], ..], "coords": [[x, y], ..]}` with `i < j`.
pub fn graph_to_json(g: &Graph) -> String {
    let mut out = format!("{{\n  \"n\": {},\n  \"edges\": [", g.n());
    for (k, (i, j, w)) in g.edges().into_iter().enumerate() {
        let sep = if k == 0 { "\n" } else { ",\n" };
        let _ = write!(out, "{sep}    [{i}, {j}, {}]", fmt_f64(w));
    }
    out.push_str("\n  ]");
    if let Some(coords) = g.coords() {
        out.push_str(",\n  \"coords\": [");
        for (k, [x, y]) in coords.iter().enumerate() {
            let sep = if k == 0 { "\n" } else { ",\n" };
            let _ = write!(out, "{sep}    [{}, {}]", fmt_f64(*x), fmt_f64(*y));
        }
        out.push_str("\n  ]");
    }
    out.push_str("\n}\n");
    out
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    Ok(fs::write(path, graph_to_json(g))?)
}

/// One signal per row, `n` comma-separated decimals each. With `n = None`
/// the first row fixes the width. An empty input yields no signals.
pub fn parse_signals(text: &str, n: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let mut width = n;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        let malformed = |reason: String| Error::MalformedRow {
            line: line_no,
            reason,
        };
        if line.is_empty() {
            return Err(malformed("empty row".into()));
        }
        let row = line
            .split(',')
            .map(|field| {
                let field = field.trim();
                field
                    .parse::<f64>()
                    .map_err(|_| malformed(format!("{field:?} is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let want = *width.get_or_insert(row.len());
        if row.len() != want {
            return Err(malformed(format!(
                "expected {want} values, found {}",
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_signals(path: &Path, n: Option<usize>) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    parse_signals(text.trim_end_matches(['\n', '\r']), n)
}

/// Rows of real parts, or interleaved `re,im` pairs when `complex` is set.
pub fn signals_to_csv(rows: &[Vec<Cx>], complex: bool) -> String {
    let mut out = String::new();
    for row in rows {
        let fields: Vec<String> = if complex {
            row.iter()
                .flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)])
                .collect()
        } else {
            row.iter().map(|z| fmt_f64(z.re)).collect()
        };
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_signals(path: &Path, rows: &[Vec<Cx>], complex: bool) -> Result<()> {
    Ok(fs::write(path, signals_to_csv(rows, complex))?)
}

pub fn load_filter(path: &Path) -> Result<FilterSpec> {
    let file: FilterFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.into_spec()
}

pub fn write_filter(path: &Path, spec: &FilterSpec) -> Result<()> {
    let text = serde_json::to_string_pretty(&FilterFile::from(spec))?;
    Ok(fs::write(path, text + "\n")?)
}

pub fn write_sweep_csv(out: &mut impl Write, records: &[StabilityRecord]) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.magnitude_target),
            r.trial,
            fmt_f64(r.norm_e),
            fmt_f64(r.rel_norm_e),
            fmt_f64(r.norm_shift),
            fmt_f64(r.op_err),
            fmt_f64(r.bound),
            fmt_f64(r.seminorm),
            fmt_f64(r.mean_rel_signal_err),
            fmt_f64(r.max_rel_signal_err),
            r.trial_seed
        )?;
    }
    Ok(())
}
