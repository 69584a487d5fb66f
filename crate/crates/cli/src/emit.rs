//! Deterministic serialization of report bundles.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::report::{Cell, ReportBundle, Series, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Plotdata,
}

/// Decimal with 17 significant digits, which round-trips every double.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Num(x) => format_number(*x),
        Cell::Text(s) => s.clone(),
        Cell::Missing => String::new(),
    }
}

pub fn render_json(bundle: &ReportBundle) -> String {
    let mut s = serde_json::to_string_pretty(bundle).expect("report bundles always serialize");
    s.push('\n');
    s
}

pub fn render_csv(table: &Table) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(format_cell))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn render_plotdata(series: &Series) -> String {
    let mut s = format!(
        "# {}\n# {} {}\n",
        series.label, series.x_label, series.y_label
    );
    for &(x, y) in &series.points {
        s.push_str(&format_number(x));
        s.push(' ');
        s.push_str(&format_number(y));
        s.push('\n');
    }
    s
}

/// File name and contents of every output file for `format`.
pub fn render(bundle: &ReportBundle, format: Format) -> Vec<(String, String)> {
    match format {
        Format::Json => vec![("report.json".to_string(), render_json(bundle))],
        Format::Csv => bundle
            .tables
            .iter()
            .map(|t| (format!("{}.csv", t.name), render_csv(t)))
            .collect(),
        Format::Plotdata => bundle
            .series
            .iter()
            .map(|s| (format!("{}.dat", s.label), render_plotdata(s)))
            .collect(),
    }
}

/// Write the bundle into directory `out`, or to stdout when `out` is `None`.
/// Returns the paths written.
pub fn emit(bundle: &ReportBundle, format: Format, out: Option<&Path>) -> CliResult<Vec<PathBuf>> {
    let files = render(bundle, format);
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            files
                .into_iter()
                .map(|(name, contents)| {
                    let path = dir.join(name);
                    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
                    Ok(path)
                })
                .collect()
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let single = files.len() == 1;
            for (name, contents) in files {
                let result = if single {
                    lock.write_all(contents.as_bytes())
                } else {
                    writeln!(lock, "## {name}").and_then(|_| lock.write_all(contents.as_bytes()))
                };
                result.map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
            }
            Ok(Vec::new())
        }
    }
}
