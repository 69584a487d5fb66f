//! Structured experiment output.

use blaschke_lab::{Complex64, CriterionReport, DiskPoint, IterationTrace, PerturbationReport};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    /// The configuration with every default and generated seed filled in.
    pub config: ExperimentConfig,
    pub results: Results,
    pub tables: Vec<Table>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Results {
    Criteria(CriteriaResults),
    Interpolate(InterpolateResults),
    Union(UnionResults),
    Nearby(NearbyResults),
    Perturb(PerturbResults),
    Shift(ShiftResults),
}

/// Criterion values at one truncation length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaRow {
    pub n: usize,
    pub carleson: f64,
    pub frostman: f64,
    pub frostman_arg: f64,
    pub cohn: f64,
    pub vasyunin: f64,
    pub dyakonov: f64,
    pub cross_modulus: Option<f64>,
    pub separation: Option<f64>,
    pub nearness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaResults {
    pub rows: Vec<CriteriaRow>,
    /// Full reports at the largest truncation.
    pub reports: Vec<CriterionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolateResults {
    pub n: usize,
    pub points: Vec<DiskPoint>,
    pub targets: Vec<Complex64>,
    pub values_at_nodes: Vec<Complex64>,
    pub max_node_error: f64,
    pub within_tolerance: bool,
    pub kernel_coeffs: Option<Vec<Complex64>>,
    pub kernel_residual: Option<f64>,
    pub sup_norm: f64,
    pub lebesgue_constant: f64,
    pub dyakonov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnionResults {
    pub n: usize,
    pub separation: f64,
    pub tilde_gamma: Vec<Complex64>,
    pub values_at_a: Vec<Complex64>,
    pub values_at_z: Vec<Complex64>,
    /// `|G₂(a_j)|`, which vanishes structurally.
    pub g2_at_a: Vec<f64>,
    /// `|G₁(z_j)|`, which vanishes structurally.
    pub g1_at_z: Vec<f64>,
    pub max_node_error: f64,
    pub within_tolerance: bool,
    /// Largest difference from the interpolant on the merged product over
    /// the plot samples.
    pub merged_difference: f64,
    pub sup_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearbyResults {
    pub n: usize,
    pub z: Vec<DiskPoint>,
    pub trace: IterationTrace,
    pub values_at_z: Vec<Complex64>,
    pub max_node_error: f64,
    pub sup_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbTrial {
    pub radius: f64,
    pub trial: usize,
    pub seed: u64,
    pub nearness: f64,
    pub report: PerturbationReport,
}

/// Extremes of the per-trial reports at one radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbSummary {
    pub radius: f64,
    pub c_r: f64,
    pub trials: usize,
    pub violations: usize,
    pub pseudo_violations: usize,
    pub envelope_failures: usize,
    pub min_d1: f64,
    pub max_d2: f64,
    pub min_c1: f64,
    pub max_c2: f64,
    pub min_c3: f64,
    pub min_c4: f64,
    pub max_frostman_z: f64,
    /// `min D₁ ≥ 1/C_r` and `max D₂ ≤ C_r` up to the hard slack.
    pub d_bounds_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbResults {
    pub n: usize,
    pub frostman_a: f64,
    pub summaries: Vec<PerturbSummary>,
    pub trials: Vec<PerturbTrial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftResults {
    pub n: usize,
    pub shift: DiskPoint,
    pub roots: Vec<DiskPoint>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub frostman_before: f64,
    pub frostman_after: f64,
}

/// One cell of a flat table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// A criterion report as `index, value` rows plus a summary row.
    pub fn from_report(report: &CriterionReport) -> Self {
        let mut t = Table::new(
            format!("report_{}", report.name.as_str()),
            &["index", "value"],
        );
        for (i, &v) in report.per_index.iter().enumerate() {
            t.push(vec![i.into(), v.into()]);
        }
        t.push(vec!["summary".into(), report.value.into()]);
        t
    }
}

/// A labelled `(x, y)` series for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(
        label: impl Into<String>,
        x_label: &str,
        y_label: &str,
        points: Vec<(f64, f64)>,
    ) -> Self {
        Series {
            label: label.into(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            points,
        }
    }
}
