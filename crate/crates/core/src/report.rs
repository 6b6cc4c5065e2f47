//! Analysis reports: one summary block plus one metric row per subsample.
//!
//! JSON carries full precision (shortest round-trip floats); the text table
//! prints six significant digits. λ is stored on [0, 1] and additionally
//! rendered ×10⁴.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::freqtable::{Fraction, FrequencyTable, ProportionMode, SubsampleSpec, TableSummary};
use crate::metrics::{suite_of, MetricKind, MetricSuite};
use crate::stats::{correlate_metric_vs_richness, CorrelationResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Scale applied to λ for the conventional ×10⁴ rendering.
pub const LAMBDA_SCALE: f64 = 1e4;

/// Fractions used when none are requested: full sample, top quintile, top decile.
pub const DEFAULT_FRACTIONS: [Fraction; 3] = [Fraction::ONE, Fraction::QUINTILE, Fraction::DECILE];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub dataset_name: String,
    pub summary: TableSummary,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub fraction: Fraction,
    pub mode: ProportionMode,
    /// Contributors retained in this subsample.
    pub richness: usize,
    pub shannon_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shannon_j: Option<f64>,
    pub brillouin_h: f64,
    pub simpson_lambda: f64,
    pub simpson_lambda_e4: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcintosh_e: Option<f64>,
    pub e_var: f64,
}

impl ReportRow {
    pub fn new(spec: SubsampleSpec, richness: usize, suite: MetricSuite) -> Self {
        ReportRow {
            fraction: spec.fraction,
            mode: spec.mode,
            richness,
            shannon_h: suite.shannon_h,
            shannon_j: suite.shannon_j,
            brillouin_h: suite.brillouin_h,
            simpson_lambda: suite.simpson_lambda,
            simpson_lambda_e4: suite.simpson_lambda * LAMBDA_SCALE,
            mcintosh_e: suite.mcintosh_e,
            e_var: suite.e_var,
        }
    }

    pub fn suite(&self) -> MetricSuite {
        MetricSuite {
            shannon_h: self.shannon_h,
            shannon_j: self.shannon_j,
            brillouin_h: self.brillouin_h,
            simpson_lambda: self.simpson_lambda,
            mcintosh_e: self.mcintosh_e,
            e_var: self.e_var,
        }
    }
}

impl AnalysisReport {
    /// Evaluates every subsample of `table`, one row per spec in the given order.
    pub fn build(
        dataset_name: impl Into<String>,
        table: &FrequencyTable,
        specs: &[SubsampleSpec],
        exec: Execution,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for spec in specs {
            if !seen.insert(spec.fraction) {
                return Err(Error::DuplicateFraction(spec.fraction.to_string()));
            }
        }
        let rows = exec.map(specs, |&spec| {
            let sub = table.top_fraction(spec);
            ReportRow::new(spec, sub.table().richness(), suite_of(&sub, exec))
        });
        Ok(AnalysisReport {
            schema_version: SCHEMA_VERSION,
            dataset_name: dataset_name.into(),
            summary: table.summary(),
            rows,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: AnalysisReport = serde_json::from_str(text).map_err(|e| Error::Parse {
            row: e.line(),
            message: e.to_string(),
        })?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse {
                row: 1,
                message: format!("unsupported schema_version {}", report.schema_version),
            });
        }
        Ok(report)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One CSV row per subsample; undefined indices are empty cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "fraction,mode,richness,shannon_h,shannon_j,brillouin_h,simpson_lambda,simpson_lambda_e4,mcintosh_e,e_var\n",
        );
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                row.fraction,
                row.mode,
                row.richness,
                row.shannon_h,
                opt(row.shannon_j),
                row.brillouin_h,
                row.simpson_lambda,
                row.simpson_lambda_e4,
                opt(row.mcintosh_e),
                row.e_var,
            );
        }
        out
    }

    /// Human-readable rendering: a summary line, then H′, λ×10⁴ and E_var
    /// side by side for each subsample, then the remaining indices.
    pub fn to_table(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20} {:>12} {:>10} {:>14} {:>14}",
            "Name", "N", "R", "mean_p x10^6", "sd_p x10^6"
        );
        let _ = writeln!(
            out,
            "{:<20} {:>12} {:>10} {:>14} {:>14}",
            self.dataset_name,
            s.total,
            s.richness,
            format_sig(s.mean_proportion * 1e6, 6),
            format_sig(s.sd_proportion * 1e6, 6),
        );
        out.push('\n');

        let block = 34;
        let mut heading = format!("{:<20}", "");
        let mut columns = format!("{:<20}", "Name");
        let mut values = format!("{:<20}", self.dataset_name);
        for row in &self.rows {
            let title = format!("fraction {} ({})", row.fraction, row.mode);
            let _ = write!(heading, " | {title:<block$}");
            let _ = write!(
                columns,
                " | {:>10} {:>12} {:>10}",
                "H'", "lambda x10^4", "E_var"
            );
            let _ = write!(
                values,
                " | {:>10} {:>12} {:>10}",
                format_sig(row.shannon_h, 6),
                format_sig(row.simpson_lambda_e4, 6),
                format_sig(row.e_var, 6),
            );
        }
        for line in [heading, columns, values] {
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out.push('\n');

        let _ = writeln!(
            out,
            "{:<10} {:<13} {:>10} {:>10} {:>12} {:>10}",
            "fraction", "mode", "R", "J'", "Brillouin H", "E_McI"
        );
        let opt = |v: Option<f64>| v.map(|x| format_sig(x, 6)).unwrap_or_default();
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:<10} {:<13} {:>10} {:>10} {:>12} {:>10}",
                row.fraction.to_string(),
                row.mode.to_string(),
                row.richness,
                opt(row.shannon_j),
                format_sig(row.brillouin_h, 6),
                opt(row.mcintosh_e),
            );
        }
        out
    }
}

/// Formats `value` with `digits` significant digits in fixed notation.
/// Exact decimal ties round to even.
pub fn format_sig(value: f64, digits: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{}", value.abs());
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, value);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{value:.decimals$}")
}

/// `(subsample richness, metric)` observations pooled over every row of
/// every report. Rows where the metric is undefined are left out.
pub fn pool_observations(reports: &[AnalysisReport], metric: MetricKind) -> Vec<(usize, f64)> {
    reports
        .iter()
        .flat_map(|r| r.rows.iter())
        .filter_map(|row| metric.value(&row.suite()).map(|v| (row.richness, v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub schema_version: u32,
    pub x: String,
    pub y: MetricKind,
    #[serde(flatten)]
    pub result: CorrelationResult,
}

/// Correlates richness with `metric` across reports.
pub fn correlate_reports(
    reports: &[AnalysisReport],
    metric: MetricKind,
) -> Result<CorrelationReport> {
    let rows = pool_observations(reports, metric);
    Ok(CorrelationReport {
        schema_version: SCHEMA_VERSION,
        x: "richness".into(),
        y: metric,
        result: correlate_metric_vs_richness(&rows)?,
    })
}

impl CorrelationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
