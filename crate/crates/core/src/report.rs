//! CSV and JSON writers for run results.
//!
//! CSV: comma separated, header row, `.` decimal point, LF line endings,
//! `NA` for missing values. Numbers are rounded to the configured number of
//! significant digits and printed in their shortest round-trip form, so the
//! CSV and JSON outputs of a run carry identical values.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::experiments::{AggregateMetrics, SweepRow};
use crate::game::InteractionOutcome;

pub const NA: &str = "NA";
pub const DEFAULT_PRECISION: u32 = 9;
pub const TRACE_COLUMNS: [&str; 6] = [
    "consumer_index",
    "scenario",
    "bought",
    "price",
    "consumer_payoff",
    "supplier_payoff",
];

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = digits.clamp(1, 17) as usize;
    let rounded: f64 = format!("{:.*e}", digits - 1, x)
        .parse()
        .expect("scientific formatting round-trips");
    // normalizes -0
    rounded + 0.0
}

pub fn format_number(x: f64, digits: u32) -> String {
    format!("{}", round_significant(x, digits))
}

fn format_optional(x: Option<f64>, digits: u32) -> String {
    x.map_or_else(|| NA.to_string(), |x| format_number(x, digits))
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn metric_fields(metrics: &AggregateMetrics, digits: u32) -> impl Iterator<Item = String> {
    metrics.values().into_iter().map(move |x| format_optional(x, digits))
}

/// One metrics row per labelled strategy cell.
pub fn write_metrics_csv<W: Write>(out: W, rows: &[(String, AggregateMetrics)], digits: u32) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(std::iter::once("cell").chain(AggregateMetrics::COLUMNS))?;
    for (label, metrics) in rows {
        w.write_record(std::iter::once(label.clone()).chain(metric_fields(metrics, digits)))?;
    }
    w.flush()?;
    Ok(())
}

/// JSON record of one strategy cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub cell: String,
    #[serde(flatten)]
    pub metrics: AggregateMetrics,
}

/// JSON record of one sweep row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub parameter: String,
    pub value: f64,
    #[serde(flatten)]
    pub metrics: AggregateMetrics,
}

pub fn rounded(metrics: &AggregateMetrics, digits: u32) -> AggregateMetrics {
    let r = |x: f64| round_significant(x, digits);
    AggregateMetrics {
        buyers: metrics.buyers,
        demand_rate: r(metrics.demand_rate),
        mean_price_paid: metrics.mean_price_paid.map(r),
        revenue: r(metrics.revenue),
        total_cost_incurred: r(metrics.total_cost_incurred),
        profit: r(metrics.profit),
        mean_consumer_surplus: metrics.mean_consumer_surplus.map(r),
        free_rider_rate: metrics.free_rider_rate.map(r),
    }
}

pub fn write_metrics_json<W: Write>(
    mut out: W,
    rows: &[(String, AggregateMetrics)],
    digits: u32,
) -> std::io::Result<()> {
    let records: Vec<MetricsRecord> = rows
        .iter()
        .map(|(cell, m)| MetricsRecord {
            cell: cell.clone(),
            metrics: rounded(m, digits),
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &records)?;
    out.write_all(b"\n")
}

pub fn write_sweep_csv<W: Write>(out: W, parameter: &str, rows: &[SweepRow], digits: u32) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(std::iter::once(parameter).chain(AggregateMetrics::COLUMNS))?;
    for row in rows {
        w.write_record(std::iter::once(format_number(row.value, digits)).chain(metric_fields(&row.metrics, digits)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_json<W: Write>(mut out: W, parameter: &str, rows: &[SweepRow], digits: u32) -> std::io::Result<()> {
    let records: Vec<SweepRecord> = rows
        .iter()
        .map(|row| SweepRecord {
            parameter: parameter.to_string(),
            value: round_significant(row.value, digits),
            metrics: rounded(&row.metrics, digits),
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &records)?;
    out.write_all(b"\n")
}

pub fn write_trace_csv<W: Write>(out: W, outcomes: &[InteractionOutcome], digits: u32) -> csv::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(TRACE_COLUMNS)?;
    for (i, o) in outcomes.iter().enumerate() {
        w.write_record([
            i.to_string(),
            o.scenario.to_string(),
            o.bought.to_string(),
            format_optional(o.price, digits),
            format_number(o.consumer_payoff, digits),
            format_number(o.supplier_payoff, digits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Checks a results document against the documented JSON layout: an array
/// of metric objects with exactly the documented keys.
pub fn validate_results_json(text: &str) -> Result<usize, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let items = value.as_array().ok_or("results must be a JSON array")?;
    for (i, item) in items.iter().enumerate() {
        let object: &Map<String, Value> = item.as_object().ok_or(format!("[{i}] is not an object"))?;
        let leading: &[&str] = if object.contains_key("parameter") {
            &["parameter", "value"]
        } else {
            &["cell"]
        };
        let mut expected: Vec<&str> = leading.iter().copied().chain(AggregateMetrics::COLUMNS).collect();
        let mut found: Vec<&str> = object.keys().map(String::as_str).collect();
        expected.sort_unstable();
        found.sort_unstable();
        if expected != found {
            return Err(format!("[{i}]: keys {found:?}, expected {expected:?}"));
        }
        let parsed = if object.contains_key("parameter") {
            serde_json::from_value::<SweepRecord>(item.clone()).map(|r| r.metrics)
        } else {
            serde_json::from_value::<MetricsRecord>(item.clone()).map(|r| r.metrics)
        };
        let metrics = parsed.map_err(|e| format!("[{i}]: {e}"))?;
        if !(0.0..=1.0).contains(&metrics.demand_rate) {
            return Err(format!("[{i}].demand_rate outside [0, 1]"));
        }
    }
    Ok(items.len())
}

/// Fixed-width table for terminal output.
pub fn summary_table(first: &str, rows: &[(String, AggregateMetrics)], digits: u32) -> String {
    let header: Vec<String> = std::iter::once(first.to_string())
        .chain(AggregateMetrics::COLUMNS.iter().map(|c| c.to_string()))
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(label, m)| std::iter::once(label.clone()).chain(metric_fields(m, digits)).collect())
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|j| {
            body.iter()
                .map(|r| r[j].len())
                .chain([header[j].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in std::iter::once(&header).chain(&body) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (cell, w))| {
                if j == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
