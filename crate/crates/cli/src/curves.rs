//! Per-epoch training curves as CSV: header
//! `strategy,seed,stage,epoch,train_loss,val_error`, 17-significant-digit
//! floats, LF endings. The file is the raw record every summary statistic can
//! be recomputed from.

use std::path::Path;

use layerwise_core::{Strategy, TrainReport};

use crate::error::{CliError, Result};
use crate::num_fmt::{fmt_f64, parse_f64};

pub const CURVES_HEADER: &str = "strategy,seed,stage,epoch,train_loss,val_error";

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub strategy: Strategy,
    pub seed: u64,
    /// 1-based stage; always 1 for the full strategy.
    pub stage: usize,
    /// 1-based epoch within the stage.
    pub epoch: usize,
    pub train_loss: f64,
    pub val_error: f64,
}

/// Flattens one run's report into rows, ordered by stage then epoch.
pub fn rows_from_report(seed: u64, report: &TrainReport) -> Vec<CurveRow> {
    let mut rows = Vec::new();
    for stage in &report.stages {
        for (i, (&train_loss, &val_error)) in
            stage.train_loss.iter().zip(&stage.val_error).enumerate()
        {
            rows.push(CurveRow {
                strategy: report.strategy,
                seed,
                stage: stage.stage_index,
                epoch: i + 1,
                train_loss,
                val_error,
            });
        }
    }
    rows
}

pub fn render_curves(rows: &[CurveRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CURVES_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.strategy.name(),
            row.seed,
            row.stage,
            row.epoch,
            fmt_f64(row.train_loss),
            fmt_f64(row.val_error),
        ));
    }
    out
}

/// Parses curve CSV text; `path` is used only to label errors.
pub fn parse_curves(text: &str, path: &Path) -> Result<Vec<CurveRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CURVES_HEADER => {}
        Some((_, header)) => {
            return Err(CliError::parse(
                path,
                1,
                format!("expected header `{CURVES_HEADER}`, got `{header}`"),
            ))
        }
        None => return Err(CliError::parse(path, 1, "missing header")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::parse(
                path,
                line_no,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let bad = |what: &str| CliError::parse(path, line_no, format!("invalid {what}"));
        rows.push(CurveRow {
            strategy: Strategy::from_name(fields[0]).ok_or_else(|| bad("strategy"))?,
            seed: fields[1].parse().map_err(|_| bad("seed"))?,
            stage: fields[2].parse().map_err(|_| bad("stage"))?,
            epoch: fields[3].parse().map_err(|_| bad("epoch"))?,
            train_loss: parse_f64(fields[4]).ok_or_else(|| bad("train_loss"))?,
            val_error: parse_f64(fields[5]).ok_or_else(|| bad("val_error"))?,
        });
    }
    Ok(rows)
}

pub fn write_curves(rows: &[CurveRow], path: &Path) -> Result<()> {
    std::fs::write(path, render_curves(rows))
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

pub fn read_curves(path: &Path) -> Result<Vec<CurveRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_curves(&text, path)
}
