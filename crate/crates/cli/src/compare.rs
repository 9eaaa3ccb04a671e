use std::path::Path;

use cete_core::tomography::{fmt_num, read_timeseries_csv, TimeseriesRow};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub label: String,
    pub cete: ErrorStats,
    pub sequential: ErrorStats,
}

impl CompareRow {
    /// Sequential over CETE error; NaN when both vanish.
    pub fn ratios(&self) -> (f64, f64) {
        (
            self.sequential.mean / self.cete.mean,
            self.sequential.max / self.cete.max,
        )
    }
}

pub fn load(path: &Path) -> CliResult<Vec<TimeseriesRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    read_timeseries_csv(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn check_grid(name: &str, rows: &[TimeseriesRow], reference: &[TimeseriesRow]) -> CliResult<()> {
    if rows.len() != reference.len() {
        return Err(CliError::Config(format!(
            "{name} has {} time points, reference has {}",
            rows.len(),
            reference.len()
        )));
    }
    for (a, b) in rows.iter().zip(reference) {
        if (a.t - b.t).abs() > 1e-9 * b.t.abs().max(1.0) {
            return Err(CliError::Config(format!(
                "{name} time {} does not match reference time {}",
                a.t, b.t
            )));
        }
    }
    Ok(())
}

fn errors(rows: &[TimeseriesRow], reference: &[TimeseriesRow], labels: &[&str], name: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (row, truth) in rows.iter().zip(reference) {
        for label in labels {
            let missing = || CliError::Config(format!("{name} has no column {label}"));
            let value = row.get(label).ok_or_else(missing)?.value;
            let exact = truth.get(label).ok_or_else(missing)?.value;
            out.push((value - exact).abs());
        }
    }
    Ok(out)
}

fn stats(errs: &[f64]) -> ErrorStats {
    let max = errs.iter().copied().fold(0.0, f64::max);
    let mean = if errs.is_empty() {
        0.0
    } else {
        errs.iter().sum::<f64>() / errs.len() as f64
    };
    ErrorStats { mean, max }
}

/// Mean and peak absolute errors of every reference observable, plus the
/// pooled 1-RDM diagonal as `D_diag`.
pub fn compare(
    cete: &[TimeseriesRow],
    sequential: &[TimeseriesRow],
    reference: &[TimeseriesRow],
) -> CliResult<Vec<CompareRow>> {
    check_grid("CETE series", cete, reference)?;
    check_grid("sequential series", sequential, reference)?;
    let labels: Vec<&str> = reference
        .first()
        .map(|r| r.estimates.iter().map(|(l, _)| l.as_str()).collect())
        .unwrap_or_default();
    let mut rows = Vec::new();
    for label in &labels {
        rows.push(CompareRow {
            label: label.to_string(),
            cete: stats(&errors(cete, reference, &[label], "CETE series")?),
            sequential: stats(&errors(sequential, reference, &[label], "sequential series")?),
        });
    }
    let diagonals: Vec<&str> = labels.iter().copied().filter(|l| l.starts_with('D')).collect();
    if !diagonals.is_empty() {
        rows.push(CompareRow {
            label: "D_diag".into(),
            cete: stats(&errors(cete, reference, &diagonals, "CETE series")?),
            sequential: stats(&errors(sequential, reference, &diagonals, "sequential series")?),
        });
    }
    Ok(rows)
}

pub fn render(rows: &[CompareRow]) -> String {
    let mut out = String::from(
        "observable,cete_mean_abs_err,cete_max_abs_err,sequential_mean_abs_err,sequential_max_abs_err,mean_ratio,max_ratio\n",
    );
    for r in rows {
        let (mean_ratio, max_ratio) = r.ratios();
        let fields = [
            r.label.clone(),
            fmt_num(r.cete.mean),
            fmt_num(r.cete.max),
            fmt_num(r.sequential.mean),
            fmt_num(r.sequential.max),
            fmt_num(mean_ratio),
            fmt_num(max_ratio),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
