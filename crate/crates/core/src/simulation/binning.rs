//! Quantile bins of a consistency measure with per-bin MAE statistics.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RecordSet;
use crate::error::{PcmError, Result};
use crate::metrics::{quantile_sorted, spearman_rho};

pub const BIN_COUNT: usize = 15;

/// Orders of the per-bin MAE quantiles.
pub const MAE_QUANTILES: [f64; 5] = [0.05, 0.1, 0.5, 0.9, 0.95];

/// One value range `[lower, upper)` of the binned measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    /// 1-based.
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// NaN when the bin is empty.
    pub mean_measure: f64,
    /// Aligned with [`MAE_QUANTILES`]; NaN when the bin is empty.
    pub mae_quantiles: [f64; 5],
    pub mean_mae: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedReport {
    pub measure: String,
    pub bins: Vec<Bin>,
}

/// A per-bin MAE series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaeColumn {
    Q05,
    Q10,
    Q50,
    Q90,
    Q95,
    Mean,
}

impl MaeColumn {
    pub const ALL: [MaeColumn; 6] = [
        MaeColumn::Q05,
        MaeColumn::Q10,
        MaeColumn::Q50,
        MaeColumn::Q90,
        MaeColumn::Q95,
        MaeColumn::Mean,
    ];

    pub fn column(self) -> &'static str {
        match self {
            MaeColumn::Q05 => "mae_q05",
            MaeColumn::Q10 => "mae_q10",
            MaeColumn::Q50 => "mae_q50",
            MaeColumn::Q90 => "mae_q90",
            MaeColumn::Q95 => "mae_q95",
            MaeColumn::Mean => "mae_mean",
        }
    }

    fn of(self, bin: &Bin) -> f64 {
        match self {
            MaeColumn::Q05 => bin.mae_quantiles[0],
            MaeColumn::Q10 => bin.mae_quantiles[1],
            MaeColumn::Q50 => bin.mae_quantiles[2],
            MaeColumn::Q90 => bin.mae_quantiles[3],
            MaeColumn::Q95 => bin.mae_quantiles[4],
            MaeColumn::Mean => bin.mean_mae,
        }
    }
}

impl FromStr for MaeColumn {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        MaeColumn::ALL
            .into_iter()
            .find(|c| c.column() == s || c.column().trim_start_matches("mae_") == s)
            .ok_or_else(|| PcmError::config("column", format!("unknown MAE column '{s}'")))
    }
}

/// Bins `records` on the named measure column.
pub fn bin_records(records: &RecordSet, measure: &str) -> Result<BinnedReport> {
    bin_values(measure, &records.pairs(measure)?)
}

/// Bins `(measure, mae)` pairs into [`BIN_COUNT`] quantile bins.
///
/// Edge `k` is the measure quantile of order `k/15`; a value lands in the
/// bin whose index equals the number of edges `<=` it, plus one.
pub fn bin_values(measure: &str, pairs: &[(f64, f64)]) -> Result<BinnedReport> {
    if pairs.len() < BIN_COUNT {
        return Err(PcmError::DegenerateBins(format!(
            "{BIN_COUNT} bins need at least {BIN_COUNT} records, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|(v, e)| v.is_nan() || e.is_nan()) {
        return Err(PcmError::DegenerateBins(format!("column '{measure}' contains NaN")));
    }
    let mut sorted: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    sorted.sort_by(f64::total_cmp);
    let edges = (1..BIN_COUNT)
        .map(|k| quantile_sorted(&sorted, k as f64 / BIN_COUNT as f64))
        .collect::<Result<Vec<_>>>()?;
    if sorted[0] == sorted[sorted.len() - 1] {
        return Err(PcmError::DegenerateBins(format!(
            "column '{measure}' is constant ({}); all quantile edges coincide",
            sorted[0]
        )));
    }

    let mut members: Vec<Vec<(f64, f64)>> = vec![Vec::new(); BIN_COUNT];
    for &(v, e) in pairs {
        let b = edges.partition_point(|edge| *edge <= v);
        members[b].push((v, e));
    }
    let first_lower = if sorted[0] >= 0.0 { 0.0 } else { f64::NEG_INFINITY };
    let bins = members
        .into_iter()
        .enumerate()
        .map(|(b, mut items)| {
            let lower = if b == 0 { first_lower } else { edges[b - 1] };
            let upper = if b + 1 == BIN_COUNT { f64::INFINITY } else { edges[b] };
            let count = items.len();
            if count == 0 {
                return Bin {
                    index: b + 1,
                    lower,
                    upper,
                    count,
                    mean_measure: f64::NAN,
                    mae_quantiles: [f64::NAN; 5],
                    mean_mae: f64::NAN,
                };
            }
            items.sort_by(|a, b| a.1.total_cmp(&b.1));
            let maes: Vec<f64> = items.iter().map(|p| p.1).collect();
            let mut q = [0.0; 5];
            for (slot, p) in q.iter_mut().zip(MAE_QUANTILES) {
                *slot = quantile_sorted(&maes, p).expect("non-empty bin");
            }
            Bin {
                index: b + 1,
                lower,
                upper,
                count,
                mean_measure: items.iter().map(|p| p.0).sum::<f64>() / count as f64,
                mae_quantiles: q,
                mean_mae: maes.iter().sum::<f64>() / count as f64,
            }
        })
        .collect();
    Ok(BinnedReport {
        measure: measure.to_string(),
        bins,
    })
}

/// Spearman correlation between bin mean measure and an MAE series,
/// skipping empty bins.
pub fn cm_quality_score(report: &BinnedReport, column: MaeColumn) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = report
        .bins
        .iter()
        .filter(|b| b.count > 0)
        .map(|b| (b.mean_measure, column.of(b)))
        .unzip();
    spearman_rho(&x, &y)
}

impl BinnedReport {
    pub fn series(&self, column: MaeColumn) -> Vec<f64> {
        self.bins.iter().map(|b| column.of(b)).collect()
    }

    /// CSV with header
    /// `bin,lower,upper,mean_cm,mae_q05,mae_q10,mae_q50,mae_q90,mae_q95,mae_mean,count`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["bin", "lower", "upper", "mean_cm"];
        header.extend(MaeColumn::ALL.iter().map(|c| c.column()));
        header.push("count");
        let fail = |e: csv::Error| PcmError::Parse {
            line: 0,
            message: format!("write failed: {e}"),
        };
        w.write_record(&header).map_err(fail)?;
        for b in &self.bins {
            let mut row = vec![
                b.index.to_string(),
                b.lower.to_string(),
                b.upper.to_string(),
                b.mean_measure.to_string(),
            ];
            row.extend(b.mae_quantiles.iter().map(|v| v.to_string()));
            row.push(b.mean_mae.to_string());
            row.push(b.count.to_string());
            w.write_record(&row).map_err(fail)?;
        }
        w.flush().map_err(|e| fail(e.into()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}
