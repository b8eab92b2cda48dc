//! Per-case records of the single-matrix study and their CSV form
//! `model_id,rep_id,method,<measure columns...>,mae`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::prioritization::PrioritizationMethod;

const LEADING: [&str; 3] = ["model_id", "rep_id", "method"];
const TRAILING: &str = "mae";

/// One perturbed matrix: its measure values and the estimate's MAE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub model_id: usize,
    pub rep_id: usize,
    pub method: PrioritizationMethod,
    /// Aligned with [`RecordSet::measures`].
    pub values: Vec<f64>,
    pub mae: f64,
    /// Upper-triangle cell that received the large error, when known.
    pub cell: Option<(usize, usize)>,
}

/// Records sharing one set of measure columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordSet {
    pub measures: Vec<String>,
    pub records: Vec<SimulationRecord>,
    /// Cases dropped because a computation failed numerically.
    pub excluded: usize,
}

impl RecordSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Position of a measure column.
    pub fn column(&self, name: &str) -> Result<usize> {
        self.measures.iter().position(|m| m == name).ok_or_else(|| {
            PcmError::config(
                "measure",
                format!("no column '{name}' (available: {})", self.measures.join(", ")),
            )
        })
    }

    /// `(measure value, mae)` pairs for one column.
    pub fn pairs(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let c = self.column(name)?;
        Ok(self.records.iter().map(|r| (r.values[c], r.mae)).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = LEADING
            .iter()
            .copied()
            .chain(self.measures.iter().map(String::as_str))
            .chain([TRAILING])
            .collect();
        w.write_record(&header).map_err(io_error)?;
        for r in &self.records {
            let mut row = vec![r.model_id.to_string(), r.rep_id.to_string(), r.method.to_string()];
            row.extend(r.values.iter().map(|v| v.to_string()));
            row.push(r.mae.to_string());
            w.write_record(&row).map_err(io_error)?;
        }
        w.flush().map_err(|e| io_error(e.into()))
    }

    /// CSV with header `column,mean,min,max,count`: one row per measure
    /// column, then one for `mae`.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["column", "mean", "min", "max", "count"]).map_err(io_error)?;
        let columns = self.measures.iter().enumerate().map(|(c, name)| (name.as_str(), Some(c)));
        for (name, c) in columns.chain([(TRAILING, None)]) {
            let values: Vec<f64> = self
                .records
                .iter()
                .map(|r| c.map_or(r.mae, |c| r.values[c]))
                .collect();
            let count = values.len();
            let mean = values.iter().sum::<f64>() / count as f64;
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            w.write_record([name.to_string(), mean.to_string(), min.to_string(), max.to_string(), count.to_string()])
                .map_err(io_error)?;
        }
        w.flush().map_err(|e| io_error(e.into()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| PcmError::Parse {
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn read_csv<R: Read>(input: R) -> Result<RecordSet> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| parse_error(1, e))?
            .iter()
            .map(str::to_string)
            .collect();
        let width = header.len();
        if width < LEADING.len() + 1
            || header[..LEADING.len()] != LEADING
            || header[width - 1] != TRAILING
        {
            return Err(PcmError::Parse {
                line: 1,
                message: format!(
                    "header must be 'model_id,rep_id,method,<measures...>,mae', got '{}'",
                    header.join(",")
                ),
            });
        }
        let measures = header[LEADING.len()..width - 1].to_vec();
        let mut records = Vec::new();
        for (idx, row) in reader.records().enumerate() {
            let line = idx + 2;
            let row = row.map_err(|e| parse_error(line, e))?;
            if row.len() != width {
                return Err(PcmError::Parse {
                    line,
                    message: format!("expected {width} fields, got {}", row.len()),
                });
            }
            let index = |i: usize| {
                row[i].parse::<usize>().map_err(|e| PcmError::Parse {
                    line,
                    message: format!("{}: {e}", LEADING[i]),
                })
            };
            let number = |i: usize| {
                row[i].parse::<f64>().map_err(|e| PcmError::Parse {
                    line,
                    message: format!("{}: {e}", header[i]),
                })
            };
            let method = row[2].parse::<PrioritizationMethod>().map_err(|e| PcmError::Parse {
                line,
                message: e.to_string(),
            })?;
            records.push(SimulationRecord {
                model_id: index(0)?,
                rep_id: index(1)?,
                method,
                values: (LEADING.len()..width - 1).map(number).collect::<Result<_>>()?,
                mae: number(width - 1)?,
                cell: None,
            });
        }
        Ok(RecordSet {
            measures,
            records,
            excluded: 0,
        })
    }

    pub fn from_csv_str(s: &str) -> Result<RecordSet> {
        RecordSet::read_csv(s.as_bytes())
    }
}

fn parse_error(line: usize, e: csv::Error) -> PcmError {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(line);
    PcmError::Parse {
        line,
        message: e.to_string(),
    }
}

fn io_error(e: csv::Error) -> PcmError {
    PcmError::Parse {
        line: 0,
        message: format!("write failed: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RecordSet {
        RecordSet {
            measures: vec!["ci_rev".into(), "cm_lti2".into()],
            records: vec![
                SimulationRecord {
                    model_id: 0,
                    rep_id: 1,
                    method: PrioritizationMethod::Llsm,
                    values: vec![0.1, 0.25],
                    mae: 0.0125,
                    cell: Some((0, 2)),
                },
                SimulationRecord {
                    model_id: 3,
                    rep_id: 0,
                    method: PrioritizationMethod::Rev,
                    values: vec![1e-17, 0.0],
                    mae: 0.5,
                    cell: None,
                },
            ],
            excluded: 0,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let set = sample();
        let text = set.to_csv_string().unwrap();
        assert!(text.starts_with("model_id,rep_id,method,ci_rev,cm_lti2,mae\n"));
        let back = RecordSet::from_csv_str(&text).unwrap();
        assert_eq!(back.measures, set.measures);
        for (a, b) in back.records.iter().zip(&set.records) {
            assert_eq!((a.values.clone(), a.mae, a.method), (b.values.clone(), b.mae, b.method));
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(RecordSet::from_csv_str("a,b,c\n").is_err());
        assert!(RecordSet::from_csv_str("model_id,rep_id,method,x,mae\n0,0,llsm,1\n").is_err());
        let err = RecordSet::from_csv_str("model_id,rep_id,method,x,mae\n0,0,llsm,1,2\n0,0,ahp,1,2\n");
        assert!(matches!(err, Err(PcmError::Parse { line: 3, .. })), "{err:?}");
        assert!(RecordSet::from_csv_str("model_id,rep_id,method,x,mae\n-1,0,llsm,1,2\n").is_err());
    }

    #[test]
    fn missing_column() {
        assert!(matches!(sample().column("k_ti"), Err(PcmError::InvalidConfig { .. })));
    }
}
