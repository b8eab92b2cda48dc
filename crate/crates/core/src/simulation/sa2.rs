//! Single-matrix study: one large error in a random upper cell, small
//! errors everywhere else, then every configured measure and the MAE of the
//! estimate are recorded.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_failure_rate, random_priority_vector, run_units, unit_rng, FailureTally, RecordSet, SimulationRecord};
use crate::consistency::ConsistencyMeasure;
use crate::error::{PcmError, Result};
use crate::matrix::{Pcm, Region};
use crate::metrics::mae;
use crate::perturbation::{FactorDistribution, PerturbationModel};
use crate::prioritization::{prioritize, OptimizerSettings, PrioritizationMethod};
use crate::scale::JudgmentScale;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sa2Config {
    /// Matrix size.
    pub n: usize,
    pub scale: JudgmentScale,
    pub method: PrioritizationMethod,
    pub measures: Vec<ConsistencyMeasure>,
    /// Perturbation runs per base vector.
    pub runs_per_vector: usize,
    /// Number of base vectors.
    pub base_vectors: usize,
    /// Distribution of the single large factor.
    pub large_error: FactorDistribution,
    /// Small-error models, used cyclically: base vector `b` uses
    /// `small_errors[b % len]`.
    pub small_errors: Vec<PerturbationModel>,
    pub seed: u64,
    pub optimizer: OptimizerSettings,
}

impl Sa2Config {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(PcmError::config("n", format!("must be >= 4, got {}", self.n)));
        }
        if self.runs_per_vector == 0 {
            return Err(PcmError::config("runs_per_vector", "must be >= 1"));
        }
        if self.base_vectors == 0 {
            return Err(PcmError::config("base_vectors", "must be >= 1"));
        }
        if self.measures.is_empty() {
            return Err(PcmError::config("measures", "at least one measure is required"));
        }
        if self.small_errors.is_empty() {
            return Err(PcmError::config("small_error", "at least one model is required"));
        }
        self.large_error
            .validate()
            .map_err(|e| PcmError::config("large_error", e.to_string()))?;
        for m in &self.small_errors {
            m.validate().map_err(|e| PcmError::config("small_error", e.to_string()))?;
        }
        self.optimizer.validate()
    }

    pub fn cases(&self) -> usize {
        self.runs_per_vector * self.base_vectors
    }
}

/// Runs the study on `workers` threads; records are ordered by base vector,
/// then run. Output is independent of `workers`.
pub fn run_sa2(config: &Sa2Config, workers: usize) -> Result<RecordSet> {
    config.validate()?;
    let units = run_units(config.base_vectors, workers, |b| run_base_vector(config, b))?;
    let mut records = Vec::with_capacity(config.cases());
    let mut excluded = 0;
    for (unit_records, unit_excluded) in units {
        records.extend(unit_records);
        excluded += unit_excluded;
    }
    check_failure_rate(excluded, config.cases())?;
    Ok(RecordSet {
        measures: config.measures.iter().map(|m| m.column().to_string()).collect(),
        records,
        excluded,
    })
}

fn run_base_vector(config: &Sa2Config, base: usize) -> Result<(Vec<SimulationRecord>, usize)> {
    let mut rng = unit_rng(config.seed, base as u64);
    let n = config.n;
    let w = random_priority_vector(n, &mut rng)?;
    let exact = Pcm::from_weights(&w);
    let small = &config.small_errors[base % config.small_errors.len()];
    let upper: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();

    let mut tally = FailureTally::default();
    let mut records = Vec::with_capacity(config.runs_per_vector);
    for run in 0..config.runs_per_vector {
        let cell = upper[rng.random_range(0..upper.len())];
        let judged = judge(&exact, cell, &config.large_error, small, config.scale, &mut rng)?;
        let computed = (|| -> Result<(Vec<f64>, f64)> {
            let values = config
                .measures
                .iter()
                .map(|m| m.evaluate(&judged, &config.optimizer))
                .collect::<Result<Vec<_>>>()?;
            let estimate = prioritize(&judged, config.method, &config.optimizer)?;
            Ok((values, mae(w.as_slice(), estimate.as_slice())?))
        })();
        if let Some((values, error)) = tally.filter(computed)? {
            records.push(SimulationRecord {
                model_id: base,
                rep_id: run,
                method: config.method,
                values,
                mae: error,
                cell: Some(cell),
            });
        }
    }
    Ok((records, tally.excluded))
}

fn judge<R: Rng + ?Sized>(
    exact: &Pcm,
    cell: (usize, usize),
    large: &FactorDistribution,
    small: &PerturbationModel,
    scale: JudgmentScale,
    rng: &mut R,
) -> Result<Pcm> {
    let mut rows = exact.rows();
    let n = rows.len();
    let shared = match small.draw_mode {
        crate::perturbation::DrawMode::Shared => Some(small.sample(rng)?),
        crate::perturbation::DrawMode::PerEntry => None,
    };
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, a) in row.iter_mut().enumerate().skip(i + 1) {
            let e = if (i, j) == cell {
                large.sample(rng)?
            } else if let Some(e) = shared {
                e
            } else {
                small.sample(rng)?
            };
            *a *= e;
        }
    }
    debug_assert_eq!(rows.len(), n);
    Ok(Pcm::from_rows(rows)?
        .into_arbitrary()
        .round_region(scale, Region::UpperTriangle)
        .enforce_reciprocity())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> Sa2Config {
        Sa2Config {
            n: 4,
            scale: JudgmentScale::Continuous,
            method: PrioritizationMethod::Llsm,
            measures: ConsistencyMeasure::ALL.to_vec(),
            runs_per_vector: 1,
            base_vectors: 1,
            large_error: FactorDistribution::uniform(1.0, 1.0),
            small_errors: vec![PerturbationModel::constant_one()],
            seed: 3,
            optimizer: OptimizerSettings::default(),
        }
    }

    #[test]
    fn identity_errors_give_zero_measures() {
        let set = run_sa2(&trivial(), 1).unwrap();
        assert_eq!(set.len(), 1);
        let r = &set.records[0];
        assert!(r.values.iter().all(|v| v.abs() < 1e-9), "{r:?}");
        assert!(r.mae < 1e-9);
    }

    #[test]
    fn record_count_and_cells() {
        let mut c = trivial();
        c.scale = JudgmentScale::Saaty;
        c.measures = vec![ConsistencyMeasure::CmLti2, ConsistencyMeasure::KTi];
        c.large_error = FactorDistribution::uniform(2.0, 4.0);
        c.small_errors = vec![PerturbationModel::per_entry(FactorDistribution::uniform(0.5, 1.5))];
        c.runs_per_vector = 5;
        c.base_vectors = 7;
        let set = run_sa2(&c, 2).unwrap();
        assert_eq!(set.len(), 35);
        for r in &set.records {
            let (x, y) = r.cell.unwrap();
            assert!(x < y && y < 4);
            assert!(r.values[0] >= 0.0);
            assert!((0.0..=0.5).contains(&r.mae));
        }
        assert_eq!(set, run_sa2(&c, 5).unwrap());
    }

    #[test]
    fn rejects_small_matrices() {
        let mut c = trivial();
        c.n = 3;
        assert!(matches!(c.validate(), Err(PcmError::InvalidConfig { .. })));
    }
}
