//! Hierarchy-level study: how well each procedure recovers the total
//! priority vector of a randomly generated two-level model.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_failure_rate, random_priority_vector, run_units, unit_rng, FailureTally, IntRange};
use crate::error::{PcmError, Result};
use crate::matrix::{perturb_entries, Pcm, Reciprocity, Region};
use crate::metrics::{aggregate, mae, relative_error, relative_ratio, spearman_rho, AggregateSummary, QualityRecord};
use crate::perturbation::PerturbationModel;
use crate::prioritization::{prioritize, OptimizerSettings, PrioritizationMethod};
use crate::scale::JudgmentScale;
use crate::vector::PriorityVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sa1Config {
    /// Number of criteria `n`, drawn per model.
    pub criteria: IntRange,
    /// Number of alternatives `m`, drawn per model.
    pub alternatives: IntRange,
    pub scale: JudgmentScale,
    pub reciprocity: Reciprocity,
    pub methods: Vec<PrioritizationMethod>,
    pub perturbation: PerturbationModel,
    /// Perturbations per model.
    pub repetitions: usize,
    /// Number of models.
    pub models: usize,
    pub seed: u64,
    pub optimizer: OptimizerSettings,
}

impl Sa1Config {
    pub fn validate(&self) -> Result<()> {
        for (field, r) in [("criteria", self.criteria), ("alternatives", self.alternatives)] {
            if r.min < 2 || r.min > r.max {
                return Err(PcmError::config(
                    field,
                    format!("range {}..={} must satisfy 2 <= min <= max", r.min, r.max),
                ));
            }
        }
        if self.repetitions == 0 {
            return Err(PcmError::config("repetitions", "must be >= 1"));
        }
        if self.models == 0 {
            return Err(PcmError::config("models", "must be >= 1"));
        }
        if self.methods.is_empty() {
            return Err(PcmError::config("methods", "at least one method is required"));
        }
        self.perturbation
            .validate()
            .map_err(|e| PcmError::config("perturbation", e.to_string()))?;
        self.optimizer.validate()
    }

    /// Total number of cases per method.
    pub fn cases(&self) -> usize {
        self.models * self.repetitions
    }
}

/// Quality of one method on one perturbed model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sa1Record {
    pub model_id: usize,
    pub rep_id: usize,
    pub method: PrioritizationMethod,
    pub quality: QualityRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sa1Summary {
    pub method: PrioritizationMethod,
    pub summary: AggregateSummary,
    /// Cases dropped because the procedure failed numerically.
    pub excluded: usize,
    /// Cases whose rank correlation was undefined and entered as 0.
    pub undefined_src: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sa1Outcome {
    pub summaries: Vec<Sa1Summary>,
    pub records: Vec<Sa1Record>,
}

impl Sa1Outcome {
    pub fn summary(&self, method: PrioritizationMethod) -> Option<&Sa1Summary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    /// CSV with header `model_id,rep_id,method,mae,re,rr,src`.
    pub fn write_records_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["model_id", "rep_id", "method", "mae", "re", "rr", "src"])
            .map_err(write_error)?;
        for r in &self.records {
            let q = r.quality;
            w.write_record([
                r.model_id.to_string(),
                r.rep_id.to_string(),
                r.method.to_string(),
                q.mae.to_string(),
                q.re.to_string(),
                q.rr.to_string(),
                q.src.to_string(),
            ])
            .map_err(write_error)?;
        }
        w.flush().map_err(|e| write_error(e.into()))
    }

    /// CSV with header `method,mre,msrc,mrr,mmae,count,excluded,undefined_src`,
    /// one row per method.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "mre", "msrc", "mrr", "mmae", "count", "excluded", "undefined_src"])
            .map_err(write_error)?;
        for s in &self.summaries {
            let a = s.summary;
            w.write_record([
                s.method.to_string(),
                a.mre.to_string(),
                a.msrc.to_string(),
                a.mrr.to_string(),
                a.mmae.to_string(),
                a.count.to_string(),
                s.excluded.to_string(),
                s.undefined_src.to_string(),
            ])
            .map_err(write_error)?;
        }
        w.flush().map_err(|e| write_error(e.into()))
    }
}

fn write_error(e: csv::Error) -> PcmError {
    PcmError::Parse {
        line: 0,
        message: format!("write failed: {e}"),
    }
}

struct UnitResult {
    records: Vec<Sa1Record>,
    excluded: Vec<usize>,
    undefined: Vec<usize>,
}

/// Runs the study on `workers` threads. Output is independent of `workers`.
pub fn run_sa1(config: &Sa1Config, workers: usize) -> Result<Sa1Outcome> {
    config.validate()?;
    let units = run_units(config.models, workers, |model| run_model(config, model))?;
    let k = config.methods.len();
    let mut excluded = vec![0; k];
    let mut undefined = vec![0; k];
    let mut records = Vec::with_capacity(config.cases() * k);
    for unit in units {
        for c in 0..k {
            excluded[c] += unit.excluded[c];
            undefined[c] += unit.undefined[c];
        }
        records.extend(unit.records);
    }
    let mut summaries = Vec::with_capacity(k);
    for (c, &method) in config.methods.iter().enumerate() {
        check_failure_rate(excluded[c], config.cases())?;
        let quality: Vec<QualityRecord> = records
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.quality)
            .collect();
        summaries.push(Sa1Summary {
            method,
            summary: aggregate(&quality)?,
            excluded: excluded[c],
            undefined_src: undefined[c],
        });
    }
    Ok(Sa1Outcome { summaries, records })
}

fn run_model(config: &Sa1Config, model: usize) -> Result<UnitResult> {
    let mut rng = unit_rng(config.seed, model as u64);
    let n = config.criteria.sample(&mut rng);
    let m = config.alternatives.sample(&mut rng);
    let criteria = random_priority_vector(n, &mut rng)?;
    let locals = (0..n)
        .map(|_| random_priority_vector(m, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let truth = PriorityVector::compose(&criteria, &locals)?;
    let exact: Vec<Pcm> = std::iter::once(&criteria)
        .chain(&locals)
        .map(Pcm::from_weights)
        .collect();

    let k = config.methods.len();
    let mut out = UnitResult {
        records: Vec::with_capacity(config.repetitions * k),
        excluded: vec![0; k],
        undefined: vec![0; k],
    };
    for rep in 0..config.repetitions {
        let judged = exact
            .iter()
            .map(|a| judge(a, config, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        for (c, &method) in config.methods.iter().enumerate() {
            let mut tally = FailureTally::default();
            let Some(estimate) = tally.filter(estimate_total(&judged, method, &config.optimizer))? else {
                out.excluded[c] += tally.excluded;
                continue;
            };
            let w = truth.as_slice();
            let x = estimate.as_slice();
            let src = match spearman_rho(w, x) {
                Ok(r) => r,
                Err(PcmError::Undefined(_)) => {
                    out.undefined[c] += 1;
                    0.0
                }
                Err(e) => return Err(e),
            };
            out.records.push(Sa1Record {
                model_id: model,
                rep_id: rep,
                method,
                quality: QualityRecord {
                    mae: mae(w, x)?,
                    re: relative_error(w, x)?,
                    rr: relative_ratio(w, x)?,
                    src,
                },
            });
        }
    }
    Ok(out)
}

/// Perturbs, rounds and (for forced reciprocity) mirrors one exact matrix.
fn judge<R: Rng + ?Sized>(exact: &Pcm, config: &Sa1Config, rng: &mut R) -> Result<Pcm> {
    let region = match config.reciprocity {
        Reciprocity::Reciprocal => Region::UpperTriangle,
        Reciprocity::Arbitrary => Region::OffDiagonal,
    };
    let rounded = perturb_entries(exact, &config.perturbation, region, rng)?.round_region(config.scale, region);
    Ok(match config.reciprocity {
        Reciprocity::Reciprocal => rounded.enforce_reciprocity(),
        Reciprocity::Arbitrary => rounded,
    })
}

/// `w* = sum_c k*_c a*_c` from the judged criteria matrix (first) and the
/// judged alternative matrices.
fn estimate_total(judged: &[Pcm], method: PrioritizationMethod, opt: &OptimizerSettings) -> Result<PriorityVector> {
    let criteria = prioritize(&judged[0], method, opt)?;
    let locals = judged[1..]
        .iter()
        .map(|a| prioritize(a, method, opt))
        .collect::<Result<Vec<_>>>()?;
    PriorityVector::compose(&criteria, &locals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_config() -> Sa1Config {
        Sa1Config {
            criteria: IntRange::single(4),
            alternatives: IntRange::single(4),
            scale: JudgmentScale::Continuous,
            reciprocity: Reciprocity::Reciprocal,
            methods: PrioritizationMethod::ALL.to_vec(),
            perturbation: PerturbationModel::constant_one(),
            repetitions: 1,
            models: 1,
            seed: 7,
            optimizer: OptimizerSettings::default(),
        }
    }

    #[test]
    fn identity_perturbation_recovers_truth() {
        let out = run_sa1(&identity_config(), 1).unwrap();
        for s in &out.summaries {
            assert!(s.summary.mre < 1e-9, "{s:?}");
            assert!((s.summary.msrc - 1.0).abs() < 1e-12);
            assert!((s.summary.mrr - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_configs() {
        let mut c = identity_config();
        c.criteria = IntRange { min: 1, max: 3 };
        assert!(matches!(c.validate(), Err(PcmError::InvalidConfig { .. })));
        let mut c = identity_config();
        c.models = 0;
        assert!(c.validate().is_err());
        let mut c = identity_config();
        c.methods.clear();
        assert!(c.validate().is_err());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut c = identity_config();
        c.perturbation = PerturbationModel::per_entry(crate::perturbation::FactorDistribution::uniform(0.5, 1.5));
        c.scale = JudgmentScale::Geometric;
        c.models = 6;
        c.repetitions = 3;
        c.criteria = IntRange { min: 3, max: 5 };
        let a = run_sa1(&c, 1).unwrap();
        let b = run_sa1(&c, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.records.len(), 6 * 3 * 5);
    }
}
