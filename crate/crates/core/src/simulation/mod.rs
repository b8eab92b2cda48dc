//! Monte Carlo studies of estimation quality.
//!
//! Work units (hierarchy models or base vectors) each own a ChaCha8 stream
//! selected by `(seed, unit index)`, so results do not depend on how units
//! are scheduled across worker threads.

mod binning;
mod records;
mod sa1;
mod sa2;

pub use binning::{bin_records, bin_values, cm_quality_score, Bin, BinnedReport, MaeColumn, BIN_COUNT, MAE_QUANTILES};
pub use records::{RecordSet, SimulationRecord};
pub use sa1::{run_sa1, Sa1Config, Sa1Outcome, Sa1Record, Sa1Summary};
pub use sa2::{run_sa2, Sa2Config};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::vector::PriorityVector;

/// Largest tolerated share of excluded (numerically failed) cases.
pub const MAX_FAILURE_RATE: f64 = 1e-3;

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub min: usize,
    pub max: usize,
}

impl IntRange {
    pub fn single(v: usize) -> IntRange {
        IntRange { min: v, max: v }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if self.min == self.max {
            self.min
        } else {
            rng.random_range(self.min..=self.max)
        }
    }
}

/// `n` independent uniform(0, 1) draws normalized to unit sum. Zero draws
/// are redrawn.
pub fn random_priority_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PriorityVector> {
    let w = (0..n)
        .map(|_| loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        })
        .collect();
    PriorityVector::new(w)
}

/// The RNG owned by work unit `unit` of a run seeded with `seed`.
pub fn unit_rng(seed: u64, unit: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(unit);
    rng
}

/// Maps `f` over `0..units` on `workers` threads, preserving order.
pub(crate) fn run_units<T, F>(units: usize, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| PcmError::SimulationAborted(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..units).into_par_iter().map(f).collect())
}

/// Counts numerical failures, propagating any other error.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct FailureTally {
    pub excluded: usize,
}

impl FailureTally {
    /// `Ok(None)` when `result` is a numerical failure that should be skipped.
    pub fn filter<T>(&mut self, result: Result<T>) -> Result<Option<T>> {
        match result {
            Ok(v) => Ok(Some(v)),
            Err(e) if e.is_numerical() => {
                self.excluded += 1;
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

pub(crate) fn check_failure_rate(excluded: usize, total: usize) -> Result<()> {
    if total > 0 && excluded as f64 > MAX_FAILURE_RATE * total as f64 {
        return Err(PcmError::SimulationAborted(format!(
            "{excluded} of {total} cases failed numerically (limit {:.1}%)",
            MAX_FAILURE_RATE * 100.0
        )));
    }
    Ok(())
}

/// Default worker count: available cores.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
