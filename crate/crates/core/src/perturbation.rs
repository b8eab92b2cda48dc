//! Multiplicative perturbation factors.
//!
//! Every truncated family is re-centered after truncation so that the
//! expected factor is 1; the location parameter is found by bisection on a
//! numerically integrated truncated mean.

use rand::Rng;
use rand_distr::{Distribution, FisherF, Gamma, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};

/// Draws allowed per accepted truncated sample.
pub const REJECTION_BUDGET: usize = 1_000_000;

/// Simpson panels used for truncated-mean integrals (even).
const QUADRATURE_PANELS: usize = 20_000;

/// A positive distribution for the factor `e` in `x_ij = e_ij * w_ij`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FactorDistribution {
    Uniform {
        low: f64,
        high: f64,
    },
    /// Gamma(shape, scale) restricted to `[low, high]`.
    Gamma {
        shape: f64,
        scale: f64,
        low: f64,
        high: f64,
    },
    /// exp(N(mu, sigma^2)) restricted to `[low, high]`.
    LogNormal {
        mu: f64,
        sigma: f64,
        low: f64,
        high: f64,
    },
    /// N(mean, sd^2) restricted to `[low, high]`.
    TruncatedNormal {
        mean: f64,
        sd: f64,
        low: f64,
        high: f64,
    },
    /// F(d1, d2); untruncated, mean `d2 / (d2 - 2)`.
    FisherSnedecor {
        d1: f64,
        d2: f64,
    },
}

impl FactorDistribution {
    pub fn uniform(low: f64, high: f64) -> Self {
        FactorDistribution::Uniform { low, high }
    }

    pub fn fisher_snedecor(d1: f64, d2: f64) -> Self {
        FactorDistribution::FisherSnedecor { d1, d2 }
    }

    /// Gamma with the given shape, truncated to `[low, high]`, scale chosen
    /// so that the truncated mean is 1.
    pub fn gamma_unit_mean(shape: f64, low: f64, high: f64) -> Result<Self> {
        check_bounds(low, high)?;
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(PcmError::InvalidModel(format!("gamma shape {shape} must be > 0")));
        }
        if high.is_infinite() && low == 0.0 {
            return Ok(FactorDistribution::Gamma {
                shape,
                scale: 1.0 / shape,
                low,
                high,
            });
        }
        let log_scale = calibrate(
            "gamma",
            (-12.0, 12.0),
            low,
            high,
            |log_theta, x| (shape - 1.0) * x.ln() - x / log_theta.exp(),
        )?;
        Ok(FactorDistribution::Gamma {
            shape,
            scale: log_scale.exp(),
            low,
            high,
        })
    }

    /// Log-normal with the given sigma, truncated to `[low, high]`, `mu`
    /// chosen so that the truncated mean is 1.
    pub fn lognormal_unit_mean(sigma: f64, low: f64, high: f64) -> Result<Self> {
        check_bounds(low, high)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(PcmError::InvalidModel(format!("log-normal sigma {sigma} must be > 0")));
        }
        if high.is_infinite() && low == 0.0 {
            return Ok(FactorDistribution::LogNormal {
                mu: -sigma * sigma / 2.0,
                sigma,
                low,
                high,
            });
        }
        let mu = calibrate("log-normal", (-20.0, 20.0), low, high, |mu, x| {
            let z = (x.ln() - mu) / sigma;
            -x.ln() - 0.5 * z * z
        })?;
        Ok(FactorDistribution::LogNormal {
            mu,
            sigma,
            low,
            high,
        })
    }

    /// Normal with the given sd, truncated to `[low, high]` (`low > 0`),
    /// location chosen so that the truncated mean is 1.
    pub fn truncated_normal_unit_mean(sd: f64, low: f64, high: f64) -> Result<Self> {
        check_bounds(low, high)?;
        if low <= 0.0 || high.is_infinite() {
            return Err(PcmError::InvalidModel(
                "truncated normal needs finite bounds with low > 0".into(),
            ));
        }
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(PcmError::InvalidModel(format!("normal sd {sd} must be > 0")));
        }
        let span = 60.0 * sd + (high - low);
        let mean = calibrate("truncated normal", (low - span, high + span), low, high, |m, x| {
            let z = (x - m) / sd;
            -0.5 * z * z
        })?;
        Ok(FactorDistribution::TruncatedNormal {
            mean,
            sd,
            low,
            high,
        })
    }

    fn bounds(&self) -> (f64, f64) {
        match *self {
            FactorDistribution::Uniform { low, high }
            | FactorDistribution::Gamma { low, high, .. }
            | FactorDistribution::LogNormal { low, high, .. }
            | FactorDistribution::TruncatedNormal { low, high, .. } => (low, high),
            FactorDistribution::FisherSnedecor { .. } => (0.0, f64::INFINITY),
        }
    }

    /// Checks parameters and that the support is strictly positive.
    pub fn validate(&self) -> Result<()> {
        let (low, high) = self.bounds();
        match *self {
            FactorDistribution::Uniform { low, high } => {
                if !(low > 0.0 && low <= high && high.is_finite()) {
                    return Err(PcmError::InvalidModel(format!(
                        "uniform support [{low}, {high}] must satisfy 0 < low <= high < inf"
                    )));
                }
            }
            FactorDistribution::Gamma { shape, scale, .. } => {
                check_bounds(low, high)?;
                if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
                    return Err(PcmError::InvalidModel("gamma parameters must be > 0".into()));
                }
            }
            FactorDistribution::LogNormal { mu, sigma, .. } => {
                check_bounds(low, high)?;
                if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
                    return Err(PcmError::InvalidModel("log-normal sigma must be > 0".into()));
                }
            }
            FactorDistribution::TruncatedNormal { mean, sd, .. } => {
                check_bounds(low, high)?;
                if !(low > 0.0 && high.is_finite() && sd > 0.0 && mean.is_finite()) {
                    return Err(PcmError::InvalidModel(
                        "truncated normal needs 0 < low < high < inf and sd > 0".into(),
                    ));
                }
            }
            FactorDistribution::FisherSnedecor { d1, d2 } => {
                if !(d1 > 0.0 && d2 > 0.0 && d1.is_finite() && d2.is_finite()) {
                    return Err(PcmError::InvalidModel(
                        "Fisher-Snedecor degrees of freedom must be > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// One factor; truncation by rejection.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match *self {
            FactorDistribution::Uniform { low, high } => {
                if low == high {
                    Ok(low)
                } else {
                    Ok(rng.random_range(low..=high))
                }
            }
            FactorDistribution::Gamma { shape, scale, low, high } => {
                let d = Gamma::new(shape, scale)
                    .map_err(|e| PcmError::InvalidModel(format!("gamma: {e}")))?;
                rejection(rng, &d, low, high)
            }
            FactorDistribution::LogNormal { mu, sigma, low, high } => {
                let d = LogNormal::new(mu, sigma)
                    .map_err(|e| PcmError::InvalidModel(format!("log-normal: {e}")))?;
                rejection(rng, &d, low, high)
            }
            FactorDistribution::TruncatedNormal { mean, sd, low, high } => {
                let d = Normal::new(mean, sd)
                    .map_err(|e| PcmError::InvalidModel(format!("normal: {e}")))?;
                rejection(rng, &d, low, high)
            }
            FactorDistribution::FisherSnedecor { d1, d2 } => {
                let d = FisherF::new(d1, d2)
                    .map_err(|e| PcmError::InvalidModel(format!("Fisher-Snedecor: {e}")))?;
                rejection(rng, &d, 0.0, f64::INFINITY)
            }
        }
    }

    /// Expected factor, analytic where closed form exists and by quadrature
    /// for truncated families. `None` when infinite.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            FactorDistribution::Uniform { low, high } => Some(0.5 * (low + high)),
            FactorDistribution::FisherSnedecor { d2, .. } => {
                (d2 > 2.0).then(|| d2 / (d2 - 2.0))
            }
            FactorDistribution::Gamma { shape, scale, low, high } => {
                if low == 0.0 && high.is_infinite() {
                    Some(shape * scale)
                } else {
                    truncated_mean(low, high, |x| (shape - 1.0) * x.ln() - x / scale)
                }
            }
            FactorDistribution::LogNormal { mu, sigma, low, high } => {
                if low == 0.0 && high.is_infinite() {
                    Some((mu + sigma * sigma / 2.0).exp())
                } else {
                    truncated_mean(low, high, |x| {
                        let z = (x.ln() - mu) / sigma;
                        -x.ln() - 0.5 * z * z
                    })
                }
            }
            FactorDistribution::TruncatedNormal { mean, sd, low, high } => {
                truncated_mean(low, high, |x| {
                    let z = (x - mean) / sd;
                    -0.5 * z * z
                })
            }
        }
    }
}

/// Whether one factor is drawn per entry or one per perturbation call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrawMode {
    #[default]
    PerEntry,
    Shared,
}

/// A factor distribution plus its draw mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationModel {
    pub distribution: FactorDistribution,
    pub draw_mode: DrawMode,
}

impl PerturbationModel {
    pub fn per_entry(distribution: FactorDistribution) -> Self {
        PerturbationModel {
            distribution,
            draw_mode: DrawMode::PerEntry,
        }
    }

    /// The identity perturbation.
    pub fn constant_one() -> Self {
        Self::per_entry(FactorDistribution::uniform(1.0, 1.0))
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        self.distribution.sample(rng)
    }
}

/// Free-function form of [`PerturbationModel::sample`].
pub fn sample_factor<R: Rng + ?Sized>(model: &PerturbationModel, rng: &mut R) -> Result<f64> {
    model.sample(rng)
}

/// The four small-error families of the single-matrix study, each truncated
/// to `[low, high]` with unit mean: gamma (shape 16), log-normal
/// (sigma 0.25), truncated normal (sd 0.25) and uniform.
pub fn small_error_mixture(low: f64, high: f64) -> Result<Vec<PerturbationModel>> {
    Ok(vec![
        PerturbationModel::per_entry(FactorDistribution::gamma_unit_mean(16.0, low, high)?),
        PerturbationModel::per_entry(FactorDistribution::lognormal_unit_mean(0.25, low, high)?),
        PerturbationModel::per_entry(FactorDistribution::truncated_normal_unit_mean(
            0.25, low, high,
        )?),
        PerturbationModel::per_entry(FactorDistribution::uniform(low, high)),
    ])
}

fn check_bounds(low: f64, high: f64) -> Result<()> {
    if !(low >= 0.0 && high > low && !low.is_nan() && !high.is_nan()) {
        return Err(PcmError::InvalidModel(format!(
            "truncation interval [{low}, {high}] must satisfy 0 <= low < high"
        )));
    }
    Ok(())
}

fn rejection<R, D>(rng: &mut R, d: &D, low: f64, high: f64) -> Result<f64>
where
    R: Rng + ?Sized,
    D: Distribution<f64>,
{
    for _ in 0..REJECTION_BUDGET {
        let x = d.sample(rng);
        if x > 0.0 && x >= low && x <= high && x.is_finite() {
            return Ok(x);
        }
    }
    Err(PcmError::InvalidModel(format!(
        "rejection budget of {REJECTION_BUDGET} draws exhausted for support [{low}, {high}]"
    )))
}

/// `E[X | low <= X <= high]` for an unnormalized log-density.
fn truncated_mean(low: f64, high: f64, log_pdf: impl Fn(f64) -> f64) -> Option<f64> {
    if !high.is_finite() {
        return None;
    }
    let panels = QUADRATURE_PANELS;
    let h = (high - low) / panels as f64;
    // Endpoint at exactly 0 may have an infinite log-density.
    let nodes: Vec<(f64, f64)> = (0..=panels)
        .map(|i| {
            let x = (low + h * i as f64).max(f64::MIN_POSITIVE);
            (x, log_pdf(x))
        })
        .collect();
    let peak = nodes
        .iter()
        .map(|(_, l)| *l)
        .filter(|l| l.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let (mut mass, mut first) = (0.0, 0.0);
    for (i, (x, l)) in nodes.iter().enumerate() {
        let weight = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let p = if l.is_finite() { (l - peak).exp() } else { 0.0 };
        mass += weight * p;
        first += weight * p * x;
    }
    (mass > 0.0).then(|| first / mass)
}

/// Finds the parameter in `range` whose truncated mean is 1, assuming the
/// truncated mean increases with the parameter.
fn calibrate(
    family: &str,
    range: (f64, f64),
    low: f64,
    high: f64,
    log_pdf: impl Fn(f64, f64) -> f64,
) -> Result<f64> {
    if !(low < 1.0 && high > 1.0) {
        return Err(PcmError::InvalidModel(format!(
            "{family}: truncation interval [{low}, {high}] must contain 1"
        )));
    }
    let mean_at = |p: f64| truncated_mean(low, high, |x| log_pdf(p, x));
    let (mut lo, mut hi) = range;
    let (m_lo, m_hi) = (mean_at(lo), mean_at(hi));
    match (m_lo, m_hi) {
        (Some(a), Some(b)) if a <= 1.0 && b >= 1.0 => {}
        _ => {
            return Err(PcmError::InvalidModel(format!(
                "{family}: no parameter gives a unit mean on [{low}, {high}] \
                 (attainable range {m_lo:?}..{m_hi:?})"
            )))
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match mean_at(mid) {
            Some(m) if m < 1.0 => lo = mid,
            Some(_) => hi = mid,
            None => break,
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_mean(d: &FactorDistribution, draws: usize, seed: u64) -> (f64, f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut sum, mut min, mut max) = (0.0, f64::INFINITY, 0.0f64);
        for _ in 0..draws {
            let x = d.sample(&mut rng).unwrap();
            sum += x;
            min = min.min(x);
            max = max.max(x);
        }
        (sum / draws as f64, min, max)
    }

    #[test]
    fn calibrated_families_have_unit_mean() {
        for d in [
            FactorDistribution::gamma_unit_mean(16.0, 0.5, 1.5).unwrap(),
            FactorDistribution::lognormal_unit_mean(0.25, 0.5, 1.5).unwrap(),
            FactorDistribution::truncated_normal_unit_mean(0.25, 0.5, 1.5).unwrap(),
            FactorDistribution::gamma_unit_mean(16.0, 0.01, 1.99).unwrap(),
        ] {
            assert!((d.mean().unwrap() - 1.0).abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn untruncated_closed_forms() {
        let g = FactorDistribution::gamma_unit_mean(2.0, 0.0, f64::INFINITY).unwrap();
        assert_eq!(g.mean(), Some(1.0));
        let l = FactorDistribution::lognormal_unit_mean(0.5, 0.0, f64::INFINITY).unwrap();
        assert!((l.mean().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unreachable_unit_mean_is_rejected() {
        // With shape 0.5 the truncated mean on [0.01, 1.99] stays below 2/3.
        assert!(FactorDistribution::gamma_unit_mean(0.5, 0.01, 1.99).is_err());
        assert!(FactorDistribution::truncated_normal_unit_mean(0.2, 1.2, 1.5).is_err());
    }

    #[test]
    fn invalid_supports() {
        assert!(FactorDistribution::uniform(0.0, 1.0).validate().is_err());
        assert!(FactorDistribution::uniform(2.0, 1.0).validate().is_err());
        assert!(FactorDistribution::uniform(1.0, 1.0).validate().is_ok());
        assert!(FactorDistribution::fisher_snedecor(0.0, 4.0).validate().is_err());
        assert!(FactorDistribution::truncated_normal_unit_mean(0.2, 0.0, 2.0).is_err());
    }

    #[test]
    fn constant_model_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = PerturbationModel::constant_one();
        for _ in 0..10 {
            assert_eq!(sample_factor(&m, &mut rng).unwrap(), 1.0);
        }
    }

    #[test]
    fn samples_stay_in_support() {
        let d = FactorDistribution::lognormal_unit_mean(0.25, 0.5, 1.5).unwrap();
        let (_, min, max) = sample_mean(&d, 20_000, 11);
        assert!(min >= 0.5 && max <= 1.5);
    }

    #[test]
    fn fisher_snedecor_thousand_draws_look_like_reported() {
        // A thousand draws of F(14, 40) have a mean near 1 and a range of
        // roughly [0.17, 5.6].
        let d = FactorDistribution::fisher_snedecor(14.0, 40.0);
        let (mean, min, max) = sample_mean(&d, 1000, 5);
        assert!((0.95..1.15).contains(&mean), "{mean}");
        assert!(min > 0.05 && min < 0.5, "{min}");
        assert!(max > 2.0 && max < 10.0, "{max}");
        assert!((d.mean().unwrap() - 40.0 / 38.0).abs() < 1e-15);
    }

    #[test]
    fn impossible_truncation_exhausts_budget() {
        let d = FactorDistribution::Gamma {
            shape: 400.0,
            scale: 1.0 / 400.0,
            low: 5.0,
            high: 6.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(d.sample(&mut rng), Err(PcmError::InvalidModel(_))));
    }
}
