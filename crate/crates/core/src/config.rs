//! Flat TOML configuration for the two studies.
//!
//! A file may name a `preset`; every key present in the file overrides the
//! preset's value. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::consistency::ConsistencyMeasure;
use crate::error::{PcmError, Result};
use crate::matrix::Reciprocity;
use crate::perturbation::{small_error_mixture, DrawMode, FactorDistribution, PerturbationModel};
use crate::prioritization::{OptimizerSettings, PrioritizationMethod};
use crate::scale::JudgmentScale;
use crate::simulation::{IntRange, Sa1Config, Sa2Config};

pub const SA1_PRESETS: [&str; 3] = ["table2-uniform", "table2-gamma", "table3-fsnedecor"];
pub const SA2_PRESETS: [&str; 2] = ["table8-default", "table8-uniform"];

pub const DEFAULT_SEED: u64 = 0;

/// Keys accepted in an SA|1| file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sa1File {
    pub preset: Option<String>,
    pub criteria_min: Option<usize>,
    pub criteria_max: Option<usize>,
    pub alternatives_min: Option<usize>,
    pub alternatives_max: Option<usize>,
    pub scale: Option<JudgmentScale>,
    pub mode: Option<Reciprocity>,
    pub methods: Option<Vec<PrioritizationMethod>>,
    /// `uniform`, `gamma`, `lognormal`, `truncated-normal` or `fisher-snedecor`.
    pub distribution: Option<String>,
    pub low: Option<f64>,
    pub high: Option<f64>,
    pub shape: Option<f64>,
    pub sigma: Option<f64>,
    pub sd: Option<f64>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub draw_mode: Option<DrawMode>,
    pub repetitions: Option<usize>,
    pub models: Option<usize>,
    pub seed: Option<u64>,
    pub optimizer_tolerance: Option<f64>,
    pub optimizer_max_iterations: Option<usize>,
    pub optimizer_restarts: Option<usize>,
}

/// Keys accepted in an SA|2| file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sa2File {
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub scale: Option<JudgmentScale>,
    pub method: Option<PrioritizationMethod>,
    pub measures: Option<Vec<ConsistencyMeasure>>,
    pub runs_per_vector: Option<usize>,
    pub base_vectors: Option<usize>,
    pub large_low: Option<f64>,
    pub large_high: Option<f64>,
    /// `mixture` or a single family name.
    pub small_error: Option<String>,
    pub small_low: Option<f64>,
    pub small_high: Option<f64>,
    pub shape: Option<f64>,
    pub sigma: Option<f64>,
    pub sd: Option<f64>,
    pub seed: Option<u64>,
    pub optimizer_tolerance: Option<f64>,
    pub optimizer_max_iterations: Option<usize>,
    pub optimizer_restarts: Option<usize>,
}

/// `base` with every `Some` field of `over` written over it.
macro_rules! overlay {
    ($base:expr, $over:expr; $($field:ident),* $(,)?) => {
        $( if $over.$field.is_some() { $base.$field = $over.$field.clone(); } )*
    };
}

fn optimizer_settings(tolerance: Option<f64>, max_iterations: Option<usize>, restarts: Option<usize>) -> Result<OptimizerSettings> {
    let d = OptimizerSettings::default();
    let s = OptimizerSettings {
        tolerance: tolerance.unwrap_or(d.tolerance),
        max_iterations: max_iterations.unwrap_or(d.max_iterations),
        restarts: restarts.unwrap_or(d.restarts),
    };
    s.validate()?;
    Ok(s)
}

/// Builds a unit-mean factor distribution from its family name and keys.
#[allow(clippy::too_many_arguments)]
fn build_distribution(
    family: &str,
    low: f64,
    high: f64,
    shape: Option<f64>,
    sigma: Option<f64>,
    sd: Option<f64>,
    d1: Option<f64>,
    d2: Option<f64>,
    field: &str,
) -> Result<FactorDistribution> {
    let d = match family.trim().to_ascii_lowercase().as_str() {
        "uniform" => FactorDistribution::uniform(low, high),
        "gamma" => FactorDistribution::gamma_unit_mean(shape.unwrap_or(16.0), low, high)?,
        "lognormal" | "log-normal" => FactorDistribution::lognormal_unit_mean(sigma.unwrap_or(0.25), low, high)?,
        "truncated-normal" | "normal" => {
            FactorDistribution::truncated_normal_unit_mean(sd.unwrap_or(0.25), low, high)?
        }
        "fisher-snedecor" | "f" => FactorDistribution::fisher_snedecor(d1.unwrap_or(14.0), d2.unwrap_or(40.0)),
        other => {
            return Err(PcmError::config(
                field,
                format!("unknown distribution '{other}' (expected uniform, gamma, lognormal, truncated-normal or fisher-snedecor)"),
            ))
        }
    };
    d.validate().map_err(|e| PcmError::config(field, e.to_string()))?;
    Ok(d)
}

fn sa1_preset_file(name: &str) -> Result<Sa1File> {
    let uniform_block = |family: &str| Sa1File {
        preset: Some(name.to_string()),
        criteria_min: Some(4),
        criteria_max: Some(4),
        alternatives_min: Some(4),
        alternatives_max: Some(4),
        scale: Some(JudgmentScale::Geometric),
        mode: Some(Reciprocity::Reciprocal),
        methods: Some(PrioritizationMethod::ALL.to_vec()),
        distribution: Some(family.to_string()),
        low: Some(0.01),
        high: Some(1.99),
        draw_mode: Some(DrawMode::PerEntry),
        repetitions: Some(15),
        models: Some(2000),
        seed: Some(DEFAULT_SEED),
        ..Default::default()
    };
    match name {
        "table2-uniform" => Ok(uniform_block("uniform")),
        "table2-gamma" => {
            let mut f = uniform_block("gamma");
            f.shape = Some(16.0);
            Ok(f)
        }
        "table3-fsnedecor" => {
            let mut f = uniform_block("fisher-snedecor");
            f.criteria_min = Some(3);
            f.criteria_max = Some(7);
            f.alternatives_min = Some(3);
            f.alternatives_max = Some(7);
            f.low = None;
            f.high = None;
            f.d1 = Some(14.0);
            f.d2 = Some(40.0);
            f.repetitions = Some(100);
            f.models = Some(1000);
            Ok(f)
        }
        other => Err(PcmError::config(
            "preset",
            format!("unknown SA1 preset '{other}' (expected one of {})", SA1_PRESETS.join(", ")),
        )),
    }
}

fn sa2_preset_file(name: &str) -> Result<Sa2File> {
    let small = match name {
        "table8-default" => "mixture",
        "table8-uniform" => "uniform",
        other => {
            return Err(PcmError::config(
                "preset",
                format!("unknown SA2 preset '{other}' (expected one of {})", SA2_PRESETS.join(", ")),
            ))
        }
    };
    Ok(Sa2File {
        preset: Some(name.to_string()),
        n: Some(4),
        scale: Some(JudgmentScale::Saaty),
        method: Some(PrioritizationMethod::Llsm),
        measures: Some(ConsistencyMeasure::ALL.to_vec()),
        runs_per_vector: Some(20),
        base_vectors: Some(500),
        large_low: Some(2.0),
        large_high: Some(4.0),
        small_error: Some(small.to_string()),
        small_low: Some(0.5),
        small_high: Some(1.5),
        shape: Some(16.0),
        sigma: Some(0.25),
        sd: Some(0.25),
        seed: Some(DEFAULT_SEED),
        ..Default::default()
    })
}

impl Sa1File {
    /// The preset named in the file (default `table2-uniform`) overlaid
    /// with the file's own keys.
    pub fn effective(&self) -> Result<Sa1File> {
        let mut base = sa1_preset_file(self.preset.as_deref().unwrap_or("table2-uniform"))?;
        overlay!(base, self; criteria_min, criteria_max, alternatives_min, alternatives_max,
            scale, mode, methods, distribution, low, high, shape, sigma, sd, d1, d2, draw_mode,
            repetitions, models, seed, optimizer_tolerance, optimizer_max_iterations, optimizer_restarts);
        Ok(base)
    }

    pub fn resolve(&self) -> Result<Sa1Config> {
        let f = self.effective()?;
        let req = |v: Option<usize>, field: &str| v.ok_or_else(|| PcmError::config(field, "missing"));
        let family = f.distribution.clone().unwrap_or_else(|| "uniform".into());
        let distribution = build_distribution(
            &family,
            f.low.unwrap_or(0.01),
            f.high.unwrap_or(1.99),
            f.shape,
            f.sigma,
            f.sd,
            f.d1,
            f.d2,
            "distribution",
        )?;
        let config = Sa1Config {
            criteria: IntRange {
                min: req(f.criteria_min, "criteria_min")?,
                max: req(f.criteria_max, "criteria_max")?,
            },
            alternatives: IntRange {
                min: req(f.alternatives_min, "alternatives_min")?,
                max: req(f.alternatives_max, "alternatives_max")?,
            },
            scale: f.scale.unwrap_or(JudgmentScale::Geometric),
            reciprocity: f.mode.unwrap_or(Reciprocity::Reciprocal),
            methods: f.methods.clone().unwrap_or_else(|| PrioritizationMethod::ALL.to_vec()),
            perturbation: PerturbationModel {
                distribution,
                draw_mode: f.draw_mode.unwrap_or_default(),
            },
            repetitions: req(f.repetitions, "repetitions")?,
            models: req(f.models, "models")?,
            seed: f.seed.unwrap_or(DEFAULT_SEED),
            optimizer: optimizer_settings(f.optimizer_tolerance, f.optimizer_max_iterations, f.optimizer_restarts)?,
        };
        config.validate()?;
        Ok(config)
    }
}

impl Sa2File {
    /// The preset named in the file (default `table8-default`) overlaid
    /// with the file's own keys.
    pub fn effective(&self) -> Result<Sa2File> {
        let mut base = sa2_preset_file(self.preset.as_deref().unwrap_or("table8-default"))?;
        overlay!(base, self; n, scale, method, measures, runs_per_vector, base_vectors,
            large_low, large_high, small_error, small_low, small_high, shape, sigma, sd, seed,
            optimizer_tolerance, optimizer_max_iterations, optimizer_restarts);
        Ok(base)
    }

    pub fn resolve(&self) -> Result<Sa2Config> {
        let f = self.effective()?;
        let (low, high) = (f.small_low.unwrap_or(0.5), f.small_high.unwrap_or(1.5));
        let small_errors = match f.small_error.as_deref().unwrap_or("mixture") {
            "mixture" => small_error_mixture(low, high).map_err(|e| PcmError::config("small_error", e.to_string()))?,
            family => vec![PerturbationModel::per_entry(build_distribution(
                family, low, high, f.shape, f.sigma, f.sd, None, None, "small_error",
            )?)],
        };
        let large_error = FactorDistribution::uniform(f.large_low.unwrap_or(2.0), f.large_high.unwrap_or(4.0));
        let config = Sa2Config {
            n: f.n.unwrap_or(4),
            scale: f.scale.unwrap_or(JudgmentScale::Saaty),
            method: f.method.unwrap_or(PrioritizationMethod::Llsm),
            measures: f.measures.clone().unwrap_or_else(|| ConsistencyMeasure::ALL.to_vec()),
            runs_per_vector: f.runs_per_vector.unwrap_or(20),
            base_vectors: f.base_vectors.unwrap_or(500),
            large_error,
            small_errors,
            seed: f.seed.unwrap_or(DEFAULT_SEED),
            optimizer: optimizer_settings(f.optimizer_tolerance, f.optimizer_max_iterations, f.optimizer_restarts)?,
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        PcmError::Parse {
            line,
            message: e.message().to_string(),
        }
    })
}

pub fn parse_sa1_file(text: &str) -> Result<Sa1File> {
    parse_toml(text)
}

pub fn parse_sa2_file(text: &str) -> Result<Sa2File> {
    parse_toml(text)
}

/// Parses and resolves an SA|1| configuration.
pub fn sa1_config_from_toml(text: &str) -> Result<Sa1Config> {
    parse_sa1_file(text)?.resolve()
}

/// Parses and resolves an SA|2| configuration.
pub fn sa2_config_from_toml(text: &str) -> Result<Sa2Config> {
    parse_sa2_file(text)?.resolve()
}

pub fn sa1_preset(name: &str) -> Result<Sa1Config> {
    Sa1File {
        preset: Some(name.to_string()),
        ..Default::default()
    }
    .resolve()
}

pub fn sa2_preset(name: &str) -> Result<Sa2Config> {
    Sa2File {
        preset: Some(name.to_string()),
        ..Default::default()
    }
    .resolve()
}

/// Flat TOML text of a file's effective keys.
pub fn to_toml<T: Serialize>(file: &T) -> Result<String> {
    toml::to_string(file).map_err(|e| PcmError::config("config", e.to_string()))
}
