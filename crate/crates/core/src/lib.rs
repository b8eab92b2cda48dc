//! Pairwise comparison matrices: prioritization procedures, consistency
//! measures, estimation-quality statistics and Monte Carlo studies of how
//! well each procedure recovers a known priority vector.

pub mod config;
pub mod consistency;
pub mod error;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod perturbation;
pub mod prioritization;
pub mod reference;
pub mod scale;
pub mod simulation;
pub mod validation;
pub mod vector;

pub use consistency::{ConsistencyMeasure, Triad, TriadScope, TriadSet};
pub use error::{PcmError, Result};
pub use matrix::{Pcm, Reciprocity, Region};
pub use metrics::{AggregateSummary, QualityRecord};
pub use perturbation::{DrawMode, FactorDistribution, PerturbationModel};
pub use prioritization::{OptimizerSettings, PrioritizationMethod};
pub use scale::JudgmentScale;
pub use vector::PriorityVector;
