//! Consistency measures.
//!
//! Four indices are tied to a prioritization procedure (CI_REV, CI_LLSM,
//! CI_LUA, CI_SRDM); the rest are built from triads `(alpha, beta, chi) =
//! (a_ik, a_ij, a_kj)`, which are consistent exactly when `alpha * chi = beta`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::{Pcm, Reciprocity};
use crate::prioritization::{llsm_priority, lua_priority, rev_priority, srdm_priority, OptimizerSettings};

/// Judgments `(a_ik, a_ij, a_kj)` for pairwise distinct `i, k, j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triad {
    pub i: usize,
    pub k: usize,
    pub j: usize,
    pub alpha: f64,
    pub beta: f64,
    pub chi: f64,
}

impl Triad {
    pub fn new(alpha: f64, beta: f64, chi: f64) -> Triad {
        Triad {
            i: 0,
            k: 1,
            j: 2,
            alpha,
            beta,
            chi,
        }
    }

    fn of(m: &Pcm, i: usize, k: usize, j: usize) -> Triad {
        Triad {
            i,
            k,
            j,
            alpha: m.get(i, k),
            beta: m.get(i, j),
            chi: m.get(k, j),
        }
    }

    /// `min(|1 - beta/(alpha chi)|, |1 - alpha chi/beta|)`, in `[0, 1)`.
    pub fn ti(&self) -> f64 {
        triad_ti(self)
    }

    /// `ln(alpha chi / beta)`, signed.
    pub fn log_ratio(&self) -> f64 {
        (self.alpha * self.chi / self.beta).ln()
    }
}

/// Which index triples a triad set covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriadScope {
    /// `i < k < j`: `n(n-1)(n-2)/6` triads.
    UpperTriangle,
    /// Every ordered distinct triple: `n(n-1)(n-2)` triads.
    AllOrdered,
}

impl TriadScope {
    pub fn for_mode(mode: Reciprocity) -> TriadScope {
        match mode {
            Reciprocity::Reciprocal => TriadScope::UpperTriangle,
            Reciprocity::Arbitrary => TriadScope::AllOrdered,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriadSet {
    triads: Vec<Triad>,
}

impl TriadSet {
    pub fn len(&self) -> usize {
        self.triads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triads.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triad> {
        self.triads.iter()
    }

    pub fn as_slice(&self) -> &[Triad] {
        &self.triads
    }

    fn mean_of(&self, f: impl Fn(&Triad) -> f64) -> f64 {
        self.triads.iter().map(f).sum::<f64>() / self.triads.len() as f64
    }

    fn max_of(&self, f: impl Fn(&Triad) -> f64) -> f64 {
        self.triads.iter().map(f).fold(0.0, f64::max)
    }
}

impl<'a> IntoIterator for &'a TriadSet {
    type Item = &'a Triad;
    type IntoIter = std::slice::Iter<'a, Triad>;

    fn into_iter(self) -> Self::IntoIter {
        self.triads.iter()
    }
}

/// Triads of `m` in the scope implied by its reciprocity mode.
pub fn enumerate_triads(m: &Pcm) -> Result<TriadSet> {
    enumerate_triads_in(m, TriadScope::for_mode(m.mode()))
}

/// Triads of `m` in an explicit scope.
pub fn enumerate_triads_in(m: &Pcm, scope: TriadScope) -> Result<TriadSet> {
    let n = m.n();
    if n < 3 {
        return Err(PcmError::TooSmall(n));
    }
    let mut triads = Vec::new();
    match scope {
        TriadScope::UpperTriangle => {
            triads.reserve(n * (n - 1) * (n - 2) / 6);
            for i in 0..n {
                for k in i + 1..n {
                    for j in k + 1..n {
                        triads.push(Triad::of(m, i, k, j));
                    }
                }
            }
        }
        TriadScope::AllOrdered => {
            triads.reserve(n * (n - 1) * (n - 2));
            for i in 0..n {
                for k in (0..n).filter(|&k| k != i) {
                    for j in (0..n).filter(|&j| j != i && j != k) {
                        triads.push(Triad::of(m, i, k, j));
                    }
                }
            }
        }
    }
    Ok(TriadSet { triads })
}

/// Koczkodaj's triad inconsistency.
pub fn triad_ti(t: &Triad) -> f64 {
    let p = t.alpha * t.chi;
    (1.0 - t.beta / p).abs().min((1.0 - p / t.beta).abs())
}

/// Logarithmic triad inconsistency of order 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LtiOrder {
    One,
    Two,
}

/// `|ln(alpha chi/beta)|` or its square.
pub fn lti(t: &Triad, order: LtiOrder) -> f64 {
    let l = t.log_ratio().abs();
    match order {
        LtiOrder::One => l,
        LtiOrder::Two => l * l,
    }
}

/// `(lambda_max - n) / (n - 1)`. Negative values occur on nonreciprocal input.
pub fn ci_rev(m: &Pcm) -> Result<f64> {
    let n = m.n() as f64;
    let (_, lambda) = rev_priority(m)?;
    Ok((lambda - n) / (n - 1.0))
}

/// `2/((n-1)(n-2)) * sum_{i<j} ln^2(a_ij w_j / w_i)` at the geometric-mean weights.
pub fn ci_llsm(m: &Pcm) -> Result<f64> {
    let n = m.n();
    if n < 3 {
        return Err(PcmError::TooSmall(n));
    }
    let w = llsm_priority(m)?;
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let l = (m.get(i, j) * w[j] / w[i]).ln();
            sum += l * l;
        }
    }
    Ok(2.0 * sum / ((n - 1) * (n - 2)) as f64)
}

/// `sqrt(min LUA objective) / n`.
pub fn ci_lua(m: &Pcm, opt: &OptimizerSettings) -> Result<f64> {
    let (_, f) = lua_priority(m, opt)?;
    Ok(f.sqrt() / m.n() as f64)
}

/// `sqrt(min SRDM objective / n)`.
pub fn ci_srdm(m: &Pcm, opt: &OptimizerSettings) -> Result<f64> {
    let (_, f) = srdm_priority(m, opt)?;
    Ok((f / m.n() as f64).sqrt())
}

/// Largest triad inconsistency over the upper triangle. Reciprocal input only.
pub fn koczkodaj_k(m: &Pcm) -> Result<f64> {
    if m.mode() == Reciprocity::Arbitrary {
        return Err(PcmError::NotDefinedForArbitrary { measure: "K(TI)" });
    }
    Ok(enumerate_triads(m)?.max_of(triad_ti))
}

/// Mean triad inconsistency.
pub fn grzybowski_a(m: &Pcm) -> Result<f64> {
    Ok(enumerate_triads(m)?.mean_of(triad_ti))
}

/// Mean logarithmic triad inconsistency.
pub fn a_lti(m: &Pcm, order: LtiOrder) -> Result<f64> {
    Ok(enumerate_triads(m)?.mean_of(|t| lti(t, order)))
}

/// `MEAN[LTI2] / (1 + MAX[LTI2])` over one triad set.
pub fn cm_lti2(m: &Pcm) -> Result<f64> {
    Ok(cm_lti2_of(&enumerate_triads(m)?))
}

/// [`cm_lti2`] on an already enumerated set.
pub fn cm_lti2_of(triads: &TriadSet) -> f64 {
    let f = |t: &Triad| lti(t, LtiOrder::Two);
    triads.mean_of(f) / (1.0 + triads.max_of(f))
}

/// Every measure the library computes, by its records-CSV column name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ConsistencyMeasure {
    CiRev,
    CiLlsm,
    CiLua,
    CiSrdm,
    KTi,
    ATi,
    ALti1,
    ALti2,
    CmLti2,
}

impl ConsistencyMeasure {
    pub const ALL: [ConsistencyMeasure; 9] = [
        ConsistencyMeasure::CiRev,
        ConsistencyMeasure::CiLlsm,
        ConsistencyMeasure::CiLua,
        ConsistencyMeasure::CiSrdm,
        ConsistencyMeasure::KTi,
        ConsistencyMeasure::ATi,
        ConsistencyMeasure::ALti1,
        ConsistencyMeasure::ALti2,
        ConsistencyMeasure::CmLti2,
    ];

    pub fn column(self) -> &'static str {
        match self {
            ConsistencyMeasure::CiRev => "ci_rev",
            ConsistencyMeasure::CiLlsm => "ci_llsm",
            ConsistencyMeasure::CiLua => "ci_lua",
            ConsistencyMeasure::CiSrdm => "ci_srdm",
            ConsistencyMeasure::KTi => "k_ti",
            ConsistencyMeasure::ATi => "a_ti",
            ConsistencyMeasure::ALti1 => "a_lti1",
            ConsistencyMeasure::ALti2 => "a_lti2",
            ConsistencyMeasure::CmLti2 => "cm_lti2",
        }
    }

    /// Conventional printed name.
    pub fn label(self) -> &'static str {
        match self {
            ConsistencyMeasure::CiRev => "CI_REV",
            ConsistencyMeasure::CiLlsm => "CI_LLSM",
            ConsistencyMeasure::CiLua => "CI_LUA",
            ConsistencyMeasure::CiSrdm => "CI_SRDM",
            ConsistencyMeasure::KTi => "K(TI)",
            ConsistencyMeasure::ATi => "A(TI)",
            ConsistencyMeasure::ALti1 => "A(LTI1)",
            ConsistencyMeasure::ALti2 => "A(LTI2)",
            ConsistencyMeasure::CmLti2 => "CM(LTI2)",
        }
    }

    /// Evaluates the measure on `m`.
    pub fn evaluate(self, m: &Pcm, opt: &OptimizerSettings) -> Result<f64> {
        match self {
            ConsistencyMeasure::CiRev => ci_rev(m),
            ConsistencyMeasure::CiLlsm => ci_llsm(m),
            ConsistencyMeasure::CiLua => ci_lua(m, opt),
            ConsistencyMeasure::CiSrdm => ci_srdm(m, opt),
            ConsistencyMeasure::KTi => koczkodaj_k(m),
            ConsistencyMeasure::ATi => grzybowski_a(m),
            ConsistencyMeasure::ALti1 => a_lti(m, LtiOrder::One),
            ConsistencyMeasure::ALti2 => a_lti(m, LtiOrder::Two),
            ConsistencyMeasure::CmLti2 => cm_lti2(m),
        }
    }
}

/// Free-function form of [`ConsistencyMeasure::evaluate`].
pub fn measure(m: &Pcm, which: ConsistencyMeasure, opt: &OptimizerSettings) -> Result<f64> {
    which.evaluate(m, opt)
}

impl fmt::Display for ConsistencyMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for ConsistencyMeasure {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        ConsistencyMeasure::ALL
            .into_iter()
            .find(|m| {
                let col: String = m.column().chars().filter(|c| *c != '_').collect();
                let label: String = m
                    .label()
                    .to_ascii_lowercase()
                    .chars()
                    .filter(|c| c.is_ascii_alphanumeric())
                    .collect();
                key == col || key == label
            })
            .ok_or_else(|| PcmError::config("measure", format!("unknown consistency measure '{s}'")))
    }
}

impl From<ConsistencyMeasure> for String {
    fn from(value: ConsistencyMeasure) -> Self {
        value.column().to_string()
    }
}

impl TryFrom<String> for ConsistencyMeasure {
    type Error = PcmError;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{a_x, r_x};

    fn three(a12: f64, a13: f64, a23: f64) -> Pcm {
        Pcm::new(
            vec![
                vec![1.0, a12, a13],
                vec![1.0 / a12, 1.0, a23],
                vec![1.0 / a13, 1.0 / a23, 1.0],
            ],
            Reciprocity::Reciprocal,
        )
        .unwrap()
    }

    #[test]
    fn triad_counts() {
        assert_eq!(enumerate_triads(&r_x()).unwrap().len(), 4);
        assert_eq!(enumerate_triads(&a_x()).unwrap().len(), 24);
        let m = three(2.0, 4.0, 3.0);
        let t = enumerate_triads(&m).unwrap();
        assert_eq!(t.len(), 1);
        let t = t.as_slice()[0];
        assert_eq!((t.alpha, t.beta, t.chi), (2.0, 4.0, 3.0));
        let two = Pcm::ones(2).unwrap();
        assert_eq!(enumerate_triads(&two), Err(PcmError::TooSmall(2)));
    }

    #[test]
    fn triad_values() {
        assert_eq!(triad_ti(&Triad::new(2.0, 6.0, 3.0)), 0.0);
        assert!((triad_ti(&Triad::new(2.0, 4.0, 3.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(triad_ti(&Triad::new(2.0, 4.0, 3.0)), triad_ti(&Triad::new(3.0, 4.0, 2.0)));
        let l2 = lti(&Triad::new(2.0, 4.0, 3.0), LtiOrder::Two);
        assert!((l2 - 1.5f64.ln().powi(2)).abs() < 1e-15);
        // alpha chi / beta = 1.5 and its inverse give the same values.
        let inv = Triad::new(1.0, 3.0, 2.0);
        assert!((lti(&inv, LtiOrder::One) - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn single_triad_measures() {
        let m = three(2.0, 4.0, 3.0);
        assert!((koczkodaj_k(&m).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((grzybowski_a(&m).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let l2 = 1.5f64.ln().powi(2);
        assert!((a_lti(&m, LtiOrder::Two).unwrap() - l2).abs() < 1e-15);
        assert!((cm_lti2(&m).unwrap() - l2 / (1.0 + l2)).abs() < 1e-15);
    }

    #[test]
    fn k_refuses_arbitrary() {
        assert!(matches!(
            koczkodaj_k(&a_x()),
            Err(PcmError::NotDefinedForArbitrary { .. })
        ));
    }

    #[test]
    fn worked_example_indices() {
        assert!((ci_rev(&a_x()).unwrap() + 0.0893164).abs() < 1e-7);
        assert!((ci_llsm(&a_x()).unwrap() - 0.0400378).abs() < 1e-7);
        let opt = OptimizerSettings::default();
        for which in ConsistencyMeasure::ALL {
            assert!(which.evaluate(&r_x(), &opt).unwrap().abs() < 1e-12, "{which}");
        }
    }

    #[test]
    fn measure_names() {
        for which in ConsistencyMeasure::ALL {
            assert_eq!(which.column().parse::<ConsistencyMeasure>().unwrap(), which);
            assert_eq!(which.label().parse::<ConsistencyMeasure>().unwrap(), which);
        }
        assert!("ci_foo".parse::<ConsistencyMeasure>().is_err());
    }
}
