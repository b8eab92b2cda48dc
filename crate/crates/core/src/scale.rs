//! Judgment scales and rounding of raw ratios onto them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::PcmError;

/// Largest exponent `k` of the geometric scale `2^(k/2)`.
const GEOMETRIC_MAX_K: i32 = 8;

/// Admissible judgment values.
///
/// Every finite scale is closed under reciprocal and contains 1.
/// `Continuous` admits every positive ratio, so rounding onto it is the
/// identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum JudgmentScale {
    /// `{1/9, ..., 1/2, 1, 2, ..., 9}`.
    Saaty,
    /// `{2^(k/2) : k = -8..=8}`.
    Geometric,
    /// `{1/N, ..., 1/2, 1, 2, ..., N}`.
    Numeric(u32),
    /// No rounding.
    Continuous,
}

impl JudgmentScale {
    /// The sorted set of admissible values. `None` for [`JudgmentScale::Continuous`].
    pub fn values(&self) -> Option<Vec<f64>> {
        match *self {
            JudgmentScale::Saaty => Some(numeric_values(9)),
            JudgmentScale::Numeric(n) => Some(numeric_values(n)),
            JudgmentScale::Geometric => Some(
                (-GEOMETRIC_MAX_K..=GEOMETRIC_MAX_K)
                    .map(geometric_value)
                    .collect(),
            ),
            JudgmentScale::Continuous => None,
        }
    }

    /// Nearest scale value to `v` by linear absolute distance.
    ///
    /// When two values are exactly equidistant the one nearer to 1 wins.
    pub fn round(&self, v: f64) -> f64 {
        debug_assert!(v > 0.0, "rounding requires a positive ratio");
        match *self {
            JudgmentScale::Continuous => v,
            JudgmentScale::Saaty => round_numeric(v, 9),
            JudgmentScale::Numeric(n) => round_numeric(v, n),
            JudgmentScale::Geometric => {
                let k = 2.0 * v.log2();
                let lo = (k.floor() as i32).clamp(-GEOMETRIC_MAX_K, GEOMETRIC_MAX_K);
                let hi = (k.ceil() as i32).clamp(-GEOMETRIC_MAX_K, GEOMETRIC_MAX_K);
                nearest(v, geometric_value(lo), geometric_value(hi))
            }
        }
    }

    /// True if `v` is (bitwise) one of the admissible values.
    pub fn contains(&self, v: f64) -> bool {
        match self.values() {
            None => v > 0.0 && v.is_finite(),
            Some(values) => values.contains(&v),
        }
    }
}

/// Free-function form of [`JudgmentScale::round`].
pub fn round_to_scale(v: f64, scale: JudgmentScale) -> f64 {
    scale.round(v)
}

fn geometric_value(k: i32) -> f64 {
    2f64.powf(k as f64 / 2.0)
}

fn numeric_values(n: u32) -> Vec<f64> {
    let n = n.max(1);
    let mut values: Vec<f64> = (2..=n).rev().map(|k| 1.0 / k as f64).collect();
    values.extend((1..=n).map(|k| k as f64));
    values
}

fn round_numeric(v: f64, n: u32) -> f64 {
    let n = n.max(1) as f64;
    if v >= 1.0 {
        let lo = v.floor().min(n);
        let hi = v.ceil().min(n);
        nearest(v, lo, hi)
    } else {
        // v lies between 1/(k+1) and 1/k.
        let k = (1.0 / v).floor();
        let upper = 1.0 / k.min(n);
        let lower = 1.0 / (k + 1.0).min(n);
        nearest(v, lower, upper)
    }
}

/// Picks the closer of two candidates; ties go to the one nearer to 1.
fn nearest(v: f64, a: f64, b: f64) -> f64 {
    let da = (v - a).abs();
    let db = (v - b).abs();
    if da < db {
        a
    } else if db < da {
        b
    } else if a.ln().abs() <= b.ln().abs() {
        a
    } else {
        b
    }
}

impl fmt::Display for JudgmentScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JudgmentScale::Saaty => f.write_str("saaty"),
            JudgmentScale::Geometric => f.write_str("geometric"),
            JudgmentScale::Numeric(n) => write!(f, "numeric:{n}"),
            JudgmentScale::Continuous => f.write_str("continuous"),
        }
    }
}

impl FromStr for JudgmentScale {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "saaty" => Ok(JudgmentScale::Saaty),
            "geometric" => Ok(JudgmentScale::Geometric),
            "continuous" | "none" => Ok(JudgmentScale::Continuous),
            _ => {
                let n = s
                    .strip_prefix("numeric:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| {
                        PcmError::config(
                            "scale",
                            format!(
                                "unknown scale '{s}' (expected saaty, geometric, numeric:N or continuous)"
                            ),
                        )
                    })?;
                Ok(JudgmentScale::Numeric(n))
            }
        }
    }
}

impl TryFrom<String> for JudgmentScale {
    type Error = PcmError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<JudgmentScale> for String {
    fn from(value: JudgmentScale) -> Self {
        value.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example_roundings() {
        let s = JudgmentScale::Saaty;
        assert_eq!(s.round(7.0 / 5.0), 1.0);
        assert_eq!(s.round(5.0 / 7.0), 0.5);
        assert_eq!(s.round(3.0 / 7.0), 0.5);
        assert_eq!(s.round(5.0 / 3.0), 2.0);
        assert_eq!(s.round(7.0 / 3.0), 2.0);
        assert_eq!(s.round(3.0 / 5.0), 0.5);
    }

    #[test]
    fn one_is_fixed() {
        for s in [
            JudgmentScale::Saaty,
            JudgmentScale::Geometric,
            JudgmentScale::Numeric(4),
            JudgmentScale::Continuous,
        ] {
            assert_eq!(s.round(1.0), 1.0);
        }
    }

    #[test]
    fn geometric_nearest() {
        let r = JudgmentScale::Geometric.round(1.4);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(JudgmentScale::Geometric.round(1000.0), 16.0);
        assert_eq!(JudgmentScale::Geometric.round(1e-5), 1.0 / 16.0);
    }

    #[test]
    fn value_sets() {
        assert_eq!(JudgmentScale::Saaty.values().unwrap().len(), 17);
        assert_eq!(JudgmentScale::Geometric.values().unwrap().len(), 17);
        assert_eq!(JudgmentScale::Numeric(3).values().unwrap(), vec![1.0 / 3.0, 0.5, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn ties_go_toward_one() {
        assert_eq!(JudgmentScale::Saaty.round(1.5), 1.0);
        assert_eq!(JudgmentScale::Saaty.round(2.5), 2.0);
        assert_eq!(JudgmentScale::Saaty.round(0.75), 1.0);
    }

    #[test]
    fn rounding_is_not_reciprocal_symmetric() {
        // 7/5 -> 1 but 5/7 -> 1/2.
        let s = JudgmentScale::Saaty;
        assert_ne!(s.round(1.4), 1.0 / s.round(1.0 / 1.4));
    }

    #[test]
    fn parse_and_display() {
        for s in ["saaty", "geometric", "numeric:12", "continuous"] {
            assert_eq!(s.parse::<JudgmentScale>().unwrap().to_string(), s);
        }
        assert!("numeric:0".parse::<JudgmentScale>().is_err());
        assert!("fancy".parse::<JudgmentScale>().is_err());
    }

    fn finite_scale() -> impl Strategy<Value = JudgmentScale> {
        prop_oneof![
            Just(JudgmentScale::Saaty),
            Just(JudgmentScale::Geometric),
            (1u32..40).prop_map(JudgmentScale::Numeric),
        ]
    }

    proptest! {
        #[test]
        fn rounding_lands_on_nearest_member(scale in finite_scale(), v in 1e-3f64..1e3) {
            let values = scale.values().unwrap();
            let r = scale.round(v);
            prop_assert!(values.contains(&r));
            let best = values.iter().map(|s| (v - s).abs()).fold(f64::INFINITY, f64::min);
            prop_assert!(((v - r).abs() - best).abs() <= 1e-12 * v.max(1.0));
        }

        #[test]
        fn rounding_members_is_identity(scale in finite_scale(), idx in 0usize..100) {
            let values = scale.values().unwrap();
            let v = values[idx % values.len()];
            prop_assert_eq!(scale.round(v), v);
        }

        #[test]
        fn scales_closed_under_reciprocal(scale in finite_scale()) {
            let values = scale.values().unwrap();
            for v in &values {
                prop_assert!(values.iter().any(|s| (s * v - 1.0).abs() < 1e-12));
            }
        }
    }
}
