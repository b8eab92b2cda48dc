//! Estimation-quality statistics.

use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};

/// Two-sided large-sample Student critical values, keyed by significance level.
pub const T_CRITICAL_VALUES: [(f64, f64); 3] = [(0.01, 2.326472), (0.02, 2.053838), (0.03, 1.880865)];

/// Quality of one estimate `x` of a true vector `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityRecord {
    pub mae: f64,
    pub re: f64,
    pub rr: f64,
    pub src: f64,
}

impl QualityRecord {
    /// All four statistics of `x` against `w`.
    pub fn compare(w: &[f64], x: &[f64]) -> Result<QualityRecord> {
        Ok(QualityRecord {
            mae: mae(w, x)?,
            re: relative_error(w, x)?,
            rr: relative_ratio(w, x)?,
            src: spearman_rho(w, x)?,
        })
    }
}

/// Unweighted means of a batch of [`QualityRecord`]s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub msrc: f64,
    pub mre: f64,
    pub mrr: f64,
    pub mmae: f64,
    pub count: usize,
}

fn check_lengths(w: &[f64], x: &[f64]) -> Result<()> {
    if w.len() != x.len() {
        return Err(PcmError::DimensionMismatch {
            expected: w.len(),
            found: x.len(),
        });
    }
    if w.is_empty() {
        return Err(PcmError::Empty("vector"));
    }
    Ok(())
}

/// `(1/n) sum |w_i - x_i|`.
pub fn mae(w: &[f64], x: &[f64]) -> Result<f64> {
    check_lengths(w, x)?;
    Ok(w.iter().zip(x).map(|(a, b)| (a - b).abs()).sum::<f64>() / w.len() as f64)
}

/// `(1/n) sum |w_i - x_i| / w_i`.
pub fn relative_error(w: &[f64], x: &[f64]) -> Result<f64> {
    check_lengths(w, x)?;
    Ok(w.iter().zip(x).map(|(a, b)| (a - b).abs() / a).sum::<f64>() / w.len() as f64)
}

/// `(1/n) sum x_i / w_i`.
pub fn relative_ratio(w: &[f64], x: &[f64]) -> Result<f64> {
    check_lengths(w, x)?;
    Ok(w.iter().zip(x).map(|(a, b)| b / a).sum::<f64>() / w.len() as f64)
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && v[order[end]] == v[order[start]] {
            end += 1;
        }
        // Positions start..end hold equal values; their ranks are start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation of the average-rank vectors.
pub fn spearman_rho(w: &[f64], x: &[f64]) -> Result<f64> {
    check_lengths(w, x)?;
    if w.len() < 2 {
        return Err(PcmError::Undefined("rank correlation needs at least 2 entries".into()));
    }
    let rw = average_ranks(w);
    let rx = average_ranks(x);
    let n = rw.len() as f64;
    let mw = rw.iter().sum::<f64>() / n;
    let mx = rx.iter().sum::<f64>() / n;
    let (mut cov, mut vw, mut vx) = (0.0, 0.0, 0.0);
    for (a, b) in rw.iter().zip(&rx) {
        cov += (a - mw) * (b - mx);
        vw += (a - mw) * (a - mw);
        vx += (b - mx) * (b - mx);
    }
    if vw == 0.0 || vx == 0.0 {
        return Err(PcmError::Undefined("rank correlation of a constant vector".into()));
    }
    Ok((cov / (vw * vx).sqrt()).clamp(-1.0, 1.0))
}

/// MSRC, MRE, MRR (and mean MAE) over `records`.
pub fn aggregate(records: &[QualityRecord]) -> Result<AggregateSummary> {
    if records.is_empty() {
        return Err(PcmError::Empty("quality records"));
    }
    let n = records.len() as f64;
    let mean = |f: fn(&QualityRecord) -> f64| records.iter().map(f).sum::<f64>() / n;
    Ok(AggregateSummary {
        msrc: mean(|r| r.src),
        mre: mean(|r| r.re),
        mrr: mean(|r| r.rr),
        mmae: mean(|r| r.mae),
        count: records.len(),
    })
}

/// Quantile of order `p` with linear interpolation at `h = (n - 1) p`.
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(PcmError::Empty("quantile sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, p)
}

/// [`empirical_quantile`] on an already sorted sample.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(PcmError::Empty("quantile sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(PcmError::Undefined(format!("quantile order {p} outside [0, 1]")));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// `t = R sqrt((n - 2) / (1 - R^2))` with `n - 2` degrees of freedom.
pub fn t_statistic(r: f64, sample_size: usize) -> Result<(f64, usize)> {
    // NaN fails the range test.
    if r.is_nan() || r.abs() >= 1.0 {
        return Err(PcmError::Undefined(format!("|R| = {} must be < 1", r.abs())));
    }
    if sample_size < 3 {
        return Err(PcmError::Undefined(format!("sample size {sample_size} must be >= 3")));
    }
    let df = sample_size - 2;
    Ok((r * (df as f64 / (1.0 - r * r)).sqrt(), df))
}

/// Smallest tabulated significance level whose critical value `|t|` exceeds.
pub fn significance_level(t: f64) -> Option<f64> {
    T_CRITICAL_VALUES
        .iter()
        .find(|(_, critical)| t.abs() > *critical)
        .map(|(alpha, _)| *alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mae_and_errors() {
        let w = [7.0 / 20.0, 0.25, 0.25, 3.0 / 20.0];
        let x = [2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
        assert!((mae(&w, &x).unwrap() - 1.0 / 28.0).abs() < 1e-15);
        assert_eq!(mae(&w, &w).unwrap(), 0.0);
        assert!(mae(&w, &x[..3]).is_err());
    }

    #[test]
    fn relative_statistics() {
        let k = [3.0; 4];
        assert!((relative_error(&k, &[2.0, 4.0, 2.0, 4.0]).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((relative_ratio(&k, &[2.0, 4.0, 2.0, 4.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_ratio(&k, &[2.0; 4]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((relative_ratio(&k, &[4.0; 4]).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        let p = [0.1, 0.2, 0.3, 0.4];
        let p1 = [0.15, 0.3, 0.25, 0.3];
        assert!((relative_error(&p, &p1).unwrap() - 17.0 / 48.0).abs() < 1e-15);
        assert!((relative_ratio(&p, &p1).unwrap() - 55.0 / 48.0).abs() < 1e-15);
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[0.35, 0.25, 0.25, 0.15]), vec![4.0, 2.5, 2.5, 1.0]);
        assert_eq!(average_ranks(&[1.0, 1.0, 1.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn spearman_examples() {
        let w = [0.35, 0.25, 0.25, 0.15];
        let x = [2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
        assert!((spearman_rho(&w, &x).unwrap() - 0.8164966).abs() < 1e-7);
        let v = [0.1, 0.4, 0.2, 0.3];
        let rev: Vec<f64> = v.iter().map(|a| -a).collect();
        assert_eq!(spearman_rho(&v, &v).unwrap(), 1.0);
        assert_eq!(spearman_rho(&v, &rev).unwrap(), -1.0);
        assert!(matches!(spearman_rho(&v, &[0.25; 4]), Err(PcmError::Undefined(_))));
    }

    #[test]
    fn aggregates() {
        let r = |src| QualityRecord { mae: 0.0, re: 0.0, rr: 1.0, src };
        let s = aggregate(&[r(0.6), r(0.8)]).unwrap();
        assert!((s.msrc - 0.7).abs() < 1e-15);
        assert_eq!(s.count, 2);
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn quantiles() {
        assert_eq!(empirical_quantile(&[4.0, 1.0, 3.0, 2.0], 0.5).unwrap(), 2.5);
        assert_eq!(empirical_quantile(&[4.0, 1.0, 3.0], 0.0).unwrap(), 1.0);
        assert_eq!(empirical_quantile(&[4.0, 1.0, 3.0], 1.0).unwrap(), 4.0);
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        assert!((empirical_quantile(&grid, 1.0 / 15.0).unwrap() - 1.0 / 15.0).abs() < 1e-9);
        assert!(empirical_quantile(&[], 0.5).is_err());
        assert!(empirical_quantile(&[1.0], 1.5).is_err());
    }

    #[test]
    fn t_values() {
        let (t, df) = t_statistic(0.01392, 30_000).unwrap();
        assert!((t - 2.411168).abs() < 1e-4);
        assert_eq!(df, 29_998);
        assert_eq!(t_statistic(0.0, 10).unwrap().0, 0.0);
        assert!(t_statistic(1.0, 10).is_err());
        assert_eq!(significance_level(2.411168), Some(0.01));
        assert_eq!(significance_level(2.127048), Some(0.02));
        assert_eq!(significance_level(0.5), None);
    }
}
