//! Priority vectors from pairwise comparison matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::matrix::Pcm;
use crate::vector::PriorityVector;

/// Power-iteration stopping threshold on successive normalized iterates.
pub const REV_TOLERANCE: f64 = 1e-12;

/// Power-iteration cap used by [`rev_priority`].
pub const REV_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrioritizationMethod {
    /// Right principal eigenvector.
    Rev,
    /// Logarithmic least squares (row geometric means).
    Llsm,
    /// Logarithmic utility approach.
    Lua,
    /// Sum of squared relative differences.
    Srdm,
    /// Simple normalized column sum.
    Sncs,
}

impl PrioritizationMethod {
    pub const ALL: [PrioritizationMethod; 5] = [
        PrioritizationMethod::Rev,
        PrioritizationMethod::Llsm,
        PrioritizationMethod::Lua,
        PrioritizationMethod::Srdm,
        PrioritizationMethod::Sncs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PrioritizationMethod::Rev => "rev",
            PrioritizationMethod::Llsm => "llsm",
            PrioritizationMethod::Lua => "lua",
            PrioritizationMethod::Srdm => "srdm",
            PrioritizationMethod::Sncs => "sncs",
        }
    }
}

impl fmt::Display for PrioritizationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrioritizationMethod {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        PrioritizationMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == lower || (lower == "gm" && *m == PrioritizationMethod::Llsm))
            .ok_or_else(|| {
                PcmError::config(
                    "method",
                    format!("unknown method '{s}' (expected rev, llsm, lua, srdm or sncs)"),
                )
            })
    }
}

/// Stopping rules for the LUA/SRDM least-squares solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSettings {
    /// Relative objective decrease below which an accepted step ends a run.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Extra polishing runs restarted from the best point found.
    pub restarts: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            tolerance: 1e-14,
            max_iterations: 10_000,
            restarts: 2,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(PcmError::config("optimizer.tolerance", "must be > 0"));
        }
        if self.max_iterations == 0 {
            return Err(PcmError::config("optimizer.max_iterations", "must be >= 1"));
        }
        Ok(())
    }
}

/// A priority vector with the by-products of the procedure that made it.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub method: PrioritizationMethod,
    pub vector: PriorityVector,
    /// Perron root, for REV.
    pub lambda_max: Option<f64>,
    /// Minimized objective, for LUA and SRDM.
    pub objective: Option<f64>,
}

/// Runs `method` on `m`, keeping the eigenvalue or objective it produces.
pub fn estimate(m: &Pcm, method: PrioritizationMethod, opt: &OptimizerSettings) -> Result<Estimate> {
    let (vector, lambda_max, objective) = match method {
        PrioritizationMethod::Rev => {
            let (w, lambda) = rev_priority(m)?;
            (w, Some(lambda), None)
        }
        PrioritizationMethod::Llsm => (llsm_priority(m)?, None, None),
        PrioritizationMethod::Sncs => (sncs_priority(m)?, None, None),
        PrioritizationMethod::Lua => {
            let (w, f) = lua_priority(m, opt)?;
            (w, None, Some(f))
        }
        PrioritizationMethod::Srdm => {
            let (w, f) = srdm_priority(m, opt)?;
            (w, None, Some(f))
        }
    };
    Ok(Estimate {
        method,
        vector,
        lambda_max,
        objective,
    })
}

/// Dispatches to the procedure named by `method`.
pub fn prioritize(m: &Pcm, method: PrioritizationMethod, opt: &OptimizerSettings) -> Result<PriorityVector> {
    estimate(m, method, opt).map(|e| e.vector)
}

/// Principal right eigenvector and Perron root by power iteration.
pub fn rev_priority(m: &Pcm) -> Result<(PriorityVector, f64)> {
    rev_priority_with_limit(m, REV_MAX_ITERATIONS)
}

/// [`rev_priority`] with an explicit iteration cap.
pub fn rev_priority_with_limit(m: &Pcm, max_iterations: usize) -> Result<(PriorityVector, f64)> {
    let n = m.n();
    let mut w = vec![1.0 / n as f64; n];
    for _ in 0..max_iterations {
        let v = m.mul_vec(&w);
        let sum: f64 = v.iter().sum();
        let next: Vec<f64> = v.iter().map(|x| x / sum).collect();
        let delta = next
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        w = next;
        if delta < REV_TOLERANCE {
            // e^T M w / e^T w with e^T w = 1.
            let lambda: f64 = m.mul_vec(&w).iter().sum();
            return Ok((PriorityVector::new(w)?, lambda));
        }
    }
    Err(PcmError::NoConvergence {
        iterations: max_iterations,
        last_iterate: w,
    })
}

/// Normalized row geometric means.
pub fn llsm_priority(m: &Pcm) -> Result<PriorityVector> {
    let n = m.n() as f64;
    let w = (0..m.n())
        .map(|i| (m.row(i).iter().map(|a| a.ln()).sum::<f64>() / n).exp())
        .collect();
    PriorityVector::new(w)
}

/// Row averages of the column-normalized matrix.
pub fn sncs_priority(m: &Pcm) -> Result<PriorityVector> {
    let n = m.n();
    let col_sums: Vec<f64> = (0..n).map(|j| (0..n).map(|i| m.get(i, j)).sum()).collect();
    let w = (0..n)
        .map(|i| (0..n).map(|j| m.get(i, j) / col_sums[j]).sum::<f64>() / n as f64)
        .collect();
    PriorityVector::new(w)
}

/// `sum_i ln^2( (M w)_i / (n w_i) )`. Invariant under positive rescaling of `w`.
pub fn lua_objective(m: &Pcm, w: &[f64]) -> f64 {
    LeastSquares::Lua.cost(m, w)
}

/// `sum_i ( (M w)_i / (n w_i) - 1 )^2`. Invariant under positive rescaling of `w`.
pub fn srdm_objective(m: &Pcm, w: &[f64]) -> f64 {
    LeastSquares::Srdm.cost(m, w)
}

/// Minimizer of [`lua_objective`] and its value.
pub fn lua_priority(m: &Pcm, opt: &OptimizerSettings) -> Result<(PriorityVector, f64)> {
    LeastSquares::Lua.solve(m, opt)
}

/// Minimizer of [`srdm_objective`] and its value.
pub fn srdm_priority(m: &Pcm, opt: &OptimizerSettings) -> Result<(PriorityVector, f64)> {
    LeastSquares::Srdm.solve(m, opt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LeastSquares {
    Lua,
    Srdm,
}

/// One Levenberg-Marquardt run.
struct Run {
    y: Vec<f64>,
    cost: f64,
    converged: bool,
}

impl LeastSquares {
    fn name(self) -> &'static str {
        match self {
            LeastSquares::Lua => "LUA",
            LeastSquares::Srdm => "SRDM",
        }
    }

    fn residuals(self, m: &Pcm, w: &[f64]) -> Vec<f64> {
        let n = m.n() as f64;
        m.mul_vec(w)
            .iter()
            .zip(w)
            .map(|(s, wi)| match self {
                LeastSquares::Lua => s.ln() - (n * wi).ln(),
                LeastSquares::Srdm => s / (n * wi) - 1.0,
            })
            .collect()
    }

    fn cost(self, m: &Pcm, w: &[f64]) -> f64 {
        self.residuals(m, w).iter().map(|r| r * r).sum()
    }

    /// Residuals and Jacobian in log-coordinates `w_k = exp(y_k)`, with the
    /// last coordinate pinned at `y = 0`.
    fn linearize(self, m: &Pcm, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let n = m.n();
        let w = weights_from_log(y);
        let s = m.mul_vec(&w);
        let nf = n as f64;
        let r = DVector::from_vec(self.residuals(m, &w));
        let jac = DMatrix::from_fn(n, n - 1, |i, k| {
            let delta = if i == k { 1.0 } else { 0.0 };
            match self {
                LeastSquares::Lua => m.get(i, k) * w[k] / s[i] - delta,
                LeastSquares::Srdm => (m.get(i, k) * w[k] - delta * s[i]) / (nf * w[i]),
            }
        });
        (r, jac)
    }

    fn solve(self, m: &Pcm, opt: &OptimizerSettings) -> Result<(PriorityVector, f64)> {
        opt.validate()?;
        let n = m.n();
        let llsm = llsm_priority(m)?;
        let starts = [log_coordinates(llsm.as_slice()), vec![0.0; n - 1]];
        let mut best: Option<Run> = None;
        let consider = |run: Run, best: &mut Option<Run>| {
            if run.cost.is_finite() && best.as_ref().is_none_or(|b| run.cost < b.cost) {
                *best = Some(run);
            } else if let Some(b) = best.as_mut() {
                b.converged |= run.converged && run.cost == b.cost;
            }
        };
        for y0 in starts {
            let run = self.levenberg_marquardt(m, y0, opt);
            consider(run, &mut best);
        }
        for _ in 0..opt.restarts {
            let y0 = best.as_ref().map(|b| b.y.clone()).unwrap_or_else(|| vec![0.0; n - 1]);
            let run = self.levenberg_marquardt(m, y0, opt);
            consider(run, &mut best);
        }
        let best = best.ok_or_else(|| PcmError::OptimizerFailed {
            method: self.name(),
            reason: "objective is not finite at any start".into(),
            best_iterate: Vec::new(),
        })?;
        let w = weights_from_log(&best.y);
        if !best.converged {
            return Err(PcmError::OptimizerFailed {
                method: self.name(),
                reason: format!("no convergence within {} iterations", opt.max_iterations),
                best_iterate: w,
            });
        }
        Ok((PriorityVector::new(w)?, best.cost))
    }

    fn levenberg_marquardt(self, m: &Pcm, mut y: Vec<f64>, opt: &OptimizerSettings) -> Run {
        let dim = y.len();
        let mut cost = self.cost(m, &weights_from_log(&y));
        let mut mu = 1e-3;
        for _ in 0..opt.max_iterations {
            if !cost.is_finite() {
                break;
            }
            let (r, jac) = self.linearize(m, &y);
            let jt = jac.transpose();
            let grad = &jt * &r;
            if cost == 0.0 || grad.amax() <= f64::EPSILON * f64::EPSILON {
                return Run { y, cost, converged: true };
            }
            let normal = &jt * &jac;
            let mut accepted = None;
            while mu < 1e20 {
                let mut lhs = normal.clone();
                for d in 0..dim {
                    lhs[(d, d)] += mu;
                }
                let step = match lhs.cholesky() {
                    Some(ch) => ch.solve(&(-&grad)),
                    None => {
                        mu *= 4.0;
                        continue;
                    }
                };
                let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                let trial_cost = self.cost(m, &weights_from_log(&trial));
                if trial_cost.is_finite() && trial_cost < cost {
                    mu = (mu / 3.0).max(1e-20);
                    accepted = Some((trial, trial_cost, step.amax()));
                    break;
                }
                mu *= 4.0;
            }
            let Some((trial, trial_cost, step_size)) = accepted else {
                // No descent direction left at working precision.
                return Run { y, cost, converged: true };
            };
            let decrease = cost - trial_cost;
            y = trial;
            cost = trial_cost;
            // A small decrease alone is not convergence: a heavily damped
            // step in a flat valley also decreases little.
            let flat = grad.amax() <= opt.tolerance.sqrt() * cost.max(1.0);
            if (decrease <= opt.tolerance * cost && flat) || step_size < 1e-15 {
                return Run { y, cost, converged: true };
            }
        }
        Run {
            y,
            cost,
            converged: false,
        }
    }
}

fn log_coordinates(w: &[f64]) -> Vec<f64> {
    let last = w[w.len() - 1].ln();
    w[..w.len() - 1].iter().map(|x| x.ln() - last).collect()
}

fn weights_from_log(y: &[f64]) -> Vec<f64> {
    let mut w: Vec<f64> = y.iter().map(|v| v.exp()).collect();
    w.push(1.0);
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Reciprocity;
    use crate::reference::{a_x, genuine_w, r_x};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn rev_reciprocal_example() {
        let (w, lambda) = rev_priority(&r_x()).unwrap();
        assert_close(w.as_slice(), &[2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], 1e-12);
        assert!((lambda - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rev_arbitrary_example_residual() {
        let m = a_x();
        let (w, lambda) = rev_priority(&m).unwrap();
        let mw = m.mul_vec(w.as_slice());
        let residual = mw
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max);
        assert!(residual <= 1e-10);
        // The Perron root of A(x) is 2 + sqrt(3).
        assert!((lambda - (2.0 + 3f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn rev_all_ones() {
        let (w, lambda) = rev_priority(&Pcm::ones(5).unwrap()).unwrap();
        assert_close(w.as_slice(), &[0.2; 5], 1e-15);
        assert!((lambda - 5.0).abs() < 1e-12);
    }

    #[test]
    fn rev_reports_non_convergence() {
        match rev_priority_with_limit(&a_x(), 1) {
            Err(PcmError::NoConvergence { iterations, last_iterate }) => {
                assert_eq!(iterations, 1);
                assert_eq!(last_iterate.len(), 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn llsm_is_row_geometric_mean() {
        let m = a_x();
        let w = llsm_priority(&m).unwrap();
        // Row products are 2, 1, 1 and 1/8.
        let g = [2f64.powf(0.25), 1.0, 1.0, 2f64.powf(-0.75)];
        let s: f64 = g.iter().sum();
        let expected: Vec<f64> = g.iter().map(|x| x / s).collect();
        assert_close(w.as_slice(), &expected, 1e-15);
    }

    #[test]
    fn sncs_by_hand() {
        // Column sums of A(x): 2.5, 3.5, 3.5, 7.
        let w = sncs_priority(&a_x()).unwrap();
        let expected = [
            (1.0 / 2.5 + 1.0 / 3.5 + 1.0 / 3.5 + 2.0 / 7.0) / 4.0,
            (0.5 / 2.5 + 1.0 / 3.5 + 1.0 / 3.5 + 2.0 / 7.0) / 4.0,
            (0.5 / 2.5 + 1.0 / 3.5 + 1.0 / 3.5 + 2.0 / 7.0) / 4.0,
            (0.5 / 2.5 + 0.5 / 3.5 + 0.5 / 3.5 + 1.0 / 7.0) / 4.0,
        ];
        assert_close(w.as_slice(), &expected, 1e-15);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn optimizers_on_consistent_input() {
        let w = genuine_w();
        let m = Pcm::from_weights(&w);
        let opt = OptimizerSettings::default();
        for solve in [lua_priority, srdm_priority] {
            let (x, f) = solve(&m, &opt).unwrap();
            assert_close(x.as_slice(), w.as_slice(), 1e-9);
            assert!(f < 1e-20);
        }
    }

    #[test]
    fn lua_example() {
        let (w, f) = lua_priority(&a_x(), &OptimizerSettings::default()).unwrap();
        assert_close(w.as_slice(), &[0.306135, 0.268645, 0.268645, 0.156576], 1e-5);
        assert!(f <= lua_objective(&a_x(), llsm_priority(&a_x()).unwrap().as_slice()));
    }

    #[test]
    fn srdm_not_worse_than_llsm_start() {
        let m = a_x();
        let (w, f) = srdm_priority(&m, &OptimizerSettings::default()).unwrap();
        assert!(f <= srdm_objective(&m, llsm_priority(&m).unwrap().as_slice()) + 1e-12);
        assert!((srdm_objective(&m, w.as_slice()) - f).abs() < 1e-15);
    }

    #[test]
    fn objectives_are_scale_invariant() {
        let m = a_x();
        let w = [0.3, 0.3, 0.2, 0.2];
        let v: Vec<f64> = w.iter().map(|x| 7.5 * x).collect();
        assert!((lua_objective(&m, &w) - lua_objective(&m, &v)).abs() < 1e-15);
        assert!((srdm_objective(&m, &w) - srdm_objective(&m, &v)).abs() < 1e-15);
    }

    #[test]
    fn analytic_jacobian_matches_differences() {
        let m = a_x();
        let y = [0.3, -0.2, 0.1];
        for ls in [LeastSquares::Lua, LeastSquares::Srdm] {
            let (_, jac) = ls.linearize(&m, &y);
            for k in 0..3 {
                let h = 1e-6;
                let mut up = y.to_vec();
                let mut down = y.to_vec();
                up[k] += h;
                down[k] -= h;
                let ru = ls.residuals(&m, &weights_from_log(&up));
                let rd = ls.residuals(&m, &weights_from_log(&down));
                for i in 0..4 {
                    let fd = (ru[i] - rd[i]) / (2.0 * h);
                    assert!((fd - jac[(i, k)]).abs() < 1e-8, "{ls:?} ({i},{k})");
                }
            }
        }
    }

    #[test]
    fn every_method_on_reciprocal_example() {
        let opt = OptimizerSettings::default();
        let m = r_x();
        assert_eq!(m.mode(), Reciprocity::Reciprocal);
        for method in PrioritizationMethod::ALL {
            let w = prioritize(&m, method, &opt).unwrap();
            assert_close(w.as_slice(), &[2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], 1e-9);
        }
    }

    #[test]
    fn method_names_round_trip() {
        for method in PrioritizationMethod::ALL {
            assert_eq!(method.to_string().parse::<PrioritizationMethod>().unwrap(), method);
        }
        assert_eq!("GM".parse::<PrioritizationMethod>().unwrap(), PrioritizationMethod::Llsm);
        assert!("ahp".parse::<PrioritizationMethod>().is_err());
    }

    #[test]
    fn settings_validation() {
        assert!(OptimizerSettings { tolerance: 0.0, ..Default::default() }.validate().is_err());
        assert!(OptimizerSettings { max_iterations: 0, ..Default::default() }.validate().is_err());
        assert!(OptimizerSettings::default().validate().is_ok());
    }
}
