//! Deterministic golden checks on the worked 4x4 example and the
//! significance-test values.

use serde::Serialize;

use crate::consistency::{ci_llsm, ci_lua, ci_rev};
use crate::error::Result;
use crate::metrics::{mae, relative_error, relative_ratio, significance_level, spearman_rho, t_statistic};
use crate::prioritization::{llsm_priority, lua_priority, rev_priority, OptimizerSettings};
use crate::reference::{a_x, genuine_w, r_x};
use crate::scale::JudgmentScale;

/// Sample size behind the printed significance tests.
pub const T_TEST_SAMPLE_SIZE: usize = 30_000;

/// One printed row of the REV-versus-procedure significance table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTableRow {
    pub label: &'static str,
    /// Mean rank correlation of the compared procedure.
    pub msrc: f64,
    /// Mean rank correlation of REV in the same scenario.
    pub msrc_rev: f64,
    /// `R` as printed (5 decimals).
    pub r: f64,
    pub t: f64,
    /// `None` where no tabulated level is reached.
    pub alpha: Option<f64>,
}

const GAMMA_REV: f64 = 0.668380;
const UNIFORM_REV: f64 = 0.792580;

pub const T_TABLE: [TTableRow; 8] = [
    TTableRow { label: "gamma LLSM", msrc: 0.682300, msrc_rev: GAMMA_REV, r: 0.01392, t: 2.411168, alpha: Some(0.01) },
    TTableRow { label: "gamma LUA", msrc: 0.673067, msrc_rev: GAMMA_REV, r: 0.00469, t: 0.811179, alpha: None },
    TTableRow { label: "gamma SRDM", msrc: 0.671380, msrc_rev: GAMMA_REV, r: 0.00300, t: 0.519600, alpha: None },
    TTableRow { label: "gamma SNCS", msrc: 0.692453, msrc_rev: GAMMA_REV, r: 0.02407, t: 4.170636, alpha: Some(0.01) },
    TTableRow { label: "uniform LLSM", msrc: 0.804860, msrc_rev: UNIFORM_REV, r: 0.01228, t: 2.127048, alpha: Some(0.02) },
    TTableRow { label: "uniform LUA", msrc: 0.795767, msrc_rev: UNIFORM_REV, r: 0.00319, t: 0.551989, alpha: None },
    TTableRow { label: "uniform SRDM", msrc: 0.794820, msrc_rev: UNIFORM_REV, r: 0.00224, t: 0.387967, alpha: None },
    TTableRow { label: "uniform SNCS", msrc: 0.808333, msrc_rev: UNIFORM_REV, r: 0.01575, t: 2.728747, alpha: Some(0.01) },
];

/// The printed gamma-LUA t-value matches neither its printed R nor the
/// difference of its printed mean correlations to 1e-4.
pub const T_TABLE_INCONSISTENT_ROW: &str = "gamma LUA";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    /// Set when the printed inputs of this check are mutually inconsistent;
    /// such a check is reported but does not gate.
    pub known_discrepancy: Option<&'static str>,
}

impl GoldenCheck {
    pub fn passed(&self) -> bool {
        (self.actual - self.expected).abs() <= self.tolerance
    }

    /// True when the check passes or is a documented discrepancy.
    pub fn gates_ok(&self) -> bool {
        self.passed() || self.known_discrepancy.is_some()
    }
}

struct Checks(Vec<GoldenCheck>);

impl Checks {
    fn push(&mut self, name: impl Into<String>, expected: f64, actual: Result<f64>, tolerance: f64) {
        self.0.push(GoldenCheck {
            name: name.into(),
            expected,
            actual: actual.unwrap_or(f64::NAN),
            tolerance,
            known_discrepancy: None,
        });
    }

    fn vector(&mut self, name: &str, expected: &[f64], actual: Result<Vec<f64>>, tolerance: f64) {
        match actual {
            Ok(v) => {
                for (i, (e, a)) in expected.iter().zip(&v).enumerate() {
                    self.push(format!("{name}[{}]", i + 1), *e, Ok(*a), tolerance);
                }
            }
            Err(e) => self.push(name, expected[0], Err(e), tolerance),
        }
    }
}

/// Every deterministic golden check, in a stable order.
pub fn golden_checks() -> Vec<GoldenCheck> {
    let opt = OptimizerSettings::default();
    let w = genuine_w();
    let w = w.as_slice();
    let (r, a) = (r_x(), a_x());
    let mut c = Checks(Vec::new());

    let saaty = JudgmentScale::Saaty;
    for (v, expected) in [(7.0 / 5.0, 1.0), (5.0 / 7.0, 0.5), (3.0 / 7.0, 0.5), (5.0 / 3.0, 2.0), (7.0 / 3.0, 2.0)] {
        c.push(format!("saaty rounding of {v:.6}"), expected, Ok(saaty.round(v)), 0.0);
    }

    let consistent = [2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0];
    c.vector("REV(R(x))", &consistent, rev_priority(&r).map(|e| e.0.into_inner()), 1e-6);
    c.vector("LLSM(R(x))", &consistent, llsm_priority(&r).map(|v| v.into_inner()), 1e-6);
    c.vector("LUA(R(x))", &consistent, lua_priority(&r, &opt).map(|e| e.0.into_inner()), 1e-6);
    c.push("CI_REV(R(x))", 0.0, ci_rev(&r), 1e-9);
    c.push("CI_LLSM(R(x))", 0.0, ci_llsm(&r), 1e-9);
    c.push("CI_LUA(R(x))", 0.0, ci_lua(&r, &opt), 1e-9);
    c.push("MAE(R(x) estimate)", 0.0357143, mae(w, &consistent), 1e-6);
    c.push("SRC(R(x) estimate)", 0.8164966, spearman_rho(w, &consistent), 1e-6);

    let rev = rev_priority(&a).map(|e| e.0.into_inner());
    let llsm = llsm_priority(&a).map(|v| v.into_inner());
    let lua = lua_priority(&a, &opt).map(|e| e.0.into_inner());
    c.vector("REV(A(x))", &[0.309401, 0.267949, 0.267949, 0.154701], rev.clone(), 1e-5);
    c.vector("LLSM(A(x))", &[0.314288, 0.264284, 0.264284, 0.157144], llsm.clone(), 1e-5);
    c.vector("LUA(A(x))", &[0.306135, 0.268645, 0.268645, 0.156576], lua.clone(), 1e-3);
    c.push("CI_REV(A(x))", -0.0893164, ci_rev(&a), 1e-5);
    c.push("CI_LLSM(A(x))", 0.0400378, ci_llsm(&a), 1e-5);
    c.push("CI_LUA(A(x))", 0.0344483, ci_lua(&a, &opt), 1e-3);
    for (name, estimate, expected) in [("REV", &rev, 0.0202995), ("LUA", &lua, 0.0219326), ("LLSM", &llsm, 0.0178559)] {
        let x = estimate.clone();
        c.push(format!("MAE({name}(A(x)))"), expected, x.clone().and_then(|x| mae(w, &x)), 1e-6);
        c.push(format!("SRC({name}(A(x)))"), 1.0, x.and_then(|x| spearman_rho(w, &x)), 1e-6);
    }

    let k = [3.0; 4];
    c.push("MRE(k, k1)", 1.0 / 3.0, relative_error(&k, &[2.0, 4.0, 2.0, 4.0]), 1e-12);
    c.push("MRR(k, k1)", 1.0, relative_ratio(&k, &[2.0, 4.0, 2.0, 4.0]), 1e-12);
    c.push("MRR(k, k2)", 2.0 / 3.0, relative_ratio(&k, &[2.0; 4]), 1e-12);
    c.push("MRR(k, k3)", 4.0 / 3.0, relative_ratio(&k, &[4.0; 4]), 1e-12);

    // R is the difference of the printed mean correlations; the printed R
    // column is rounded too coarsely to fix t to 1e-4.
    for row in T_TABLE {
        let r = row.msrc - row.msrc_rev;
        let computed = t_statistic(r, T_TEST_SAMPLE_SIZE).map(|x| x.0);
        c.push(format!("t({})", row.label), row.t, computed.clone(), 1e-4);
        if row.label == T_TABLE_INCONSISTENT_ROW {
            c.0.last_mut().expect("just pushed").known_discrepancy =
                Some("printed t implies R = 0.0046835, printed R is 0.00469 and the MSRC difference is 0.004687");
        }
        let level = computed.map(|t| significance_level(t).unwrap_or(0.0));
        c.push(format!("alpha level of t({})", row.label), row.alpha.unwrap_or(0.0), level, 0.0);
    }
    c.0
}
