//! Pairwise comparison matrices.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PcmError, Result};
use crate::perturbation::{DrawMode, PerturbationModel};
use crate::scale::JudgmentScale;
use crate::vector::PriorityVector;

/// Relative tolerance used when checking `a_ji = 1/a_ij`.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-12;

/// Default relative tolerance of [`Pcm::is_consistent`].
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

/// Whether the lower triangle is tied to the upper one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reciprocity {
    /// `a_ji = 1/a_ij` for every pair.
    Reciprocal,
    /// Every off-diagonal judgment is independent.
    Arbitrary,
}

impl fmt::Display for Reciprocity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reciprocity::Reciprocal => "reciprocal",
            Reciprocity::Arbitrary => "arbitrary",
        })
    }
}

impl FromStr for Reciprocity {
    type Err = PcmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reciprocal" | "fr-pcm" | "frpcm" => Ok(Reciprocity::Reciprocal),
            "arbitrary" | "apcm" => Ok(Reciprocity::Arbitrary),
            other => Err(PcmError::config(
                "mode",
                format!("unknown reciprocity mode '{other}' (expected reciprocal or arbitrary)"),
            )),
        }
    }
}

/// Which entries an entrywise operation touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// `i < j`.
    UpperTriangle,
    /// `i != j`.
    OffDiagonal,
}

impl Region {
    fn contains(self, i: usize, j: usize) -> bool {
        match self {
            Region::UpperTriangle => i < j,
            Region::OffDiagonal => i != j,
        }
    }
}

/// A square matrix of positive judgments with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Pcm {
    n: usize,
    entries: Vec<f64>,
    mode: Reciprocity,
}

impl Pcm {
    /// Builds a matrix from rows, validating the stated reciprocity mode.
    pub fn new(rows: Vec<Vec<f64>>, mode: Reciprocity) -> Result<Self> {
        let pcm = Self::from_rows_unchecked_mode(rows, mode)?;
        if mode == Reciprocity::Reciprocal && !pcm.is_reciprocal(RECIPROCITY_TOLERANCE) {
            return Err(PcmError::InvalidMatrix(
                "matrix declared reciprocal but a_ji != 1/a_ij".into(),
            ));
        }
        Ok(pcm)
    }

    /// Builds a matrix from rows and infers the mode from the entries.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let mut pcm = Self::from_rows_unchecked_mode(rows, Reciprocity::Arbitrary)?;
        if pcm.is_reciprocal(RECIPROCITY_TOLERANCE) {
            pcm.mode = Reciprocity::Reciprocal;
        }
        Ok(pcm)
    }

    fn from_rows_unchecked_mode(rows: Vec<Vec<f64>>, mode: Reciprocity) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(PcmError::InvalidMatrix(format!(
                "matrix must be at least 2x2, got {n} row(s)"
            )));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(PcmError::InvalidMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &a) in row.iter().enumerate() {
                if !(a.is_finite() && a > 0.0) {
                    return Err(PcmError::InvalidMatrix(format!(
                        "entry ({}, {}) = {a} is not a finite positive number",
                        i + 1,
                        j + 1
                    )));
                }
                if i == j && (a - 1.0).abs() > RECIPROCITY_TOLERANCE {
                    return Err(PcmError::InvalidMatrix(format!(
                        "diagonal entry ({}, {}) = {a}, expected 1",
                        i + 1,
                        j + 1
                    )));
                }
            }
            entries.extend(row);
        }
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Ok(Pcm { n, entries, mode })
    }

    /// The consistent matrix `(w_i / w_j)`.
    pub fn from_weights(w: &PriorityVector) -> Pcm {
        let n = w.len();
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    entries[i * n + j] = w[i] / w[j];
                }
            }
        }
        Pcm {
            n,
            entries,
            mode: Reciprocity::Reciprocal,
        }
    }

    /// The `n x n` all-ones matrix.
    pub fn ones(n: usize) -> Result<Pcm> {
        Pcm::new(vec![vec![1.0; n]; n], Reciprocity::Reciprocal)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mode(&self) -> Reciprocity {
        self.mode
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Same entries, labeled as nonreciprocal.
    pub fn into_arbitrary(mut self) -> Pcm {
        self.mode = Reciprocity::Arbitrary;
        self
    }

    /// `M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// True if `a_ji = 1/a_ij` for all pairs within relative tolerance `tol`.
    pub fn is_reciprocal(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            ((i + 1)..self.n).all(|j| (self.get(i, j) * self.get(j, i) - 1.0).abs() <= tol)
        })
    }

    /// Keeps the upper triangle and replaces each lower entry by the
    /// reciprocal of its mirror.
    pub fn enforce_reciprocity(&self) -> Pcm {
        let n = self.n;
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..i {
                entries[i * n + j] = 1.0 / entries[j * n + i];
            }
        }
        Pcm {
            n,
            entries,
            mode: Reciprocity::Reciprocal,
        }
    }

    /// Reciprocal and `|a_ik a_kj - a_ij| <= tol * a_ij` for all `i, j, k`.
    pub fn is_consistent(&self, tol: f64) -> bool {
        if !self.is_reciprocal(tol.max(RECIPROCITY_TOLERANCE)) {
            return false;
        }
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let aij = self.get(i, j);
                for k in 0..n {
                    if (self.get(i, k) * self.get(k, j) - aij).abs() > tol * aij {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Ordinal transitivity.
    ///
    /// Whenever some row prefers column `j` to column `k` (entry not less),
    /// every row must; likewise for columns comparing rows `j` and `k`.
    /// Two entries are treated as equal within relative `1e-12`.
    pub fn is_ordinally_transitive(&self) -> bool {
        let n = self.n;
        let cmp = |a: f64, b: f64| -> std::cmp::Ordering {
            if (a - b).abs() <= RECIPROCITY_TOLERANCE * a.max(b) {
                std::cmp::Ordering::Equal
            } else {
                a.total_cmp(&b)
            }
        };
        // Pairs of columns compared across rows, then pairs of rows across columns.
        let column_pairs = |get: &dyn Fn(usize, usize) -> f64| -> bool {
            for j in 0..n {
                for k in (j + 1)..n {
                    let mut seen_ge = false;
                    let mut seen_le = false;
                    for i in 0..n {
                        match cmp(get(i, j), get(i, k)) {
                            std::cmp::Ordering::Greater => seen_ge = true,
                            std::cmp::Ordering::Less => seen_le = true,
                            std::cmp::Ordering::Equal => {
                                seen_ge = true;
                                seen_le = true;
                            }
                        }
                    }
                    if seen_ge && seen_le {
                        // Allowed only if every row ties.
                        if !(0..n).all(|i| cmp(get(i, j), get(i, k)).is_eq()) {
                            return false;
                        }
                    }
                }
            }
            true
        };
        column_pairs(&|i, j| self.get(i, j)) && column_pairs(&|i, j| self.get(j, i))
    }

    /// Rounds every entry in `region` onto `scale`.
    pub fn round_region(&self, scale: JudgmentScale, region: Region) -> Pcm {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                if region.contains(i, j) {
                    out.entries[i * n + j] = scale.round(out.entries[i * n + j]);
                }
            }
        }
        out
    }

    /// Simultaneous relabeling: entry `(i, j)` of the result is
    /// `a[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Pcm> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(PcmError::InvalidMatrix("not a permutation".into()));
        }
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Ok(Pcm {
            n,
            entries,
            mode: self.mode,
        })
    }
}

/// Multiplies every entry in `region` by a factor drawn from `model`.
///
/// In [`DrawMode::PerEntry`] each entry gets its own draw; in
/// [`DrawMode::Shared`] a single draw is applied to the whole region.
/// The diagonal is never touched and the result is labeled arbitrary.
pub fn perturb_entries<R: Rng + ?Sized>(
    m: &Pcm,
    model: &PerturbationModel,
    region: Region,
    rng: &mut R,
) -> Result<Pcm> {
    let n = m.n;
    let mut out = m.clone().into_arbitrary();
    let shared = match model.draw_mode {
        DrawMode::Shared => Some(model.sample(rng)?),
        DrawMode::PerEntry => None,
    };
    for i in 0..n {
        for j in 0..n {
            if region.contains(i, j) {
                let e = match shared {
                    Some(e) => e,
                    None => model.sample(rng)?,
                };
                out.entries[i * n + j] *= e;
            }
        }
    }
    Ok(out)
}

impl fmt::Display for Pcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|a| a.to_string()).collect();
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}
