//! Hankel matrix views, definiteness certification, Schur complements and
//! partial positive (semi)definiteness.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{PartialSequence, ToleranceOptions};

/// Largest Hankel order accepted by [`hankel`].
pub const ORDER_CAP: usize = 64;
/// Largest order for principal index set enumeration.
pub const ENUMERATION_CAP: usize = 16;

/// The `(n+1)×(n+1)` Hankel matrix over a (partial) sequence.
///
/// Entry `(i, j)` is the value at index `i + j`; only the `2n+1` skew-diagonal
/// values are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelView {
    order: usize,
    values: Vec<Option<f64>>,
}

/// Builds the view of `H_n` over `s`. Indices beyond the horizon are missing.
pub fn hankel(s: &PartialSequence, n: usize) -> Result<HankelView> {
    if n > ORDER_CAP {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: ORDER_CAP,
        });
    }
    Ok(HankelView {
        order: n,
        values: s.to_options(2 * n),
    })
}

impl HankelView {
    /// A fully specified view from `s_0..s_{2n}` (`values.len()` must be odd).
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_options(values.iter().map(|&v| Some(v)).collect())
    }

    pub fn from_options(values: Vec<Option<f64>>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "a Hankel view needs an odd number of values, got {}",
                values.len()
            )));
        }
        let order = values.len() / 2;
        if order > ORDER_CAP {
            return Err(Error::OrderTooLarge {
                order,
                cap: ORDER_CAP,
            });
        }
        Ok(Self { order, values })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.order + 1
    }

    pub fn value(&self, k: usize) -> Option<f64> {
        self.values.get(k).copied().flatten()
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<f64> {
        self.value(i + j)
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn missing_indices(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&k| self.values[k].is_none())
            .collect()
    }

    pub fn is_fully_specified(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    /// True when every `i + j` with `i, j ∈ rows` is specified.
    pub fn is_specified_on(&self, rows: &[usize]) -> bool {
        rows.iter()
            .all(|&i| rows.iter().all(|&j| self.entry(i, j).is_some()))
    }

    /// Dense matrix; errors on the first missing index.
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        let rows: Vec<usize> = (0..self.dim()).collect();
        self.principal(&rows)
    }

    /// Principal submatrix `H[rows]`; errors on the first missing index.
    pub fn principal(&self, rows: &[usize]) -> Result<DMatrix<f64>> {
        let m = rows.len();
        let mut out = DMatrix::zeros(m, m);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in rows.iter().enumerate() {
                let v = self.entry(i, j).ok_or(Error::MissingIndex(i + j))?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry(i + j));
                }
                out[(a, b)] = v;
            }
        }
        Ok(out)
    }
}

/// Dense Hankel matrix from `s_0..s_{2n}`.
pub fn hankel_matrix(values: &[f64]) -> Result<DMatrix<f64>> {
    HankelView::from_values(values)?.to_matrix()
}

/// `max(1, largest |entry|)`.
pub fn matrix_scale(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
}

/// Smallest eigenvalue of a symmetric matrix (`+inf` for an empty one).
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    match m.nrows() {
        0 => f64::INFINITY,
        1 => m[(0, 0)],
        _ => SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b)),
    }
}

/// Outcome of a Cholesky factorization with a pivot threshold.
#[derive(Debug, Clone)]
pub struct ThresholdCholesky {
    /// Lower factor of the leading block that succeeded.
    pub lower: DMatrix<f64>,
    /// Squared diagonal of the factor, one per accepted row.
    pub pivots: Vec<f64>,
    /// First row whose pivot fell to or below the threshold.
    pub failed_at: Option<usize>,
}

/// Cholesky factorization that stops at the first pivot `<= threshold`.
pub fn threshold_cholesky(m: &DMatrix<f64>, threshold: f64) -> ThresholdCholesky {
    let n = m.nrows();
    let mut lower = DMatrix::<f64>::zeros(n, n);
    let mut pivots = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= lower[(j, k)] * lower[(j, k)];
        }
        if !(d > threshold) {
            return ThresholdCholesky {
                lower: lower.view((0, 0), (j, j)).into_owned(),
                pivots,
                failed_at: Some(j),
            };
        }
        let ljj = d.sqrt();
        lower[(j, j)] = ljj;
        pivots.push(d);
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= lower[(i, k)] * lower[(j, k)];
            }
            lower[(i, j)] = v / ljj;
        }
    }
    ThresholdCholesky {
        lower,
        pivots,
        failed_at: None,
    }
}

/// Definiteness evidence for a fully specified symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_pd: bool,
    pub is_psd: bool,
    pub min_eigenvalue: f64,
    /// Order `k` of the first leading block `H_k` whose pivot fails the PD margin.
    pub failing_leading_order: Option<usize>,
    pub scale: f64,
}

/// Certifies a fully specified Hankel view.
pub fn check_definiteness(h: &HankelView, tol: &ToleranceOptions) -> Result<PsdReport> {
    let m = h.to_matrix()?;
    Ok(check_matrix(&m, tol))
}

/// Certifies an arbitrary symmetric matrix with finite entries.
///
/// `is_pd` requires both a successful factorization with pivots above
/// `pd_margin * scale` and a smallest eigenvalue above the same threshold;
/// pivots dominate the smallest eigenvalue, so the two agree.
pub fn check_matrix(m: &DMatrix<f64>, tol: &ToleranceOptions) -> PsdReport {
    let scale = matrix_scale(m);
    let threshold = tol.pd_margin * scale;
    let chol = threshold_cholesky(m, threshold);
    let min_eigenvalue = min_eigenvalue(m);
    let is_pd = chol.failed_at.is_none() && min_eigenvalue > threshold;
    let is_psd = is_pd || min_eigenvalue >= -tol.psd_tol * scale;
    let failing_leading_order = chol.failed_at.or(if is_pd {
        None
    } else {
        Some(m.nrows().saturating_sub(1))
    });
    PsdReport {
        is_pd,
        is_psd,
        min_eigenvalue,
        failing_leading_order,
        scale,
    }
}

/// `C - Bᵀ A⁻¹ B` for the block partition of a symmetric matrix at `alpha`.
pub fn schur_complement_matrix(m: &DMatrix<f64>, alpha: usize) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if alpha > n {
        return Err(Error::InvalidInput(format!(
            "block size {alpha} exceeds dimension {n}"
        )));
    }
    let a = m.view((0, 0), (alpha, alpha)).into_owned();
    let b = m.view((0, alpha), (alpha, n - alpha)).into_owned();
    let c = m.view((alpha, alpha), (n - alpha, n - alpha)).into_owned();
    if alpha == 0 {
        return Ok(c);
    }
    let scale = matrix_scale(&a);
    let lu = a.clone().full_piv_lu();
    let pivot_floor = 1e-14 * scale;
    let diag = lu.u().diagonal();
    if diag.iter().any(|p| !(p.abs() > pivot_floor)) {
        return Err(Error::SingularBlock(alpha));
    }
    let x = lu.solve(&b).ok_or(Error::SingularBlock(alpha))?;
    Ok(c - b.transpose() * x)
}

/// Schur complement of the leading `alpha×alpha` block of a fully specified view.
pub fn schur_complement(h: &HankelView, alpha: usize) -> Result<DMatrix<f64>> {
    schur_complement_matrix(&h.to_matrix()?, alpha)
}

/// Determinant of a fully specified view.
pub fn determinant(h: &HankelView) -> Result<f64> {
    Ok(h.to_matrix()?.determinant())
}

/// Maximal row sets `α ⊆ {0..n}` on which `H[α]` is fully specified.
///
/// Rows `i` with `s_{2i}` unspecified are never admissible; the remaining
/// rows form a graph with an edge `i ~ j` iff `s_{i+j}` is specified, and the
/// sets returned are its maximal cliques, in lexicographic order.
pub fn fully_specified_principal_index_sets(h: &HankelView) -> Result<Vec<Vec<usize>>> {
    if h.order() > ENUMERATION_CAP {
        return Err(Error::OrderTooLarge {
            order: h.order(),
            cap: ENUMERATION_CAP,
        });
    }
    let rows: Vec<usize> = (0..h.dim()).filter(|&i| h.entry(i, i).is_some()).collect();
    let adjacent = |i: usize, j: usize| h.entry(i, j).is_some();
    let mut out = Vec::new();
    bron_kerbosch(&mut Vec::new(), rows, Vec::new(), &adjacent, &mut out);
    out.iter_mut().for_each(|s| s.sort_unstable());
    out.sort();
    Ok(out)
}

fn bron_kerbosch(
    clique: &mut Vec<usize>,
    candidates: Vec<usize>,
    excluded: Vec<usize>,
    adjacent: &dyn Fn(usize, usize) -> bool,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() && !clique.is_empty() {
            out.push(clique.clone());
        }
        return;
    }
    let pivot = candidates
        .iter()
        .chain(excluded.iter())
        .copied()
        .max_by_key(|&u| candidates.iter().filter(|&&v| v != u && adjacent(u, v)).count())
        .expect("nonempty");
    let mut candidates = candidates;
    let mut excluded = excluded;
    let branch: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|&v| v == pivot || !adjacent(pivot, v))
        .collect();
    for v in branch {
        let next_c = candidates
            .iter()
            .copied()
            .filter(|&u| u != v && adjacent(u, v))
            .collect();
        let next_x = excluded
            .iter()
            .copied()
            .filter(|&u| u != v && adjacent(u, v))
            .collect();
        clique.push(v);
        bron_kerbosch(clique, next_c, next_x, adjacent, out);
        clique.pop();
        candidates.retain(|&u| u != v);
        excluded.push(v);
    }
}

/// Order used to certify a finite partial sequence: `⌈horizon / 2⌉`.
///
/// Every row beyond it has an unspecified diagonal, so it sees every fully
/// specified principal submatrix of every `H_n`.
pub fn certification_order(s: &PartialSequence) -> usize {
    s.horizon().div_ceil(2)
}

/// Which fully specified principal submatrix violated (semi)definiteness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialReport {
    pub order: usize,
    pub positive_definite: bool,
    pub positive_semidefinite: bool,
    pub maximal_sets: Vec<Vec<usize>>,
    /// First maximal set that is not PD, with its smallest eigenvalue.
    pub first_non_pd: Option<(Vec<usize>, f64)>,
}

/// Checks every maximal fully specified principal submatrix of `H_n`,
/// `n = ⌈horizon/2⌉`.
pub fn partial_definiteness(s: &PartialSequence, tol: &ToleranceOptions) -> Result<PartialReport> {
    let order = certification_order(s);
    let h = hankel(s, order)?;
    let maximal_sets = fully_specified_principal_index_sets(&h)?;
    let mut positive_definite = true;
    let mut positive_semidefinite = true;
    let mut first_non_pd = None;
    for set in &maximal_sets {
        let report = check_matrix(&h.principal(set)?, tol);
        if !report.is_pd {
            positive_definite = false;
            if first_non_pd.is_none() {
                first_non_pd = Some((set.clone(), report.min_eigenvalue));
            }
        }
        positive_semidefinite &= report.is_psd;
    }
    Ok(PartialReport {
        order,
        positive_definite,
        positive_semidefinite,
        maximal_sets,
        first_non_pd,
    })
}

/// True iff every fully specified principal submatrix of every `H_n` is PD.
pub fn is_partial_positive_definite(s: &PartialSequence, tol: &ToleranceOptions) -> Result<bool> {
    Ok(partial_definiteness(s, tol)?.positive_definite)
}

/// True iff every fully specified principal submatrix of every `H_n` is PSD.
pub fn is_partial_positive_semidefinite(
    s: &PartialSequence,
    tol: &ToleranceOptions,
) -> Result<bool> {
    Ok(partial_definiteness(s, tol)?.positive_semidefinite)
}

/// Closure operations on positive sequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombineOp {
    /// `alpha * s + beta * t` with `alpha, beta >= 0`.
    Sum { alpha: f64, beta: f64 },
    /// Term-wise product.
    Product,
}

pub fn pointwise_combine(s: &[f64], t: &[f64], op: CombineOp) -> Result<Vec<f64>> {
    if s.len() != t.len() {
        return Err(Error::LengthMismatch(s.len(), t.len()));
    }
    match op {
        CombineOp::Sum { alpha, beta } => {
            if !(alpha >= 0.0 && beta >= 0.0) {
                return Err(Error::InvalidInput(
                    "combination weights must be nonnegative".into(),
                ));
            }
            Ok(s.iter().zip(t).map(|(a, b)| alpha * a + beta * b).collect())
        }
        CombineOp::Product => Ok(s.iter().zip(t).map(|(a, b)| a * b).collect()),
    }
}
