//! Entry-by-entry positive definite completions driven by Schur complements.
//!
//! With `H_n` positive definite, the next order `H_{n+1}` is settled by two
//! scalar choices: `s_{2n+2}` must exceed `vᵀ H_n⁻¹ v`, and a missing
//! `s_{2n+1}` can be chosen to zero the off-diagonal of the trailing `2×2`
//! Schur complement over `H_{n-1}`.

use crate::certificate::CompletionCertificate;
use crate::error::{Error, Result};
use crate::linalg::{check_matrix, hankel_matrix, min_eigenvalue};
use crate::types::{pattern_of, PartialSequence, Pattern, ToleranceOptions};

/// Cholesky factor of `H_n` that grows one order at a time.
#[derive(Debug, Clone, Default)]
pub struct GrowingCholesky {
    rows: Vec<Vec<f64>>,
}

impl GrowingCholesky {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Appends the last column `(a_0, …, a_k)` of the grown matrix.
    /// Returns the new pivot, or `None` (leaving the factor unchanged) when it
    /// is not above `threshold`.
    pub fn push(&mut self, column: &[f64], threshold: f64) -> Option<f64> {
        let k = self.rows.len();
        assert_eq!(column.len(), k + 1, "column length must be dim + 1");
        let mut row = Vec::with_capacity(k + 1);
        for j in 0..k {
            let dot: f64 = (0..j).map(|i| row[i] * self.rows[j][i]).sum();
            row.push((column[j] - dot) / self.rows[j][j]);
        }
        let pivot = column[k] - row.iter().map(|x| x * x).sum::<f64>();
        if !(pivot > threshold) {
            return None;
        }
        row.push(pivot.sqrt());
        self.rows.push(row);
        Some(pivot)
    }

    /// Solves `A_k x = b` with `A_k` the leading `k×k` block (`k = b.len()`).
    pub fn solve_leading(&self, b: &[f64]) -> Vec<f64> {
        let k = b.len();
        assert!(k <= self.dim());
        let mut y = vec![0.0; k];
        for i in 0..k {
            let dot: f64 = (0..i).map(|j| self.rows[i][j] * y[j]).sum();
            y[i] = (b[i] - dot) / self.rows[i][i];
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let dot: f64 = ((i + 1)..k).map(|j| self.rows[j][i] * x[j]).sum();
            x[i] = (y[i] - dot) / self.rows[i][i];
        }
        x
    }

    /// `aᵀ A_k⁻¹ b` over the leading block with `k = a.len() = b.len()`.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        let x = self.solve_leading(b);
        a.iter().zip(&x).map(|(u, v)| u * v).sum()
    }
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// Factors `H_n` from `s_0..s_{2n}`, failing with `NotPartialPd` unless it is PD.
fn factor_pd(prefix: &[f64], tol: &ToleranceOptions) -> Result<GrowingCholesky> {
    let n = prefix.len() / 2;
    let report = check_matrix(&hankel_matrix(prefix)?, tol);
    if !report.is_pd {
        return Err(Error::NotPartialPd(format!(
            "H_{n} is not positive definite (smallest eigenvalue {:e})",
            report.min_eigenvalue
        )));
    }
    let mut chol = GrowingCholesky::new();
    for j in 0..=n {
        let column: Vec<f64> = (0..=j).map(|i| prefix[i + j]).collect();
        chol.push(&column, 0.0)
            .ok_or_else(|| Error::NotPartialPd(format!("factorization of H_{n} failed")))?;
    }
    Ok(chol)
}

fn slack(q: f64, s0: f64, tol: &ToleranceOptions) -> f64 {
    tol.gamma * 1.0_f64.max(q).max(s0)
}

/// Chooses `s_{2n+2}` given `s_0..s_{2n+1}` so that `H_{n+1}` is PD.
///
/// Returns `q + γ·max(1, q, s_0)` with `q = vᵀ H_n⁻¹ v`, `v = (s_{n+1}, …, s_{2n+1})`.
pub fn complete_even_tail(values: &[f64], tol: &ToleranceOptions) -> Result<f64> {
    if values.len() < 2 || !values.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "expected s_0..s_(2n+1), got {} values",
            values.len()
        )));
    }
    let n = values.len() / 2 - 1;
    let chol = factor_pd(&values[..=2 * n], tol)?;
    let v = &values[n + 1..=2 * n + 1];
    let q = chol.bilinear(v, v);
    Ok(q + slack(q, values[0], tol))
}

/// `s_{2n+2} - wᵀ H_{n-1}⁻¹ w` with `w = (s_{n+1}, …, s_{2n})`.
fn odd_gap_schur(chol: &GrowingCholesky, prefix: &[f64], next_even: f64) -> f64 {
    let n = prefix.len() / 2;
    let w = &prefix[n + 1..];
    next_even - chol.bilinear(w, w)
}

/// Whether `H(s_0, …, s_{2n}, ?, s_{2n+2})` is partial positive definite.
///
/// Equivalent to `H_n ≻ 0` and `s_{2n+2} > wᵀ H_{n-1}⁻¹ w`.
pub fn check_odd_gap_partial_pd(prefix: &[f64], next_even: f64, tol: &ToleranceOptions) -> bool {
    if prefix.len().is_multiple_of(2) || !next_even.is_finite() {
        return false;
    }
    let Ok(chol) = factor_pd(prefix, tol) else {
        return false;
    };
    let scale = scale_of(prefix).max(next_even.abs());
    odd_gap_schur(&chol, prefix, next_even) > tol.pd_margin * scale
}

/// The missing `s_{2n+1}` of `H(s_0, …, s_{2n}, ?, s_{2n+2})`: `v_{n-1}ᵀ H_{n-1}⁻¹ w_n`.
pub fn complete_odd_gap(prefix: &[f64], next_even: f64, tol: &ToleranceOptions) -> Result<f64> {
    if prefix.len().is_multiple_of(2) {
        return Err(Error::InvalidInput("expected s_0..s_(2n)".into()));
    }
    if !check_odd_gap_partial_pd(prefix, next_even, tol) {
        return Err(Error::NotPartialPd(format!(
            "s_{} fails the odd-gap Schur condition",
            prefix.len() + 1
        )));
    }
    let chol = factor_pd(prefix, tol)?;
    Ok(odd_gap_value(&chol, prefix))
}

fn odd_gap_value(chol: &GrowingCholesky, prefix: &[f64]) -> f64 {
    let n = prefix.len() / 2;
    if n == 0 {
        return 0.0;
    }
    let v = &prefix[n..2 * n];
    let w = &prefix[n + 1..];
    chol.bilinear(v, w)
}

/// Values chosen for a missing tail `s_{2n+1}, s_{2n+2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCompletion {
    pub odd: f64,
    pub even: f64,
    pub margin: f64,
}

/// Completes `H(s_0, …, s_{2n}, ?, ?)` to a PD `H_{n+1}`.
pub fn complete_double_tail(prefix: &[f64], tol: &ToleranceOptions) -> Result<TailCompletion> {
    if prefix.len().is_multiple_of(2) {
        return Err(Error::InvalidInput("expected s_0..s_(2n)".into()));
    }
    let chol = factor_pd(prefix, tol)?;
    Ok(double_tail(&chol, prefix, tol))
}

fn double_tail(chol: &GrowingCholesky, prefix: &[f64], tol: &ToleranceOptions) -> TailCompletion {
    let n = prefix.len() / 2;
    let w = &prefix[n + 1..];
    let q = chol.bilinear(w, w);
    let margin = slack(q, prefix[0], tol);
    TailCompletion {
        odd: odd_gap_value(chol, prefix),
        even: q + margin,
        margin,
    }
}

/// Pattern families the inductive walk completes for every partial PD instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurFamily {
    OddSubset,
    Prefix,
    OddUnionPrefix,
    Primes,
    OddUnionLowEven,
}

impl SchurFamily {
    pub fn label(self) -> &'static str {
        match self {
            SchurFamily::OddSubset => "odd-subset",
            SchurFamily::Prefix => "prefix",
            SchurFamily::OddUnionPrefix => "odd-union-prefix",
            SchurFamily::Primes => "primes",
            SchurFamily::OddUnionLowEven => "odd-union-low-even",
        }
    }
}

fn is_prime(k: usize) -> bool {
    k >= 2 && (2..).take_while(|d| d * d <= k).all(|d| !k.is_multiple_of(d))
}

/// Classifies a (finite) pattern into a family completed by [`complete_pattern_inductive`].
///
/// Even indices are allowed only inside the leading run `{0..m}`, plus `2`
/// when `1` is unspecified (the primes case).
pub fn schur_family(p: &Pattern) -> Option<SchurFamily> {
    if p.is_empty() || p.is_odd_subset() {
        return Some(SchurFamily::OddSubset);
    }
    if p.is_prefix() {
        return Some(SchurFamily::Prefix);
    }
    let run = p.prefix_end();
    let stray_even: Vec<usize> = p
        .iter()
        .filter(|&k| k % 2 == 0 && run.is_none_or(|m| k > m))
        .collect();
    match stray_even.as_slice() {
        [] => Some(SchurFamily::OddUnionPrefix),
        [2] if !p.contains(1) => {
            if p.iter().all(is_prime) {
                Some(SchurFamily::Primes)
            } else {
                Some(SchurFamily::OddUnionLowEven)
            }
        }
        _ => None,
    }
}

/// Completes a partial PD sequence on a supported pattern to `target_horizon`,
/// with every `H_n` positive definite.
pub fn complete_pattern_inductive(
    s: &PartialSequence,
    target_horizon: usize,
    tol: &ToleranceOptions,
) -> Result<CompletionCertificate> {
    tol.validate()?;
    if target_horizon < s.horizon() {
        return Err(Error::InvalidInput(format!(
            "target horizon {target_horizon} is below the input horizon {}",
            s.horizon()
        )));
    }
    let pattern = pattern_of(s);
    let family = schur_family(&pattern).ok_or_else(|| {
        Error::UnsupportedPattern(format!(
            "{pattern} has even indices outside its leading run"
        ))
    })?;

    let mut values = Vec::with_capacity(target_horizon + 2);
    let s0 = s.get(0).unwrap_or(tol.seed_s0);
    if !(s0 > tol.pd_margin * s0.abs().max(1.0)) {
        return Err(Error::NotPartialPd(format!("s_0 = {s0} is not positive")));
    }
    values.push(s0);
    let mut chol = GrowingCholesky::new();
    chol.push(&[s0], 0.0).expect("positive s_0");
    let mut margins = Vec::new();

    let mut n = 0;
    while 2 * n < target_horizon {
        let odd_idx = 2 * n + 1;
        let even_idx = 2 * n + 2;
        let (odd, even) = match (s.get(odd_idx), s.get(even_idx)) {
            (Some(odd), Some(even)) => (odd, even),
            (Some(odd), None) => {
                let v: Vec<f64> = (n + 1..=2 * n).map(|k| values[k]).chain([odd]).collect();
                let q = chol.bilinear(&v, &v);
                let margin = slack(q, values[0], tol);
                margins.push(margin);
                (odd, q + margin)
            }
            (None, Some(even)) => {
                let scale = scale_of(&values).max(even.abs());
                let gap = odd_gap_schur(&chol, &values, even);
                if !(gap > tol.pd_margin * scale) {
                    return Err(Error::NotPartialPd(format!(
                        "s_{even_idx} = {even} violates the Schur bound by {:e}",
                        -gap
                    )));
                }
                (odd_gap_value(&chol, &values), even)
            }
            (None, None) => {
                let tail = double_tail(&chol, &values, tol);
                margins.push(tail.margin);
                (tail.odd, tail.even)
            }
        };
        values.push(odd);
        values.push(even);
        let column: Vec<f64> = (n + 1..=2 * n + 2).map(|k| values[k]).collect();
        let threshold = tol.pd_margin * scale_of(&values);
        if chol.push(&column, threshold).is_none() {
            break;
        }
        n += 1;
    }
    let walked = values.len();
    for k in walked..=target_horizon {
        values.push(s.get(k).unwrap_or(if k % 2 == 0 { values[0] } else { 0.0 }));
    }
    values.truncate(target_horizon + 1);

    let label = format!("schur/{}", family.label());
    let mut cert = CompletionCertificate::new(values, label.clone(), true);
    cert.margins_used = margins;
    let failure = if walked > target_horizon {
        match cert.verify(s, tol) {
            Ok(()) if cert.min_relative_eigenvalue() > THIN * tol.pd_margin => return Ok(cert),
            Ok(()) => None,
            Err(e) => Some(e),
        }
    } else {
        Some(Error::NotPartialPd(format!("H_{} is not positive definite", n + 1)))
    };
    let repaired = repair(s, &cert.completed, tol)
        .map(|values| CompletionCertificate::new(values, format!("{label}/repaired"), true));
    match (repaired, failure) {
        (Some(r), None) if r.min_relative_eigenvalue() <= cert.min_relative_eigenvalue() => Ok(cert),
        (Some(r), _) => Ok(r),
        (None, None) => Ok(cert),
        (None, Some(e)) => Err(e),
    }
}

/// Certified walks with less relative room than `THIN * pd_margin` are
/// offered to the repair as well.
const THIN: f64 = 1e3;

const REPAIR_STEPS: usize = 600;

/// Re-optimizes the free entries of the top order jointly when the
/// entry-by-entry walk leaves too little room at some order. Free even
/// entries are capped at growing multiples of the data scale so the
/// completion does not buy its margin with size alone.
fn repair(s: &PartialSequence, walked: &[f64], tol: &ToleranceOptions) -> Option<Vec<f64>> {
    let top = (walked.len() - 1) / 2;
    let free: Vec<usize> = (0..=2 * top).filter(|&k| s.get(k).is_none()).collect();
    if free.is_empty() {
        return None;
    }
    let data = s.scale();
    let good = 1e6 * tol.pd_margin;
    let mut start = walked[..=2 * top].to_vec();
    for cap in [1.0, 1e2, 1e4, 1e6, 1e8].map(|c| c * data) {
        let run = crate::barrier::ascend(start.clone(), &free, Some(cap), REPAIR_STEPS, |v| {
            min_eigenvalue(&hankel_matrix(v).expect("odd length"))
                > good * crate::certificate::order_scale(v, top)
        });
        start = run.values.clone();
        let mut values = run.values;
        values.extend_from_slice(&walked[2 * top + 1..]);
        let cert = CompletionCertificate::new(values, "repair", true);
        if cert.verify(s, tol).is_ok() {
            return Some(cert.completed);
        }
    }
    None
}
