//! Brute-force feasibility decisions for small truncated instances.
//!
//! A decision runs in two phases. The obstruction phase looks for a single
//! missing index whose admissible values, as forced by principal submatrices
//! that contain no other unknown, form an empty set (or, for semidefinite
//! completions, for linear relations forced by singular blocks). Such a
//! result is a proof of infeasibility. The search phase maximizes the
//! concave function `λ_min(H_n(x)) / scale` over the missing values.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    fully_specified_principal_index_sets, hankel, hankel_matrix, is_partial_positive_definite,
    is_partial_positive_semidefinite, min_eigenvalue, HankelView,
};
use crate::schur::{complete_pattern_inductive, schur_family};
use crate::types::{pattern_of, PartialSequence, Pattern, ToleranceOptions};

const BARRIER_STARTS: usize = 3;

/// Largest number of missing entries the search phase accepts.
pub const MISSING_CAP: usize = 6;

/// Positive definite or positive semidefinite completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Definiteness {
    Pd,
    Psd,
}

/// Open (PD) or closed (PSD) interval; infinite ends print as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ALL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    /// No admissible value in either mode.
    pub const EMPTY: Interval = Interval {
        lo: f64::INFINITY,
        hi: f64::NEG_INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Empty as an open interval.
    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn midpoint(&self) -> Option<f64> {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => Some(0.5 * (self.lo + self.hi)),
            (true, false) => Some(self.lo + 1.0 + self.lo.abs()),
            (false, true) => Some(self.hi - 1.0 - self.hi.abs()),
            (false, false) => Some(0.0),
        }
        .filter(|_| !self.is_empty())
    }
}

/// Range of one unknown allowed by one principal submatrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinorCondition {
    /// Rows of the principal submatrix.
    pub rows: Vec<usize>,
    /// The unknown index.
    pub index: usize,
    pub interval: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstructionKind {
    /// The specified entries alone already fail.
    NotPartial,
    /// Two conditions on the same unknown have disjoint ranges.
    DisjointMinors,
    /// One principal submatrix is indefinite for every value of its unknown.
    EmptyMinor,
    /// A singular specified block forces relations the data violate.
    KernelPropagation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<MinorCondition>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchStats {
    pub evaluations: usize,
    pub method: String,
    /// Best `λ_min(H_n) / scale` seen by the search phase.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_relative_min_eig: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityResult {
    pub feasible: bool,
    /// Set when neither a completion nor a proof of infeasibility was found.
    pub inconclusive: bool,
    pub mode: Definiteness,
    pub order: usize,
    /// Values for the missing indices of `s_0..s_{2n}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion: Option<BTreeMap<usize, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
    pub search_stats: SearchStats,
}

impl FeasibilityResult {
    /// Proven infeasible (by an obstruction, not by an exhausted budget).
    pub fn is_infeasible(&self) -> bool {
        !self.feasible && self.obstruction.is_some()
    }

    /// The completed `s_0..s_{2n}` when feasible.
    pub fn completed_values(&self, s: &PartialSequence) -> Option<Vec<f64>> {
        let completion = self.completion.as_ref()?;
        (0..=2 * self.order)
            .map(|k| s.get(k).or_else(|| completion.get(&k).copied()))
            .collect()
    }
}

/// Options for [`decide`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub mode: Definiteness,
    /// Evaluation budget of the search phase.
    pub budget: usize,
    pub seed: u64,
    pub tol: ToleranceOptions,
    /// Let [`find_witness`] start from embeddings of known obstructions.
    pub use_catalog: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            mode: Definiteness::Pd,
            budget: 20_000,
            seed: 0,
            tol: ToleranceOptions::default(),
            use_catalog: true,
        }
    }
}

fn data_scale(h: &HankelView) -> f64 {
    h.values()
        .iter()
        .flatten()
        .fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// Fills `x` into the missing slots of `h`.
fn fill(h: &HankelView, missing: &[usize], x: &[f64]) -> Vec<f64> {
    let mut values: Vec<f64> = h.values().iter().map(|v| v.unwrap_or(0.0)).collect();
    for (&k, &v) in missing.iter().zip(x) {
        values[k] = v;
    }
    values
}

/// `H[rows]` with `u` substituted for index `index` (all other entries specified).
fn principal_with(h: &HankelView, rows: &[usize], index: usize, u: f64) -> DMatrix<f64> {
    let m = rows.len();
    DMatrix::from_fn(m, m, |a, b| {
        let k = rows[a] + rows[b];
        if k == index {
            u
        } else {
            h.value(k).expect("specified entry")
        }
    })
}

/// Range of `u` for which the one-unknown principal submatrix `H[rows]` is
/// PD (open) or PSD (closed), or `None` when the maximizer runs off every
/// search window. Uses the concavity of `u ↦ λ_min(H[rows](u))`: golden
/// section for the maximizer, then bisection for both ends.
fn minor_interval(
    h: &HankelView,
    rows: &[usize],
    index: usize,
    scale: f64,
    threshold: f64,
) -> Option<Interval> {
    let f = |u: f64| min_eigenvalue(&principal_with(h, rows, index, u));
    let mut bound = 4.0 * scale;
    let mut peak = None;
    for _ in 0..24 {
        let p = golden_max(&f, -bound, bound);
        if p.abs() < 0.99 * bound {
            peak = Some(p);
            break;
        }
        if f(p) > threshold {
            peak = Some(p);
            break;
        }
        bound *= 16.0;
    }
    let peak = peak?;
    if !(f(peak) > threshold) {
        return Some(Interval::EMPTY);
    }
    let edge = |outside: f64| {
        let mut bad = outside;
        let mut grow = 0;
        while f(bad) > threshold {
            bad *= 16.0;
            grow += 1;
            if grow > 24 {
                return outside.signum() * f64::INFINITY;
            }
        }
        let mut good = peak;
        for _ in 0..400 {
            let mid = 0.5 * (good + bad);
            if mid == good || mid == bad {
                break;
            }
            if f(mid) > threshold {
                good = mid;
            } else {
                bad = mid;
            }
        }
        0.5 * (good + bad)
    };
    Some(Interval::new(edge(-bound - peak.abs()), edge(bound + peak.abs())))
}

fn golden_max(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if b - a <= 1e-15 * (hi - lo) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Closed-form conditions on `index` from 1×1 and 2×2 principal submatrices.
fn small_conditions(h: &HankelView, index: usize, mode: Definiteness) -> Vec<MinorCondition> {
    let n = h.order();
    let mut out = Vec::new();
    let cond = |rows: Vec<usize>, lo: f64, hi: f64| MinorCondition {
        rows,
        index,
        interval: Interval::new(lo, hi),
    };
    if index.is_multiple_of(2) && index / 2 <= n {
        let j = index / 2;
        out.push(cond(vec![j], 0.0, f64::INFINITY));
        for i in (0..=n).filter(|&i| i != j) {
            let (Some(d), Some(o)) = (h.entry(i, i), h.entry(i, j)) else {
                continue;
            };
            let rows = vec![i.min(j), i.max(j)];
            if d > 0.0 {
                out.push(cond(rows, o * o / d, f64::INFINITY));
            } else if mode == Definiteness::Psd && d == 0.0 && o == 0.0 {
                out.push(cond(rows, 0.0, f64::INFINITY));
            } else {
                out.push(cond(rows, f64::INFINITY, f64::NEG_INFINITY));
            }
        }
    }
    for i in 0..=n.min(index.saturating_sub(1) / 2) {
        let j = index - i;
        if j <= i || j > n {
            continue;
        }
        let (Some(a), Some(b)) = (h.entry(i, i), h.entry(j, j)) else {
            continue;
        };
        let r = if a >= 0.0 && b >= 0.0 { (a * b).sqrt() } else { -1.0 };
        if r >= 0.0 {
            out.push(cond(vec![i, j], -r, r));
        } else {
            out.push(cond(vec![i, j], f64::INFINITY, f64::NEG_INFINITY));
        }
    }
    out
}

/// Intersects conditions on one unknown; returns the conditions holding the
/// largest lower end and the smallest upper end when they cross.
fn crossing(conds: &[MinorCondition], mode: Definiteness) -> Option<Obstruction> {
    let lo = conds
        .iter()
        .enumerate()
        .fold(None::<usize>, |best, (k, c)| match best {
            Some(b) if conds[b].interval.lo >= c.interval.lo => Some(b),
            _ => Some(k),
        })?;
    let hi = conds
        .iter()
        .enumerate()
        .fold(None::<usize>, |best, (k, c)| match best {
            Some(b) if conds[b].interval.hi <= c.interval.hi => Some(b),
            _ => Some(k),
        })?;
    let (l, h) = (conds[lo].interval.lo, conds[hi].interval.hi);
    let disjoint = match mode {
        Definiteness::Pd => l >= h,
        Definiteness::Psd => l > h,
    };
    if !disjoint {
        return None;
    }
    let index = conds[lo].index;
    if lo == hi {
        return Some(Obstruction {
            kind: ObstructionKind::EmptyMinor,
            conditions: vec![conds[lo].clone()],
            detail: format!(
                "H{:?} has no admissible value of s_{index}",
                conds[lo].rows
            ),
        });
    }
    Some(Obstruction {
        kind: ObstructionKind::DisjointMinors,
        conditions: vec![conds[lo].clone(), conds[hi].clone()],
        detail: format!(
            "H{:?} needs s_{index} above {l}, H{:?} needs it below {h}",
            conds[lo].rows, conds[hi].rows
        ),
    })
}

/// Maximal principal row sets in which `index` is the only unknown and occurs.
fn one_unknown_sets(h: &HankelView, index: usize) -> Result<Vec<Vec<usize>>> {
    let mut values = h.values().to_vec();
    values[index] = Some(0.0);
    let filled = HankelView::from_options(values)?;
    Ok(fully_specified_principal_index_sets(&filled)?
        .into_iter()
        .filter(|rows| {
            rows.len() >= 3
                && rows
                    .iter()
                    .any(|&i| rows.iter().any(|&j| i + j == index))
        })
        .collect())
}

fn partial_check(h: &HankelView, mode: Definiteness, tol: &ToleranceOptions) -> Result<Option<Obstruction>> {
    for rows in fully_specified_principal_index_sets(h)? {
        let report = crate::linalg::check_matrix(&h.principal(&rows)?, tol);
        let ok = match mode {
            Definiteness::Pd => report.is_pd,
            Definiteness::Psd => report.is_psd,
        };
        if !ok {
            return Ok(Some(Obstruction {
                kind: ObstructionKind::NotPartial,
                conditions: Vec::new(),
                detail: format!(
                    "specified block H{rows:?} has smallest eigenvalue {:e}",
                    report.min_eigenvalue
                ),
            }));
        }
    }
    Ok(None)
}

/// Relations `H v = 0` forced by kernel vectors `v` of singular specified
/// blocks (a PSD matrix annihilates every vector with `vᵀHv = 0`). Values
/// forced this way are added and the scan repeats until nothing changes.
fn kernel_propagation(
    h: &HankelView,
    tol: &ToleranceOptions,
) -> Result<(Option<Obstruction>, BTreeMap<usize, f64>)> {
    let n = h.order();
    let scale = data_scale(h);
    let kernel_tol = tol.psd_tol.max(1e-12) * scale;
    let residual_tol = 1e-7 * scale;
    let mut values = h.values().to_vec();
    let mut derived = BTreeMap::new();
    for _ in 0..=4 * (n + 1) {
        let view = HankelView::from_options(values.clone())?;
        let mut changed = false;
        for rows in fully_specified_principal_index_sets(&view)? {
            let m = view.principal(&rows)?;
            let eig = nalgebra::SymmetricEigen::new(m);
            for (c, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda < -tol.psd_tol * scale {
                    let kind = if derived.is_empty() {
                        ObstructionKind::NotPartial
                    } else {
                        ObstructionKind::KernelPropagation
                    };
                    return Ok((
                        Some(Obstruction {
                            kind,
                            conditions: Vec::new(),
                            detail: format!("H{rows:?} has eigenvalue {lambda:e} after propagation"),
                        }),
                        derived,
                    ));
                }
                if lambda.abs() > kernel_tol {
                    continue;
                }
                let v = eig.eigenvectors.column(c);
                for r in 0..=n {
                    let mut known = 0.0;
                    let mut unknown = Vec::new();
                    for (a, &i) in rows.iter().enumerate() {
                        if v[a].abs() <= 1e-12 {
                            continue;
                        }
                        match values[r + i] {
                            Some(x) => known += v[a] * x,
                            None => unknown.push((r + i, v[a])),
                        }
                    }
                    match unknown.as_slice() {
                        [] if known.abs() > residual_tol => {
                            return Ok((
                                Some(Obstruction {
                                    kind: ObstructionKind::KernelPropagation,
                                    conditions: Vec::new(),
                                    detail: format!(
                                        "kernel of singular H{rows:?} forces row {r} to vanish, residual {known:e}"
                                    ),
                                }),
                                derived,
                            ));
                        }
                        [(k, coef)] if coef.abs() >= 1e-6 => {
                            let x = -known / coef;
                            values[*k] = Some(x);
                            derived.insert(*k, x);
                            changed = true;
                        }
                        _ => {}
                    }
                }
                if changed {
                    break;
                }
            }
            if changed {
                break;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((None, derived))
}

/// Per-unknown ranges left after the obstruction scan.
#[derive(Debug, Clone, Default)]
struct ScanOutcome {
    obstruction: Option<Obstruction>,
    ranges: BTreeMap<usize, Interval>,
    derived: BTreeMap<usize, f64>,
}

fn obstruction_scan(h: &HankelView, mode: Definiteness, tol: &ToleranceOptions) -> Result<ScanOutcome> {
    let mut out = ScanOutcome::default();
    if let Some(obs) = partial_check(h, mode, tol)? {
        out.obstruction = Some(obs);
        return Ok(out);
    }
    let missing = h.missing_indices();
    let mut conds: BTreeMap<usize, Vec<MinorCondition>> = BTreeMap::new();
    for &k in &missing {
        let c = small_conditions(h, k, mode);
        if let Some(obs) = crossing(&c, mode) {
            out.obstruction = Some(obs);
            return Ok(out);
        }
        conds.insert(k, c);
    }
    let scale = data_scale(h);
    let threshold = match mode {
        Definiteness::Pd => 0.0,
        Definiteness::Psd => -tol.psd_tol * scale,
    };
    for &k in &missing {
        let list = conds.get_mut(&k).expect("inserted above");
        for rows in one_unknown_sets(h, k)? {
            if let Some(interval) = minor_interval(h, &rows, k, scale, threshold) {
                list.push(MinorCondition {
                    rows,
                    index: k,
                    interval,
                });
            }
        }
        if let Some(obs) = crossing(list, mode) {
            out.obstruction = Some(obs);
            return Ok(out);
        }
        let range = list.iter().fold(Interval::ALL, |acc, c| {
            Interval::new(acc.lo.max(c.interval.lo), acc.hi.min(c.interval.hi))
        });
        out.ranges.insert(k, range);
    }
    if mode == Definiteness::Psd {
        let (obs, derived) = kernel_propagation(h, tol)?;
        out.obstruction = obs;
        out.derived = derived;
    }
    Ok(out)
}

/// Admissible range of the single missing entry of `s_0..s_{2n}`.
///
/// For `n = 2` with `s_3` missing this is the closed form
/// `((s_1 s_2 − √(P_1 P_2)) / s_0, (s_1 s_2 + √(P_1 P_2)) / s_0)` with
/// `P_1 = s_0 s_2 − s_1²` and `P_2 = s_0 s_4 − s_2²`. A missing corner
/// `s_{2n}` gives `(vᵀ H_{n−1}⁻¹ v, ∞)`. A missing `s_{2n−1}` makes the
/// last leading minor quadratic and is solved the same way. Other positions
/// intersect the ranges of all leading principal minors numerically.
/// Returns [`Interval::EMPTY`] when no value works.
pub fn interval_for_single_missing(s: &PartialSequence, tol: &ToleranceOptions) -> Result<Interval> {
    let n = crate::linalg::certification_order(s);
    let h = hankel(s, n)?;
    let missing = h.missing_indices();
    let &[index] = missing.as_slice() else {
        return Err(Error::NotSingleMissing(missing.len()));
    };
    if n == 0 {
        return Ok(Interval::new(0.0, f64::INFINITY));
    }
    // Leading block H_{n-1} never contains s_{2n-1} or s_{2n}.
    if index >= 2 * n - 1 {
        let lead: Vec<f64> = (0..=2 * n - 2).map(|k| h.value(k).expect("specified")).collect();
        let m = hankel_matrix(&lead)?;
        let Some(chol) = m.clone().cholesky() else {
            return Ok(Interval::EMPTY);
        };
        if !crate::linalg::check_matrix(&m, tol).is_pd {
            return Ok(Interval::EMPTY);
        }
        // b(u) = (s_n, …, s_{2n-1}); the unknown, if any, is its last slot.
        let b: Vec<f64> = (n..2 * n).map(|k| h.value(k).unwrap_or(0.0)).collect();
        let b = nalgebra::DVector::from_vec(b);
        let mb = chol.solve(&b);
        if index == 2 * n {
            return Ok(Interval::new(b.dot(&mb), f64::INFINITY));
        }
        let corner = h.value(2 * n).expect("specified");
        let mut e = nalgebra::DVector::zeros(n);
        e[n - 1] = 1.0;
        let me = chol.solve(&e);
        // corner − (b + u e)ᵀ M (b + u e) > 0  ⇔  a u² + 2 β u + c < 0
        let a = me[n - 1];
        let beta = mb[n - 1];
        let c = b.dot(&mb) - corner;
        let disc = beta * beta - a * c;
        if !(disc > 0.0) {
            return Ok(Interval::EMPTY);
        }
        if n == 2 {
            let v = |k: usize| h.value(k).expect("specified");
            let p1 = v(0) * v(2) - v(1) * v(1);
            let p2 = v(0) * v(4) - v(2) * v(2);
            let root = (p1 * p2).sqrt();
            return Ok(Interval::new((v(1) * v(2) - root) / v(0), (v(1) * v(2) + root) / v(0)));
        }
        let root = disc.sqrt();
        return Ok(Interval::new((-beta - root) / a, (-beta + root) / a));
    }
    let rows: Vec<usize> = (0..=n).collect();
    let threshold = tol.pd_margin * data_scale(&h);
    Ok(minor_interval(&h, &rows, index, data_scale(&h), threshold).unwrap_or(Interval::ALL))
}

struct Search<'a> {
    h: &'a HankelView,
    missing: &'a [usize],
    scale: f64,
    mode: Definiteness,
    tol: ToleranceOptions,
    evaluations: usize,
    budget: usize,
}

impl Search<'_> {
    /// `λ_min / scale` and the supergradient with respect to the unknowns.
    fn eval(&mut self, x: &[f64]) -> (f64, Vec<f64>) {
        self.evaluations += 1;
        let m = hankel_matrix(&fill(self.h, self.missing, x)).expect("odd length");
        let eig = nalgebra::SymmetricEigen::new(m);
        let (c, lambda) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        let v = eig.eigenvectors.column(c);
        let dim = v.len();
        let grad = self
            .missing
            .iter()
            .map(|&k| {
                (0..dim)
                    .filter(|&i| k >= i && k - i < dim)
                    .map(|i| v[i] * v[k - i])
                    .sum()
            })
            .collect();
        (lambda / self.scale, grad)
    }

    fn accepts(&self, x: &[f64]) -> bool {
        let m = hankel_matrix(&fill(self.h, self.missing, x)).expect("odd length");
        let report = crate::linalg::check_matrix(&m, &self.tol);
        match self.mode {
            Definiteness::Pd => report.is_pd,
            Definiteness::Psd => report.is_psd,
        }
    }

    fn line_max(&mut self, x: &[f64], dir: &[f64], step: f64) -> (f64, f64) {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let at = |t: f64| -> Vec<f64> { x.iter().zip(dir).map(|(a, d)| a + t * d).collect() };
        let (mut a, mut b) = (-step, step);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = self.eval(&at(c)).0;
        let mut fd = self.eval(&at(d)).0;
        for _ in 0..24 {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.eval(&at(c)).0;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.eval(&at(d)).0;
            }
        }
        if fc >= fd {
            (c, fc)
        } else {
            (d, fd)
        }
    }

    /// Interior-point ascent of the smallest eigenvalue from `x`. Returns the
    /// last point, its relative smallest eigenvalue and whether it was
    /// accepted.
    fn barrier(&mut self, x: Vec<f64>) -> (Vec<f64>, f64, bool) {
        let values = fill(self.h, self.missing, &x);
        let left = self.budget.saturating_sub(self.evaluations);
        let run = crate::barrier::ascend(values, self.missing, None, left, |v| {
            let m = hankel_matrix(v).expect("odd length");
            let report = crate::linalg::check_matrix(&m, &self.tol);
            match self.mode {
                Definiteness::Pd => report.is_pd,
                Definiteness::Psd => report.is_psd,
            }
        });
        self.evaluations += run.steps.max(1);
        let x = self.missing.iter().map(|&k| run.values[k]).collect();
        (x, run.min_eig / self.scale, run.stopped)
    }

    /// Ascent from `x`; returns the best point and value, stopping early
    /// once the point is accepted.
    fn climb(&mut self, mut x: Vec<f64>, cap: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64, bool) {
        let (mut f, mut grad) = self.eval(&x);
        if self.accepts(&x) {
            return (x, f, true);
        }
        let start = self.evaluations;
        let dim = x.len();
        let mut step = 0.5 * self.scale;
        while self.evaluations - start < cap && self.evaluations < self.budget {
            let mut dirs: Vec<Vec<f64>> = Vec::with_capacity(dim + 2);
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm > 0.0 {
                dirs.push(grad.iter().map(|g| g / norm).collect());
            }
            for i in 0..dim {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                dirs.push(e);
            }
            let r: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
            dirs.push(r.iter().map(|v| v / rn).collect());

            let mut improved = false;
            let mut at_edge = false;
            for dir in dirs {
                let (t, ft) = self.line_max(&x, &dir, step);
                if ft > f {
                    x.iter_mut().zip(&dir).for_each(|(a, d)| *a += t * d);
                    f = ft;
                    improved = true;
                    at_edge |= t.abs() > 0.9 * step;
                    if self.accepts(&x) {
                        return (x, f, true);
                    }
                }
            }
            grad = self.eval(&x).1;
            if at_edge {
                step *= 4.0;
            } else if !improved {
                step *= 0.25;
                if step < 1e-14 * self.scale {
                    break;
                }
            }
        }
        (x, f, false)
    }
}

fn truncated_to(s: &PartialSequence, horizon: usize) -> Result<PartialSequence> {
    let entries = s.entries().range(..=horizon).map(|(&k, &v)| (k, v)).collect();
    PartialSequence::new(entries, Some(horizon))
}

/// Decides whether `s_0..s_{2n}` (entries beyond `2n` are ignored) has a PD
/// or PSD completion.
pub fn decide(s: &PartialSequence, n: usize, opts: &OracleOptions) -> Result<FeasibilityResult> {
    opts.tol.validate()?;
    let h = hankel(s, n)?;
    let missing = h.missing_indices();
    let mut result = FeasibilityResult {
        feasible: false,
        inconclusive: false,
        mode: opts.mode,
        order: n,
        completion: None,
        obstruction: None,
        search_stats: SearchStats {
            evaluations: 0,
            method: "obstruction-scan".into(),
            best_relative_min_eig: None,
        },
    };
    let scan = obstruction_scan(&h, opts.mode, &opts.tol)?;
    if let Some(obs) = scan.obstruction {
        result.obstruction = Some(obs);
        return Ok(result);
    }
    if missing.is_empty() {
        // Fully specified and the scan found every block fine.
        result.feasible = true;
        result.completion = Some(BTreeMap::new());
        return Ok(result);
    }
    if missing.len() > MISSING_CAP {
        return Err(Error::TooManyMissing(missing.len()));
    }

    let scale = data_scale(&h);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    if let Ok(trunc) = truncated_to(s, 2 * n) {
        if schur_family(&pattern_of(&trunc)).is_some() {
            if let Ok(cert) = complete_pattern_inductive(&trunc, 2 * n, &opts.tol) {
                seeds.push(missing.iter().map(|&k| cert.completed[k]).collect());
            }
        }
    }
    seeds.push(
        missing
            .iter()
            .map(|k| {
                scan.derived.get(k).copied().unwrap_or_else(|| {
                    scan.ranges
                        .get(k)
                        .and_then(Interval::midpoint)
                        .unwrap_or(if k % 2 == 0 { scale } else { 0.0 })
                })
            })
            .collect(),
    );

    let mut search = Search {
        h: &h,
        missing: &missing,
        scale,
        mode: opts.mode,
        tol: opts.tol,
        evaluations: 0,
        budget: opts.budget.max(1),
    };
    let cap = (opts.budget / 4).max(400);
    let mut best = f64::NEG_INFINITY;
    let mut k = 0;
    while search.evaluations < search.budget {
        let x0 = if k < seeds.len() {
            seeds[k].clone()
        } else {
            missing
                .iter()
                .map(|&idx| {
                    let z: f64 = rng.sample(StandardNormal);
                    if idx % 2 == 0 {
                        scale * z.exp()
                    } else {
                        scale * z
                    }
                })
                .collect()
        };
        k += 1;
        let (x, f, ok) = if k <= seeds.len() + BARRIER_STARTS {
            search.barrier(x0)
        } else {
            search.climb(x0, cap, &mut rng)
        };
        best = best.max(f);
        if ok {
            result.feasible = true;
            result.completion = Some(missing.iter().copied().zip(x).collect());
            break;
        }
    }
    result.inconclusive = !result.feasible;
    result.search_stats = SearchStats {
        evaluations: search.evaluations,
        method: "log-det barrier and multi-start ascent of the smallest eigenvalue".into(),
        best_relative_min_eig: Some(best),
    };
    Ok(result)
}

/// [`decide`] for positive definite completions with default tolerances.
pub fn decide_pd_completable(s: &PartialSequence, n: usize, budget: usize) -> Result<FeasibilityResult> {
    decide(
        s,
        n,
        &OracleOptions {
            budget,
            ..OracleOptions::default()
        },
    )
}

/// Runs only the obstruction phase on `s_0..s_{2n}`.
pub fn obstruct(s: &PartialSequence, n: usize, mode: Definiteness, tol: &ToleranceOptions) -> Result<Option<Obstruction>> {
    Ok(obstruction_scan(&hankel(s, n)?, mode, tol)?.obstruction)
}

/// A partial instance proven to have no completion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sequence: PartialSequence,
    pub obstruction: Obstruction,
    /// Number of candidates examined.
    pub tried: usize,
}

/// Accepts `s` as a witness when it is partial positive (semi)definite and
/// the obstruction phase proves it has no completion.
pub fn confirm_witness(s: &PartialSequence, n: usize, mode: Definiteness, tol: &ToleranceOptions) -> Result<Option<Obstruction>> {
    let partial = match mode {
        Definiteness::Pd => is_partial_positive_definite(s, tol)?,
        Definiteness::Psd => is_partial_positive_semidefinite(s, tol)?,
    };
    if !partial {
        return Ok(None);
    }
    Ok(obstruct(s, n, mode, tol)?.filter(|o| o.kind != ObstructionKind::NotPartial))
}

fn sample_values(p: &Pattern, rng: &mut ChaCha8Rng, round: usize) -> BTreeMap<usize, f64> {
    let mut gauss = || -> f64 { rng.sample(StandardNormal) };
    match round % 3 {
        0 => p
            .iter()
            .map(|k| {
                let z = gauss();
                (k, if k % 2 == 0 { (1.5 * z).exp() } else { z })
            })
            .collect(),
        _ => {
            let atoms = 1 + (gauss().abs() * 3.0) as usize;
            let locs: Vec<(f64, f64)> = (0..atoms.min(8))
                .map(|_| (1.2 * gauss(), gauss().exp()))
                .collect();
            let noise = [0.3, 0.1, 0.03][(round / 3) % 3];
            p.iter()
                .map(|k| {
                    let m: f64 = locs.iter().map(|(x, w)| w * x.powi(k as i32)).sum();
                    let bump = noise * gauss() * (1.0 + m.abs());
                    (k, m + bump)
                })
                .collect()
        }
    }
}

/// Randomized search for a partial instance on `P ∩ [0, 2n]` that has no
/// completion. Cataloged embeddings are tried first, then random values and
/// perturbed moment sequences; each candidate is accepted only when the
/// obstruction phase proves it infeasible.
pub fn find_witness(p: &Pattern, n: usize, opts: &OracleOptions) -> Result<Option<Witness>> {
    let p = p.truncated(2 * n);
    if p.len() == 2 * n + 1 {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tried = 0;
    let check = |entries: BTreeMap<usize, f64>, tried: usize| -> Result<Option<Witness>> {
        let s = PartialSequence::new(entries, Some(2 * n))?;
        Ok(confirm_witness(&s, n, opts.mode, &opts.tol)?.map(|obstruction| Witness {
            sequence: s,
            obstruction,
            tried,
        }))
    };
    let seeds = if opts.use_catalog {
        crate::classify::catalog_seeds(&p, n, opts.mode)
    } else {
        Vec::new()
    };
    for seed in seeds {
        let rest: Vec<usize> = p.iter().filter(|k| !seed.contains_key(k)).collect();
        for attempt in 0..24 {
            let mut entries = seed.clone();
            for &k in &rest {
                let v = if attempt == 0 {
                    if k % 2 == 0 {
                        16.0 * (k as f64 + 1.0)
                    } else {
                        0.0
                    }
                } else {
                    let z: f64 = rng.sample(StandardNormal);
                    if k % 2 == 0 {
                        (2.0 * z).exp() * 8.0
                    } else {
                        z * 0.1
                    }
                };
                entries.insert(k, v);
            }
            tried += 1;
            if let Some(w) = check(entries, tried)? {
                return Ok(Some(w));
            }
            if rest.is_empty() {
                break;
            }
        }
    }
    for round in 0..opts.budget {
        tried += 1;
        if let Some(w) = check(sample_values(&p, &mut rng, round), tried)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}
