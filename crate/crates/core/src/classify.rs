//! Pattern-level completability verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ORDER_CAP;
use crate::oracle::{find_witness, Definiteness, Obstruction, OracleOptions};
use crate::schur::schur_family;
use crate::types::{PartialSequence, Pattern, ToleranceOptions};

/// Summary status of a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    PdCompletable,
    PsdCompletable,
    NotPsdCompletable,
    NotPdCompletable,
    Unknown,
}

/// Status for one kind of completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completability {
    Completable,
    NotCompletable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub status: Completability,
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PartialSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<Obstruction>,
}

impl Finding {
    fn unknown() -> Self {
        Self {
            status: Completability::Unknown,
            rule: "none".into(),
            strategy: None,
            witness: None,
            obstruction: None,
        }
    }

    fn completable(rule: &str, strategy: &str) -> Self {
        Self {
            status: Completability::Completable,
            rule: rule.into(),
            strategy: Some(strategy.into()),
            witness: None,
            obstruction: None,
        }
    }
}

/// `P = d·P' + l0` with the largest `d` admitting an even `l0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub pattern: Pattern,
    pub d: usize,
    pub l0: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternVerdict {
    pub status: Status,
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PartialSequence>,
    /// `P ∩ [0, horizon]`.
    pub pattern: Pattern,
    pub horizon: usize,
    pub reduction: Reduction,
    pub pd: Finding,
    pub psd: Finding,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn reduce_pattern(p: &Pattern) -> Reduction {
    let Some(min) = p.min() else {
        return Reduction {
            pattern: Pattern::default(),
            d: 1,
            l0: 0,
        };
    };
    let g = p.iter().fold(0, |g, k| gcd(g, k - min));
    if g == 0 {
        let l0 = min - min % 2;
        return Reduction {
            pattern: Pattern::new([min - l0]),
            d: 1,
            l0,
        };
    }
    for d in (1..=g).rev().filter(|d| g % d == 0) {
        // largest even l0 <= min with l0 ≡ min (mod d)
        let mut l0 = min as isize;
        while l0 >= 0 && l0 % 2 != 0 {
            l0 -= d as isize;
        }
        if l0 >= 0 {
            let l0 = l0 as usize;
            return Reduction {
                pattern: p.iter().map(|k| (k - l0) / d).collect(),
                d,
                l0,
            };
        }
    }
    unreachable!("d = 1 always admits an even offset")
}

/// Negative catalog: induced patterns of `H[α]` (as subsets of `0..=2(|α|-1)`)
/// and a partial positive definite instance on each without a PD completion.
pub fn catalog() -> Vec<(Pattern, Vec<(usize, f64)>)> {
    vec![
        (
            Pattern::new([0, 1, 3, 4]),
            vec![(0, 1.0), (1, 0.5), (3, 0.0), (4, 1.0 / 16.0)],
        ),
        (
            Pattern::new([0, 1, 4]),
            vec![(0, 1.0), (1, 0.5), (4, 1.0 / 16.0)],
        ),
        (
            Pattern::new([0, 3, 4]),
            vec![(0, 1.0 / 16.0), (3, 0.5), (4, 1.0)],
        ),
        (
            Pattern::new([0, 1, 2, 4, 5, 6]),
            vec![(0, 1.0), (1, 0.0), (2, 1.0), (4, 2.0), (5, 2.85), (6, 4.1)],
        ),
    ]
}

/// A principal index set `α = {a, a+c, …}` whose submatrix matches a catalog entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForbiddenHit {
    pub rows: Vec<usize>,
    pub induced: Pattern,
}

impl ForbiddenHit {
    /// Sequence index of position `k` of the induced pattern.
    pub fn index_of(&self, k: usize) -> usize {
        let c = self.rows.get(1).map_or(1, |&r| r - self.rows[0]);
        2 * self.rows[0] + c * k
    }
}

/// Every arithmetic-progression principal set of `H_n`, `n = ⌈horizon/2⌉`,
/// whose induced pattern is in the negative catalog.
pub fn forbidden_hits(p: &Pattern, horizon: usize) -> Result<Vec<ForbiddenHit>> {
    let n = horizon.div_ceil(2);
    if n > ORDER_CAP {
        return Err(Error::OrderTooLarge {
            order: n,
            cap: ORDER_CAP,
        });
    }
    let p = p.truncated(horizon);
    let entries = catalog();
    let mut hits = Vec::new();
    for size in [3usize, 4] {
        for c in 1..=n {
            for a in 0..=n {
                if a + (size - 1) * c > n {
                    break;
                }
                let induced: Pattern = (0..=2 * (size - 1))
                    .filter(|&k| p.contains(2 * a + c * k))
                    .collect();
                if entries.iter().any(|(q, _)| size_of(q) == size && *q == induced) {
                    hits.push(ForbiddenHit {
                        rows: (0..size).map(|i| a + i * c).collect(),
                        induced,
                    });
                }
            }
        }
    }
    Ok(hits)
}

fn size_of(q: &Pattern) -> usize {
    q.max().map_or(0, |m| m / 2 + 1)
}

/// First catalog hit, if any.
pub fn contains_forbidden_submatrix_pattern(p: &Pattern, horizon: usize) -> Result<Option<ForbiddenHit>> {
    Ok(forbidden_hits(p, horizon)?.into_iter().next())
}

/// Partial assignments that embed known obstructions into `p` (used as the
/// first witness candidates).
pub fn catalog_seeds(p: &Pattern, n: usize, mode: Definiteness) -> Vec<BTreeMap<usize, f64>> {
    let mut out = Vec::new();
    let entries = catalog();
    if let Ok(hits) = forbidden_hits(p, 2 * n) {
        for hit in hits {
            if let Some((_, vals)) = entries.iter().find(|(q, _)| *q == hit.induced) {
                out.push(vals.iter().map(|&(k, v)| (hit.index_of(k), v)).collect());
            }
        }
    }
    if mode == Definiteness::Psd {
        let r = reduce_pattern(p);
        if let Some(m) = progression_length(&r) {
            let ones = (0..=m).map(|k| (r.d * k + r.l0, if k == m { 2.0 } else { 1.0 }));
            out.push(ones.collect());
            let zeros = (0..=m).map(|k| (r.d * k + r.l0, if k == m { 1.0 } else { 0.0 }));
            out.push(zeros.collect());
        }
    }
    out
}

/// `m` when the reduced pattern is `{0..m}` with `m ≥ 1`.
fn progression_length(r: &Reduction) -> Option<usize> {
    r.pattern
        .is_prefix()
        .then(|| r.pattern.max().unwrap_or(0))
        .filter(|&m| m >= 1)
}

/// Random candidates tried after the catalog embeddings when confirming a
/// negative verdict.
pub const WITNESS_BUDGET: usize = 500;

fn negative(mode: Definiteness, p: &Pattern, n: usize, rule: &str, tol: &ToleranceOptions) -> Result<Option<Finding>> {
    let opts = OracleOptions {
        mode,
        budget: WITNESS_BUDGET,
        seed: 0,
        tol: *tol,
        use_catalog: true,
    };
    Ok(find_witness(p, n, &opts)?.map(|w| Finding {
        status: Completability::NotCompletable,
        rule: rule.into(),
        strategy: None,
        witness: Some(w.sequence),
        obstruction: Some(w.obstruction),
    }))
}

fn pd_finding(p: &Pattern, horizon: usize, r: &Reduction, tol: &ToleranceOptions) -> Result<Finding> {
    let n = horizon.div_ceil(2);
    if p.len() == horizon + 1 {
        return Ok(Finding::completable("fully-specified", "schur"));
    }
    if !forbidden_hits(p, horizon)?.is_empty() {
        if let Some(f) = negative(Definiteness::Pd, p, n, "forbidden-submatrix", tol)? {
            return Ok(f);
        }
    }
    if let Some(family) = schur_family(p) {
        return Ok(Finding::completable(family.label(), "schur"));
    }
    if p.len() <= 1 {
        return Ok(Finding::completable("single-entry", "lift"));
    }
    if r.l0 == 0 && progression_length(r).is_some() {
        return Ok(Finding::completable("arithmetic-prefix", "lift"));
    }
    Ok(Finding::unknown())
}

fn psd_finding(p: &Pattern, horizon: usize, r: &Reduction, tol: &ToleranceOptions) -> Result<Finding> {
    let n = horizon.div_ceil(2);
    if p.len() == horizon + 1 {
        return Ok(Finding::completable("fully-specified", "identity"));
    }
    if p.len() <= 1 {
        return Ok(Finding::completable("single-entry", "measure"));
    }
    if progression_length(r).is_some() && p.max().is_some_and(|m| horizon > m) {
        if let Some(f) = negative(Definiteness::Psd, p, n, "truncated-progression", tol)? {
            return Ok(f);
        }
    }
    Ok(Finding::unknown())
}

/// Verdict for `P ∩ [0, horizon]`.
///
/// Negative rules are tried before positive ones, and every negative verdict
/// carries a witness that the oracle has proven infeasible; a rule whose
/// witness cannot be confirmed does not fire. PD and PSD findings are
/// recorded independently; the summary status prefers, in order,
/// `NOT_PD_COMPLETABLE`, `PSD_COMPLETABLE`, `PD_COMPLETABLE`,
/// `NOT_PSD_COMPLETABLE`.
pub fn classify(p: &Pattern, horizon: usize, tol: &ToleranceOptions) -> Result<PatternVerdict> {
    tol.validate()?;
    let p = p.truncated(horizon);
    let reduction = reduce_pattern(&p);
    let pd = pd_finding(&p, horizon, &reduction, tol)?;
    let psd = psd_finding(&p, horizon, &reduction, tol)?;
    let (status, lead) = match (pd.status, psd.status) {
        (Completability::NotCompletable, _) => (Status::NotPdCompletable, &pd),
        (_, Completability::Completable) => (Status::PsdCompletable, &psd),
        (Completability::Completable, _) => (Status::PdCompletable, &pd),
        (_, Completability::NotCompletable) => (Status::NotPsdCompletable, &psd),
        _ => (Status::Unknown, &pd),
    };
    Ok(PatternVerdict {
        status,
        rule: lead.rule.clone(),
        strategy: pd.strategy.clone().filter(|_| pd.status == Completability::Completable),
        witness: lead.witness.clone(),
        pattern: p,
        horizon,
        reduction,
        pd,
        psd,
    })
}
