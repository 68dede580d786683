//! Strategy dispatch for completing a single partial sequence.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::CompletionCertificate;
use crate::classify::{classify, reduce_pattern, Completability};
use crate::error::{Error, Result};
use crate::measure::{
    complete_arithmetic_pattern, complete_geometric, lift_psd_to_pd, moments, Atom, AtomicMeasure,
};
use crate::oracle::{decide, Definiteness, OracleOptions, MISSING_CAP};
use crate::schur::{complete_double_tail, complete_pattern_inductive, schur_family};
use crate::types::{pattern_of, PartialSequence, ToleranceOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Auto,
    Schur,
    Measure,
    Geometric,
    Lift,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::Schur => "schur",
            Strategy::Measure => "measure",
            Strategy::Geometric => "geometric",
            Strategy::Lift => "lift",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "schur" => Ok(Strategy::Schur),
            "measure" => Ok(Strategy::Measure),
            "geometric" => Ok(Strategy::Geometric),
            "lift" => Ok(Strategy::Lift),
            other => Err(Error::InvalidInput(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompleteOptions {
    pub strategy: Strategy,
    /// Defaults to the input horizon.
    pub target_horizon: Option<usize>,
    /// Step and offset for the measure strategy; default to the pattern's reduction.
    pub d: Option<usize>,
    pub l0: Option<usize>,
    pub tol: ToleranceOptions,
    /// Seed for the search fallback of the automatic strategy.
    pub seed: u64,
}

fn single_entry(s: &PartialSequence, target: usize, tol: &ToleranceOptions) -> Result<CompletionCertificate> {
    let measure = match s.entries().iter().next() {
        None => AtomicMeasure::default(),
        Some((_, &v)) if v == 0.0 => AtomicMeasure::default(),
        Some((&k, &v)) => {
            if k % 2 == 0 && v < 0.0 {
                return Err(Error::NotPositive(format!("s_{k} = {v} is negative")));
            }
            let location = if k % 2 == 1 && v < 0.0 { -1.0 } else { 1.0 };
            AtomicMeasure::new(vec![Atom {
                location,
                weight: v.abs(),
            }])?
        }
    };
    let mut cert = CompletionCertificate::new(moments(&measure, target)?, "measure/single-atom", false);
    cert.measure = Some(measure);
    cert.verify(s, tol)?;
    Ok(cert)
}

/// PSD completion used inside the lift: one atom for at most one entry,
/// otherwise the arithmetic-progression measure construction.
fn psd_inner(
    s: &PartialSequence,
    target: usize,
    d: Option<usize>,
    l0: Option<usize>,
    tol: &ToleranceOptions,
) -> Result<CompletionCertificate> {
    if s.len_specified() <= 1 {
        return single_entry(s, target, tol);
    }
    let r = reduce_pattern(&pattern_of(s));
    complete_arithmetic_pattern(s, d.unwrap_or(r.d), l0.unwrap_or(r.l0), target, tol)
}

/// PD completion found by the oracle search, extended by Schur tails when
/// the target lies beyond the oracle's order.
fn via_oracle(s: &PartialSequence, target: usize, opts: &CompleteOptions) -> Result<CompletionCertificate> {
    let n = s.horizon().div_ceil(2);
    for mode in [Definiteness::Pd, Definiteness::Psd] {
        let oracle = OracleOptions {
            mode,
            budget: 20_000,
            seed: opts.seed,
            tol: opts.tol,
            use_catalog: false,
        };
        let result = decide(s, n, &oracle)?;
        if let Some(obs) = result.obstruction {
            if mode == Definiteness::Psd {
                return Err(Error::NotPositive(obs.detail));
            }
            continue;
        }
        let Some(mut values) = result.completed_values(s) else {
            continue;
        };
        while values.len() < target + 1 {
            if mode == Definiteness::Psd {
                return Err(Error::UnsupportedPattern(
                    "semidefinite search result cannot be extended".into(),
                ));
            }
            let tail = complete_double_tail(&values, &opts.tol)?;
            values.push(tail.odd);
            values.push(tail.even);
        }
        values.truncate(target + 1);
        let mut cert = CompletionCertificate::new(values, "oracle", mode == Definiteness::Pd);
        if cert.verify(s, &opts.tol).is_err() {
            cert.promises_pd = false;
            cert.verify(s, &opts.tol)?;
        }
        return Ok(cert);
    }
    Err(Error::UnsupportedPattern("search found no completion".into()))
}

fn run(strategy: Strategy, s: &PartialSequence, target: usize, opts: &CompleteOptions) -> Result<CompletionCertificate> {
    let tol = &opts.tol;
    match strategy {
        Strategy::Schur => complete_pattern_inductive(s, target, tol),
        Strategy::Measure => {
            if let (Some(d), Some(l0)) = (opts.d, opts.l0) {
                complete_arithmetic_pattern(s, d, l0, target, tol)
            } else {
                psd_inner(s, target, opts.d, opts.l0, tol)
            }
        }
        Strategy::Geometric => complete_geometric(s, target, tol),
        Strategy::Lift => lift_psd_to_pd(s, target, tol, |r| psd_inner(r, target, opts.d, opts.l0, tol)),
        Strategy::Auto => auto(s, target, opts),
    }
}

fn auto(s: &PartialSequence, target: usize, opts: &CompleteOptions) -> Result<CompletionCertificate> {
    let p = pattern_of(s);
    let verdict = classify(&p, s.horizon(), &opts.tol)?;
    let mut order: Vec<Strategy> = Vec::new();
    if verdict.pd.status == Completability::Completable {
        match verdict.pd.strategy.as_deref() {
            Some("lift") => order.push(Strategy::Lift),
            _ => order.push(Strategy::Schur),
        }
    }
    if schur_family(&p).is_some() {
        order.push(Strategy::Schur);
    }
    let r = reduce_pattern(&p);
    if r.pattern.is_prefix() || p.len() <= 1 {
        order.push(Strategy::Lift);
        order.push(Strategy::Measure);
    }
    if p.is_prefix() && p.len() >= 3 {
        order.push(Strategy::Geometric);
    }
    order.dedup();
    let mut first_err = None;
    for strategy in order {
        match run(strategy, s, target, opts) {
            Ok(cert) => return Ok(cert),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let missing = (0..=2 * s.horizon().div_ceil(2))
        .filter(|&k| !s.is_specified(k))
        .count();
    if missing <= MISSING_CAP {
        match via_oracle(s, target, opts) {
            Ok(cert) => return Ok(cert),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| Error::UnsupportedPattern(format!("no strategy applies to {p}"))))
}

/// Completes `s` up to the target horizon with the chosen strategy.
pub fn complete(s: &PartialSequence, opts: &CompleteOptions) -> Result<CompletionCertificate> {
    opts.tol.validate()?;
    let target = opts.target_horizon.unwrap_or(s.horizon());
    if target < s.horizon() {
        return Err(Error::InvalidInput(format!(
            "target horizon {target} is below the input horizon {}",
            s.horizon()
        )));
    }
    if opts.strategy == Strategy::Measure {
        if opts.d == Some(0) {
            return Err(Error::InvalidInput("step d must be at least 1".into()));
        }
        if let Some(l0) = opts.l0.filter(|l| l % 2 != 0) {
            return Err(Error::BadOffset(l0));
        }
    }
    run(opts.strategy, s, target, opts)
}
