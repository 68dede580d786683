//! Partial moment sequences, patterns and tolerance policy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finitely many specified moments `s_k`, indexed by `k >= 0`, plus a horizon.
///
/// The horizon is the largest index the instance speaks about; every index in
/// `0..=horizon` that is not in `entries` is unspecified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceJson", into = "SequenceJson")]
pub struct PartialSequence {
    entries: BTreeMap<usize, f64>,
    horizon: usize,
}

impl PartialSequence {
    /// Builds a partial sequence. A missing horizon defaults to the largest
    /// specified index (0 for an empty sequence).
    pub fn new(entries: BTreeMap<usize, f64>, horizon: Option<usize>) -> Result<Self> {
        let max_index = entries.keys().next_back().copied().unwrap_or(0);
        let horizon = horizon.unwrap_or(max_index);
        if max_index > horizon {
            return Err(Error::InvalidInput(format!(
                "index {max_index} lies beyond horizon {horizon}"
            )));
        }
        if let Some((&k, _)) = entries.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteEntry(k));
        }
        Ok(Self { entries, horizon })
    }

    /// A fully specified sequence `s_0..s_{len-1}`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let entries = values.iter().copied().enumerate().collect();
        Self::new(entries, Some(values.len().saturating_sub(1)))
    }

    /// A sequence over `0..len` where `None` marks an unspecified entry.
    pub fn from_options(values: &[Option<f64>]) -> Result<Self> {
        let entries = values
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
            .collect();
        Self::new(entries, Some(values.len().saturating_sub(1)))
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, k: usize) -> Option<f64> {
        self.entries.get(&k).copied()
    }

    pub fn is_specified(&self, k: usize) -> bool {
        self.entries.contains_key(&k)
    }

    pub fn entries(&self) -> &BTreeMap<usize, f64> {
        &self.entries
    }

    pub fn len_specified(&self) -> usize {
        self.entries.len()
    }

    /// Returns a copy with `s_k = value`, growing the horizon if needed.
    pub fn with_entry(&self, k: usize, value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFiniteEntry(k));
        }
        let mut out = self.clone();
        out.entries.insert(k, value);
        out.horizon = out.horizon.max(k);
        Ok(out)
    }

    /// Returns a copy with a different horizon (must cover every entry).
    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        Self::new(self.entries.clone(), Some(horizon))
    }

    /// Values `s_0..=s_upto` with `None` for unspecified (or beyond-horizon) entries.
    pub fn to_options(&self, upto: usize) -> Vec<Option<f64>> {
        (0..=upto).map(|k| self.get(k)).collect()
    }

    /// `max(1, largest |s_k|)`, the scale used by relative tolerances.
    pub fn scale(&self) -> f64 {
        self.entries.values().fold(1.0_f64, |m, v| m.max(v.abs()))
    }

    /// Fully specified prefix values `s_0..=s_upto`, or the first missing index.
    pub fn prefix(&self, upto: usize) -> Result<Vec<f64>> {
        (0..=upto)
            .map(|k| self.get(k).ok_or(Error::MissingIndex(k)))
            .collect()
    }
}

/// Returns the set of specified indices.
pub fn pattern_of(s: &PartialSequence) -> Pattern {
    Pattern::new(s.entries.keys().copied())
}

/// Extracts `[s_{l0}, s_{d+l0}, ..., s_{(count-1)d+l0}]`.
///
/// When `s` is a positive sequence, so is the result.
pub fn subsequence(s: &PartialSequence, d: usize, l0: usize, count: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(Error::InvalidInput("step d must be positive".into()));
    }
    if !l0.is_multiple_of(2) {
        return Err(Error::BadOffset(l0));
    }
    (0..count)
        .map(|k| {
            let idx = k * d + l0;
            s.get(idx).ok_or(Error::MissingIndex(idx))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    index: usize,
    value: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
    entries: Vec<EntryJson>,
}

impl TryFrom<SequenceJson> for PartialSequence {
    type Error = Error;

    fn try_from(raw: SequenceJson) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for e in raw.entries {
            if entries.insert(e.index, e.value).is_some() {
                return Err(Error::InvalidInput(format!("duplicate index {}", e.index)));
            }
        }
        PartialSequence::new(entries, raw.horizon)
    }
}

impl From<PartialSequence> for SequenceJson {
    fn from(s: PartialSequence) -> Self {
        SequenceJson {
            horizon: Some(s.horizon),
            entries: s
                .entries
                .into_iter()
                .map(|(index, value)| EntryJson { index, value })
                .collect(),
        }
    }
}

/// The sorted set of specified indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pattern {
    indices: BTreeSet<usize>,
}

impl Pattern {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self {
            indices: indices.into_iter().collect(),
        }
    }

    /// All of `0..=m`.
    pub fn prefix(m: usize) -> Self {
        Self::new(0..=m)
    }

    pub fn contains(&self, k: usize) -> bool {
        self.indices.contains(&k)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn min(&self) -> Option<usize> {
        self.indices.first().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    /// `P ∩ [0, horizon]`.
    pub fn truncated(&self, horizon: usize) -> Self {
        Self::new(self.indices.range(..=horizon).copied())
    }

    pub fn is_odd_subset(&self) -> bool {
        self.iter().all(|k| k % 2 == 1)
    }

    /// Largest `m` with `{0..m} ⊆ P`, or `None` when `0 ∉ P`.
    pub fn prefix_end(&self) -> Option<usize> {
        let mut m = None;
        for (expected, k) in self.iter().enumerate() {
            if k != expected {
                break;
            }
            m = Some(k);
        }
        m
    }

    /// True when the pattern is exactly `{0..m}` for some `m`.
    pub fn is_prefix(&self) -> bool {
        !self.is_empty() && self.prefix_end() == self.max()
    }

    /// `{d k + l0 : k ∈ P}`.
    pub fn dilate(&self, d: usize, l0: usize) -> Self {
        Self::new(self.iter().map(|k| d * k + l0))
    }
}

impl FromIterator<usize> for Pattern {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|k| k.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl FromStr for Pattern {
    type Err = Error;

    /// Parses a comma-separated list such as `0,1,4`.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('{').trim_end_matches('}');
        if trimmed.is_empty() {
            return Ok(Pattern::default());
        }
        trimmed
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidInput(format!("bad index {p:?}: {e}")))
            })
            .collect()
    }
}

/// Relative tolerances for (semi)definiteness decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceOptions {
    /// Eigenvalues `>= -psd_tol * scale` count as nonnegative.
    pub psd_tol: f64,
    /// A matrix is strictly PD when its smallest eigenvalue exceeds `pd_margin * scale`.
    pub pd_margin: f64,
    /// Relative slack used when choosing free even entries.
    pub gamma: f64,
    /// Value given to an unspecified `s_0` by the constructive completions.
    pub seed_s0: f64,
}

impl Default for ToleranceOptions {
    fn default() -> Self {
        Self {
            psd_tol: 1e-9,
            pd_margin: 1e-12,
            gamma: 0.5,
            seed_s0: 1.0,
        }
    }
}

impl ToleranceOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.psd_tol) && ok(self.pd_margin) && ok(self.gamma) && ok(self.seed_s0)) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive and finite: {self:?}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(len: usize) -> PartialSequence {
        let v: Vec<f64> = (0..len).map(|k| 1.0 / (k as f64 + 1.0)).collect();
        PartialSequence::from_values(&v).unwrap()
    }

    #[test]
    fn subsequence_even_steps() {
        let s = hilbert(9);
        assert_eq!(subsequence(&s, 2, 0, 3).unwrap(), vec![1.0, 1.0 / 3.0, 1.0 / 5.0]);
        assert_eq!(
            subsequence(&s, 2, 2, 3).unwrap(),
            vec![1.0 / 3.0, 1.0 / 5.0, 1.0 / 7.0]
        );
        let t = subsequence(&s, 2, 2, 3).unwrap();
        assert!(t[0] * t[2] - t[1] * t[1] > 0.0);
    }

    #[test]
    fn subsequence_geometric_identity() {
        let v: Vec<f64> = (0..4).map(|k| 2.0 * 3f64.powi(k)).collect();
        let s = PartialSequence::from_values(&v).unwrap();
        assert_eq!(subsequence(&s, 1, 0, 4).unwrap(), vec![2.0, 6.0, 18.0, 54.0]);
    }

    #[test]
    fn subsequence_errors() {
        let s = hilbert(5);
        assert_eq!(subsequence(&s, 1, 1, 2), Err(Error::BadOffset(1)));
        assert_eq!(subsequence(&s, 2, 0, 4), Err(Error::MissingIndex(6)));
    }

    #[test]
    fn pattern_of_examples() {
        let s = PartialSequence::new([(0, 1.0), (2, 0.5), (8, 0.0625)].into(), None).unwrap();
        assert_eq!(pattern_of(&s), Pattern::new([0, 2, 8]));
        assert_eq!(s.horizon(), 8);
        let empty = PartialSequence::new(BTreeMap::new(), None).unwrap();
        assert!(pattern_of(&empty).is_empty());
        let odd = PartialSequence::new([(1, 0.5), (3, 0.2)].into(), None).unwrap();
        assert_eq!(pattern_of(&odd), Pattern::new([1, 3]));
    }

    #[test]
    fn json_schema_round_trip_and_rejects_unknown() {
        let text = r#"{"horizon": 8, "entries": [{"index": 0, "value": 1.0}, {"index": 2, "value": 0.5}]}"#;
        let s: PartialSequence = serde_json::from_str(text).unwrap();
        assert_eq!(s.horizon(), 8);
        assert_eq!(s.get(2), Some(0.5));
        let back: PartialSequence =
            serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);

        let bad = r#"{"horizon": 8, "entries": [], "extra": 1}"#;
        assert!(serde_json::from_str::<PartialSequence>(bad).is_err());
        let dup = r#"{"entries": [{"index": 1, "value": 1.0}, {"index": 1, "value": 2.0}]}"#;
        assert!(serde_json::from_str::<PartialSequence>(dup).is_err());
        let beyond = r#"{"horizon": 1, "entries": [{"index": 3, "value": 1.0}]}"#;
        assert!(serde_json::from_str::<PartialSequence>(beyond).is_err());
    }

    #[test]
    fn pattern_queries() {
        let p: Pattern = "0,1,2,5,7".parse().unwrap();
        assert_eq!(p.prefix_end(), Some(2));
        assert!(!p.is_prefix());
        assert!(Pattern::prefix(4).is_prefix());
        assert!(Pattern::new([1, 3, 9]).is_odd_subset());
        assert_eq!(Pattern::new([0, 1, 2]).dilate(6, 2), Pattern::new([2, 8, 14]));
        assert_eq!(p.truncated(4), Pattern::new([0, 1, 2]));
        assert_eq!(p.to_string(), "{0,1,2,5,7}");
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceOptions::default().validate().is_ok());
        let bad = ToleranceOptions {
            gamma: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest::proptest! {
        #[test]
        fn inserting_never_removes_pattern_indices(
            base in proptest::collection::btree_map(0usize..30, -5.0f64..5.0, 0..10),
            k in 0usize..40,
            v in -5.0f64..5.0,
        ) {
            let s = PartialSequence::new(base, Some(40)).unwrap();
            let before = pattern_of(&s);
            let after = pattern_of(&s.with_entry(k, v).unwrap());
            proptest::prop_assert!(before.iter().all(|i| after.contains(i)));
            proptest::prop_assert!(after.contains(k));
        }
    }
}
