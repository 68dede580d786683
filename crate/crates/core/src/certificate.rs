use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hankel_matrix, min_eigenvalue};
use crate::measure::AtomicMeasure;
use crate::types::{PartialSequence, ToleranceOptions};

/// A completed sequence together with per-order positivity evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionCertificate {
    /// `s_0..=s_horizon`.
    pub completed: Vec<f64>,
    pub strategy: String,
    /// Smallest eigenvalue of each `H_n`, `n = 0..=horizon/2`.
    pub per_order_min_eig: Vec<(usize, f64)>,
    /// Slacks chosen for free even entries.
    pub margins_used: Vec<f64>,
    /// Whether every listed `H_n` is promised strictly positive definite.
    pub promises_pd: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unique_psd: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<AtomicMeasure>,
    /// Largest relative deviation of synthesized values from the inputs
    /// before they were written back.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproduction_error: Option<f64>,
}

/// `max(1, max |s_k|)` over `s_0..=s_{2n}`.
pub fn order_scale(values: &[f64], n: usize) -> f64 {
    values[..=2 * n]
        .iter()
        .fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// Smallest eigenvalue of `H_n` for every `n` with `2n < values.len()`.
pub fn per_order_min_eig(values: &[f64]) -> Vec<(usize, f64)> {
    if values.is_empty() {
        return Vec::new();
    }
    (0..=(values.len() - 1) / 2)
        .map(|n| {
            let m = hankel_matrix(&values[..=2 * n]).expect("odd prefix");
            (n, min_eigenvalue(&m))
        })
        .collect()
}

impl CompletionCertificate {
    pub fn new(completed: Vec<f64>, strategy: impl Into<String>, promises_pd: bool) -> Self {
        let per_order_min_eig = per_order_min_eig(&completed);
        Self {
            completed,
            strategy: strategy.into(),
            per_order_min_eig,
            margins_used: Vec::new(),
            promises_pd,
            representation: None,
            unique_psd: false,
            epsilon: None,
            measure: None,
            reproduction_error: None,
        }
    }

    pub fn horizon(&self) -> usize {
        self.completed.len().saturating_sub(1)
    }

    /// Smallest `min_eig / scale` over the listed orders.
    pub fn min_relative_eigenvalue(&self) -> f64 {
        self.per_order_min_eig
            .iter()
            .map(|&(n, e)| e / order_scale(&self.completed, n))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks agreement with `input` (bit-for-bit) and the promised positivity.
    pub fn verify(&self, input: &PartialSequence, tol: &ToleranceOptions) -> Result<()> {
        for (&k, &v) in input.entries() {
            match self.completed.get(k) {
                Some(&c) if c.to_bits() == v.to_bits() => {}
                Some(&c) => {
                    return Err(Error::NotPositive(format!(
                        "completion changed s_{k} from {v} to {c}"
                    )))
                }
                None => {
                    return Err(Error::NotPositive(format!(
                        "completion stops before specified index {k}"
                    )))
                }
            }
        }
        for &(n, e) in &self.per_order_min_eig {
            let scale = order_scale(&self.completed, n);
            let ok = if self.promises_pd {
                e > tol.pd_margin * scale
            } else {
                e >= -tol.psd_tol * scale
            };
            if !ok {
                return Err(Error::NotPositive(format!(
                    "H_{n} has smallest eigenvalue {e:e} (scale {scale:e})"
                )));
            }
        }
        Ok(())
    }
}
