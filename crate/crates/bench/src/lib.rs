//! Shared inputs for the benchmarks.

use hankel_core::measure::{moments, Atom, AtomicMeasure};
use hankel_core::PartialSequence;

/// `s_k = 1/(k+1)` for `k = 0..len`.
pub fn hilbert(len: usize) -> Vec<f64> {
    (0..len).map(|k| 1.0 / (k as f64 + 1.0)).collect()
}

/// Moments of `atoms` equally weighted points spread over `[-1, 1]`.
pub fn spread_moments(atoms: usize, k_max: usize) -> Vec<f64> {
    let measure = AtomicMeasure::new(
        (0..atoms)
            .map(|i| Atom {
                location: -1.0 + 2.0 * (i as f64 + 0.5) / atoms as f64,
                weight: 1.0 / atoms as f64,
            })
            .collect(),
    )
    .expect("distinct locations");
    moments(&measure, k_max).expect("bounded moments")
}

/// Keeps only the entries of `values` at the listed indices.
pub fn restrict(values: &[f64], keep: &[usize], horizon: usize) -> PartialSequence {
    let entries = keep.iter().map(|&k| (k, values[k])).collect();
    PartialSequence::new(entries, Some(horizon)).expect("indices within horizon")
}
