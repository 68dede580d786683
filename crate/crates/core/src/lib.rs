//! Positive (semi)definite Hankel matrix completion.
//!
//! Decides whether a partial moment sequence admits a positive (semi)definite
//! completion, classifies patterns of specified indices, and builds explicit
//! completions by Schur-complement recursion and atomic-measure synthesis.

// `!(x > t)` is used on purpose so that NaN fails every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod barrier;
pub mod certificate;
pub mod classify;
pub mod complete;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod schur;
pub mod types;

pub use certificate::CompletionCertificate;
pub use classify::{classify, reduce_pattern, PatternVerdict, Status};
pub use complete::{complete, CompleteOptions, Strategy};
pub use error::{Error, Result};
pub use linalg::{HankelView, PsdReport};
pub use measure::{Atom, AtomicMeasure};
pub use oracle::{decide, decide_pd_completable, find_witness, Definiteness, FeasibilityResult, OracleOptions};
pub use schur::SchurFamily;
pub use types::{pattern_of, subsequence, PartialSequence, Pattern, ToleranceOptions};
