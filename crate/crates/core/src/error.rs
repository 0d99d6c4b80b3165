use std::fmt;

use thiserror::Error;

/// One of the four structural conditions a chain must satisfy before the
/// embedding is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Irreducible,
    Aperiodic,
    Reversible,
    LoopFree,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Irreducible => "irreducible",
            Condition::Aperiodic => "aperiodic",
            Condition::Reversible => "reversible",
            Condition::LoopFree => "loop_free",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("chain has {0} states; at least 3 are required")]
    TooSmall(usize),

    #[error("duplicate state label {0:?}")]
    DuplicateState(String),

    #[error("non-finite transition probability at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("negative transition probability {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("self-loop: P[{state}][{state}] = {value}")]
    SelfLoop { state: usize, value: f64 },

    #[error("row {row} sums to {sum}, not 1")]
    NonStochasticRow { row: usize, sum: f64 },

    #[error("chain is reducible")]
    Reducible,

    #[error("detailed balance fails at ({x}, {y}) by {deviation:e}")]
    NotReversible { x: usize, y: usize, deviation: f64 },

    #[error("rank deficient: {zero_eigenvalues} eigenvalues below cutoff {cutoff:e}, expected 1")]
    RankDeficient {
        zero_eigenvalues: usize,
        cutoff: f64,
    },

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositiveSemidefinite(f64),

    #[error("simplex vertices are affinely dependent")]
    AffinelyDependent,

    #[error("coordinates sum to {0}, not 1")]
    NotUnitSum(f64),

    #[error("unknown state {0}")]
    UnknownState(String),

    #[error("singular circumcenter system (degenerate simplex)")]
    SingularSystem,

    #[error("spectral failure: {0}")]
    SpectralFailure(String),

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),

    #[error("chain is not admissible: {0} condition fails")]
    Inadmissible(Condition),

    #[error("{check} = {value:e} exceeds tolerance {tolerance:e}")]
    ToleranceViolation {
        check: &'static str,
        value: f64,
        tolerance: f64,
    },

    #[error("trajectory from {from} to {to} exceeded {cap} steps")]
    CapExceeded { from: usize, to: usize, cap: u64 },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Returns `ToleranceViolation` unless `value < tolerance`.
pub(crate) fn ensure_within(check: &'static str, value: f64, tolerance: f64) -> Result<()> {
    if value < tolerance {
        Ok(())
    } else {
        Err(Error::ToleranceViolation {
            check,
            value,
            tolerance,
        })
    }
}
