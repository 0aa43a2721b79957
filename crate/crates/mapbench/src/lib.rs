//! Construction heuristics for the multidimensional assignment problem (s-AP)
//! and a benchmark harness around them.
//!
//! An s-AP instance is a cubic tensor of `n^s` non-negative integer weights;
//! a solution picks `n` vectors from `{1..n}^s` that are pairwise disjoint in
//! every coordinate, minimizing total weight. This crate provides:
//!
//! - the instance representation with row-major index arithmetic and
//!   feasibility-pruned tensor scans ([`instance`]),
//! - an exact 2-AP solver used as an inner step ([`ap`]),
//! - the Greedy, Max-Regret, ROM and Shift-ROM construction heuristics,
//!   built around pruned row-major scans, with plain reference versions of
//!   Greedy and Max-Regret as test oracles ([`heuristics`]),
//! - seeded generators for the random, composite and planted families, and
//!   a loader for edge-decomposed 3-AP data ([`generators`]),
//! - a budgeted brute-force solver for small-instance optimum checks
//!   ([`exact`]),
//! - the experiment runner and report formatting behind the CLI ([`report`]).

pub mod ap;
pub mod exact;
pub mod generators;
pub mod heuristics;
pub mod instance;
pub mod report;

#[cfg(test)]
pub(crate) mod testutil;

pub use instance::{Assignment, Instance, PartialAssignment, Point, Weight};

/// Errors across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension count must be at least 2, got {0}")]
    InvalidDimensions(usize),
    #[error("per-dimension size must be at least 1, got {0}")]
    InvalidSize(usize),
    #[error("instance would hold {vectors} weights; {max} fit the size limit")]
    TooManyVectors { vectors: u128, max: usize },
    #[error("weight tensor has {got} entries, expected {expected}")]
    WeightCount { expected: usize, got: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    PointArity { expected: usize, got: usize },
    #[error("coordinate {value} in dimension {dim} out of range 1..={n}")]
    InvalidPoint { dim: usize, value: u32, n: usize },
    #[error("flat index {idx} out of range for {count} vectors")]
    InvalidIndex { idx: usize, count: usize },
    #[error("assignment shape (s={got_s}, n={got_n}) does not match instance (s={want_s}, n={want_n})")]
    ShapeMismatch {
        want_s: usize,
        want_n: usize,
        got_s: usize,
        got_n: usize,
    },
    #[error("partial assignment has {got} rows, a full assignment needs {need}")]
    NotFull { got: usize, need: usize },
    #[error("cost matrix has {got} entries, expected {expected}")]
    CostCount { expected: usize, got: usize },
    #[error("brute-force 2-AP is limited to n <= {max}, got {n}")]
    ApTooLarge { n: usize, max: usize },
    #[error("search space of {leaves} leaves exceeds the budget of {budget}")]
    BudgetExceeded { leaves: u128, budget: u128 },
    #[error("instance needs {bytes} bytes of weights, over the {limit} byte limit")]
    MemoryLimit { bytes: u128, limit: u64 },
    #[error("the composite family requires s >= 3, got {0}")]
    UnsupportedFamily(usize),
    #[error("error metric undefined for non-positive reference {0}")]
    UndefinedMetric(f64),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
