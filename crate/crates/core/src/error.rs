//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by geometry, arrangement, and pipeline operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies exactly on a hyperplane, so its side is undefined.
    #[error("point lies exactly on hyperplane {hyperplane}")]
    OnHyperplane { hyperplane: usize },

    /// Instance members disagree on dimension, or an operation got an
    /// unsupported dimension (e.g. arrangements for d > 2).
    #[error("dimension {got} unsupported here (expected {expected})")]
    DimensionUnsupported { expected: usize, got: usize },

    /// A coordinate or coefficient exceeds the exactness caps.
    #[error("coordinate magnitude {value} exceeds cap {cap}")]
    CoordinateOverflow { value: i64, cap: i64 },

    /// Instance validation failed: point `point` lies on hyperplane `hyperplane`.
    #[error("instance violates general position: point {point} lies on hyperplane {hyperplane}")]
    GeneralPosition { point: usize, hyperplane: usize },

    /// Two hyperplanes share the same locus. Rejected because a shared locus
    /// makes one arrangement edge count as two metric crossings, breaking the
    /// face-hop = crossing-distance identity.
    #[error("hyperplanes {first} and {second} are coincident")]
    CoincidentHyperplanes { first: usize, second: usize },

    /// Generation gave up after too many rejection resamples.
    #[error("resampling exhausted after {attempts} attempts")]
    ResampleExhausted { attempts: usize },

    /// A budgeted arrangement build created more cells than allowed.
    #[error("operation budget exceeded: {created} cells over budget {budget}")]
    BudgetExceeded { budget: usize, created: usize },

    /// Embedding parameters leave no usable near/far gap.
    #[error("embedding gap degenerate: z={z:.6}, Z={z_far:.6}, alpha={alpha:.6}")]
    GapDegenerate { z: f64, z_far: f64, alpha: f64 },

    /// Two points with different sign patterns on a subset hashed to the
    /// same label (probability ~2^-64 per pair; treated as a hard error).
    #[error("hash label collision in embedding coordinate {coordinate}")]
    LabelCollision { coordinate: usize },

    /// Inserting a point id that is already live in an index.
    #[error("id {0} already present")]
    DuplicateId(u32),

    /// Deleting or referencing a point id that is not live.
    #[error("id {0} not present")]
    UnknownId(u32),

    /// A query had no admissible candidate.
    #[error("no candidate found")]
    NotFound,

    /// Instance JSON failed to parse or validate.
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

pub type Result<T> = std::result::Result<T, Error>;
