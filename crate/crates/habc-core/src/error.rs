//! Error type shared across the crate.
//!
//! Errors here report *caller* mistakes (shape mismatches, invalid
//! hyperparameters, unsatisfiable preconditions). Conditions that arise
//! naturally while a chain runs — a degenerate simulator output, a likelihood
//! of −∞ — are not errors; they flow through the degenerate-output flag and
//! log-density conventions so sampler kernels stay total functions.

use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A vector argument did not have the expected length.
    ShapeMismatch { expected: usize, got: usize },
    /// A scalar argument was outside its admissible domain.
    InvalidArgument(&'static str),
    /// An operation needed more replicates than were supplied.
    TooFewReplicates { needed: usize, got: usize },
    /// A gradient was requested on the boundary of the prior's support.
    SupportBoundary(&'static str),
    /// Replicate moments were requested but a replicate was degenerate.
    DegenerateReplicates,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected}, got {got}")
            }
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::TooFewReplicates { needed, got } => {
                write!(f, "too few replicates: needed {needed}, got {got}")
            }
            Error::SupportBoundary(what) => {
                write!(f, "gradient undefined on support boundary: {what}")
            }
            Error::DegenerateReplicates => write!(f, "replicate set contains degenerate outputs"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
