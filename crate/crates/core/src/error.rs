use alloc::string::String;

use crate::graph::{Split, Triple};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: left operand has {left} dimensions, right operand has {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("hypercomplex vector needs at least one dimension")]
    EmptyVector,

    #[error("coordinate vectors have unequal lengths ({expected} vs {found})")]
    RaggedParts { expected: usize, found: usize },

    #[error("non-finite coordinate in unit {unit} at dimension {dimension}")]
    NonFiniteCoordinate { unit: usize, dimension: usize },

    #[error("degenerate element at dimension {dimension}: norm {norm:e} is not above eps")]
    Degenerate { dimension: usize, norm: f64 },

    #[error("relation {relation} has a degenerate quaternion at dimension {dimension} (norm {norm:e})")]
    DegenerateRelation {
        relation: u32,
        dimension: usize,
        norm: f64,
    },

    #[error("{file}:{line}: expected 3 tab-separated fields, found {fields}")]
    MalformedLine {
        file: String,
        line: usize,
        fields: usize,
    },

    #[error("{kind} id {id} out of range (limit {limit})")]
    IdOutOfRange {
        kind: &'static str,
        id: u32,
        limit: usize,
    },

    #[error("store already carries reciprocal relations")]
    AlreadyReciprocal,

    #[error("{0} split is empty")]
    EmptySplit(Split),

    #[error("non-finite score {score} for triple {triple}")]
    NonFiniteScore { triple: Triple, score: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown {what} `{value}`")]
    Unknown { what: &'static str, value: String },

    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl Error {
    /// Numeric failures (as opposed to malformed input or configuration).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Degenerate { .. }
                | Error::DegenerateRelation { .. }
                | Error::NonFiniteScore { .. }
                | Error::NonFiniteCoordinate { .. }
        )
    }
}
