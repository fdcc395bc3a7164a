//! Hypercomplex (quaternion and octonion) knowledge-graph embeddings.
//!
//! Entities are vectors of quaternions; a relation rotates the head entity by
//! a unit quaternion (right Hamilton product) and the score is the inner
//! product of the rotated head with the tail. The crate covers the algebra,
//! the scoring variants with analytic gradients, Adagrad training with
//! negative sampling and filtered link-prediction evaluation.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, threads and the
//! command line live in the `hyperkge` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod eval;
pub mod graph;
pub mod hypercomplex;
pub mod model;
pub mod synthetic;
pub mod train;

pub use error::{Error, Result};
pub use eval::{evaluate, filtered_rank, parameter_count, EvalOptions, RankReport, TieBreak};
pub use graph::{add_reciprocals, Split, Triple, TripleStore, Vocabulary};
pub use hypercomplex::{OctonionVector, QuaternionVector};
pub use model::{
    score_candidates, score_gradients, score_triple, Direction, EmbeddingTable, ModelVariant, NumericKind,
};
pub use train::{train, TrainConfig, TrainLog, TrainOutcome};
