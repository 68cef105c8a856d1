//! Knowledge base completion workbench core.
//!
//! Five embedding models (RESCAL, TransE, DistMult, ComplEx, Analogy), a
//! path-rule baseline, AdaGrad training with negative sampling, and three
//! evaluation protocols: triple classification, entity ranking and
//! entity-pair ranking. Entity-pair ranking asks `(?, k, ?)` for every
//! relation and ranks all `|E|²` entity pairs at once, so the [`topk`]
//! engine selects the best `K` pairs blockwise without sorting the full
//! score matrix.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature. With `std`, the pair scan and entity ranking can fan out
//! over worker threads; results are identical for any worker count.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod math;

pub mod eval;
pub mod kb;
pub mod models;
pub mod rules;
pub mod scorer;
pub mod synthetic;
pub mod topk;
pub mod training;

pub use error::{Error, Result};
pub use kb::{EntityId, KnowledgeBase, RelationId, Split, Triple, TypeConstraints, Vocab};
pub use models::{BlockLayout, ModelKind, ModelOptions, ModelParams, ModelSpec, TransNorm};
pub use scorer::Scorer;
