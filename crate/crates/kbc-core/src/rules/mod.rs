//! Path and constant rules mined from the training graph, used as a
//! baseline scorer and candidate generator.
//!
//! A path rule `k(x, y) ← b1(x, z1) ∧ … ∧ bn(z_{n-1}, y)` has one atom per
//! hop; an inverse atom walks its relation from object to subject. A
//! grounding is a walk whose nodes are pairwise distinct. Confidence is the
//! fraction of (sampled) groundings whose endpoints are a training triple
//! of the head. Rules firing on a pair are aggregated by maximum
//! confidence.

mod graph;
mod mine;
mod model;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use graph::TrainGraph;
pub use mine::{mine_rules, MiningConfig};
pub use model::{rule_predict_pairs, RuleModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub relation: usize,
    pub direction: Direction,
}

impl Atom {
    pub fn forward(relation: usize) -> Self {
        Atom { relation, direction: Direction::Forward }
    }

    pub fn inverse(relation: usize) -> Self {
        Atom { relation, direction: Direction::Inverse }
    }

    pub fn flipped(self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        };
        Atom { direction, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Subject,
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleBody {
    Path(Vec<Atom>),
    /// The head's `slot` is always `entity`.
    Constant { slot: Slot, entity: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub head: usize,
    pub body: RuleBody,
    pub confidence: f64,
    pub support: usize,
    pub body_count: usize,
}

impl Rule {
    /// The same body read from `y` back to `x`.
    pub(crate) fn reversed_path(body: &[Atom]) -> Vec<Atom> {
        body.iter().rev().map(|a| a.flipped()).collect()
    }
}
