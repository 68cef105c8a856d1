use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use super::{EntityId, RelationId};

#[derive(Debug, Clone, Default)]
struct Names {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Names {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }
}

/// Bijective name ↔ dense index maps for entities and relations.
///
/// Indices are handed out in first-appearance order, so loading the same
/// files in the same order always produces the same numbering.
#[derive(Debug, Clone, Default)]
pub struct Vocab {
    entities: Names,
    relations: Names,
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_entities(&self) -> usize {
        self.entities.names.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.names.len()
    }

    pub fn intern_entity(&mut self, name: &str) -> EntityId {
        EntityId(self.entities.intern(name))
    }

    pub fn intern_relation(&mut self, name: &str) -> RelationId {
        RelationId(self.relations.intern(name))
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entities.index.get(name).copied().map(EntityId)
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relations.index.get(name).copied().map(RelationId)
    }

    /// Panics when `id` was not issued by this vocabulary.
    pub fn entity_name(&self, id: EntityId) -> &str {
        &self.entities.names[id.index()]
    }

    pub fn relation_name(&self, id: RelationId) -> &str {
        &self.relations.names[id.index()]
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entities.names
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relations.names
    }
}

/// How a loader treats names it has not seen before.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VocabMode {
    /// Add unseen names; used for the first file of a dataset.
    Build,
    /// Append unseen names to the existing vocabulary.
    Extend,
    /// Unseen names are an error.
    Frozen,
}
