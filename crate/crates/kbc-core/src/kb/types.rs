use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use super::{EntityId, KnowledgeBase, Split};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeId(pub u32);

/// Entity type sets plus per-relation domain and range.
///
/// A relation is *constrained* when it has both a domain and a range; only
/// constrained relations are ever filtered.
#[derive(Debug, Clone, Default)]
pub struct TypeConstraints {
    type_names: Vec<String>,
    type_index: HashMap<String, u32>,
    entity_types: Vec<Vec<TypeId>>,
    domain: Vec<Option<TypeId>>,
    range: Vec<Option<TypeId>>,
}

/// Admissible subjects and objects of one constrained relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeMask {
    pub subjects: Vec<bool>,
    pub objects: Vec<bool>,
}

impl TypeConstraints {
    pub fn new(num_entities: usize, num_relations: usize) -> Self {
        TypeConstraints {
            type_names: Vec::new(),
            type_index: HashMap::new(),
            entity_types: alloc::vec![Vec::new(); num_entities],
            domain: alloc::vec![None; num_relations],
            range: alloc::vec![None; num_relations],
        }
    }

    pub fn intern_type(&mut self, name: &str) -> TypeId {
        if let Some(&id) = self.type_index.get(name) {
            return TypeId(id);
        }
        let id = self.type_names.len() as u32;
        self.type_names.push(name.to_string());
        self.type_index.insert(name.to_string(), id);
        TypeId(id)
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.type_names[t.0 as usize]
    }

    pub fn num_types(&self) -> usize {
        self.type_names.len()
    }

    pub fn add_entity_type(&mut self, e: EntityId, t: TypeId) {
        let set = &mut self.entity_types[e.index()];
        if let Err(pos) = set.binary_search(&t) {
            set.insert(pos, t);
        }
    }

    pub fn set_relation_types(&mut self, k: usize, domain: Option<TypeId>, range: Option<TypeId>) {
        self.domain[k] = domain;
        self.range[k] = range;
    }

    pub fn entity_types(&self, e: EntityId) -> &[TypeId] {
        &self.entity_types[e.index()]
    }

    pub fn has_type(&self, e: EntityId, t: TypeId) -> bool {
        self.entity_types[e.index()].binary_search(&t).is_ok()
    }

    pub fn domain(&self, k: usize) -> Option<TypeId> {
        self.domain[k]
    }

    pub fn range(&self, k: usize) -> Option<TypeId> {
        self.range[k]
    }

    pub fn is_constrained(&self, k: usize) -> bool {
        self.domain[k].is_some() && self.range[k].is_some()
    }

    pub fn constrained_relations(&self) -> Vec<usize> {
        (0..self.domain.len()).filter(|&k| self.is_constrained(k)).collect()
    }

    /// Adds `domain(k)` to every subject and `range(k)` to every object of a
    /// constrained relation `k`, over all three splits.
    pub fn augment(&mut self, kb: &KnowledgeBase) {
        for split in Split::ALL {
            for t in kb.split(split) {
                let k = t.relation.index();
                if let (Some(d), Some(r)) = (self.domain[k], self.range[k]) {
                    self.add_entity_type(t.subject, d);
                    self.add_entity_type(t.object, r);
                }
            }
        }
    }

    /// `true` when `k` is unconstrained or both slots carry the required type.
    pub fn admits(&self, k: usize, subject: EntityId, object: EntityId) -> bool {
        match (self.domain[k], self.range[k]) {
            (Some(d), Some(r)) => self.has_type(subject, d) && self.has_type(object, r),
            _ => true,
        }
    }

    /// `None` for unconstrained relations.
    pub fn mask(&self, k: usize) -> Option<TypeMask> {
        let (d, r) = (self.domain[k]?, self.range[k]?);
        let n = self.entity_types.len();
        Some(TypeMask {
            subjects: (0..n).map(|e| self.has_type(EntityId(e as u32), d)).collect(),
            objects: (0..n).map(|e| self.has_type(EntityId(e as u32), r)).collect(),
        })
    }
}
