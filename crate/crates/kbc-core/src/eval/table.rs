use hashbrown::HashMap;

use crate::scorer::Scorer;

/// Scores looked up from an explicit table; missing triples get `default`.
#[derive(Debug, Clone)]
pub struct TableScorer {
    num_entities: usize,
    default: f64,
    scores: HashMap<(u32, u32, u32), f64>,
}

impl TableScorer {
    pub fn new(num_entities: usize, default: f64) -> Self {
        TableScorer { num_entities, default, scores: HashMap::new() }
    }

    pub fn set(&mut self, subject: usize, relation: usize, object: usize, score: f64) -> &mut Self {
        self.scores.insert((subject as u32, relation as u32, object as u32), score);
        self
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

impl Scorer for TableScorer {
    fn num_entities(&self) -> usize {
        self.num_entities
    }

    fn score(&self, subject: usize, relation: usize, object: usize) -> f64 {
        self.scores
            .get(&(subject as u32, relation as u32, object as u32))
            .copied()
            .unwrap_or(self.default)
    }
}
