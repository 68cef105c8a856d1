use alloc::vec;
use alloc::vec::Vec;

use super::{Atom, Direction};
use crate::kb::{KnowledgeBase, PairIndex, RelationIndex, Split};

/// Training triples as a labelled multigraph over entities.
#[derive(Debug, Clone)]
pub struct TrainGraph {
    num_entities: usize,
    relations: RelationIndex,
    /// Per node, every step `(neighbour, atom)` sorted.
    adj: Vec<Vec<(u32, Atom)>>,
}

impl TrainGraph {
    pub fn new(kb: &KnowledgeBase) -> Self {
        let relations = kb.relation_index(&[Split::Train]);
        let mut adj = vec![Vec::new(); kb.num_entities()];
        for t in kb.train() {
            let (s, k, o) = (t.subject.0, t.relation.index(), t.object.0);
            adj[s as usize].push((o, Atom::forward(k)));
            adj[o as usize].push((s, Atom::inverse(k)));
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        TrainGraph { num_entities: kb.num_entities(), relations, adj }
    }

    pub fn num_entities(&self) -> usize {
        self.num_entities
    }

    pub fn relation(&self, k: usize) -> &PairIndex {
        self.relations.relation(k)
    }

    pub fn num_relations(&self) -> usize {
        self.relations.num_relations()
    }

    /// Nodes reached from `from` by one step along `atom`.
    pub fn step(&self, from: u32, atom: Atom) -> &[u32] {
        let idx = self.relations.relation(atom.relation);
        match atom.direction {
            Direction::Forward => idx.objects_of(from),
            Direction::Inverse => idx.subjects_of(from),
        }
    }

    pub fn neighbours(&self, from: u32) -> &[(u32, Atom)] {
        &self.adj[from as usize]
    }

    /// Atoms leading from `u` to `v` in one step.
    pub fn atoms_between(&self, u: u32, v: u32) -> &[(u32, Atom)] {
        let a = &self.adj[u as usize];
        let lo = a.partition_point(|&(n, _)| n < v);
        let hi = a.partition_point(|&(n, _)| n <= v);
        &a[lo..hi]
    }

    /// Nodes where a walk along `atom` can start.
    pub fn starts(&self, atom: Atom) -> Vec<u32> {
        let idx = self.relations.relation(atom.relation);
        match atom.direction {
            Direction::Forward => idx.subjects(),
            Direction::Inverse => idx.objects(),
        }
    }

    /// Calls `visit(end)` once per grounding of `body` starting at `start`
    /// (walks with pairwise distinct nodes).
    pub fn for_each_grounding<F: FnMut(u32)>(&self, start: u32, body: &[Atom], visit: &mut F) {
        let mut path = Vec::with_capacity(body.len() + 1);
        path.push(start);
        self.walk(&mut path, body, visit);
    }

    fn walk<F: FnMut(u32)>(&self, path: &mut Vec<u32>, body: &[Atom], visit: &mut F) {
        let Some((&atom, rest)) = body.split_first() else {
            visit(*path.last().expect("path starts non-empty"));
            return;
        };
        let here = *path.last().expect("path starts non-empty");
        for &n in self.step(here, atom) {
            if path.contains(&n) {
                continue;
            }
            path.push(n);
            self.walk(path, rest, visit);
            path.pop();
        }
    }

    /// `true` when some grounding of `body` leads from `start` to `end`.
    pub fn connects(&self, start: u32, end: u32, body: &[Atom]) -> bool {
        let mut found = false;
        self.for_each_grounding(start, body, &mut |e| found |= e == end);
        found
    }
}
