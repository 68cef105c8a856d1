//! The scoring interface shared by embedding models, the rule baseline and
//! lookup tables.

use core::ops::Range;

/// Scores triples `(subject, relation, object)` by dense index.
///
/// Higher means more plausible. The batch methods must agree exactly with
/// [`Scorer::score`]; the defaults simply loop over it. Scores are assumed
/// finite.
pub trait Scorer: Sync {
    fn num_entities(&self) -> usize;

    fn score(&self, subject: usize, relation: usize, object: usize) -> f64;

    /// `out[j] = score(subject, relation, j)` for every entity `j`.
    fn score_row(&self, subject: usize, relation: usize, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.score(subject, relation, j);
        }
    }

    /// `out[i] = score(i, relation, object)` for every entity `i`.
    fn score_col(&self, relation: usize, object: usize, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.score(i, relation, object);
        }
    }

    /// Row-major tile: `out[(i - subjects.start) * objects.len() + (j - objects.start)]`.
    fn score_block(&self, relation: usize, subjects: Range<usize>, objects: Range<usize>, out: &mut [f64]) {
        let width = objects.len();
        for (r, i) in subjects.enumerate() {
            for (c, j) in objects.clone().enumerate() {
                out[r * width + c] = self.score(i, relation, j);
            }
        }
    }
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn num_entities(&self) -> usize {
        (**self).num_entities()
    }

    fn score(&self, subject: usize, relation: usize, object: usize) -> f64 {
        (**self).score(subject, relation, object)
    }

    fn score_row(&self, subject: usize, relation: usize, out: &mut [f64]) {
        (**self).score_row(subject, relation, out)
    }

    fn score_col(&self, relation: usize, object: usize, out: &mut [f64]) {
        (**self).score_col(relation, object, out)
    }

    fn score_block(&self, relation: usize, subjects: Range<usize>, objects: Range<usize>, out: &mut [f64]) {
        (**self).score_block(relation, subjects, objects, out)
    }
}
