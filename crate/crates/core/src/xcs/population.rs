use std::collections::HashMap;

use rand::Rng;

use super::{Classifier, XcsParams};

/// Macroclassifiers under a cap on their summed numerosity.
#[derive(Debug, Clone, Default)]
pub struct Population {
    classifiers: Vec<Classifier>,
    next_id: u64,
}

impl Population {
    pub fn new() -> Self {
        Population::default()
    }

    pub fn len(&self) -> usize {
        self.classifiers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classifiers.is_empty()
    }

    /// Sum of numerosities.
    pub fn micro_count(&self) -> usize {
        self.classifiers.iter().map(|c| c.numerosity as usize).sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Classifier> {
        self.classifiers.iter()
    }

    pub fn iter_mut(&mut self) -> std::slice::IterMut<'_, Classifier> {
        self.classifiers.iter_mut()
    }

    /// Inserts `cl` with a fresh id and returns its index.
    pub fn insert(&mut self, mut cl: Classifier) -> usize {
        cl.id = self.next_id;
        self.next_id += 1;
        self.classifiers.push(cl);
        self.classifiers.len() - 1
    }

    /// Current indices of the classifiers with the given ids; ids no longer
    /// present are dropped.
    pub fn resolve(&self, ids: &[u64]) -> Vec<usize> {
        let index: HashMap<u64, usize> = self.classifiers.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
        ids.iter().filter_map(|id| index.get(id).copied()).collect()
    }

    fn remove_micro(&mut self, index: usize) {
        let cl = &mut self.classifiers[index];
        cl.numerosity -= 1;
        if cl.numerosity == 0 {
            self.classifiers.swap_remove(index);
        }
    }
}

impl std::ops::Index<usize> for Population {
    type Output = Classifier;

    fn index(&self, index: usize) -> &Classifier {
        &self.classifiers[index]
    }
}

impl std::ops::IndexMut<usize> for Population {
    fn index_mut(&mut self, index: usize) -> &mut Classifier {
        &mut self.classifiers[index]
    }
}

/// Removes micro-classifiers by roulette on deletion votes until the summed
/// numerosity is within the cap. Invalidates outstanding indices.
pub fn delete_from_population<R: Rng + ?Sized>(pop: &mut Population, params: &XcsParams, rng: &mut R) {
    let mut micro = pop.micro_count();
    while micro > params.population_size {
        let total_fitness: f64 = pop.iter().map(|c| c.fitness).sum();
        let mean_fitness = total_fitness / micro as f64;
        let votes: Vec<f64> = pop.iter().map(|c| c.deletion_vote(mean_fitness, params)).collect();
        let victim = roulette(&votes, rng);
        pop.remove_micro(victim);
        micro -= 1;
    }
}

/// Index drawn with probability proportional to `weights`.
pub(crate) fn roulette<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut point = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if point < *w {
            return i;
        }
        point -= w;
    }
    // Rounding can leave a sliver past the last weight.
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}
