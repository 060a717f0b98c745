use rand::Rng;

use super::XcsParams;
use crate::rbn::BooleanNetwork;

/// A macroclassifier: one network plus its XCS statistics.
#[derive(Debug, Clone)]
pub struct Classifier {
    /// Unique within a population; assigned on insertion.
    pub id: u64,
    pub network: BooleanNetwork,
    pub prediction: f64,
    pub error: f64,
    pub fitness: f64,
    pub numerosity: u32,
    pub experience: u64,
    pub action_set_size: f64,
    pub ga_timestamp: u64,
    pub mutation_rate: f64,
}

impl Classifier {
    /// A fresh classifier around `network` with the initial statistics and a
    /// mutation rate drawn uniformly from `[0, 1]` (floored at `mu_min`).
    pub fn new<R: Rng + ?Sized>(network: BooleanNetwork, params: &XcsParams, time: u64, rng: &mut R) -> Self {
        let mutation_rate = rng.random::<f64>().max(params.mu_min);
        Classifier {
            id: 0,
            network,
            prediction: params.init_prediction,
            error: params.init_error,
            fitness: params.init_fitness,
            numerosity: 1,
            experience: 0,
            action_set_size: 1.0,
            ga_timestamp: time,
            mutation_rate,
        }
    }

    pub fn accuracy(&self, params: &XcsParams) -> f64 {
        accuracy(self.error, params)
    }

    /// Deletion vote: action set size estimate times numerosity, inflated for
    /// experienced classifiers with low per-micro fitness.
    pub fn deletion_vote(&self, mean_fitness: f64, params: &XcsParams) -> f64 {
        let vote = self.action_set_size * f64::from(self.numerosity);
        let micro_fitness = self.fitness / f64::from(self.numerosity);
        if self.experience > params.theta_del && micro_fitness < params.delta * mean_fitness {
            vote * mean_fitness / micro_fitness
        } else {
            vote
        }
    }
}

/// `1` below the error threshold, `alpha * (error / epsilon0)^-nu` from it on.
pub fn accuracy(error: f64, params: &XcsParams) -> f64 {
    if error < params.epsilon0 {
        1.0
    } else {
        params.alpha * (error / params.epsilon0).powf(-params.nu)
    }
}
