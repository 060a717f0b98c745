use rand::Rng;
use rand_distr::StandardNormal;

use super::population::roulette;
use super::{delete_from_population, Classifier, Population, XcsParams};

/// Log-normal self-adaptation `mu * exp(N(0, 1))`, clamped to `[mu_min, 1]`.
pub fn self_adapt_rate<R: Rng + ?Sized>(mu: f64, params: &XcsParams, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    (mu * z.exp()).clamp(params.mu_min, 1.0)
}

/// Mutation-only reproduction in `action_set`, if the set's numerosity-weighted
/// mean GA timestamp is more than `theta_ga` behind `time`.
///
/// Two parents are picked by fitness roulette. Each offspring first adapts its
/// mutation rate and then mutates its network at that rate; an offspring whose
/// network came out unchanged is absorbed into its parent instead of inserted.
/// Returns whether the GA fired. Population indices are invalid afterwards.
pub fn run_ga<R: Rng + ?Sized>(
    pop: &mut Population,
    action_set: &[usize],
    time: u64,
    params: &XcsParams,
    rng: &mut R,
) -> bool {
    if action_set.is_empty() {
        return false;
    }
    let numerosity: f64 = action_set.iter().map(|&i| f64::from(pop[i].numerosity)).sum();
    let mean_stamp: f64 =
        action_set.iter().map(|&i| pop[i].ga_timestamp as f64 * f64::from(pop[i].numerosity)).sum::<f64>() / numerosity;
    if time as f64 - mean_stamp <= params.theta_ga {
        return false;
    }
    for &i in action_set {
        pop[i].ga_timestamp = time;
    }

    let fitness: Vec<f64> = action_set.iter().map(|&i| pop[i].fitness).collect();
    let parents = [action_set[roulette(&fitness, rng)], action_set[roulette(&fitness, rng)]];
    for parent in parents {
        let mu = self_adapt_rate(pop[parent].mutation_rate, params, rng);
        let (network, changed) = pop[parent].network.mutate(mu, rng);
        if !changed {
            pop[parent].numerosity += 1;
            pop[parent].mutation_rate = mu;
            continue;
        }
        let p = &pop[parent];
        let child = Classifier {
            id: 0,
            network,
            prediction: p.prediction,
            error: p.error,
            fitness: params.fitness_reduction * p.fitness / f64::from(p.numerosity),
            numerosity: 1,
            experience: 0,
            action_set_size: p.action_set_size,
            ga_timestamp: time,
            mutation_rate: mu,
        };
        pop.insert(child);
    }
    delete_from_population(pop, params, rng);
    true
}
