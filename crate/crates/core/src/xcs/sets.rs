use rand::seq::IndexedRandom;
use rand::Rng;

use super::{accuracy, Classifier, Population, ResetPolicy, TrialKind, XcsError, XcsParams};
use crate::rbn::{BooleanNetwork, RunSpec};

/// A matching classifier (by population index) and the action its network
/// advocated for the current input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchEntry {
    pub index: usize,
    pub action: usize,
}

/// Runs every network on `input`, collects the matching ones and covers until
/// `theta_mna` distinct actions are advocated or the attempt budget runs out.
///
/// Covered classifiers are appended to the population without deletion, so
/// existing indices stay valid; the caller restores the cap afterwards.
pub fn form_match_set<R: Rng + ?Sized>(
    pop: &mut Population,
    input: &[bool],
    params: &XcsParams,
    time: u64,
    rng: &mut R,
) -> Result<Vec<MatchEntry>, XcsError> {
    let spec = params.run_spec()?;
    let reset = params.reset_policy == ResetPolicy::RandomizeEachMatch;
    let num_actions = params.num_actions();
    let wanted = params.theta_mna.unwrap_or(num_actions).min(num_actions);

    let mut entries = Vec::new();
    let mut present = vec![false; num_actions];
    for (index, cl) in pop.iter_mut().enumerate() {
        let out = cl.network.run(input, &spec, reset, rng);
        if out.matched {
            present[out.action] = true;
            entries.push(MatchEntry { index, action: out.action });
        }
    }

    let mut distinct = present.iter().filter(|p| **p).count();
    while distinct < wanted {
        match cover_new_action(input, &present, params, &spec, time, rng) {
            Some((cl, action)) => {
                let index = pop.insert(cl);
                present[action] = true;
                distinct += 1;
                entries.push(MatchEntry { index, action });
            }
            None => break,
        }
    }
    if entries.is_empty() {
        return Err(XcsError::CoveringExhausted { attempts: params.cover_attempts });
    }
    Ok(entries)
}

/// Generates random networks until one matches `input`.
pub fn cover<R: Rng + ?Sized>(input: &[bool], params: &XcsParams, time: u64, rng: &mut R) -> Result<Classifier, XcsError> {
    let spec = params.run_spec()?;
    let none = vec![false; params.num_actions()];
    cover_new_action(input, &none, params, &spec, time, rng)
        .map(|(cl, _)| cl)
        .ok_or(XcsError::CoveringExhausted { attempts: params.cover_attempts })
}

fn cover_new_action<R: Rng + ?Sized>(
    input: &[bool],
    present: &[bool],
    params: &XcsParams,
    spec: &RunSpec,
    time: u64,
    rng: &mut R,
) -> Option<(Classifier, usize)> {
    for _ in 0..params.cover_attempts {
        let mut network = BooleanNetwork::random(params.num_inputs, params.num_outputs, rng);
        let out = network.run(input, spec, true, rng);
        if out.matched && !present[out.action] {
            return Some((Classifier::new(network, params, time, rng), out.action));
        }
    }
    None
}

/// Fitness-weighted mean prediction per advocated action.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionArray {
    values: Vec<Option<f64>>,
}

impl PredictionArray {
    pub fn from_values(values: Vec<Option<f64>>) -> Self {
        PredictionArray { values }
    }

    pub fn get(&self, action: usize) -> Option<f64> {
        self.values.get(action).copied().flatten()
    }

    pub fn present_actions(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&a| self.values[a].is_some()).collect()
    }

    /// Highest prediction, lowest action on ties.
    pub fn best_action(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (a, v) in self.values.iter().enumerate() {
            if let Some(v) = *v {
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((a, v));
                }
            }
        }
        best.map(|(a, _)| a)
    }

    pub fn max_value(&self) -> Option<f64> {
        self.best_action().and_then(|a| self.values[a])
    }
}

pub fn build_prediction_array(pop: &Population, match_set: &[MatchEntry], num_actions: usize) -> PredictionArray {
    let mut weighted = vec![0.0; num_actions];
    let mut weights = vec![0.0; num_actions];
    let mut present = vec![false; num_actions];
    for e in match_set {
        let cl = &pop[e.index];
        weighted[e.action] += cl.prediction * cl.fitness;
        weights[e.action] += cl.fitness;
        present[e.action] = true;
    }
    let values = (0..num_actions)
        .map(|a| present[a].then(|| if weights[a] > 0.0 { weighted[a] / weights[a] } else { 0.0 }))
        .collect();
    PredictionArray { values }
}

/// Explore: a uniformly random advocated action with probability `p_explore`,
/// otherwise greedy. Exploit: greedy, ties to the lowest action.
pub fn select_action<R: Rng + ?Sized>(pa: &PredictionArray, kind: TrialKind, p_explore: f64, rng: &mut R) -> usize {
    if kind == TrialKind::Explore && rng.random_bool(p_explore) {
        *pa.present_actions().choose(rng).expect("prediction array has an action")
    } else {
        pa.best_action().expect("prediction array has an action")
    }
}

/// Widrow-Hoff updates (averaged while young) of prediction, error and
/// action-set size toward `payoff`, followed by the accuracy-sharing fitness
/// update.
pub fn update_action_set(pop: &mut Population, action_set: &[usize], payoff: f64, params: &XcsParams) {
    assert!(payoff.is_finite());
    let set_size: f64 = action_set.iter().map(|&i| f64::from(pop[i].numerosity)).sum();
    for &i in action_set {
        let cl = &mut pop[i];
        cl.experience += 1;
        let rate = if (cl.experience as f64) < 1.0 / params.beta {
            1.0 / cl.experience as f64
        } else {
            params.beta
        };
        cl.prediction += rate * (payoff - cl.prediction);
        cl.error += rate * ((payoff - cl.prediction).abs() - cl.error);
        cl.action_set_size += rate * (set_size - cl.action_set_size);
    }

    let kappas: Vec<f64> = action_set
        .iter()
        .map(|&i| accuracy(pop[i].error, params) * f64::from(pop[i].numerosity))
        .collect();
    let total: f64 = kappas.iter().sum();
    for (&i, k) in action_set.iter().zip(&kappas) {
        let cl = &mut pop[i];
        cl.fitness += params.beta * (k / total - cl.fitness);
    }
}
