//! The XCS loop over a population of Boolean-network classifiers.
//!
//! Learning follows the usual accuracy-based scheme: every classifier's network
//! is run on the current input, matching networks form the match set, a
//! fitness-weighted prediction array picks the action, and the action set is
//! updated toward the payoff. Discovery is mutation only, with each classifier
//! carrying its own self-adapting mutation rate.

mod classifier;
mod ga;
mod population;
mod sets;
mod trial;

pub use classifier::{accuracy, Classifier};
pub use ga::{run_ga, self_adapt_rate};
pub use population::{delete_from_population, Population};
pub use sets::{
    build_prediction_array, cover, form_match_set, select_action, update_action_set, MatchEntry, PredictionArray,
};
pub use trial::{run_trial_multi_step, run_trial_single_step, TrialResult, Xcs};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rbn::{RbnError, RunSpec, UpdateMode};

#[derive(Debug, Error)]
pub enum XcsError {
    #[error("covering found no matching network after {attempts} attempts")]
    CoveringExhausted { attempts: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Rbn(#[from] RbnError),
}

/// When network node states are re-randomized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResetPolicy {
    /// Fresh random states every time a network is run.
    RandomizeEachMatch,
    /// Random states at the start of a trial, then carried from step to step.
    PersistWithinTrial,
}

impl FromStr for ResetPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "each-match" => Ok(ResetPolicy::RandomizeEachMatch),
            "persist-trial" => Ok(ResetPolicy::PersistWithinTrial),
            other => Err(format!("unknown reset policy `{other}` (expected each-match|persist-trial)")),
        }
    }
}

impl fmt::Display for ResetPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResetPolicy::RandomizeEachMatch => "each-match",
            ResetPolicy::PersistWithinTrial => "persist-trial",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrialKind {
    Explore,
    Exploit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct XcsParams {
    /// `P`: cap on the summed numerosity.
    pub population_size: usize,
    pub beta: f64,
    pub nu: f64,
    pub theta_ga: f64,
    pub epsilon0: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub theta_del: u64,
    pub delta: f64,
    /// Distinct actions covering tries to get into the match set; `None`
    /// means every action the environment offers.
    pub theta_mna: Option<usize>,
    /// Probability of a random action on explore trials.
    pub p_explore: f64,
    /// `T`: cycles per network run.
    pub cycles: usize,
    /// `W`: trailing cycles that vote on each node's output.
    pub window: usize,
    pub num_inputs: usize,
    pub num_outputs: usize,
    pub update_mode: UpdateMode,
    pub reset_policy: ResetPolicy,
    pub mu_min: f64,
    pub init_prediction: f64,
    pub init_error: f64,
    pub init_fitness: f64,
    /// Offspring fitness is the parent's per-micro fitness times this.
    pub fitness_reduction: f64,
    /// Random networks tried per missing action before covering gives up.
    pub cover_attempts: usize,
}

impl Default for XcsParams {
    fn default() -> Self {
        XcsParams::mux6()
    }
}

impl XcsParams {
    /// 6-bit multiplexer settings: `P = 800`, 6 inputs, 1 output.
    pub fn mux6() -> Self {
        XcsParams {
            population_size: 800,
            beta: 0.2,
            nu: 5.0,
            theta_ga: 25.0,
            epsilon0: 10.0,
            alpha: 0.1,
            gamma: 0.71,
            theta_del: 20,
            delta: 0.1,
            theta_mna: None,
            p_explore: 1.0,
            cycles: 25,
            window: 3,
            num_inputs: 6,
            num_outputs: 1,
            update_mode: UpdateMode::Async,
            reset_policy: ResetPolicy::RandomizeEachMatch,
            mu_min: 1e-4,
            init_prediction: 10.0,
            init_error: 0.0,
            init_fitness: 0.01,
            fitness_reduction: 0.1,
            cover_attempts: 1000,
        }
    }

    /// Maze settings: 16 inputs, 3 outputs, population cap `population_size`.
    pub fn maze(population_size: usize, reset_policy: ResetPolicy) -> Self {
        XcsParams {
            population_size,
            num_inputs: 16,
            num_outputs: 3,
            reset_policy,
            ..XcsParams::mux6()
        }
    }

    pub fn run_spec(&self) -> Result<RunSpec, XcsError> {
        Ok(RunSpec::new(self.cycles, self.window, self.update_mode)?)
    }

    pub fn validate(&self) -> Result<(), XcsError> {
        let bad = |what: &str| Err(XcsError::InvalidParams(what.to_string()));
        if self.population_size == 0 {
            return bad("population size must be positive");
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad("beta must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1)");
        }
        if !(0.0..=1.0).contains(&self.p_explore) {
            return bad("p_explore must lie in [0, 1]");
        }
        let positive = [
            ("nu", self.nu),
            ("theta_ga", self.theta_ga),
            ("epsilon0", self.epsilon0),
            ("alpha", self.alpha),
            ("delta", self.delta),
            ("mu_min", self.mu_min),
            ("init_fitness", self.init_fitness),
            ("fitness_reduction", self.fitness_reduction),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(XcsError::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if self.mu_min > 1.0 {
            return bad("mu_min must not exceed 1");
        }
        if self.init_error < 0.0 {
            return bad("initial error must be non-negative");
        }
        if self.num_inputs == 0 || self.num_outputs == 0 {
            return bad("networks need at least one input and one output");
        }
        if self.num_outputs > 8 {
            return bad("at most 8 output nodes");
        }
        if self.cover_attempts == 0 {
            return bad("cover_attempts must be positive");
        }
        if self.theta_mna == Some(0) {
            return bad("theta_mna must be positive");
        }
        self.run_spec()?;
        Ok(())
    }

    pub fn num_actions(&self) -> usize {
        1 << self.num_outputs
    }
}

#[cfg(test)]
mod tests;
