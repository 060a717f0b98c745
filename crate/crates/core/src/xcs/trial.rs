use super::{
    build_prediction_array, delete_from_population, form_match_set, run_ga, select_action, update_action_set,
    Population, ResetPolicy, TrialKind, XcsError, XcsParams,
};
use crate::envs::{Environment, MAX_PAYOFF};
use crate::SimRng;

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    /// Single-step: the maximum payoff was received. Multi-step: food was reached.
    pub correct: bool,
    /// Mean `|target - prediction|` over the trial's steps, divided by 1000.
    pub system_error: f64,
    pub steps: usize,
}

/// A learning classifier system: parameters, population and the learning-step
/// clock used for GA timestamps.
#[derive(Debug, Clone)]
pub struct Xcs {
    pub params: XcsParams,
    pub population: Population,
    time: u64,
}

impl Xcs {
    pub fn new(params: XcsParams) -> Result<Self, XcsError> {
        params.validate()?;
        Ok(Xcs { params, population: Population::new(), time: 0 })
    }

    /// Learning steps taken so far (explore steps only).
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn trial(&mut self, env: &mut dyn Environment, kind: TrialKind, rng: &mut SimRng) -> Result<TrialResult, XcsError> {
        if env.is_multi_step() {
            run_trial_multi_step(self, env, kind, rng)
        } else {
            run_trial_single_step(self, env, kind, rng)
        }
    }

    fn begin_trial(&mut self, env: &mut dyn Environment, rng: &mut SimRng) {
        assert_eq!(env.input_len(), self.params.num_inputs, "environment and networks disagree on input width");
        assert_eq!(env.num_actions(), self.params.num_actions(), "environment and networks disagree on actions");
        env.begin_trial(rng);
        if self.params.reset_policy == ResetPolicy::PersistWithinTrial {
            for cl in self.population.iter_mut() {
                cl.network.randomize_states(rng);
            }
        }
    }
}

/// One input, one action, immediate payoff. Explore trials update the action
/// set and may run the GA; exploit trials only report.
pub fn run_trial_single_step(
    xcs: &mut Xcs,
    env: &mut dyn Environment,
    kind: TrialKind,
    rng: &mut SimRng,
) -> Result<TrialResult, XcsError> {
    xcs.begin_trial(env, rng);
    let input = env.percept().to_vec();
    let match_set = form_match_set(&mut xcs.population, &input, &xcs.params, xcs.time, rng)?;
    let pa = build_prediction_array(&xcs.population, &match_set, xcs.params.num_actions());
    let action = select_action(&pa, kind, xcs.params.p_explore, rng);
    let outcome = env.execute(action);
    let predicted = pa.get(action).expect("chosen action is present");

    if kind == TrialKind::Explore {
        xcs.time += 1;
        let action_set: Vec<usize> = match_set.iter().filter(|e| e.action == action).map(|e| e.index).collect();
        update_action_set(&mut xcs.population, &action_set, outcome.reward, &xcs.params);
        run_ga(&mut xcs.population, &action_set, xcs.time, &xcs.params, rng);
    }
    delete_from_population(&mut xcs.population, &xcs.params, rng);

    Ok(TrialResult {
        correct: outcome.reward >= MAX_PAYOFF,
        system_error: (outcome.reward - predicted).abs() / MAX_PAYOFF,
        steps: 1,
    })
}

/// Sense-match-act until food is reached or the step budget runs out.
///
/// On explore trials the previous step's action set is updated toward
/// `r + gamma * max PA` of the current step, and the final action set toward
/// the food payoff.
pub fn run_trial_multi_step(
    xcs: &mut Xcs,
    env: &mut dyn Environment,
    kind: TrialKind,
    rng: &mut SimRng,
) -> Result<TrialResult, XcsError> {
    xcs.begin_trial(env, rng);
    let gamma = xcs.params.gamma;
    // (action set ids, reward received, prediction of the chosen action)
    let mut previous: Option<(Vec<u64>, f64, f64)> = None;
    let mut steps = 0;
    let mut error_sum = 0.0;
    let mut error_count = 0usize;
    let mut reached = false;

    loop {
        let input = env.percept().to_vec();
        let match_set = form_match_set(&mut xcs.population, &input, &xcs.params, xcs.time, rng)?;
        let pa = build_prediction_array(&xcs.population, &match_set, xcs.params.num_actions());
        let action = select_action(&pa, kind, xcs.params.p_explore, rng);
        let predicted = pa.get(action).expect("chosen action is present");
        let ids: Vec<u64> = match_set
            .iter()
            .filter(|e| e.action == action)
            .map(|e| xcs.population[e.index].id)
            .collect();
        let outcome = env.execute(action);
        steps += 1;
        if kind == TrialKind::Explore {
            xcs.time += 1;
        }

        if let Some((prev_ids, prev_reward, prev_predicted)) = previous.take() {
            let target = prev_reward + gamma * pa.max_value().expect("match set is non-empty");
            error_sum += (target - prev_predicted).abs();
            error_count += 1;
            if kind == TrialKind::Explore {
                let set = xcs.population.resolve(&prev_ids);
                if !set.is_empty() {
                    update_action_set(&mut xcs.population, &set, target, &xcs.params);
                    run_ga(&mut xcs.population, &set, xcs.time, &xcs.params, rng);
                }
            }
        }
        if outcome.terminal {
            reached = true;
            error_sum += (outcome.reward - predicted).abs();
            error_count += 1;
            if kind == TrialKind::Explore {
                let set = xcs.population.resolve(&ids);
                if !set.is_empty() {
                    update_action_set(&mut xcs.population, &set, outcome.reward, &xcs.params);
                    run_ga(&mut xcs.population, &set, xcs.time, &xcs.params, rng);
                }
            }
        }
        delete_from_population(&mut xcs.population, &xcs.params, rng);
        if outcome.terminal || outcome.truncated {
            break;
        }
        previous = Some((ids, outcome.reward, predicted));
    }

    Ok(TrialResult {
        correct: reached,
        system_error: if error_count > 0 { error_sum / error_count as f64 / MAX_PAYOFF } else { 0.0 },
        steps,
    })
}
