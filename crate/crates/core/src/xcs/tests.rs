use rand::SeedableRng;

use super::*;
use crate::envs::{Environment, MazeEnv, MazeGrid, MultiplexerTask, MuxEnv};
use crate::rbn::{networks_equal, BooleanNetwork, Connection, NodeKind, NodeSpec, RunSpec, TruthTable, UpdateMode};
use crate::SimRng;

fn rng(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

fn classifier(net: BooleanNetwork, prediction: f64, fitness: f64) -> Classifier {
    let params = XcsParams::mux6();
    let mut cl = Classifier::new(net, &params, 0, &mut rng(0));
    cl.prediction = prediction;
    cl.fitness = fitness;
    cl
}

fn random_net(seed: u64) -> BooleanNetwork {
    BooleanNetwork::random(6, 1, &mut rng(seed))
}

fn table(bits: &str) -> TruthTable {
    bits.parse().unwrap()
}

/// A mux6 rule that matches exactly when the address is `address` and the
/// addressed bit is `value`, and advocates `action`.
fn mux_rule(address: usize, value: bool, action: bool) -> BooleanNetwork {
    let mut match_table = vec![false; 8];
    match_table[(address << 1) | value as usize] = true;
    let mut nodes = vec![
        NodeSpec::new(
            NodeKind::Match,
            vec![Connection::Internal(2), Connection::Internal(3), Connection::Internal(4 + address)],
            TruthTable::new(3, &match_table).unwrap(),
        )
        .unwrap(),
        NodeSpec::new(NodeKind::Output, vec![Connection::Internal(1)], table(if action { "11" } else { "00" })).unwrap(),
    ];
    for locus in 0..6 {
        nodes.push(NodeSpec::new(NodeKind::Input, vec![Connection::External(locus)], table("01")).unwrap());
    }
    BooleanNetwork::from_nodes(6, 1, nodes).unwrap()
}

fn bits(value: usize, len: usize) -> Vec<bool> {
    (0..len).rev().map(|i| (value >> i) & 1 == 1).collect()
}

#[test]
fn accuracy_is_one_below_threshold() {
    let p = XcsParams::mux6();
    assert_eq!(accuracy(0.0, &p), 1.0);
    assert_eq!(accuracy(9.999, &p), 1.0);
}

#[test]
fn accuracy_drops_to_alpha_at_threshold() {
    let p = XcsParams::mux6();
    assert!((accuracy(10.0, &p) - 0.1).abs() < 1e-12);
    assert!((accuracy(20.0, &p) - 0.1 * 2f64.powf(-5.0)).abs() < 1e-12);
}

#[test]
fn accuracy_is_monotone_non_increasing() {
    let p = XcsParams::mux6();
    let mut last = f64::INFINITY;
    for i in 0..=2000 {
        let k = accuracy(i as f64 * 0.5, &p);
        assert!(k <= last && k > 0.0);
        last = k;
    }
}

#[test]
fn prediction_array_weights_by_fitness() {
    let mut pop = Population::new();
    let a = pop.insert(classifier(random_net(1), 1000.0, 0.3));
    let b = pop.insert(classifier(random_net(2), 500.0, 0.1));
    let c = pop.insert(classifier(random_net(3), 500.0, 0.2));
    let set = [MatchEntry { index: a, action: 1 }, MatchEntry { index: b, action: 1 }, MatchEntry { index: c, action: 0 }];
    let pa = build_prediction_array(&pop, &set, 2);
    assert_eq!(pa.get(0), Some(500.0));
    assert!((pa.get(1).unwrap() - 875.0).abs() < 1e-9);
    assert_eq!(pa.best_action(), Some(1));
}

#[test]
fn prediction_array_three_to_one() {
    let mut pop = Population::new();
    let a = pop.insert(classifier(random_net(1), 1000.0, 0.75));
    let b = pop.insert(classifier(random_net(2), 0.0, 0.25));
    let set = [MatchEntry { index: a, action: 0 }, MatchEntry { index: b, action: 0 }];
    let pa = build_prediction_array(&pop, &set, 2);
    assert!((pa.get(0).unwrap() - 750.0).abs() < 1e-9);
    assert_eq!(pa.get(1), None);
    assert_eq!(pa.present_actions(), vec![0]);
}

#[test]
fn exploit_is_greedy_with_low_ties() {
    let pa = PredictionArray::from_values(vec![Some(10.0), None, Some(30.0), Some(30.0)]);
    assert_eq!(select_action(&pa, TrialKind::Exploit, 1.0, &mut rng(0)), 2);
    let tie = PredictionArray::from_values(vec![Some(5.0), Some(5.0)]);
    assert_eq!(select_action(&tie, TrialKind::Exploit, 1.0, &mut rng(0)), 0);
}

#[test]
fn explore_picks_present_actions_uniformly() {
    let pa = PredictionArray::from_values(vec![Some(10.0), None, Some(30.0), Some(0.0)]);
    let mut r = rng(7);
    let mut counts = [0usize; 4];
    for _ in 0..30_000 {
        counts[select_action(&pa, TrialKind::Explore, 1.0, &mut r)] += 1;
    }
    assert_eq!(counts[1], 0);
    for a in [0, 2, 3] {
        // Binomial(30000, 1/3): sd is about 82.
        assert!((counts[a] as f64 - 10_000.0).abs() < 400.0, "{counts:?}");
    }
}

#[test]
fn averaged_update_while_young() {
    let params = XcsParams::mux6();
    let mut pop = Population::new();
    let mut cl = classifier(random_net(1), 500.0, 0.01);
    cl.error = 0.0;
    let i = pop.insert(cl);
    update_action_set(&mut pop, &[i], 600.0, &params);
    assert_eq!(pop[i].prediction, 600.0);
    assert_eq!(pop[i].error, 0.0);
    assert_eq!(pop[i].experience, 1);
    update_action_set(&mut pop, &[i], 800.0, &params);
    assert!((pop[i].prediction - 700.0).abs() < 1e-9);
    assert!((pop[i].error - 50.0).abs() < 1e-9);
}

#[test]
fn update_uses_beta_once_experienced() {
    let params = XcsParams::mux6();
    let mut pop = Population::new();
    let mut cl = classifier(random_net(1), 0.0, 0.01);
    cl.experience = 10;
    let i = pop.insert(cl);
    update_action_set(&mut pop, &[i], 1000.0, &params);
    assert!((pop[i].prediction - 200.0).abs() < 1e-9);
    // Error moves toward |1000 - 200| with the new prediction.
    assert!((pop[i].error - 160.0).abs() < 1e-9);
}

#[test]
fn fitness_shares_relative_accuracy() {
    let params = XcsParams::mux6();
    let mut pop = Population::new();
    let mut accurate = classifier(random_net(1), 1000.0, 0.0);
    accurate.experience = 100;
    accurate.numerosity = 3;
    let mut poor = classifier(random_net(2), 500.0, 0.0);
    poor.experience = 100;
    poor.error = 500.0;
    let a = pop.insert(accurate);
    let b = pop.insert(poor);
    update_action_set(&mut pop, &[a, b], 1000.0, &params);
    // The poor rule's error moved to 480; accuracy 0.1 * 48^-5.
    assert!((pop[b].error - 480.0).abs() < 1e-9);
    let k_poor = 0.1 * 48f64.powf(-5.0);
    let total = 3.0 + k_poor;
    assert!((pop[a].fitness - 0.2 * 3.0 / total).abs() < 1e-12);
    assert!((pop[b].fitness - 0.2 * k_poor / total).abs() < 1e-18);
}

#[test]
fn ga_waits_for_theta() {
    let params = XcsParams::mux6();
    let mut pop = Population::new();
    let i = pop.insert(classifier(random_net(1), 0.0, 0.5));
    assert!(!run_ga(&mut pop, &[i], 25, &params, &mut rng(0)));
    assert_eq!(pop.micro_count(), 1);
    assert!(run_ga(&mut pop, &[i], 26, &params, &mut rng(0)));
}

#[test]
fn ga_does_not_fire_twice_at_one_time() {
    let params = XcsParams::mux6();
    let mut pop = Population::new();
    let i = pop.insert(classifier(random_net(1), 0.0, 0.5));
    let j = pop.insert(classifier(random_net(2), 0.0, 0.5));
    assert!(run_ga(&mut pop, &[i, j], 100, &params, &mut rng(0)));
    let set: Vec<usize> = (0..pop.len()).collect();
    assert!(!run_ga(&mut pop, &set, 100, &params, &mut rng(1)));
}

#[test]
fn unchanged_offspring_merge_into_parent() {
    let params = XcsParams { mu_min: 1e-12, ..XcsParams::mux6() };
    let mut pop = Population::new();
    let mut cl = classifier(random_net(1), 0.0, 0.5);
    cl.mutation_rate = 1e-12;
    let i = pop.insert(cl);
    assert!(run_ga(&mut pop, &[i], 100, &params, &mut rng(3)));
    assert_eq!(pop.len(), 1);
    assert_eq!(pop[0].numerosity, 3);
}

#[test]
fn changed_offspring_inherit_statistics() {
    let params = XcsParams { mu_min: 0.9, ..XcsParams::mux6() };
    let mut pop = Population::new();
    let mut cl = classifier(random_net(1), 420.0, 0.6);
    cl.numerosity = 2;
    cl.error = 33.0;
    cl.action_set_size = 7.0;
    let i = pop.insert(cl);
    assert!(run_ga(&mut pop, &[i], 100, &params, &mut rng(3)));
    assert_eq!(pop.len(), 3);
    for child in pop.iter().skip(1) {
        assert_eq!(child.numerosity, 1);
        assert_eq!(child.experience, 0);
        assert_eq!(child.prediction, 420.0);
        assert_eq!(child.error, 33.0);
        assert_eq!(child.action_set_size, 7.0);
        assert!((child.fitness - 0.1 * 0.6 / 2.0).abs() < 1e-12);
        assert_eq!(child.ga_timestamp, 100);
        assert!(!networks_equal(&child.network, &pop[0].network));
    }
}

#[test]
fn self_adaptation_is_log_normal() {
    let params = XcsParams::mux6();
    let mut r = rng(11);
    let mu = 0.01;
    let logs: Vec<f64> = (0..20_000).map(|_| (self_adapt_rate(mu, &params, &mut r) / mu).ln()).collect();
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let sd = (logs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 0.05, "mean {mean}");
    assert!((sd - 1.0).abs() < 0.1, "sd {sd}");
}

#[test]
fn self_adaptation_is_clamped() {
    let params = XcsParams::mux6();
    let mut r = rng(12);
    for _ in 0..5000 {
        let hi = self_adapt_rate(0.9, &params, &mut r);
        let lo = self_adapt_rate(2e-4, &params, &mut r);
        assert!((params.mu_min..=1.0).contains(&hi));
        assert!((params.mu_min..=1.0).contains(&lo));
    }
}

#[test]
fn deletion_down_to_one() {
    let params = XcsParams { population_size: 1, ..XcsParams::mux6() };
    let mut pop = Population::new();
    for s in 0..10 {
        let mut cl = classifier(random_net(s), 0.0, 0.1);
        cl.numerosity = 1 + s as u32 % 3;
        pop.insert(cl);
    }
    delete_from_population(&mut pop, &params, &mut rng(0));
    assert_eq!(pop.micro_count(), 1);
    assert_eq!(pop.len(), 1);
}

#[test]
fn deletion_prefers_experienced_unfit() {
    let params = XcsParams { population_size: 2, ..XcsParams::mux6() };
    let mut base = Population::new();
    for s in 0..3 {
        let mut cl = classifier(random_net(s), 0.0, 0.3);
        cl.experience = 50;
        base.insert(cl);
    }
    base[2].fitness = 0.001;
    let ids: Vec<u64> = base.iter().map(|c| c.id).collect();

    // mean = 0.601 / 3; the weak one's vote is inflated by mean / 0.001.
    let mean = 0.601 / 3.0;
    let weak_vote = mean / 0.001;
    let p = weak_vote / (2.0 + weak_vote);

    let trials = 20_000;
    let mut r = rng(5);
    let mut weak_deleted = 0;
    for _ in 0..trials {
        let mut pop = base.clone();
        delete_from_population(&mut pop, &params, &mut r);
        if pop.resolve(&[ids[2]]).is_empty() {
            weak_deleted += 1;
        }
    }
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    assert!((weak_deleted as f64 - trials as f64 * p).abs() < 4.5 * sd, "{weak_deleted} vs p={p}");
}

#[test]
fn covering_fills_both_actions_from_empty() {
    let params = XcsParams::mux6();
    let mut pop = Population::new();
    let input = bits(0b101101, 6);
    let m = form_match_set(&mut pop, &input, &params, 7, &mut rng(2)).unwrap();
    let mut actions: Vec<usize> = m.iter().map(|e| e.action).collect();
    actions.sort();
    assert_eq!(actions, vec![0, 1]);
    for cl in pop.iter() {
        assert_eq!(cl.numerosity, 1);
        assert_eq!(cl.experience, 0);
        assert_eq!(cl.ga_timestamp, 7);
        assert_eq!(cl.prediction, params.init_prediction);
        assert_eq!(cl.fitness, params.init_fitness);
        assert_eq!(cl.network.len(), 8);
    }
}

#[test]
fn covering_succeeds_on_every_mux6_input() {
    let params = XcsParams::mux6();
    let mut r = rng(9);
    for v in 0..64 {
        let cl = cover(&bits(v, 6), &params, 3, &mut r).unwrap();
        assert_eq!(cl.network.len(), 8);
        assert_eq!(cl.ga_timestamp, 3);
    }
}

#[test]
fn covering_reports_exhaustion() {
    // One cycle of a fresh random network rarely matches, and one attempt
    // is all covering gets: some input must run dry.
    let params = XcsParams { cover_attempts: 1, cycles: 1, window: 1, ..XcsParams::mux6() };
    let mut r = rng(4);
    let exhausted = (0..200).any(|v| {
        matches!(
            cover(&bits(v % 64, 6), &params, 0, &mut r),
            Err(XcsError::CoveringExhausted { attempts: 1 })
        )
    });
    assert!(exhausted);
}

#[test]
fn persistent_states_carry_over_between_steps() {
    let params = XcsParams {
        reset_policy: ResetPolicy::PersistWithinTrial,
        update_mode: UpdateMode::Sync,
        ..XcsParams::mux6()
    };
    let spec = RunSpec::new(params.cycles, params.window, UpdateMode::Sync).unwrap();
    let mut pop = Population::new();
    let net = random_net(21);
    pop.insert(classifier(net.clone(), 0.0, 0.1));
    let input = bits(0b110010, 6);

    let mut expected = net;
    let mut r = rng(0);
    expected.run(&input, &spec, false, &mut r);
    expected.run(&input, &spec, false, &mut r);

    let mut r = rng(0);
    form_match_set(&mut pop, &input, &params, 0, &mut r).unwrap();
    form_match_set(&mut pop, &input, &params, 0, &mut r).unwrap();
    assert_eq!(pop[0].network.states(), expected.states());
}

#[test]
fn hand_built_population_solves_mux6() {
    let params = XcsParams::mux6();
    let mut xcs = Xcs::new(params).unwrap();
    for address in 0..4 {
        for value in [false, true] {
            for action in [false, true] {
                let payoff = if action == value { 1000.0 } else { 0.0 };
                let mut cl = classifier(mux_rule(address, value, action), payoff, 1.0);
                cl.experience = 1000;
                xcs.population.insert(cl);
            }
        }
    }
    let mut env = MuxEnv::new(MultiplexerTask::new(2));
    let mut r = rng(8);
    for v in 0..64 {
        env.set_input(&bits(v, 6));
        let input = env.percept().to_vec();
        let m = form_match_set(&mut xcs.population, &input, &xcs.params, 0, &mut r).unwrap();
        assert_eq!(m.len(), 2, "input {v:06b}");
        let pa = build_prediction_array(&xcs.population, &m, 2);
        let action = select_action(&pa, TrialKind::Exploit, 1.0, &mut r);
        assert_eq!(env.execute(action).reward, 1000.0, "input {v:06b}");
    }
    assert_eq!(xcs.population.len(), 16, "no covering was needed");
}

#[test]
fn population_stays_within_cap() {
    let params = XcsParams { population_size: 60, ..XcsParams::mux6() };
    let mut xcs = Xcs::new(params).unwrap();
    let mut env = MuxEnv::new(MultiplexerTask::new(2));
    let mut r = rng(13);
    for t in 0..600 {
        let kind = if t % 2 == 0 { TrialKind::Explore } else { TrialKind::Exploit };
        let result = xcs.trial(&mut env, kind, &mut r).unwrap();
        assert_eq!(result.steps, 1);
        // The prediction array is a weighted mean, exact only up to rounding.
        assert!((0.0..=1.0 + 1e-9).contains(&result.system_error), "trial {t}: {result:?}");
        assert!(xcs.population.micro_count() <= 60);
        for cl in xcs.population.iter() {
            assert!(cl.fitness > 0.0 && cl.fitness <= 1.0);
            assert!((xcs.params.mu_min..=1.0).contains(&cl.mutation_rate));
        }
    }
    assert_eq!(xcs.time(), 300);
}

#[test]
fn multi_step_trials_stay_bounded() {
    let mut xcs = Xcs::new(XcsParams::maze(200, ResetPolicy::PersistWithinTrial)).unwrap();
    let mut env = MazeEnv::new(MazeGrid::woods1());
    let mut r = rng(14);
    let mut explore_steps = 0;
    for t in 0..40 {
        let kind = if t % 2 == 0 { TrialKind::Explore } else { TrialKind::Exploit };
        let result = xcs.trial(&mut env, kind, &mut r).unwrap();
        assert!((1..=50).contains(&result.steps));
        if !result.correct {
            assert_eq!(result.steps, 50);
        }
        if kind == TrialKind::Explore {
            explore_steps += result.steps as u64;
        }
        assert!(xcs.population.micro_count() <= 200);
    }
    assert_eq!(xcs.time(), explore_steps);
}

#[test]
fn identical_seeds_reproduce_a_run() {
    let run = |seed| {
        let mut xcs = Xcs::new(XcsParams { population_size: 100, ..XcsParams::mux6() }).unwrap();
        let mut env = MuxEnv::new(MultiplexerTask::new(2));
        let mut r = rng(seed);
        (0..200)
            .map(|t| {
                let kind = if t % 2 == 0 { TrialKind::Explore } else { TrialKind::Exploit };
                xcs.trial(&mut env, kind, &mut r).unwrap().correct
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(run(3), run(3));
}

#[test]
fn parameter_validation() {
    assert!(XcsParams::mux6().validate().is_ok());
    assert!(XcsParams::maze(2000, ResetPolicy::PersistWithinTrial).validate().is_ok());
    assert!(XcsParams { window: 4, ..XcsParams::mux6() }.validate().is_err());
    assert!(XcsParams { beta: 0.0, ..XcsParams::mux6() }.validate().is_err());
    assert!(XcsParams { population_size: 0, ..XcsParams::mux6() }.validate().is_err());
    assert!(XcsParams { gamma: 1.0, ..XcsParams::mux6() }.validate().is_err());
}

#[test]
fn reset_policy_round_trips() {
    for p in [ResetPolicy::RandomizeEachMatch, ResetPolicy::PersistWithinTrial] {
        assert_eq!(p.to_string().parse::<ResetPolicy>().unwrap(), p);
    }
    assert!("never".parse::<ResetPolicy>().is_err());
}

mod props {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fitness_stays_in_unit_interval(
            payoffs in proptest::collection::vec(prop_oneof![Just(0.0), Just(1000.0), 0.0..1000.0f64], 1..60),
            nums in proptest::collection::vec(1u32..5, 1..6),
        ) {
            let params = XcsParams::mux6();
            let mut pop = Population::new();
            let set: Vec<usize> = nums
                .iter()
                .enumerate()
                .map(|(s, &n)| {
                    let mut cl = classifier(random_net(s as u64), 10.0, 0.01);
                    cl.numerosity = n;
                    pop.insert(cl)
                })
                .collect();
            for p in payoffs {
                update_action_set(&mut pop, &set, p, &params);
                let total: f64 = set.iter().map(|&i| pop[i].fitness).sum();
                for &i in &set {
                    let cl = &pop[i];
                    prop_assert!(cl.fitness > 0.0 && cl.fitness <= 1.0);
                    prop_assert!((0.0..=1000.0).contains(&cl.prediction));
                    prop_assert!(cl.error >= 0.0 && cl.error <= 1000.0);
                }
                prop_assert!(total <= 1.0 + 1e-9);
            }
        }

        #[test]
        fn roulette_returns_positive_weight(weights in proptest::collection::vec(0.0..5.0f64, 1..20), seed in any::<u64>()) {
            prop_assume!(weights.iter().any(|w| *w > 0.0));
            let i = super::super::population::roulette(&weights, &mut rng(seed));
            prop_assert!(weights[i] > 0.0);
        }
    }
}
