use std::fmt;

use rand::Rng;

use super::HarnessError;
use crate::rbn::{BooleanNetwork, RunSpec};

/// Widest input space the analyzer will enumerate.
pub const MAX_ANALYZED_INPUTS: usize = 20;

/// How one input fared over the repetitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputAnalysis {
    pub input: Vec<bool>,
    pub matches: usize,
    /// Matched repetitions per advocated action.
    pub action_counts: Vec<usize>,
}

impl InputAnalysis {
    /// More than one action was advocated across matched repetitions.
    pub fn is_inconsistent(&self) -> bool {
        self.action_counts.iter().filter(|&&c| c > 0).count() > 1
    }

    /// The single action advocated whenever the rule matched, if there is one.
    pub fn action(&self) -> Option<usize> {
        if self.matches == 0 || self.is_inconsistent() {
            return None;
        }
        self.action_counts.iter().position(|&c| c > 0)
    }

    pub fn input_string(&self) -> String {
        self.input.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleAnalysis {
    pub repetitions: usize,
    /// One entry per input, in big-endian counting order.
    pub inputs: Vec<InputAnalysis>,
}

impl RuleAnalysis {
    pub fn get(&self, input: &str) -> Option<&InputAnalysis> {
        self.inputs.iter().find(|a| a.input_string() == input)
    }

    /// Inputs that matched on every repetition.
    pub fn always_matching(&self) -> Vec<&InputAnalysis> {
        self.inputs.iter().filter(|a| a.matches == self.repetitions).collect()
    }

    /// Inputs that matched on some but fewer than half of the repetitions.
    pub fn rarely_matching(&self) -> Vec<&InputAnalysis> {
        self.inputs.iter().filter(|a| a.matches > 0 && 2 * a.matches < self.repetitions).collect()
    }
}

impl fmt::Display for RuleAnalysis {
    /// Only inputs that matched at least once are listed; `!` marks
    /// inconsistent actions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input,matches,repetitions,action_counts,inconsistent")?;
        for a in self.inputs.iter().filter(|a| a.matches > 0) {
            let counts: Vec<String> = a.action_counts.iter().map(|c| c.to_string()).collect();
            writeln!(
                f,
                "{},{},{},{},{}",
                a.input_string(),
                a.matches,
                self.repetitions,
                counts.join(" "),
                if a.is_inconsistent() { "!" } else { "" }
            )?;
        }
        Ok(())
    }
}

/// Runs `network` `repetitions` times from random states on every possible
/// input and tallies matches and advocated actions.
pub fn analyze_rule<R: Rng + ?Sized>(
    network: &BooleanNetwork,
    repetitions: usize,
    spec: &RunSpec,
    rng: &mut R,
) -> Result<RuleAnalysis, HarnessError> {
    let width = network.num_inputs();
    if width > MAX_ANALYZED_INPUTS {
        return Err(HarnessError::InvalidConfig(format!(
            "{width} inputs is too many to enumerate (limit {MAX_ANALYZED_INPUTS})"
        )));
    }
    if repetitions == 0 {
        return Err(HarnessError::InvalidConfig("repetitions must be at least 1".into()));
    }
    let num_actions = 1 << network.num_outputs();
    let mut net = network.clone();
    let inputs = (0..1usize << width)
        .map(|v| {
            let input: Vec<bool> = (0..width).rev().map(|i| (v >> i) & 1 == 1).collect();
            let mut matches = 0;
            let mut action_counts = vec![0; num_actions];
            for _ in 0..repetitions {
                let out = net.run(&input, spec, true, rng);
                if out.matched {
                    matches += 1;
                    action_counts[out.action] += 1;
                }
            }
            InputAnalysis { input, matches, action_counts }
        })
        .collect();
    Ok(RuleAnalysis { repetitions, inputs })
}
