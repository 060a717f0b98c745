use rand::Rng;

use super::{EnvError, Environment, Outcome, MAX_PAYOFF};
use crate::SimRng;

/// The `x`-address-bit multiplexer over strings of length `x + 2^x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiplexerTask {
    address_bits: usize,
}

impl MultiplexerTask {
    pub fn new(address_bits: usize) -> Self {
        assert!((1..=5).contains(&address_bits), "address width {address_bits} unsupported");
        MultiplexerTask { address_bits }
    }

    /// Smallest task whose total length is `len`, if `len = x + 2^x`.
    pub fn with_length(len: usize) -> Option<Self> {
        (1..=5).map(MultiplexerTask::new).find(|t| t.len() == len)
    }

    pub fn address_bits(&self) -> usize {
        self.address_bits
    }

    pub fn len(&self) -> usize {
        self.address_bits + (1 << self.address_bits)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The data bit selected by the big-endian address prefix.
pub fn mux_correct_action(input: &[bool], address_bits: usize) -> Result<bool, EnvError> {
    let expected = address_bits + (1 << address_bits);
    if input.len() != expected {
        return Err(EnvError::InputLength { address_bits, expected, found: input.len() });
    }
    let address = input[..address_bits].iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    Ok(input[address_bits + address])
}

/// 1000 for the correct bit, 0 otherwise.
pub fn mux_step(task: &MultiplexerTask, action: usize, input: &[bool]) -> Result<f64, EnvError> {
    let correct = mux_correct_action(input, task.address_bits)?;
    Ok(if action == correct as usize { MAX_PAYOFF } else { 0.0 })
}

/// Single-step environment presenting uniformly random multiplexer inputs.
#[derive(Debug, Clone)]
pub struct MuxEnv {
    task: MultiplexerTask,
    input: Vec<bool>,
}

impl MuxEnv {
    pub fn new(task: MultiplexerTask) -> Self {
        MuxEnv { task, input: vec![false; task.len()] }
    }

    pub fn task(&self) -> &MultiplexerTask {
        &self.task
    }

    pub fn set_input(&mut self, input: &[bool]) {
        assert_eq!(input.len(), self.task.len());
        self.input.copy_from_slice(input);
    }
}

impl Environment for MuxEnv {
    fn input_len(&self) -> usize {
        self.task.len()
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn is_multi_step(&self) -> bool {
        false
    }

    fn begin_trial(&mut self, rng: &mut SimRng) {
        for b in &mut self.input {
            *b = rng.random_bool(0.5);
        }
    }

    fn percept(&self) -> &[bool] {
        &self.input
    }

    fn execute(&mut self, action: usize) -> Outcome {
        let reward = mux_step(&self.task, action, &self.input).expect("input length fixed at construction");
        Outcome { reward, terminal: true, truncated: false }
    }
}
