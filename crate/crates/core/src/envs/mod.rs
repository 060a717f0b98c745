//! Benchmark tasks: the Boolean multiplexer (single-step) and grid mazes
//! (multi-step).

mod maze;
mod mux;

pub use maze::{Cell, MazeEnv, MazeGrid, Position, Topology, MAX_STEPS, NEIGHBOUR_OFFSETS};
pub use mux::{mux_correct_action, mux_step, MultiplexerTask, MuxEnv};

use thiserror::Error;

use crate::SimRng;

/// Payoff for a correct classification or for reaching food.
pub const MAX_PAYOFF: f64 = 1000.0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("multiplexer with {address_bits} address bits needs {expected} input bits, got {found}")]
    InputLength { address_bits: usize, expected: usize, found: usize },
    #[error("line {line}: {cause}")]
    GridParse { line: usize, cause: String },
    #[error("cell (row {row}, col {col}) cannot reach food")]
    Unreachable { row: usize, col: usize },
    #[error("unknown environment `{0}`")]
    Unknown(String),
}

/// Result of executing one action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub reward: f64,
    /// The trial is over: the classification was made or food was reached.
    pub terminal: bool,
    /// The step budget ran out before food was reached.
    pub truncated: bool,
}

/// A learning task as seen by the classifier system.
pub trait Environment {
    fn input_len(&self) -> usize;
    fn num_actions(&self) -> usize;
    fn is_multi_step(&self) -> bool;
    /// Starts a new trial (draws an input or places the agent).
    fn begin_trial(&mut self, rng: &mut SimRng);
    fn percept(&self) -> &[bool];
    fn execute(&mut self, action: usize) -> Outcome;
}
