//! An accuracy-based learning classifier system (XCS) whose rules are
//! variable-length random Boolean networks with asynchronous updating.
//!
//! * [`rbn`] holds the network representation and its execution.
//! * [`xcs`] is the reinforcement-learning loop over a population of networks.
//! * [`envs`] provides the multiplexer and maze benchmarks.
//! * [`harness`] drives seeded experiments and writes CSV learning curves.

pub mod envs;
pub mod harness;
pub mod rbn;
pub mod xcs;

/// Random stream used throughout the crate.
///
/// Xoshiro256++ is fully specified, so seeded runs are reproducible across
/// platforms and crate versions.
pub type SimRng = rand_xoshiro::Xoshiro256PlusPlus;
