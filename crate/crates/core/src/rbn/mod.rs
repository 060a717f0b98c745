//! Variable-length random Boolean networks.
//!
//! A [`BooleanNetwork`] is the condition and action of one rule. Nodes are laid
//! out as `[match, outputs.., inputs.., extras..]`: node 0 gates whether the rule
//! matches, nodes `1..=O` encode the advocated action (node 1 is the most
//! significant bit), and each input node reads one bit of the environment through
//! its first connection. Extra nodes are grown by mutation.
//!
//! Networks are executed for a fixed number of cycles, either synchronously or
//! asynchronously, and each node's output is the majority of its states over the
//! last `W` cycles.

mod text;

pub use text::{parse_network, serialize_network};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

/// Fewest connections a node may have.
pub const MIN_CONNECTIONS: usize = 1;
/// Most connections a node may have; truth tables fit in a `u32`.
pub const MAX_CONNECTIONS: usize = 5;
/// Largest supported majority window (history is a 32-bit shift register).
pub const MAX_WINDOW: usize = 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RbnError {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error("invalid run length: need cycles >= window >= 1, window odd and <= {MAX_WINDOW} (cycles={cycles}, window={window})")]
    RunSpec { cycles: usize, window: usize },
    #[error("invalid node: {0}")]
    InvalidNode(String),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("node reads {connection} but only {available} sources exist")]
    Corrupt { connection: Connection, available: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected header `nodes=<N> inputs=<I> outputs=<O>`")]
    BadHeader,
    #[error("expected `<index> <kind> <table> <connections>`")]
    BadLine,
    #[error("node index {found}, expected {expected}")]
    BadIndex { expected: usize, found: String },
    #[error("unknown node kind `{0}`")]
    BadKind(String),
    #[error("node kind {found} where {expected} was expected")]
    WrongKind { expected: NodeKind, found: NodeKind },
    #[error("bad truth table bit `{0}`")]
    BadBit(char),
    #[error("bad connection `{0}`")]
    BadConnection(String),
    #[error("truth table has {found} bits but {connections} connections need {expected}")]
    TableLength { connections: usize, expected: usize, found: usize },
    #[error("connection count {0} outside [{MIN_CONNECTIONS}, {MAX_CONNECTIONS}]")]
    Arity(usize),
    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: usize, limit: usize },
    #[error("input connections must appear exactly once, first, on input nodes")]
    MisplacedInput,
    #[error("header declares {declared} nodes but {found} were given")]
    NodeCount { declared: usize, found: usize },
}

/// Where a node reads one of its input bits from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connection {
    /// A locus of the environment's input string.
    External(usize),
    /// The current state of another node (or the node itself).
    Internal(usize),
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Connection::External(locus) => write!(f, "in{locus}"),
            Connection::Internal(node) => write!(f, "{node}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Match,
    Output,
    Input,
    Extra,
}

impl NodeKind {
    pub fn symbol(self) -> char {
        match self {
            NodeKind::Match => 'M',
            NodeKind::Output => 'O',
            NodeKind::Input => 'I',
            NodeKind::Extra => 'N',
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "M" => Some(NodeKind::Match),
            "O" => Some(NodeKind::Output),
            "I" => Some(NodeKind::Input),
            "N" => Some(NodeKind::Extra),
            _ => None,
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Look-up table of a node with `arity` inputs: `2^arity` output bits.
///
/// Entry `i` is the node's next state when its inputs, read in connection order
/// with the first connection as the most significant bit, spell `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruthTable {
    bits: u32,
    arity: u8,
}

impl TruthTable {
    pub fn new(arity: usize, entries: &[bool]) -> Result<Self, RbnError> {
        check_arity(arity)?;
        if entries.len() != 1 << arity {
            return Err(RbnError::InvalidNode(format!(
                "{} table entries for arity {arity}",
                entries.len()
            )));
        }
        let bits = entries
            .iter()
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | (u32::from(b) << i));
        Ok(TruthTable { bits, arity: arity as u8 })
    }

    pub fn random<R: Rng + ?Sized>(arity: usize, rng: &mut R) -> Self {
        debug_assert!((MIN_CONNECTIONS..=MAX_CONNECTIONS).contains(&arity));
        let len = 1u32 << arity;
        let mask = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
        TruthTable { bits: rng.random::<u32>() & mask, arity: arity as u8 }
    }

    pub fn arity(&self) -> usize {
        self.arity as usize
    }

    pub fn len(&self) -> usize {
        1 << self.arity
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        (self.bits >> index) & 1 == 1
    }

    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len());
        self.bits ^= 1 << index;
    }

    pub fn entries(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.entries() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TruthTable {
    type Err = RbnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let entries = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(RbnError::InvalidNode(format!("bad truth table bit `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if !entries.len().is_power_of_two() {
            return Err(RbnError::InvalidNode(format!("table length {} is not 2^K", entries.len())));
        }
        TruthTable::new(entries.len().trailing_zeros() as usize, &entries)
    }
}

fn check_arity(arity: usize) -> Result<(), RbnError> {
    if (MIN_CONNECTIONS..=MAX_CONNECTIONS).contains(&arity) {
        Ok(())
    } else {
        Err(RbnError::InvalidNode(format!(
            "arity {arity} outside [{MIN_CONNECTIONS}, {MAX_CONNECTIONS}]"
        )))
    }
}

/// One node: its role, ordered connections and look-up table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NodeSpec {
    kind: NodeKind,
    connections: Vec<Connection>,
    table: TruthTable,
}

impl NodeSpec {
    pub fn new(kind: NodeKind, connections: Vec<Connection>, table: TruthTable) -> Result<Self, RbnError> {
        check_arity(connections.len())?;
        if table.arity() != connections.len() {
            return Err(RbnError::InvalidNode(format!(
                "{} connections but a table of arity {}",
                connections.len(),
                table.arity()
            )));
        }
        for (pos, c) in connections.iter().enumerate() {
            if let Connection::External(_) = c {
                if kind != NodeKind::Input || pos != 0 {
                    return Err(RbnError::InvalidNode(
                        "external connections belong at position 0 of input nodes".into(),
                    ));
                }
            }
        }
        if kind == NodeKind::Input && !matches!(connections[0], Connection::External(_)) {
            return Err(RbnError::InvalidNode("input node without an external connection".into()));
        }
        Ok(NodeSpec { kind, connections, table })
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    /// Number of connections, `K`.
    pub fn arity(&self) -> usize {
        self.connections.len()
    }

    #[inline]
    fn next_state(&self, states: &[bool], input: &[bool]) -> bool {
        let mut index = 0usize;
        for c in &self.connections {
            let bit = match *c {
                Connection::External(locus) => input[locus],
                Connection::Internal(node) => states[node],
            };
            index = (index << 1) | bit as usize;
        }
        self.table.get(index)
    }
}

/// Evaluates a node against the current node states and environment input.
///
/// Fails only if the node reads outside `states` or `input`, which means the
/// network it came from is corrupted.
pub fn eval_node(node: &NodeSpec, states: &[bool], input: &[bool]) -> Result<bool, RbnError> {
    for &c in &node.connections {
        let (index, available) = match c {
            Connection::External(locus) => (locus, input.len()),
            Connection::Internal(n) => (n, states.len()),
        };
        if index >= available {
            return Err(RbnError::Corrupt { connection: c, available });
        }
    }
    Ok(node.next_state(states, input))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateMode {
    /// Every node computes its next state from the same snapshot.
    Sync,
    /// `N` single-node updates per cycle, nodes drawn uniformly with replacement.
    Async,
}

impl FromStr for UpdateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sync" => Ok(UpdateMode::Sync),
            "async" => Ok(UpdateMode::Async),
            other => Err(format!("unknown update mode `{other}` (expected sync|async)")),
        }
    }
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateMode::Sync => "sync",
            UpdateMode::Async => "async",
        })
    }
}

/// How long a network runs (`T` cycles) and how many trailing cycles (`W`)
/// vote on each node's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSpec {
    cycles: usize,
    window: usize,
    mode: UpdateMode,
}

impl RunSpec {
    pub fn new(cycles: usize, window: usize, mode: UpdateMode) -> Result<Self, RbnError> {
        if window == 0 || window % 2 == 0 || window > MAX_WINDOW || cycles < window {
            return Err(RbnError::RunSpec { cycles, window });
        }
        Ok(RunSpec { cycles, window, mode })
    }

    pub fn cycles(&self) -> usize {
        self.cycles
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn mode(&self) -> UpdateMode {
        self.mode
    }
}

/// Decoded result of running a network on one input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NetworkOutput {
    pub matched: bool,
    pub action: usize,
}

/// How node addition and removal are drawn during mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthRule {
    /// Addition and removal are two independent events, each with probability `mu`.
    Independent,
    /// One draw: add with probability `mu`, otherwise remove with probability `mu`.
    Exclusive,
}

impl GrowthRule {
    pub const DEFAULT: GrowthRule = GrowthRule::Independent;
}

#[derive(Debug, Clone)]
pub struct BooleanNetwork {
    nodes: Vec<NodeSpec>,
    /// Flattened wiring of `nodes`, rebuilt on every structural change.
    wiring: Vec<Wiring>,
    /// A constant `false`, the environment input bits, then one state bit
    /// per node.
    signals: Vec<bool>,
    /// Per-node shift register of end-of-cycle states, newest in bit 0.
    history: Vec<u32>,
    history_len: usize,
    num_inputs: usize,
    num_outputs: usize,
}

/// Unbiased draw from `0..n` (Lemire's multiply-and-reject) starting from the
/// 32 random bits `first`, inlined for the asynchronous update loop.
#[inline(always)]
fn uniform_index_from<R: Rng + ?Sized>(first: u32, rng: &mut R, n: u32) -> usize {
    let mut m = u64::from(first) * u64::from(n);
    if (m as u32) < n {
        let threshold = n.wrapping_neg() % n;
        while (m as u32) < threshold {
            m = u64::from(rng.next_u32()) * u64::from(n);
        }
    }
    (m >> 32) as usize
}

/// A node's connections as offsets into the signal buffer.
#[derive(Debug, Clone, Copy)]
/// Unused slots read the constant `false` at offset 0 and are shifted away,
/// so evaluation does not branch on arity.
struct Wiring {
    table: u32,
    padding: u32,
    sources: [u16; MAX_CONNECTIONS],
}

impl Wiring {
    fn new(node: &NodeSpec, num_inputs: usize) -> Self {
        let mut sources = [0u16; MAX_CONNECTIONS];
        for (slot, c) in sources.iter_mut().zip(&node.connections) {
            *slot = match *c {
                Connection::External(locus) => 1 + locus,
                Connection::Internal(j) => 1 + num_inputs + j,
            } as u16;
        }
        Wiring { table: node.table.bits, padding: (MAX_CONNECTIONS - node.arity()) as u32, sources }
    }

    #[inline(always)]
    fn next_state(&self, signals: &[bool]) -> bool {
        let mut index = 0u32;
        for &src in &self.sources {
            debug_assert!((src as usize) < signals.len());
            // SAFETY: sources are built from validated connections of the
            // network that owns `signals`, and `rewire` runs after every
            // structural change, so each one indexes inside the buffer.
            let bit = unsafe { *signals.get_unchecked(src as usize) };
            index = (index << 1) | bit as u32;
        }
        (self.table >> (index >> self.padding)) & 1 == 1
    }
}

impl BooleanNetwork {
    /// Creates a network of `I + O + 1` nodes with random connectivity, tables and states.
    pub fn random<R: Rng + ?Sized>(num_inputs: usize, num_outputs: usize, rng: &mut R) -> Self {
        assert!(num_inputs >= 1 && num_outputs >= 1, "need at least one input and one output");
        let n = num_inputs + num_outputs + 1;
        let mut nodes = Vec::with_capacity(n);
        for index in 0..n {
            let kind = layout_kind(index, num_inputs, num_outputs);
            let arity = rng.random_range(MIN_CONNECTIONS..=MAX_CONNECTIONS);
            let connections = (0..arity)
                .map(|pos| {
                    if kind == NodeKind::Input && pos == 0 {
                        Connection::External(index - num_outputs - 1)
                    } else {
                        Connection::Internal(rng.random_range(0..n))
                    }
                })
                .collect();
            let table = TruthTable::random(arity, rng);
            nodes.push(NodeSpec { kind, connections, table });
        }
        let mut signals = vec![false; 1 + num_inputs];
        signals.extend((0..n).map(|_| rng.random_bool(0.5)));
        let mut net = BooleanNetwork {
            nodes,
            wiring: Vec::new(),
            signals,
            history: vec![0; n],
            history_len: 0,
            num_inputs,
            num_outputs,
        };
        net.rewire();
        net
    }

    /// Builds a network from explicit nodes, checking the fixed node layout and
    /// that every connection is in range. States start at zero.
    pub fn from_nodes(num_inputs: usize, num_outputs: usize, nodes: Vec<NodeSpec>) -> Result<Self, RbnError> {
        if num_inputs == 0 || num_outputs == 0 {
            return Err(RbnError::InvalidNetwork("need at least one input and one output".into()));
        }
        let initial = num_inputs + num_outputs + 1;
        if nodes.len() < initial {
            return Err(RbnError::InvalidNetwork(format!(
                "{} nodes, fewer than the {initial} required",
                nodes.len()
            )));
        }
        for (index, node) in nodes.iter().enumerate() {
            let expected = layout_kind(index, num_inputs, num_outputs);
            if node.kind != expected {
                return Err(RbnError::InvalidNetwork(format!(
                    "node {index} is {} but the layout requires {expected}",
                    node.kind
                )));
            }
            for &c in &node.connections {
                let ok = match c {
                    Connection::External(locus) => locus < num_inputs,
                    Connection::Internal(j) => j < nodes.len(),
                };
                if !ok {
                    return Err(RbnError::Corrupt {
                        connection: c,
                        available: if matches!(c, Connection::External(_)) { num_inputs } else { nodes.len() },
                    });
                }
            }
        }
        let n = nodes.len();
        if 1 + num_inputs + n > u16::MAX as usize {
            return Err(RbnError::InvalidNetwork(format!("{n} nodes is too many")));
        }
        let mut net = BooleanNetwork {
            nodes,
            wiring: Vec::new(),
            signals: vec![false; 1 + num_inputs + n],
            history: vec![0; n],
            history_len: 0,
            num_inputs,
            num_outputs,
        };
        net.rewire();
        Ok(net)
    }

    fn rewire(&mut self) {
        let num_inputs = self.num_inputs;
        self.wiring.clear();
        self.wiring.extend(self.nodes.iter().map(|node| Wiring::new(node, num_inputs)));
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn states(&self) -> &[bool] {
        &self.signals[1 + self.num_inputs..]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    /// Node count at creation, `I + O + 1`; the network never shrinks below it.
    pub fn initial_len(&self) -> usize {
        self.num_inputs + self.num_outputs + 1
    }

    pub fn total_connections(&self) -> usize {
        self.nodes.iter().map(NodeSpec::arity).sum()
    }

    /// Number of cycles recorded in the history, saturating at 32.
    pub fn history_len(&self) -> usize {
        self.history_len
    }

    /// The last `n` recorded states of `node`, oldest first.
    pub fn recent_states(&self, node: usize, n: usize) -> Vec<bool> {
        let n = n.min(self.history_len);
        (0..n).rev().map(|age| (self.history[node] >> age) & 1 == 1).collect()
    }

    /// Overwrites the node states. History is left untouched.
    pub fn set_states(&mut self, states: &[bool]) {
        assert_eq!(states.len(), self.nodes.len());
        self.signals[1 + self.num_inputs..].copy_from_slice(states);
    }

    /// Draws fresh uniform states and clears the history.
    pub fn randomize_states<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for chunk in self.signals[1 + self.num_inputs..].chunks_mut(64) {
            let bits = rng.next_u64();
            for (i, s) in chunk.iter_mut().enumerate() {
                *s = (bits >> i) & 1 == 1;
            }
        }
        self.clear_history();
    }

    pub fn clear_history(&mut self) {
        self.history.iter_mut().for_each(|h| *h = 0);
        self.history_len = 0;
    }

    /// Executes one equivalent update cycle and records every node's
    /// end-of-cycle state in its history.
    pub fn cycle<R: Rng + ?Sized>(&mut self, input: &[bool], mode: UpdateMode, rng: &mut R) {
        assert_eq!(input.len(), self.num_inputs, "input length does not match the network");
        self.signals[1..=self.num_inputs].copy_from_slice(input);
        let mut scratch = Vec::new();
        self.cycle_loaded(mode, rng, &mut scratch);
    }

    /// One cycle with the input already loaded into the signal buffer.
    fn cycle_loaded<R: Rng + ?Sized>(&mut self, mode: UpdateMode, rng: &mut R, scratch: &mut Vec<bool>) {
        let n = self.nodes.len();
        let offset = 1 + self.num_inputs;
        match mode {
            UpdateMode::Sync => {
                scratch.clear();
                scratch.extend(self.wiring.iter().map(|w| w.next_state(&self.signals)));
                self.signals[offset..].copy_from_slice(scratch);
            }
            UpdateMode::Async => {
                let n32 = n as u32;
                for _ in 0..n / 2 {
                    let word = rng.next_u64();
                    for half in [word as u32, (word >> 32) as u32] {
                        let i = uniform_index_from(half, rng, n32);
                        self.signals[offset + i] = self.wiring[i].next_state(&self.signals);
                    }
                }
                if n % 2 == 1 {
                    let i = uniform_index_from(rng.next_u32(), rng, n32);
                    self.signals[offset + i] = self.wiring[i].next_state(&self.signals);
                }
            }
        }
        for (h, &s) in self.history.iter_mut().zip(&self.signals[offset..]) {
            *h = (*h << 1) | u32::from(s);
        }
        self.history_len = (self.history_len + 1).min(32);
    }

    /// Runs the network for `spec.cycles()` cycles on `input` and decodes the
    /// majority state of the match and output nodes over the last
    /// `spec.window()` cycles.
    ///
    /// With `reset` the states are randomized first; otherwise execution
    /// continues from wherever the previous run left the network.
    pub fn run<R: Rng + ?Sized>(&mut self, input: &[bool], spec: &RunSpec, reset: bool, rng: &mut R) -> NetworkOutput {
        assert_eq!(input.len(), self.num_inputs, "input length does not match the network");
        if reset {
            self.randomize_states(rng);
        }
        self.signals[1..=self.num_inputs].copy_from_slice(input);
        let mut scratch = Vec::new();
        for _ in 0..spec.cycles {
            self.cycle_loaded(spec.mode, rng, &mut scratch);
        }
        self.decode(spec.window)
    }

    /// Majority-vote decode of the last `window` history entries.
    pub fn decode(&self, window: usize) -> NetworkOutput {
        assert!(window % 2 == 1 && window <= self.history_len, "window must be odd and within the history");
        let matched = self.majority(0, window);
        let action = (1..=self.num_outputs).fold(0usize, |acc, i| (acc << 1) | self.majority(i, window) as usize);
        NetworkOutput { matched, action }
    }

    fn majority(&self, node: usize, window: usize) -> bool {
        let mask = if window >= 32 { u32::MAX } else { (1u32 << window) - 1 };
        2 * (self.history[node] & mask).count_ones() as usize > window
    }

    /// Returns a mutated copy and whether its structure differs from `self`.
    ///
    /// Order: table bits, then internal connections, then node addition, then
    /// removal of the last added node. Each table bit and each internal
    /// connection changes with probability `mu`; external connections never
    /// change. Addition and removal follow [`GrowthRule::DEFAULT`].
    pub fn mutate<R: Rng + ?Sized>(&self, mu: f64, rng: &mut R) -> (BooleanNetwork, bool) {
        self.mutate_with(mu, GrowthRule::DEFAULT, rng)
    }

    pub fn mutate_with<R: Rng + ?Sized>(&self, mu: f64, growth: GrowthRule, rng: &mut R) -> (BooleanNetwork, bool) {
        assert!((0.0..=1.0).contains(&mu), "mutation rate {mu} outside [0, 1]");
        let mut child = self.clone();
        let n = child.nodes.len();
        for node in &mut child.nodes {
            for i in 0..node.table.len() {
                if rng.random_bool(mu) {
                    node.table.flip(i);
                }
            }
        }
        for node in &mut child.nodes {
            for c in &mut node.connections {
                if let Connection::Internal(j) = c {
                    if rng.random_bool(mu) {
                        *j = rng.random_range(0..n);
                    }
                }
            }
        }
        let (add, remove) = match growth {
            GrowthRule::Independent => (rng.random_bool(mu), rng.random_bool(mu)),
            GrowthRule::Exclusive => {
                let u: f64 = rng.random();
                (u < mu, u >= mu && u < 2.0 * mu)
            }
        };
        if add {
            child.push_extra(rng);
        }
        if remove && child.nodes.len() > child.initial_len() {
            child.pop_extra(rng);
        }
        child.rewire();
        let changed = !networks_equal(self, &child);
        (child, changed)
    }

    /// Appends an extra node wired only from existing nodes or itself.
    pub fn push_extra<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let n = self.nodes.len() + 1;
        let arity = rng.random_range(MIN_CONNECTIONS..=MAX_CONNECTIONS);
        let connections = (0..arity).map(|_| Connection::Internal(rng.random_range(0..n))).collect();
        self.nodes.push(NodeSpec {
            kind: NodeKind::Extra,
            connections,
            table: TruthTable::random(arity, rng),
        });
        self.signals.push(rng.random_bool(0.5));
        self.history.push(0);
        self.rewire();
    }

    /// Removes the last node, rewiring any connection into it uniformly among
    /// the surviving nodes. No-op at the initial size.
    pub fn pop_extra<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.nodes.len() <= self.initial_len() {
            return false;
        }
        self.nodes.pop();
        self.signals.pop();
        self.history.pop();
        let n = self.nodes.len();
        for node in &mut self.nodes {
            for c in &mut node.connections {
                if *c == Connection::Internal(n) {
                    *c = Connection::Internal(rng.random_range(0..n));
                }
            }
        }
        self.rewire();
        true
    }

    /// Flips one truth-table entry of one node.
    pub fn flip_table_bit(&mut self, node: usize, entry: usize) {
        self.nodes[node].table.flip(entry);
        self.wiring[node].table = self.nodes[node].table.bits;
    }
}

/// Structural equality: node kinds, connections and tables. States and
/// history are ignored.
pub fn networks_equal(a: &BooleanNetwork, b: &BooleanNetwork) -> bool {
    a.num_inputs == b.num_inputs && a.num_outputs == b.num_outputs && a.nodes == b.nodes
}

fn layout_kind(index: usize, num_inputs: usize, num_outputs: usize) -> NodeKind {
    if index == 0 {
        NodeKind::Match
    } else if index <= num_outputs {
        NodeKind::Output
    } else if index <= num_outputs + num_inputs {
        NodeKind::Input
    } else {
        NodeKind::Extra
    }
}
