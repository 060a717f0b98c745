//! Plain-text network files.
//!
//! ```text
//! nodes=3 inputs=1 outputs=1
//! 0 M 0110 1,2
//! 1 O 10 2
//! 2 I 01 in0
//! ```

use std::fmt::Write as _;

use super::{BooleanNetwork, Connection, NodeKind, NodeSpec, ParseErrorKind, RbnError, TruthTable, MAX_CONNECTIONS, MIN_CONNECTIONS};

pub fn serialize_network(net: &BooleanNetwork) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nodes={} inputs={} outputs={}", net.len(), net.num_inputs(), net.num_outputs());
    for (index, node) in net.nodes().iter().enumerate() {
        let connections: Vec<String> = node.connections().iter().map(Connection::to_string).collect();
        let _ = writeln!(out, "{index} {} {} {}", node.kind(), node.table(), connections.join(","));
    }
    out
}

pub fn parse_network(text: &str) -> Result<BooleanNetwork, RbnError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(RbnError::Parse { line: 1, kind: ParseErrorKind::BadHeader })?;
    let err = |line: usize, kind: ParseErrorKind| RbnError::Parse { line, kind };
    let (declared, num_inputs, num_outputs) =
        parse_header(header).ok_or_else(|| err(header_line, ParseErrorKind::BadHeader))?;
    if num_inputs == 0 || num_outputs == 0 || declared < num_inputs + num_outputs + 1 {
        return Err(err(header_line, ParseErrorKind::BadHeader));
    }

    let mut nodes = Vec::with_capacity(declared);
    for (line, text) in lines {
        let index = nodes.len();
        if index >= declared {
            return Err(err(line, ParseErrorKind::NodeCount { declared, found: index + 1 }));
        }
        nodes.push(parse_node(text, index, declared, num_inputs, num_outputs).map_err(|kind| err(line, kind))?);
    }
    if nodes.len() != declared {
        let last = text.lines().count().max(1);
        return Err(err(last, ParseErrorKind::NodeCount { declared, found: nodes.len() }));
    }
    BooleanNetwork::from_nodes(num_inputs, num_outputs, nodes)
}

fn parse_header(header: &str) -> Option<(usize, usize, usize)> {
    let mut fields = header.split_whitespace();
    let mut get = |key: &str| -> Option<usize> {
        let (k, v) = fields.next()?.split_once('=')?;
        (k == key).then_some(())?;
        v.parse().ok()
    };
    let parsed = (get("nodes")?, get("inputs")?, get("outputs")?);
    fields.next().is_none().then_some(parsed)
}

fn parse_node(
    text: &str,
    index: usize,
    declared: usize,
    num_inputs: usize,
    num_outputs: usize,
) -> Result<NodeSpec, ParseErrorKind> {
    let mut fields = text.split_whitespace();
    let (idx, kind, table) = match (fields.next(), fields.next(), fields.next()) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(ParseErrorKind::BadLine),
    };
    // Connections may be written "3,1,5" or "3, 1, 5".
    let conns: String = fields.collect();
    if conns.is_empty() {
        return Err(ParseErrorKind::BadLine);
    }
    if idx.parse::<usize>().ok() != Some(index) {
        return Err(ParseErrorKind::BadIndex { expected: index, found: idx.to_string() });
    }
    let kind = NodeKind::from_symbol(kind).ok_or_else(|| ParseErrorKind::BadKind(kind.to_string()))?;
    let expected = super::layout_kind(index, num_inputs, num_outputs);
    if kind != expected {
        return Err(ParseErrorKind::WrongKind { expected, found: kind });
    }

    let entries = table
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(ParseErrorKind::BadBit(other)),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let connections = conns
        .split(',')
        .map(|c| parse_connection(c, declared, num_inputs))
        .collect::<Result<Vec<_>, _>>()?;
    let arity = connections.len();
    if !(MIN_CONNECTIONS..=MAX_CONNECTIONS).contains(&arity) {
        return Err(ParseErrorKind::Arity(arity));
    }
    if entries.len() != 1 << arity {
        return Err(ParseErrorKind::TableLength { connections: arity, expected: 1 << arity, found: entries.len() });
    }
    let externals: Vec<usize> = connections
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Connection::External(_)))
        .map(|(pos, _)| pos)
        .collect();
    let placed_ok = match kind {
        NodeKind::Input => externals == [0],
        _ => externals.is_empty(),
    };
    if !placed_ok {
        return Err(ParseErrorKind::MisplacedInput);
    }
    let table = TruthTable::new(arity, &entries).map_err(|_| ParseErrorKind::Arity(arity))?;
    NodeSpec::new(kind, connections, table).map_err(|_| ParseErrorKind::MisplacedInput)
}

fn parse_connection(text: &str, declared: usize, num_inputs: usize) -> Result<Connection, ParseErrorKind> {
    let bad = || ParseErrorKind::BadConnection(text.to_string());
    if let Some(locus) = text.strip_prefix("in") {
        let locus: usize = locus.parse().map_err(|_| bad())?;
        if locus >= num_inputs {
            return Err(ParseErrorKind::OutOfRange { index: locus, limit: num_inputs });
        }
        Ok(Connection::External(locus))
    } else {
        let node: usize = text.parse().map_err(|_| bad())?;
        if node >= declared {
            return Err(ParseErrorKind::OutOfRange { index: node, limit: declared });
        }
        Ok(Connection::Internal(node))
    }
}
