use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::{EnvError, Environment, Outcome, MAX_PAYOFF};
use crate::SimRng;

/// Steps allowed before the agent is teletransported to a new trial.
pub const MAX_STEPS: usize = 50;

/// Neighbour offsets `(d_row, d_col)` clockwise from North. Index `a` is both
/// the percept slot and the move made by action `a` (0 = N, 1 = NE, ... 7 = NW).
pub const NEIGHBOUR_OFFSETS: [(isize, isize); 8] = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Empty,
    Obstacle,
    Food,
}

impl Cell {
    /// Two-bit sensor code: `*` = 00, `O` = 01, `F` = 11.
    pub fn code(self) -> [bool; 2] {
        match self {
            Cell::Empty => [false, false],
            Cell::Obstacle => [false, true],
            Cell::Food => [true, true],
        }
    }

    fn symbol(self) -> char {
        match self {
            Cell::Empty => '*',
            Cell::Obstacle => 'O',
            Cell::Food => 'F',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Edges wrap around.
    Toroidal,
    /// Off-grid counts as obstacle.
    Bounded,
}

impl FromStr for Topology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "toroidal" => Ok(Topology::Toroidal),
            "bounded" => Ok(Topology::Bounded),
            other => Err(format!("unknown topology `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub fn new(row: usize, col: usize) -> Self {
        Position { row, col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MazeGrid {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    topology: Topology,
}

impl MazeGrid {
    pub fn woods1() -> Self {
        include_str!("../../data/woods1.maze").parse().expect("bundled grid")
    }

    pub fn maze4() -> Self {
        include_str!("../../data/maze4.maze").parse().expect("bundled grid")
    }

    pub fn woods101() -> Self {
        include_str!("../../data/woods101.maze").parse().expect("bundled grid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn cell(&self, pos: Position) -> Cell {
        self.cells[pos.row * self.width + pos.col]
    }

    pub fn empty_cells(&self) -> Vec<Position> {
        self.positions().filter(|&p| self.cell(p) == Cell::Empty).collect()
    }

    fn positions(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.height).flat_map(move |row| (0..self.width).map(move |col| Position { row, col }))
    }

    /// The neighbour of `pos` in direction `dir`, or `None` off a bounded grid.
    pub fn neighbour(&self, pos: Position, dir: usize) -> Option<Position> {
        let (dr, dc) = NEIGHBOUR_OFFSETS[dir];
        let row = pos.row as isize + dr;
        let col = pos.col as isize + dc;
        match self.topology {
            Topology::Toroidal => Some(Position {
                row: row.rem_euclid(self.height as isize) as usize,
                col: col.rem_euclid(self.width as isize) as usize,
            }),
            Topology::Bounded => {
                let inside = (0..self.height as isize).contains(&row) && (0..self.width as isize).contains(&col);
                inside.then(|| Position { row: row as usize, col: col as usize })
            }
        }
    }

    /// The 16-bit percept: two bits per neighbour, clockwise from North.
    pub fn sense(&self, pos: Position) -> Vec<bool> {
        (0..8)
            .flat_map(|dir| self.neighbour(pos, dir).map_or(Cell::Obstacle, |p| self.cell(p)).code())
            .collect()
    }

    /// Where action `action` (0..8) takes an agent at `pos`. Blocked moves stay put.
    pub fn act(&self, pos: Position, action: usize) -> Position {
        assert!(action < 8, "maze actions are 0..8");
        match self.neighbour(pos, action) {
            Some(next) if self.cell(next) != Cell::Obstacle => next,
            _ => pos,
        }
    }

    /// Shortest number of moves to food from every cell (`None` for obstacles,
    /// food itself is 0).
    pub fn distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.cells.len()];
        let mut queue = VecDeque::new();
        for p in self.positions().filter(|&p| self.cell(p) == Cell::Food) {
            dist[p.row * self.width + p.col] = Some(0);
            queue.push_back(p);
        }
        // Moves are symmetric, so a search outward from the food is a search
        // toward it from every cell.
        while let Some(p) = queue.pop_front() {
            let d = dist[p.row * self.width + p.col].expect("queued cells have distances");
            for dir in 0..8 {
                if let Some(q) = self.neighbour(p, dir) {
                    let i = q.row * self.width + q.col;
                    if self.cells[i] == Cell::Empty && dist[i].is_none() {
                        dist[i] = Some(d + 1);
                        queue.push_back(q);
                    }
                }
            }
        }
        dist
    }

    /// Mean shortest-path length to food over all empty starting cells.
    pub fn optimal_mean_steps(&self) -> Result<f64, EnvError> {
        let dist = self.distances();
        let empty = self.empty_cells();
        let mut total = 0usize;
        for p in &empty {
            total += dist[p.row * self.width + p.col].ok_or(EnvError::Unreachable { row: p.row, col: p.col })?;
        }
        Ok(total as f64 / empty.len() as f64)
    }

    /// Actions that lead one step closer to food from `pos`.
    pub fn optimal_actions(&self, pos: Position) -> Vec<usize> {
        let dist = self.distances();
        let here = match dist[pos.row * self.width + pos.col] {
            Some(d) => d,
            None => return Vec::new(),
        };
        (0..8)
            .filter(|&a| {
                let next = self.act(pos, a);
                next != pos && dist[next.row * self.width + next.col] == Some(here.wrapping_sub(1))
            })
            .collect()
    }
}

impl FromStr for MazeGrid {
    type Err = EnvError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut topology = Topology::Bounded;
        let mut rows: Vec<Vec<Cell>> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |cause: String| EnvError::GridParse { line: i + 1, cause };
            if line.is_empty() {
                continue;
            }
            if let Some(directive) = line.strip_prefix('#') {
                if let Some(value) = directive.trim().strip_prefix("topology:") {
                    if !rows.is_empty() {
                        return Err(err("topology directive must precede the grid".into()));
                    }
                    topology = value.trim().parse().map_err(err)?;
                }
                continue;
            }
            let row = line
                .chars()
                .map(|c| match c {
                    '*' => Ok(Cell::Empty),
                    'O' => Ok(Cell::Obstacle),
                    'F' => Ok(Cell::Food),
                    other => Err(err(format!("unknown cell `{other}`"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(err(format!("row has {} cells, expected {}", row.len(), first.len())));
                }
            }
            rows.push(row);
        }
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        let cells: Vec<Cell> = rows.into_iter().flatten().collect();
        let last = text.lines().count().max(1);
        if !cells.contains(&Cell::Food) {
            return Err(EnvError::GridParse { line: last, cause: "grid has no food".into() });
        }
        if !cells.contains(&Cell::Empty) {
            return Err(EnvError::GridParse { line: last, cause: "grid has no empty cell".into() });
        }
        Ok(MazeGrid { width, height, cells, topology })
    }
}

impl fmt::Display for MazeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let topology = match self.topology {
            Topology::Toroidal => "toroidal",
            Topology::Bounded => "bounded",
        };
        writeln!(f, "#topology: {topology}")?;
        for row in self.cells.chunks(self.width) {
            let line: String = row.iter().map(|c| c.symbol()).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Multi-step maze task: the agent starts on a random empty cell and is
/// rewarded on reaching food; after [`MAX_STEPS`] moves the trial is cut short.
#[derive(Debug, Clone)]
pub struct MazeEnv {
    grid: MazeGrid,
    empty: Vec<Position>,
    position: Position,
    steps_taken: usize,
    percept: Vec<bool>,
}

impl MazeEnv {
    pub fn new(grid: MazeGrid) -> Self {
        let empty = grid.empty_cells();
        let position = empty[0];
        let percept = grid.sense(position);
        MazeEnv { grid, empty, position, steps_taken: 0, percept }
    }

    pub fn grid(&self) -> &MazeGrid {
        &self.grid
    }

    pub fn position(&self) -> Position {
        self.position
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Places the agent explicitly and starts a fresh trial from there.
    pub fn place(&mut self, pos: Position) {
        assert_eq!(self.grid.cell(pos), Cell::Empty, "agent must start on an empty cell");
        self.position = pos;
        self.steps_taken = 0;
        self.percept = self.grid.sense(pos);
    }
}

impl Environment for MazeEnv {
    fn input_len(&self) -> usize {
        16
    }

    fn num_actions(&self) -> usize {
        8
    }

    fn is_multi_step(&self) -> bool {
        true
    }

    fn begin_trial(&mut self, rng: &mut SimRng) {
        let pos = self.empty[rng.random_range(0..self.empty.len())];
        self.place(pos);
    }

    fn percept(&self) -> &[bool] {
        &self.percept
    }

    fn execute(&mut self, action: usize) -> Outcome {
        let next = self.grid.act(self.position, action);
        self.steps_taken += 1;
        if self.grid.cell(next) == Cell::Food {
            return Outcome { reward: MAX_PAYOFF, terminal: true, truncated: false };
        }
        self.position = next;
        self.percept = self.grid.sense(next);
        Outcome { reward: 0.0, terminal: false, truncated: self.steps_taken >= MAX_STEPS }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    fn code_at(percept: &[bool], slot: usize) -> [bool; 2] {
        [percept[2 * slot], percept[2 * slot + 1]]
    }

    #[test]
    fn bundled_grids_load() {
        let w1 = MazeGrid::woods1();
        assert_eq!((w1.width(), w1.height(), w1.topology()), (5, 5, Topology::Toroidal));
        assert_eq!(w1.empty_cells().len(), 16);
        let w101 = MazeGrid::woods101();
        assert_eq!((w101.width(), w101.height(), w101.topology()), (7, 5, Topology::Bounded));
        assert_eq!(w101.empty_cells().len(), 10);
        assert_eq!(MazeGrid::maze4(), w101);
    }

    #[test]
    fn enclosed_cell_senses_walls() {
        let grid: MazeGrid = "OOO\nO*O\nOFO".parse().unwrap();
        let percept = grid.sense(Position::new(1, 1));
        assert_eq!(percept.len(), 16);
        let mut expected = Vec::new();
        for slot in 0..8 {
            expected.extend(if slot == 4 { Cell::Food.code() } else { Cell::Obstacle.code() });
        }
        assert_eq!(percept, expected);

        let walled: MazeGrid = "#topology: bounded\n*F".parse().unwrap();
        let p = walled.sense(Position::new(0, 0));
        for slot in [0, 1, 3, 4, 5, 6, 7] {
            assert_eq!(code_at(&p, slot), Cell::Obstacle.code());
        }
        assert_eq!(code_at(&p, 2), Cell::Food.code());
    }

    #[test]
    fn woods1_food_appears_to_the_west() {
        let grid = MazeGrid::woods1();
        // Food is at (2, 2); (2, 3) is directly east of it.
        let percept = grid.sense(Position::new(2, 3));
        assert_eq!(code_at(&percept, 6), [true, true]);
        assert_eq!(code_at(&percept, 0), Cell::Empty.code());
    }

    #[test]
    fn woods1_wraps_vertically() {
        let grid = MazeGrid::woods1();
        // Top row (0, 0): north wraps to (4, 0), an obstacle; north-east to (4, 1), also an obstacle.
        let percept = grid.sense(Position::new(0, 0));
        assert_eq!(code_at(&percept, 0), Cell::Obstacle.code());
        assert_eq!(code_at(&percept, 1), Cell::Obstacle.code());
        // (0, 3): north wraps to (4, 3), empty; west wraps nothing.
        let percept = grid.sense(Position::new(0, 3));
        assert_eq!(code_at(&percept, 0), Cell::Empty.code());
        // Brute-force index oracle for the wrap arithmetic.
        for row in 0..5 {
            for col in 0..5 {
                for (dir, (dr, dc)) in NEIGHBOUR_OFFSETS.iter().enumerate() {
                    let expect = Position::new(
                        (row as isize + dr).rem_euclid(5) as usize,
                        (col as isize + dc).rem_euclid(5) as usize,
                    );
                    assert_eq!(grid.neighbour(Position::new(row, col), dir), Some(expect));
                }
            }
        }
    }

    #[test]
    fn percepts_are_well_formed() {
        for grid in [MazeGrid::woods1(), MazeGrid::woods101()] {
            for pos in grid.empty_cells() {
                let p = grid.sense(pos);
                assert_eq!(p.len(), 16);
                for slot in 0..8 {
                    assert_ne!(code_at(&p, slot), [true, false]);
                }
            }
        }
    }

    #[test]
    fn moves() {
        let grid = MazeGrid::woods101();
        // (1, 1): north is wall.
        assert_eq!(grid.act(Position::new(1, 1), 0), Position::new(1, 1));
        // (2, 3) -> south is food.
        assert_eq!(grid.cell(grid.act(Position::new(2, 3), 4)), Cell::Food);

        let w1 = MazeGrid::woods1();
        // West of the Woods1 food is an obstacle, so approach from the north-west.
        assert_eq!(w1.cell(w1.act(Position::new(1, 1), 3)), Cell::Food);
        let corridor: MazeGrid = "*F*".parse().unwrap();
        assert_eq!(corridor.cell(corridor.act(Position::new(0, 0), 2)), Cell::Food);

        let start = Position::new(0, 4);
        let mut pos = start;
        for _ in 0..w1.height() {
            pos = w1.act(pos, 0);
        }
        assert_eq!(pos, start);
    }

    #[test]
    fn agent_never_enters_obstacles() {
        for grid in [MazeGrid::woods1(), MazeGrid::woods101()] {
            for pos in grid.empty_cells() {
                for a in 0..8 {
                    assert_ne!(grid.cell(grid.act(pos, a)), Cell::Obstacle);
                }
            }
        }
    }

    #[test]
    fn optimal_steps() {
        // Hand-walked distances per empty cell, row by row.
        let woods1 = [2, 2, 2, 2, 2, 2, 1, 1, 1, 2, 1, 2, 1, 2, 2, 2];
        let woods101 = [3, 2, 2, 2, 3, 3, 1, 3, 4, 4];
        for (grid, hand) in [(MazeGrid::woods1(), &woods1[..]), (MazeGrid::woods101(), &woods101[..])] {
            let dist = grid.distances();
            let got: Vec<usize> = grid
                .empty_cells()
                .iter()
                .map(|p| dist[p.row * grid.width() + p.col].unwrap())
                .collect();
            assert_eq!(got, hand);
        }
        assert_eq!(MazeGrid::woods1().optimal_mean_steps().unwrap(), 1.6875);
        assert_eq!(MazeGrid::woods101().optimal_mean_steps().unwrap(), 2.7);
        let centre: MazeGrid = "***\n*F*\n***".parse().unwrap();
        assert_eq!(centre.optimal_mean_steps().unwrap(), 1.0);
    }

    #[test]
    fn unreachable_cell_is_reported() {
        let grid: MazeGrid = "*O*\nOOO\nF**".parse().unwrap();
        assert_eq!(grid.optimal_mean_steps(), Err(EnvError::Unreachable { row: 0, col: 0 }));
    }

    #[test]
    fn woods101_has_aliased_states() {
        let grid = MazeGrid::woods101();
        let mut by_percept: HashMap<Vec<bool>, Vec<Position>> = HashMap::new();
        for pos in grid.empty_cells() {
            by_percept.entry(grid.sense(pos)).or_default().push(pos);
        }
        let mut aliased = Vec::new();
        for group in by_percept.values() {
            for (i, &a) in group.iter().enumerate() {
                for &b in &group[i + 1..] {
                    let (oa, ob) = (grid.optimal_actions(a), grid.optimal_actions(b));
                    if oa.iter().all(|x| !ob.contains(x)) {
                        aliased.push((a, b));
                    }
                }
            }
        }
        assert_eq!(aliased, vec![(Position::new(1, 2), Position::new(1, 4))]);
    }

    #[test]
    fn woods1_is_markov() {
        let grid = MazeGrid::woods1();
        let mut seen = HashMap::new();
        for pos in grid.empty_cells() {
            assert!(seen.insert(grid.sense(pos), pos).is_none());
        }
    }

    #[test]
    fn teletransport_after_budget() {
        let mut env = MazeEnv::new(MazeGrid::woods101());
        env.place(Position::new(3, 1));
        let mut last = None;
        for _ in 0..MAX_STEPS {
            last = Some(env.execute(6));
        }
        let last = last.unwrap();
        assert!(last.truncated && !last.terminal);
        assert_eq!(env.steps_taken(), MAX_STEPS);
        assert_eq!(env.position(), Position::new(3, 1));
    }

    #[test]
    fn food_ends_trial() {
        let mut env = MazeEnv::new(MazeGrid::woods101());
        env.place(Position::new(2, 3));
        let out = env.execute(4);
        assert!(out.terminal);
        assert_eq!(out.reward, 1000.0);
    }

    #[test]
    fn grid_parse_errors() {
        assert!(matches!("**\n*".parse::<MazeGrid>(), Err(EnvError::GridParse { line: 2, .. })));
        assert!(matches!("*x".parse::<MazeGrid>(), Err(EnvError::GridParse { line: 1, .. })));
        assert!("***".parse::<MazeGrid>().is_err());
        assert!("#topology: spherical\n*F".parse::<MazeGrid>().is_err());
        let g = MazeGrid::woods1();
        assert_eq!(g.to_string().parse::<MazeGrid>().unwrap(), g);
    }
}
