use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::HarnessError;
use crate::envs::{Environment, MazeEnv, MazeGrid, MultiplexerTask, MuxEnv};
use crate::xcs::XcsParams;

/// Every key accepted in a config file; each is also a `--<key>` CLI flag.
pub const CONFIG_KEYS: &[&str] = &[
    "env",
    "seed",
    "runs",
    "trials",
    "metrics_window",
    "out",
    "update",
    "reset",
    "inputs",
    "outputs",
    "population_size",
    "beta",
    "nu",
    "theta_ga",
    "epsilon0",
    "alpha",
    "gamma",
    "theta_del",
    "delta",
    "theta_mna",
    "p_explore",
    "cycles",
    "window",
    "mu_min",
    "init_prediction",
    "init_error",
    "init_fitness",
    "fitness_reduction",
    "cover_attempts",
];

/// Which task to learn.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvSpec {
    Mux(MultiplexerTask),
    Maze { name: String, grid: MazeGrid },
}

impl EnvSpec {
    /// `mux6`, `mux11`, `mux<l>` for any valid length, `woods1`, `maze4`,
    /// `woods101`, or a path to a grid file.
    pub fn parse(id: &str) -> Result<Self, HarnessError> {
        match id {
            "woods1" => return Ok(EnvSpec::Maze { name: id.into(), grid: MazeGrid::woods1() }),
            "maze4" => return Ok(EnvSpec::Maze { name: id.into(), grid: MazeGrid::maze4() }),
            "woods101" => return Ok(EnvSpec::Maze { name: id.into(), grid: MazeGrid::woods101() }),
            _ => {}
        }
        if let Some(len) = id.strip_prefix("mux").and_then(|l| l.parse::<usize>().ok()) {
            return MultiplexerTask::with_length(len).map(EnvSpec::Mux).ok_or_else(|| HarnessError::BadValue {
                key: "env".into(),
                value: id.into(),
                cause: "multiplexer length must be x + 2^x".into(),
            });
        }
        let path = Path::new(id);
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
        let grid: MazeGrid = text.parse()?;
        grid.optimal_mean_steps()?;
        Ok(EnvSpec::Maze { name: id.into(), grid })
    }

    pub fn build(&self) -> Box<dyn Environment> {
        match self {
            EnvSpec::Mux(task) => Box::new(MuxEnv::new(*task)),
            EnvSpec::Maze { grid, .. } => Box::new(MazeEnv::new(grid.clone())),
        }
    }

    pub fn num_inputs(&self) -> usize {
        match self {
            EnvSpec::Mux(task) => task.len(),
            EnvSpec::Maze { .. } => 16,
        }
    }

    pub fn num_outputs(&self) -> usize {
        match self {
            EnvSpec::Mux(_) => 1,
            EnvSpec::Maze { .. } => 3,
        }
    }

    pub fn is_multi_step(&self) -> bool {
        matches!(self, EnvSpec::Maze { .. })
    }
}

impl fmt::Display for EnvSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvSpec::Mux(task) => write!(f, "mux{}", task.len()),
            EnvSpec::Maze { name, .. } => f.write_str(name),
        }
    }
}

/// Full description of an experiment.
///
/// `trials` counts exploit trials; each is preceded by one explore trial, and
/// one metrics row is recorded per exploit trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub env: EnvSpec,
    pub params: XcsParams,
    pub trials: usize,
    pub runs: usize,
    pub seed: u64,
    pub metrics_window: usize,
    pub out: Option<PathBuf>,
    /// Input and output widths stated in the config, checked against `env`.
    declared_io: (Option<usize>, Option<usize>),
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            env: EnvSpec::Mux(MultiplexerTask::new(2)),
            params: XcsParams::mux6(),
            trials: 50_000,
            runs: 10,
            seed: 0,
            metrics_window: 50,
            out: None,
            declared_io: (None, None),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.into(), source })?;
        text.parse()
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let p = &mut self.params;
        match key {
            "env" => {
                self.env = EnvSpec::parse(value)?;
                self.declared_io = (None, None);
            }
            "seed" => self.seed = parse(key, value)?,
            "runs" => self.runs = parse(key, value)?,
            "trials" => self.trials = parse(key, value)?,
            "metrics_window" => self.metrics_window = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "update" => p.update_mode = parse(key, value)?,
            "reset" => p.reset_policy = parse(key, value)?,
            "inputs" => self.declared_io.0 = Some(parse(key, value)?),
            "outputs" => self.declared_io.1 = Some(parse(key, value)?),
            "population_size" => p.population_size = parse(key, value)?,
            "beta" => p.beta = parse(key, value)?,
            "nu" => p.nu = parse(key, value)?,
            "theta_ga" => p.theta_ga = parse(key, value)?,
            "epsilon0" => p.epsilon0 = parse(key, value)?,
            "alpha" => p.alpha = parse(key, value)?,
            "gamma" => p.gamma = parse(key, value)?,
            "theta_del" => p.theta_del = parse(key, value)?,
            "delta" => p.delta = parse(key, value)?,
            "theta_mna" => p.theta_mna = if value == "auto" { None } else { Some(parse(key, value)?) },
            "p_explore" => p.p_explore = parse(key, value)?,
            "cycles" => p.cycles = parse(key, value)?,
            "window" => p.window = parse(key, value)?,
            "mu_min" => p.mu_min = parse(key, value)?,
            "init_prediction" => p.init_prediction = parse(key, value)?,
            "init_error" => p.init_error = parse(key, value)?,
            "init_fitness" => p.init_fitness = parse(key, value)?,
            "fitness_reduction" => p.fitness_reduction = parse(key, value)?,
            "cover_attempts" => p.cover_attempts = parse(key, value)?,
            other => return Err(HarnessError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Copies the environment's widths into the parameters and checks
    /// everything before any run starts.
    pub fn validate(&mut self) -> Result<(), HarnessError> {
        let (inputs, outputs) = (self.env.num_inputs(), self.env.num_outputs());
        if self.declared_io.0.is_some_and(|i| i != inputs) || self.declared_io.1.is_some_and(|o| o != outputs) {
            return Err(HarnessError::InvalidConfig(format!(
                "{} needs inputs={inputs} outputs={outputs}",
                self.env
            )));
        }
        self.params.num_inputs = inputs;
        self.params.num_outputs = outputs;
        self.params.validate()?;
        if self.runs == 0 {
            return Err(HarnessError::InvalidConfig("runs must be at least 1".into()));
        }
        if self.metrics_window == 0 {
            return Err(HarnessError::InvalidConfig("metrics_window must be at least 1".into()));
        }
        if self.trials < self.metrics_window {
            return Err(HarnessError::InvalidConfig(format!(
                "trials ({}) must be at least metrics_window ({})",
                self.trials, self.metrics_window
            )));
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = HarnessError;

    /// Reads `key = value` lines onto the defaults; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut config = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::ConfigSyntax {
                line: i + 1,
                cause: format!("expected `key = value`, got `{line}`"),
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| HarnessError::BadValue { key: key.into(), value: value.into(), cause: e.to_string() })
}
