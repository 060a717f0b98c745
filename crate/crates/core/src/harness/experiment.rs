use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rayon::prelude::*;

use super::{ExperimentConfig, HarnessError};
use crate::xcs::{Population, TrialKind, Xcs};
use crate::SimRng;

pub const CSV_HEADER: &str = "trial,performance,error,macros,mu,nodes,connections";

/// One learning-curve row, recorded at an exploit trial.
///
/// `performance` is the fraction correct (single-step) or the steps to food
/// (multi-step); it and `error` are moving averages. The remaining columns are
/// population snapshots, weighted by numerosity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    /// 1-based exploit trial index.
    pub trial: usize,
    pub performance: f64,
    pub error: f64,
    pub macros: f64,
    pub mu: f64,
    pub nodes: f64,
    /// Mean connections per node.
    pub connections: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub runs: Vec<Vec<MetricsRecord>>,
    /// Row-wise mean of `runs`.
    pub mean: Vec<MetricsRecord>,
}

/// Trailing mean over `window` entries; the first `window - 1` outputs average
/// the whole prefix seen so far.
pub fn moving_average(series: &[f64], window: usize) -> Result<Vec<f64>, HarnessError> {
    if series.is_empty() {
        return Err(HarnessError::InvalidConfig("moving average of an empty series".into()));
    }
    if window == 0 {
        return Err(HarnessError::InvalidConfig("moving average window must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (i, &x) in series.iter().enumerate() {
        sum += x;
        if i >= window {
            sum -= series[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    Ok(out)
}

/// Random stream of run `run`: the master generator seeded from `seed`,
/// advanced by `run` jumps of 2^128 steps.
pub fn run_seed(seed: u64, run: usize) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    for _ in 0..run {
        rng.jump();
    }
    rng
}

/// Executes every run of `config`. Runs are independent, so `parallel`
/// scheduling produces exactly the serial result.
pub fn run_experiment(config: &ExperimentConfig, parallel: bool) -> Result<ExperimentResult, HarnessError> {
    let mut config = config.clone();
    config.validate()?;
    let runs: Vec<Vec<MetricsRecord>> = if parallel {
        (0..config.runs).into_par_iter().map(|r| run_one(&config, r)).collect::<Result<_, _>>()?
    } else {
        (0..config.runs).map(|r| run_one(&config, r)).collect::<Result<_, _>>()?
    };
    let mean = mean_curve(&runs);
    Ok(ExperimentResult { runs, mean })
}

fn run_one(config: &ExperimentConfig, run: usize) -> Result<Vec<MetricsRecord>, HarnessError> {
    let mut rng = run_seed(config.seed, run);
    let mut xcs = Xcs::new(config.params.clone())?;
    let mut env = config.env.build();
    let multi_step = config.env.is_multi_step();

    let mut performance = Vec::with_capacity(config.trials);
    let mut error = Vec::with_capacity(config.trials);
    let mut rows = Vec::with_capacity(config.trials);
    for trial in 1..=config.trials {
        xcs.trial(env.as_mut(), TrialKind::Explore, &mut rng)?;
        let result = xcs.trial(env.as_mut(), TrialKind::Exploit, &mut rng)?;
        performance.push(if multi_step { result.steps as f64 } else { f64::from(u8::from(result.correct)) });
        error.push(result.system_error);
        rows.push(snapshot(trial, &xcs.population));
    }

    let performance = moving_average(&performance, config.metrics_window)?;
    let error = moving_average(&error, config.metrics_window)?;
    for ((row, p), e) in rows.iter_mut().zip(performance).zip(error) {
        row.performance = p;
        row.error = e;
    }
    Ok(rows)
}

fn snapshot(trial: usize, pop: &Population) -> MetricsRecord {
    let micro = pop.micro_count().max(1) as f64;
    let (mut mu, mut nodes, mut connections) = (0.0, 0.0, 0.0);
    for cl in pop.iter() {
        let n = f64::from(cl.numerosity);
        mu += cl.mutation_rate * n;
        nodes += cl.network.len() as f64 * n;
        connections += cl.network.total_connections() as f64 * n;
    }
    MetricsRecord {
        trial,
        performance: 0.0,
        error: 0.0,
        macros: pop.len() as f64,
        mu: mu / micro,
        nodes: nodes / micro,
        connections: if nodes > 0.0 { connections / nodes } else { 0.0 },
    }
}

fn mean_curve(runs: &[Vec<MetricsRecord>]) -> Vec<MetricsRecord> {
    let k = runs.len() as f64;
    (0..runs[0].len())
        .map(|i| {
            let mut m = runs[0][i];
            let sum = |f: fn(&MetricsRecord) -> f64| runs.iter().map(|r| f(&r[i])).sum::<f64>() / k;
            m.performance = sum(|r| r.performance);
            m.error = sum(|r| r.error);
            m.macros = sum(|r| r.macros);
            m.mu = sum(|r| r.mu);
            m.nodes = sum(|r| r.nodes);
            m.connections = sum(|r| r.connections);
            m
        })
        .collect()
}

/// Writes `records` as CSV with LF line endings.
pub fn write_csv(path: &Path, records: &[MetricsRecord]) -> Result<(), HarnessError> {
    let mut text = String::with_capacity(64 * (records.len() + 1));
    text.push_str(CSV_HEADER);
    text.push('\n');
    for r in records {
        writeln!(
            text,
            "{},{:.6},{:.6},{:.3},{:.6},{:.4},{:.4}",
            r.trial, r.performance, r.error, r.macros, r.mu, r.nodes, r.connections
        )
        .expect("writing to a String cannot fail");
    }
    fs::write(path, text).map_err(|source| HarnessError::Io { path: path.into(), source })
}

/// `run_<r>.csv` for every run plus `mean.csv`, all in `dir`.
pub fn write_outputs(result: &ExperimentResult, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.into(), source })?;
    for (r, run) in result.runs.iter().enumerate() {
        write_csv(&dir.join(format!("run_{r}.csv")), run)?;
    }
    write_csv(&dir.join("mean.csv"), &result.mean)
}
