use std::path::PathBuf;
use std::process::ExitCode;

use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};
use rand::SeedableRng;

use rbn_xcs::harness::{analyze_rule, run_experiment, write_outputs, ExperimentConfig, HarnessError, CONFIG_KEYS};
use rbn_xcs::rbn::{parse_network, RunSpec, UpdateMode};
use rbn_xcs::SimRng;

fn cli() -> Command {
    let mut run = Command::new("run")
        .about("Run seeded learning experiments and write learning curves as CSV")
        .arg(Arg::new("config").long("config").value_name("FILE").value_parser(value_parser!(PathBuf)))
        .arg(
            Arg::new("serial")
                .long("serial")
                .action(ArgAction::SetTrue)
                .help("Execute runs one after another (output is identical)"),
        );
    for key in CONFIG_KEYS {
        run = run.arg(Arg::new(*key).long(*key).value_name("VALUE").help(format!("Override `{key}`")));
    }

    let analyze = Command::new("analyze-rule")
        .about("Tabulate match frequency and actions of one network over every input")
        .arg(Arg::new("network").long("network").required(true).value_parser(value_parser!(PathBuf)))
        .arg(Arg::new("inputs").long("inputs").required(true).value_parser(value_parser!(usize)))
        .arg(Arg::new("reps").long("reps").default_value("20").value_parser(value_parser!(usize)))
        .arg(Arg::new("update").long("update").default_value("async").value_parser(value_parser!(UpdateMode)))
        .arg(Arg::new("cycles").long("cycles").default_value("25").value_parser(value_parser!(usize)))
        .arg(Arg::new("window").long("window").default_value("3").value_parser(value_parser!(usize)))
        .arg(Arg::new("seed").long("seed").default_value("0").value_parser(value_parser!(u64)));

    Command::new("rbn-xcs")
        .about("XCS with random Boolean network rules")
        .subcommand_required(true)
        .subcommand(run)
        .subcommand(analyze)
}

fn main() -> ExitCode {
    let matches = cli().get_matches();
    let result = match matches.subcommand() {
        Some(("run", m)) => cmd_run(m),
        Some(("analyze-rule", m)) => cmd_analyze(m),
        _ => unreachable!("subcommand is required"),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(m: &ArgMatches) -> Result<(), HarnessError> {
    let mut config = match m.get_one::<PathBuf>("config") {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    for key in CONFIG_KEYS {
        if let Some(value) = m.get_one::<String>(key) {
            config.set(key, value)?;
        }
    }
    let result = run_experiment(&config, !m.get_flag("serial"))?;
    if let Some(dir) = &config.out {
        write_outputs(&result, dir)?;
    }
    let last = result.mean.last().expect("trials >= 1");
    println!(
        "{} runs={} trials={} final: performance={:.4} error={:.4} macros={:.1} mu={:.5} nodes={:.2} connections={:.3}",
        config.env, config.runs, config.trials, last.performance, last.error, last.macros, last.mu, last.nodes, last.connections
    );
    Ok(())
}

fn cmd_analyze(m: &ArgMatches) -> Result<(), HarnessError> {
    let path = m.get_one::<PathBuf>("network").expect("required");
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    let network = parse_network(&text)?;
    let inputs = *m.get_one::<usize>("inputs").expect("required");
    if network.num_inputs() != inputs {
        return Err(HarnessError::InvalidConfig(format!(
            "network has {} inputs, --inputs says {inputs}",
            network.num_inputs()
        )));
    }
    let spec = RunSpec::new(
        *m.get_one::<usize>("cycles").expect("default"),
        *m.get_one::<usize>("window").expect("default"),
        *m.get_one::<UpdateMode>("update").expect("default"),
    )?;
    let mut rng = SimRng::seed_from_u64(*m.get_one::<u64>("seed").expect("default"));
    let analysis = analyze_rule(&network, *m.get_one::<usize>("reps").expect("default"), &spec, &mut rng)?;
    print!("{analysis}");
    Ok(())
}
