use std::path::PathBuf;
use std::process::ExitCode;

use bucrl_core::agents::AgentKind;
use bucrl_core::harness::{
    replay, run_experiment, summarize, theoretical_bound, write_outputs, ExperimentConfig, HarnessError, TrialOptions,
};
use bucrl_core::mdp::{diameter, make_environment, optimal_gain, EnvParams, EnvSpec, ENVIRONMENT_NAMES};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bucrl", version, about = "Tabular average-reward RL experiments with Bayesian quantile optimism")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write per-trial CSV, summary CSV and manifest.
    Run(RunArgs),
    /// List the built-in environments, or describe one.
    Envs {
        /// Environment to describe.
        name: Option<String>,
        /// Print the environment as a spec file instead of a description.
        #[arg(long, requires = "name")]
        spec: bool,
        /// Spec file for the `custom` environment.
        #[arg(long)]
        spec_file: Option<String>,
    },
    /// Evaluate the theoretical regret bound.
    Bound(BoundArgs),
    /// Re-run one persisted trial and compare it bit-wise with the stored curve.
    Replay {
        /// Manifest written by `run` (`<out>.manifest.json`).
        manifest: PathBuf,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        trial: Option<usize>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (TOML); flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    /// Comma-separated agent names: bucrl, ucrl2, ucrlv, tsde, optimal.
    #[arg(long, value_delimiter = ',')]
    agents: Option<Vec<String>>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Spec file for the `custom` environment.
    #[arg(long)]
    spec_file: Option<String>,
}

#[derive(Args)]
struct BoundArgs {
    /// Take S, A and D from a built-in environment.
    #[arg(long)]
    env: Option<String>,
    #[arg(long, required_unless_present = "env")]
    states: Option<usize>,
    #[arg(long, required_unless_present = "env")]
    actions: Option<usize>,
    #[arg(long, required_unless_present = "env")]
    diameter: Option<f64>,
    #[arg(long, default_value_t = 1 << 18)]
    horizon: u64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(m) => Failure::Usage(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn config_error(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn build_config(args: RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(
            args.env.clone().ok_or_else(|| config_error("--env or --config is required"))?,
            Vec::new(),
        ),
    };
    if let Some(env) = args.env {
        config.env = env;
    }
    if let Some(names) = args.agents {
        config.agents = names
            .iter()
            .map(|n| n.parse::<AgentKind>())
            .collect::<Result<_, _>>()
            .map_err(config_error)?;
    }
    if config.agents.is_empty() {
        config.agents = vec![AgentKind::Bucrl { delta: None }];
    }
    config.horizon = args.horizon.unwrap_or(config.horizon);
    config.trials = args.trials.unwrap_or(config.trials);
    config.delta = args.delta.unwrap_or(config.delta);
    config.seed = args.seed.unwrap_or(config.seed);
    config.out = args.out.or(config.out).or_else(|| Some(PathBuf::from("results.csv")));
    config.workers = args.workers.or(config.workers);
    if args.spec_file.is_some() {
        config.env_params.spec_file = args.spec_file;
    }
    config.validate()?;
    Ok(config)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let config = build_config(args)?;
    let result = run_experiment(&config, TrialOptions::default())?;
    let out = config.out.clone().expect("set by build_config");
    let [csv, summary, manifest] = write_outputs(&result, &out)?;
    let horizon = config.horizon;
    for row in summarize(&result).iter().filter(|r| r.t == horizon) {
        println!(
            "{} {} T={} mean_regret={:.3} sd={:.3} trials={}",
            row.env, row.agent, row.t, row.mean, row.sd, row.n_trials
        );
    }
    println!("wrote {} {} {}", csv.display(), summary.display(), manifest.display());
    let failed: Vec<String> = result.failures().map(|c| format!("{}#{}", c.agent, c.trial)).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(format!("failed cells: {}", failed.join(" "))))
    }
}

fn cmd_envs(name: Option<String>, spec: bool, spec_file: Option<String>) -> Result<(), Failure> {
    let params = EnvParams {
        spec_file,
        ..Default::default()
    };
    let names: Vec<String> = match name {
        Some(n) => vec![n],
        None => ENVIRONMENT_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    for n in &names {
        let mdp = make_environment(n, &params).map_err(config_error)?;
        if spec {
            print!("{}", EnvSpec::from_mdp(&mdp).to_toml());
            continue;
        }
        let gain = optimal_gain(&mdp, 1e-9).map_err(|e| Failure::Runtime(e.to_string()))?;
        println!(
            "{n} states={} actions={} optimal_gain={:.6} diameter={:.4}",
            mdp.num_states(),
            mdp.num_actions(),
            gain.gain,
            diameter(&mdp, 1e-9)
        );
    }
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<(), Failure> {
    let (s, a, d) = match &args.env {
        Some(env) => {
            let mdp = make_environment(env, &EnvParams::default()).map_err(config_error)?;
            (
                args.states.unwrap_or(mdp.num_states()),
                args.actions.unwrap_or(mdp.num_actions()),
                args.diameter.unwrap_or_else(|| diameter(&mdp, 1e-9)),
            )
        }
        None => (args.states.unwrap(), args.actions.unwrap(), args.diameter.unwrap()),
    };
    let bound = theoretical_bound(s, a, d, args.horizon, args.delta)?;
    println!("{bound:.10e}");
    Ok(())
}

fn cmd_replay(manifest: PathBuf, agent: Option<String>, trial: Option<usize>) -> Result<(), Failure> {
    let report = replay(&manifest, agent.as_deref(), trial)?;
    if report.is_exact() {
        println!("replay {} trial {}: {} checkpoints identical", report.agent, report.trial, report.checkpoints);
        Ok(())
    } else {
        Err(Failure::Runtime(format!(
            "replay {} trial {}: {} of {} checkpoints differ (max |diff| {:e})",
            report.agent, report.trial, report.mismatches, report.checkpoints, report.max_abs_diff
        )))
    }
}

fn emit(kind: &str, message: &str) {
    let line = serde_json::json!({ "error": kind, "message": message });
    eprintln!("{line}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            emit("usage", first);
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Envs { name, spec, spec_file } => cmd_envs(name, spec, spec_file),
        Command::Bound(args) => cmd_bound(args),
        Command::Replay { manifest, agent, trial } => cmd_replay(manifest, agent, trial),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            emit("config", &m);
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            emit("runtime", &m);
            ExitCode::from(1)
        }
    }
}
