use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::io::SummaryRow;
use super::{ExperimentConfig, HarnessError};
use crate::agents::AgentKind;
use crate::mdp::{diameter, optimal_gain, TabularMdp};

const ENV_STREAM: u64 = 0;
const AGENT_STREAM: u64 = 1;
const GAIN_TOLERANCE: f64 = 1e-9;

/// Every power of two up to `horizon`, then `horizon` itself.
pub fn checkpoint_times(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (0..64).map(|k| 1u64 << k).take_while(|&t| t <= horizon).collect();
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub env: String,
    pub agent: String,
    pub trial: usize,
    pub seed: u64,
    /// `(t, cumulative regret after round t)` at every checkpoint.
    pub points: Vec<(u64, f64)>,
}

impl RegretCurve {
    pub fn final_regret(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }
}

/// Everything a trial needs that is shared across the experiment.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub env: String,
    pub mdp: TabularMdp,
    pub optimal_gain: f64,
    pub horizon: u64,
    pub delta: f64,
    pub base_seed: u64,
}

impl TrialSetup {
    pub fn from_config(config: &ExperimentConfig) -> Result<Self, HarnessError> {
        let mdp = config.validate()?;
        Ok(Self {
            env: config.env.clone(),
            optimal_gain: optimal_gain(&mdp, GAIN_TOLERANCE)?.gain,
            mdp,
            horizon: config.horizon,
            delta: config.delta,
            base_seed: config.seed,
        })
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOptions {
    /// Check the true model against the plausible set at every episode start.
    pub check_containment: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub curve: RegretCurve,
    pub episodes: usize,
    /// `(episodes whose plausible set contained the truth, episodes checked)`.
    pub containment: Option<(usize, usize)>,
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Simulates `setup.horizon` rounds from state 0. Regret accumulates
/// `V* - r_t` on the raw observed reward.
pub fn run_trial(
    setup: &TrialSetup,
    kind: &AgentKind,
    label: &str,
    trial: usize,
    options: TrialOptions,
) -> Result<TrialOutcome, HarnessError> {
    let seed = setup.trial_seed(trial);
    let mut env_rng = stream(seed, ENV_STREAM);
    let mut agent = kind.build(&setup.mdp, setup.delta, stream(seed, AGENT_STREAM))?;
    let checkpoints = checkpoint_times(setup.horizon);
    let mut next_checkpoint = 0;
    let mut points = Vec::with_capacity(checkpoints.len());

    let (mut contained, mut checked) = (0usize, 0usize);
    let mut seen_episodes = 0;
    let mut check = |agent: &mut dyn crate::agents::Agent| -> Result<(), HarnessError> {
        if options.check_containment && agent.episodes() > seen_episodes {
            seen_episodes = agent.episodes();
            if let Some(set) = agent.plausible_set() {
                checked += 1;
                contained += set.contains_model(&setup.mdp).map_err(crate::agents::AgentError::from)? as usize;
            }
        }
        Ok(())
    };

    let mut s = 0;
    let mut a = agent.start(s)?;
    check(agent.as_mut())?;
    let mut regret = 0.0;
    for t in 1..=setup.horizon {
        let (r, s_next) = setup.mdp.step(s, a, &mut env_rng)?;
        regret += setup.optimal_gain - r;
        if t == checkpoints[next_checkpoint] {
            points.push((t, regret));
            next_checkpoint += 1;
        }
        if t < setup.horizon {
            a = agent.step(s, a, r, s_next)?;
            check(agent.as_mut())?;
        }
        s = s_next;
    }
    Ok(TrialOutcome {
        curve: RegretCurve {
            env: setup.env.clone(),
            agent: label.to_string(),
            trial,
            seed,
            points,
        },
        episodes: agent.episodes(),
        containment: options.check_containment.then_some((contained, checked)),
    })
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub agent: String,
    pub trial: usize,
    pub seed: u64,
    /// The trial outcome, or the error that aborted it.
    pub outcome: Result<TrialOutcome, String>,
    pub wall_secs: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub optimal_gain: f64,
    pub diameter: f64,
    pub num_states: usize,
    pub num_actions: usize,
    /// Agent-major, then trial order.
    pub cells: Vec<CellResult>,
    pub wall_secs: f64,
}

impl ExperimentResult {
    pub fn curves(&self) -> impl Iterator<Item = &RegretCurve> {
        self.cells.iter().filter_map(|c| c.outcome.as_ref().ok().map(|o| &o.curve))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.cells.iter().filter(|c| c.outcome.is_err())
    }
}

#[cfg(feature = "parallel")]
fn map_cells<F>(workers: Option<usize>, jobs: Vec<(usize, usize)>, f: F) -> Result<Vec<CellResult>, HarnessError>
where
    F: Fn((usize, usize)) -> CellResult + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| jobs.into_par_iter().map(f).collect()))
}

#[cfg(not(feature = "parallel"))]
fn map_cells<F>(_workers: Option<usize>, jobs: Vec<(usize, usize)>, f: F) -> Result<Vec<CellResult>, HarnessError>
where
    F: Fn((usize, usize)) -> CellResult,
{
    Ok(jobs.into_iter().map(f).collect())
}

/// Runs every (agent, trial) cell. A failing cell is recorded, not fatal.
pub fn run_experiment(config: &ExperimentConfig, options: TrialOptions) -> Result<ExperimentResult, HarnessError> {
    let started = Instant::now();
    let setup = TrialSetup::from_config(config)?;
    let labels = config.agent_labels();
    let jobs: Vec<(usize, usize)> = (0..config.agents.len())
        .flat_map(|i| (0..config.trials).map(move |t| (i, t)))
        .collect();
    let cells = map_cells(config.workers, jobs, |(i, trial)| {
        let cell_start = Instant::now();
        let outcome = run_trial(&setup, &config.agents[i], &labels[i], trial, options).map_err(|e| e.to_string());
        CellResult {
            agent: labels[i].clone(),
            trial,
            seed: setup.trial_seed(trial),
            outcome,
            wall_secs: cell_start.elapsed().as_secs_f64(),
        }
    })?;
    Ok(ExperimentResult {
        config: config.clone(),
        optimal_gain: setup.optimal_gain,
        diameter: diameter(&setup.mdp, GAIN_TOLERANCE),
        num_states: setup.mdp.num_states(),
        num_actions: setup.mdp.num_actions(),
        cells,
        wall_secs: started.elapsed().as_secs_f64(),
    })
}

/// Mean and sample standard deviation of the successful trials per
/// `(agent, checkpoint)`; the deviation is 0 for a single trial.
pub fn summarize(result: &ExperimentResult) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for label in result.config.agent_labels() {
        let curves: Vec<&RegretCurve> = result.curves().filter(|c| c.agent == label).collect();
        let Some(first) = curves.first() else { continue };
        for (k, &(t, _)) in first.points.iter().enumerate() {
            let values: Vec<f64> = curves.iter().map(|c| c.points[k].1).collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let sd = if values.len() > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            rows.push(SummaryRow {
                env: result.config.env.clone(),
                agent: label.clone(),
                t,
                mean,
                sd,
                n_trials: values.len(),
            });
        }
    }
    rows
}
