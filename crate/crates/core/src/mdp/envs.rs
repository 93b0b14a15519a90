//! Benchmark environments and the human-readable environment spec file.
//!
//! Action convention for the chain environments: action 0 moves left
//! (RiverSwim "left", GameOfSkill "retreat"), action 1 moves right.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{MdpError, RewardKind, TabularMdp};

pub const ENVIRONMENT_NAMES: [&str; 4] = ["bandits", "riverswim", "gameofskill-v1", "gameofskill-v2"];

const DEFAULT_ARMS: [f64; 6] = [0.71, 0.74, 0.77, 0.80, 0.83, 0.86];

/// Overrides for the built-in environments. Unset fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvParams {
    /// Chain length for riverswim and the gameofskill variants.
    pub states: Option<usize>,
    /// Arm means for bandits.
    pub arm_means: Option<Vec<f64>>,
    pub rewards: Option<RewardKind>,
    /// Reward mean for moving left in the first state (riverswim, gameofskill).
    pub small_reward: Option<f64>,
    /// Reward mean for moving right in the last state (riverswim, gameofskill).
    pub large_reward: Option<f64>,
    /// RiverSwim "right" dynamics in interior states: (back, stay, advance).
    pub river_interior: Option<[f64; 3]>,
    /// RiverSwim "right" in the first state: (stay, advance).
    pub river_start: Option<[f64; 2]>,
    /// RiverSwim "right" in the last state: (back, stay).
    pub river_end: Option<[f64; 2]>,
    /// Environment spec file, required for the `custom` environment.
    pub spec_file: Option<String>,
}

/// Serialized form of an arbitrary tabular MDP.
///
/// ```toml
/// states = 2
/// actions = 1
/// rewards = "bernoulli"
/// reward_mean = [[0.2], [0.9]]
/// transition = [[[0.5, 0.5]], [[1.0, 0.0]]]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    pub states: usize,
    pub actions: usize,
    #[serde(default)]
    pub rewards: RewardKind,
    pub reward_mean: Vec<Vec<f64>>,
    pub transition: Vec<Vec<Vec<f64>>>,
}

impl EnvSpec {
    pub fn from_mdp(mdp: &TabularMdp) -> Self {
        let (s_n, a_n) = (mdp.num_states(), mdp.num_actions());
        EnvSpec {
            states: s_n,
            actions: a_n,
            rewards: mdp.reward_kind(),
            reward_mean: (0..s_n).map(|s| (0..a_n).map(|a| mdp.reward_mean(s, a)).collect()).collect(),
            transition: (0..s_n)
                .map(|s| (0..a_n).map(|a| mdp.transition_row(s, a).to_vec()).collect())
                .collect(),
        }
    }

    pub fn into_mdp(self) -> Result<TabularMdp, MdpError> {
        if self.reward_mean.len() != self.states || self.reward_mean.iter().any(|r| r.len() != self.actions) {
            return Err(MdpError::Invalid(format!(
                "reward_mean must be {} x {}",
                self.states, self.actions
            )));
        }
        TabularMdp::new(self.reward_mean, self.transition, self.rewards)
    }

    pub fn parse(text: &str) -> Result<Self, MdpError> {
        toml::from_str(text).map_err(|e| MdpError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("environment spec is always serializable")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MdpError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn check_prob(name: &str, v: f64) -> Result<f64, MdpError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(MdpError::Invalid(format!("{name} = {v} outside [0, 1]")))
    }
}

fn chain_len(params: &EnvParams, default: usize) -> Result<usize, MdpError> {
    let n = params.states.unwrap_or(default);
    if n < 2 {
        return Err(MdpError::Invalid(format!("chain needs at least 2 states, got {n}")));
    }
    Ok(n)
}

fn bandits(params: &EnvParams) -> Result<TabularMdp, MdpError> {
    let means = params.arm_means.clone().unwrap_or_else(|| DEFAULT_ARMS.to_vec());
    if means.is_empty() {
        return Err(MdpError::Invalid("bandit needs at least one arm".into()));
    }
    let k = means.len();
    TabularMdp::new(vec![means], vec![vec![vec![1.0]; k]], params.rewards.unwrap_or_default())
}

fn riverswim(params: &EnvParams) -> Result<TabularMdp, MdpError> {
    let n = chain_len(params, 6)?;
    let small = check_prob("small_reward", params.small_reward.unwrap_or(0.005))?;
    let large = check_prob("large_reward", params.large_reward.unwrap_or(1.0))?;
    let [back, stay, advance] = params.river_interior.unwrap_or([0.05, 0.6, 0.35]);
    let [start_stay, start_advance] = params.river_start.unwrap_or([0.4, 0.6]);
    let [end_back, end_stay] = params.river_end.unwrap_or([0.4, 0.6]);

    let mut rewards = vec![vec![0.0; 2]; n];
    let mut trans = vec![vec![vec![0.0; n]; 2]; n];
    rewards[0][0] = small;
    rewards[n - 1][1] = large;
    for s in 0..n {
        trans[s][0][s.saturating_sub(1)] = 1.0;
        let right = &mut trans[s][1];
        if s == 0 {
            right[0] = start_stay;
            right[1] = start_advance;
        } else if s == n - 1 {
            right[s - 1] = end_back;
            right[s] = end_stay;
        } else {
            right[s - 1] = back;
            right[s] = stay;
            right[s + 1] = advance;
        }
    }
    TabularMdp::new(rewards, trans, params.rewards.unwrap_or_default())
}

fn game_of_skill(params: &EnvParams, reset_on_retreat: bool) -> Result<TabularMdp, MdpError> {
    let n = chain_len(params, 20)?;
    let small = check_prob("small_reward", params.small_reward.unwrap_or(0.1))?;
    let large = check_prob("large_reward", params.large_reward.unwrap_or(1.0))?;
    let mut rewards = vec![vec![0.0; 2]; n];
    let mut trans = vec![vec![vec![0.0; n]; 2]; n];
    rewards[0][0] = small;
    rewards[n - 1][1] = large;
    for s in 0..n {
        let back = if reset_on_retreat { 0 } else { s.saturating_sub(1) };
        trans[s][0][back] = 1.0;
        trans[s][1][(s + 1).min(n - 1)] = 1.0;
    }
    TabularMdp::new(rewards, trans, params.rewards.unwrap_or_default())
}

/// Builds a named environment. `custom` loads `params.spec_file`.
pub fn make_environment(name: &str, params: &EnvParams) -> Result<TabularMdp, MdpError> {
    match name {
        "bandits" => bandits(params),
        "riverswim" => riverswim(params),
        "gameofskill-v1" => game_of_skill(params, false),
        "gameofskill-v2" => game_of_skill(params, true),
        "custom" => {
            let path = params
                .spec_file
                .as_deref()
                .ok_or_else(|| MdpError::Invalid("custom environment needs spec_file".into()))?;
            let mdp = EnvSpec::load(path)?.into_mdp()?;
            Ok(match params.rewards {
                Some(kind) => mdp.with_reward_kind(kind),
                None => mdp,
            })
        }
        other => Err(MdpError::UnknownEnvironment(other.to_string())),
    }
}
