use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::agents::AgentKind;
use crate::mdp::{make_environment, EnvParams, TabularMdp};

pub const DEFAULT_HORIZON: u64 = 1 << 18;
pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_DELTA: f64 = 0.05;

/// An experiment: one environment, an agent roster, and the trial protocol.
///
/// ```toml
/// env = "riverswim"
/// horizon = 262144
/// trials = 10
/// seed = 0
/// delta = 0.05
///
/// [env_params]
/// states = 6
///
/// [[agents]]
/// kind = "bucrl"
///
/// [[agents]]
/// kind = "ucrl2"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: String,
    #[serde(default)]
    pub env_params: EnvParams,
    pub agents: Vec<AgentKind>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Per-trial CSV; the summary and manifest are written next to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Worker threads; unset means one per core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_horizon() -> u64 {
    DEFAULT_HORIZON
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

impl ExperimentConfig {
    pub fn new(env: impl Into<String>, agents: Vec<AgentKind>) -> Self {
        Self {
            env: env.into(),
            env_params: EnvParams::default(),
            agents,
            horizon: DEFAULT_HORIZON,
            trials: DEFAULT_TRIALS,
            seed: 0,
            delta: DEFAULT_DELTA,
            out: None,
            workers: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config is always serializable")
    }

    /// Checks every field and builds the environment.
    pub fn validate(&self) -> Result<TabularMdp, HarnessError> {
        if self.horizon < 1 {
            return Err(HarnessError::Config("horizon must be >= 1".into()));
        }
        if self.trials < 1 {
            return Err(HarnessError::Config("trials must be >= 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(HarnessError::Config(format!("delta {} outside (0, 1)", self.delta)));
        }
        if self.agents.is_empty() {
            return Err(HarnessError::Config("agent roster is empty".into()));
        }
        if self.workers == Some(0) {
            return Err(HarnessError::Config("workers must be >= 1".into()));
        }
        for agent in &self.agents {
            agent.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        make_environment(&self.env, &self.env_params).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// Column labels for the roster: agent names, suffixed by position when repeated.
    pub fn agent_labels(&self) -> Vec<String> {
        self.agents
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let repeated = self.agents.iter().filter(|b| b.name() == a.name()).count() > 1;
                if repeated {
                    format!("{}-{i}", a.name())
                } else {
                    a.name().to_string()
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let cfg = ExperimentConfig::parse("env = \"bandits\"\n[[agents]]\nkind = \"bucrl\"\n").unwrap();
        assert_eq!(cfg.horizon, 1 << 18);
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.delta, 0.05);
        assert_eq!(ExperimentConfig::parse(&cfg.to_toml()).unwrap(), cfg);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_invalid_fields() {
        assert!(ExperimentConfig::parse("env = \"bandits\"\nagents = []\nhorizont = 3\n").is_err());
        let mut cfg = ExperimentConfig::new("bandits", vec!["bucrl".parse().unwrap()]);
        cfg.delta = 1.5;
        assert!(cfg.validate().is_err());
        cfg.delta = 0.05;
        cfg.env = "nowhere".into();
        assert!(cfg.validate().is_err());
        cfg.env = "bandits".into();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn repeated_agents_get_distinct_labels() {
        let cfg = ExperimentConfig::new(
            "bandits",
            vec!["bucrl".parse().unwrap(), "ucrl2".parse().unwrap(), "bucrl".parse().unwrap()],
        );
        assert_eq!(cfg.agent_labels(), ["bucrl-0", "ucrl2", "bucrl-2"]);
    }
}
