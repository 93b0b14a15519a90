//! Learning agents: BUCRL, UCRL2, a UCRL-V-style Bernstein agent, TSDE, and
//! an oracle that plays the optimal policy.
//!
//! Every agent is driven the same way: [`Agent::start`] with the initial
//! state, then [`Agent::step`] once per round with the transition just
//! observed. Both return the action to play next.

mod episodes;
mod optimistic;
mod oracle;
mod tsde;
mod ucrl2;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mdp::{MdpError, TabularMdp};
use crate::numerics::NumericsError;
use crate::planner::{PlannerError, PlausibleSet};

pub use episodes::{EpisodeRule, EpisodeTracker};
pub use optimistic::{bucrl_deltas, ucrlv_scales, Bucrl, BoundFamily};
pub use oracle::OptimalAgent;
pub use tsde::{Tsde, TSDE_PLAN_TOLERANCE};
pub use ucrl2::{l1_optimistic_row, ucrl2_radii, L1Set, Ucrl2};

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error(transparent)]
    Planner(#[from] PlannerError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Mdp(#[from] MdpError),
    #[error("invalid agent configuration: {0}")]
    Config(String),
    #[error("agent used before start()")]
    NotStarted,
}

pub trait Agent: Send {
    fn name(&self) -> &'static str;
    /// First action of the run, played in `s`.
    fn start(&mut self, s: usize) -> Result<usize, AgentError>;
    /// Records `(s, a, reward, s_next)` and returns the action for `s_next`.
    fn step(&mut self, s: usize, a: usize, reward: f64, s_next: usize) -> Result<usize, AgentError>;
    /// Episodes started so far.
    fn episodes(&self) -> usize;
    /// The plausible set of the current episode, for agents that build one.
    fn plausible_set(&mut self) -> Option<&mut PlausibleSet> {
        None
    }
}

/// Agent roster entry. `delta` overrides the experiment-wide confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AgentKind {
    Bucrl {
        #[serde(default)]
        delta: Option<f64>,
    },
    Ucrl2 {
        #[serde(default)]
        delta: Option<f64>,
    },
    Ucrlv {
        #[serde(default)]
        delta: Option<f64>,
    },
    Tsde {
        #[serde(default = "default_tsde_tolerance")]
        plan_tolerance: f64,
    },
    Optimal,
}

fn default_tsde_tolerance() -> f64 {
    TSDE_PLAN_TOLERANCE
}

pub const AGENT_NAMES: [&str; 5] = ["bucrl", "ucrl2", "ucrlv", "tsde", "optimal"];

impl AgentKind {
    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Bucrl { .. } => "bucrl",
            AgentKind::Ucrl2 { .. } => "ucrl2",
            AgentKind::Ucrlv { .. } => "ucrlv",
            AgentKind::Tsde { .. } => "tsde",
            AgentKind::Optimal => "optimal",
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        match self {
            AgentKind::Bucrl { delta: Some(d) } | AgentKind::Ucrl2 { delta: Some(d) } | AgentKind::Ucrlv { delta: Some(d) }
                if !(*d > 0.0 && *d < 1.0) =>
            {
                Err(AgentError::Config(format!("{}: delta {d} outside (0, 1)", self.name())))
            }
            AgentKind::Tsde { plan_tolerance } if !(*plan_tolerance > 0.0) => Err(AgentError::Config(format!(
                "tsde: plan_tolerance {plan_tolerance} must be positive"
            ))),
            _ => Ok(()),
        }
    }

    /// Builds an agent for `mdp`'s state and action spaces. Only the
    /// `optimal` agent reads the model itself.
    pub fn build(&self, mdp: &TabularMdp, delta: f64, rng: ChaCha8Rng) -> Result<Box<dyn Agent>, AgentError> {
        self.validate()?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(AgentError::Config(format!("delta {delta} outside (0, 1)")));
        }
        let (s, a) = (mdp.num_states(), mdp.num_actions());
        Ok(match self {
            AgentKind::Bucrl { delta: d } => Box::new(Bucrl::new(s, a, d.unwrap_or(delta), BoundFamily::BetaQuantile, rng)),
            AgentKind::Ucrlv { delta: d } => Box::new(Bucrl::new(s, a, d.unwrap_or(delta), BoundFamily::Bernstein, rng)),
            AgentKind::Ucrl2 { delta: d } => Box::new(Ucrl2::new(s, a, d.unwrap_or(delta))),
            AgentKind::Tsde { plan_tolerance } => Box::new(Tsde::new(s, a, *plan_tolerance, rng)),
            AgentKind::Optimal => Box::new(OptimalAgent::new(mdp)?),
        })
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = AgentError;

    /// Parses a bare agent name with default hyperparameters.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "bucrl" => AgentKind::Bucrl { delta: None },
            "ucrl2" => AgentKind::Ucrl2 { delta: None },
            "ucrlv" | "ucrl-v" => AgentKind::Ucrlv { delta: None },
            "tsde" => AgentKind::Tsde {
                plan_tolerance: TSDE_PLAN_TOLERANCE,
            },
            "optimal" => AgentKind::Optimal,
            other => {
                return Err(AgentError::Config(format!(
                    "unknown agent '{other}' (expected one of {})",
                    AGENT_NAMES.join(", ")
                )))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in AGENT_NAMES {
            assert_eq!(name.parse::<AgentKind>().unwrap().name(), name);
        }
        assert!("klucrl".parse::<AgentKind>().is_err());
    }

    #[test]
    fn toml_roster() {
        #[derive(Deserialize)]
        struct Roster {
            agents: Vec<AgentKind>,
        }
        let text = "[[agents]]\nkind = \"bucrl\"\ndelta = 0.1\n[[agents]]\nkind = \"tsde\"\n";
        let r: Roster = toml::from_str(text).unwrap();
        assert_eq!(r.agents[0], AgentKind::Bucrl { delta: Some(0.1) });
        assert_eq!(r.agents[1], AgentKind::Tsde { plan_tolerance: 1e-6 });
        assert!(AgentKind::Ucrl2 { delta: Some(2.0) }.validate().is_err());
    }
}
