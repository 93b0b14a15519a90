use super::{Agent, AgentError};
use crate::mdp::{optimal_gain, Policy, TabularMdp};

/// Plays an optimal policy of the true model from the first round.
pub struct OptimalAgent {
    policy: Policy,
}

impl OptimalAgent {
    pub fn new(mdp: &TabularMdp) -> Result<Self, AgentError> {
        Ok(Self {
            policy: optimal_gain(mdp, 1e-9)?.policy,
        })
    }
}

impl Agent for OptimalAgent {
    fn name(&self) -> &'static str {
        "optimal"
    }

    fn start(&mut self, s: usize) -> Result<usize, AgentError> {
        Ok(self.policy.action(s))
    }

    fn step(&mut self, _s: usize, _a: usize, _reward: f64, s_next: usize) -> Result<usize, AgentError> {
        Ok(self.policy.action(s_next))
    }

    fn episodes(&self) -> usize {
        1
    }
}
