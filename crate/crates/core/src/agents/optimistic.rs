use rand_chacha::ChaCha8Rng;

use super::{Agent, AgentError, EpisodeRule, EpisodeTracker};
use crate::mdp::Policy;
use crate::planner::{extended_value_iteration, PlausibleSet};
use crate::posterior::{bernoulli_trial, PosteriorState};

/// Per-episode tail masses `(δ_r, δ_p) = (δ / (4SA ln 2t), δ / (8S²A ln 2t))`.
pub fn bucrl_deltas(delta: f64, num_states: usize, num_actions: usize, t: u64) -> (f64, f64) {
    let (s, a) = (num_states as f64, num_actions as f64);
    let log = (2.0 * t as f64).ln();
    (delta / (4.0 * s * a * log), delta / (8.0 * s * s * a * log))
}

/// Bernstein confidence scales for rewards and subsets, so that
/// `L = ln(scale · max(1, n))`.
pub fn ucrlv_scales(delta: f64, num_states: usize, num_actions: usize, t: u64) -> (f64, f64) {
    let (d_r, d_p) = bucrl_deltas(delta, num_states, num_actions, t);
    (1.0 / d_r, 1.0 / d_p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFamily {
    /// Posterior Beta quantiles (BUCRL).
    BetaQuantile,
    /// Empirical-Bernstein intervals (UCRL-V style).
    Bernstein,
}

/// Optimistic agent planning by extended value iteration over a plausible
/// set rebuilt at each episode start with `ε = 1/√t_k`.
pub struct Bucrl {
    num_states: usize,
    num_actions: usize,
    delta: f64,
    family: BoundFamily,
    posterior: PosteriorState,
    tracker: EpisodeTracker,
    policy: Option<Policy>,
    set: Option<PlausibleSet>,
    gain_estimate: f64,
    rng: ChaCha8Rng,
}

impl Bucrl {
    pub fn new(num_states: usize, num_actions: usize, delta: f64, family: BoundFamily, rng: ChaCha8Rng) -> Self {
        Self {
            num_states,
            num_actions,
            delta,
            family,
            posterior: PosteriorState::new(num_states, num_actions),
            tracker: EpisodeTracker::new(num_states * num_actions, EpisodeRule::ExtendedDoubling),
            policy: None,
            set: None,
            gain_estimate: f64::NAN,
            rng,
        }
    }

    pub fn posterior(&self) -> &PosteriorState {
        &self.posterior
    }

    pub fn tracker(&self) -> &EpisodeTracker {
        &self.tracker
    }

    /// Optimistic gain found at the latest episode start.
    pub fn gain_estimate(&self) -> f64 {
        self.gain_estimate
    }

    pub fn build_plausible_set(&self) -> Result<PlausibleSet, AgentError> {
        let t = self.tracker.t();
        let (ns, na) = (self.num_states, self.num_actions);
        Ok(match self.family {
            BoundFamily::BetaQuantile => {
                let (d_r, d_p) = bucrl_deltas(self.delta, ns, na, t);
                PlausibleSet::from_posterior(&self.posterior, d_r, d_p)?
            }
            BoundFamily::Bernstein => {
                let (r, p) = ucrlv_scales(self.delta, ns, na, t);
                PlausibleSet::bernstein(&self.posterior, r, p)?
            }
        })
    }

    fn new_episode(&mut self) -> Result<(), AgentError> {
        self.tracker.begin_episode();
        let mut set = self.build_plausible_set()?;
        let epsilon = 1.0 / (self.tracker.episode_start() as f64).sqrt();
        let result = extended_value_iteration(&mut set, epsilon, None)?;
        self.policy = Some(result.policy);
        self.gain_estimate = result.gain_estimate;
        self.set = Some(set);
        Ok(())
    }

    fn action(&self, s: usize) -> Result<usize, AgentError> {
        self.policy.as_ref().map(|p| p.action(s)).ok_or(AgentError::NotStarted)
    }
}

impl Agent for Bucrl {
    fn name(&self) -> &'static str {
        match self.family {
            BoundFamily::BetaQuantile => "bucrl",
            BoundFamily::Bernstein => "ucrlv",
        }
    }

    fn start(&mut self, s: usize) -> Result<usize, AgentError> {
        self.new_episode()?;
        self.action(s)
    }

    fn step(&mut self, s: usize, a: usize, reward: f64, s_next: usize) -> Result<usize, AgentError> {
        if self.policy.is_none() {
            return Err(AgentError::NotStarted);
        }
        let bit = bernoulli_trial(reward, &mut self.rng)?;
        self.posterior.record(s, a, bit, s_next);
        self.tracker.visit(s * self.num_actions + a);
        if self.tracker.should_end() {
            self.new_episode()?;
        }
        self.action(s_next)
    }

    fn episodes(&self) -> usize {
        self.tracker.episodes()
    }

    fn plausible_set(&mut self) -> Option<&mut PlausibleSet> {
        self.set.as_mut()
    }
}
