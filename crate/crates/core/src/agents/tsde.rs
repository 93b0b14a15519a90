use rand::distr::Distribution;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Gamma};

use super::{Agent, AgentError, EpisodeRule, EpisodeTracker};
use crate::mdp::{optimal_gain_within, Policy, RewardKind, TabularMdp};
use crate::posterior::{bernoulli_trial, PosteriorState};

pub const TSDE_PLAN_TOLERANCE: f64 = 1e-6;
/// Sampled models can be nearly decomposable; past this many sweeps the
/// greedy policy of the last sweep is used.
const TSDE_PLAN_SWEEPS: usize = 20_000;
const REWARD_PRIOR: f64 = 0.5;

/// Posterior sampling with dynamic episodes, on `Beta(1/2, 1/2)` reward
/// priors and `Dirichlet(1/S, …, 1/S)` transition priors.
pub struct Tsde {
    num_states: usize,
    num_actions: usize,
    plan_tolerance: f64,
    posterior: PosteriorState,
    tracker: EpisodeTracker,
    previous_length: u64,
    policy: Option<Policy>,
    rng: ChaCha8Rng,
}

impl Tsde {
    pub fn new(num_states: usize, num_actions: usize, plan_tolerance: f64, rng: ChaCha8Rng) -> Self {
        Self {
            num_states,
            num_actions,
            plan_tolerance,
            posterior: PosteriorState::new(num_states, num_actions),
            tracker: EpisodeTracker::new(num_states * num_actions, EpisodeRule::Doubling),
            previous_length: 0,
            policy: None,
            rng,
        }
    }

    /// Posterior mean of the reward of `(s, a)`.
    pub fn reward_mean(&self, s: usize, a: usize) -> f64 {
        let n = self.posterior.visits(s, a) as f64;
        (REWARD_PRIOR + self.posterior.reward_successes(s, a) as f64) / (2.0 * REWARD_PRIOR + n)
    }

    /// Draws one model from the posterior.
    pub fn sample_model(&mut self) -> Result<TabularMdp, AgentError> {
        let (ns, na) = (self.num_states, self.num_actions);
        let alpha0 = 1.0 / ns as f64;
        let mut rewards = vec![vec![0.0; na]; ns];
        let mut trans = vec![vec![Vec::new(); na]; ns];
        for s in 0..ns {
            for a in 0..na {
                let n = self.posterior.visits(s, a) as f64;
                let x = self.posterior.reward_successes(s, a) as f64;
                let beta = Beta::new(REWARD_PRIOR + x, REWARD_PRIOR + n - x)
                    .map_err(|e| AgentError::Config(e.to_string()))?;
                rewards[s][a] = beta.sample(&mut self.rng);

                let alphas: Vec<f64> = self.posterior.next_counts(s, a).iter().map(|c| alpha0 + *c as f64).collect();
                let mut row = Vec::with_capacity(ns);
                for &alpha in &alphas {
                    let g = Gamma::new(alpha, 1.0).map_err(|e| AgentError::Config(e.to_string()))?;
                    row.push(g.sample(&mut self.rng));
                }
                let total: f64 = row.iter().sum();
                if total > 0.0 && total.is_finite() {
                    row.iter_mut().for_each(|p| *p /= total);
                } else {
                    // every Gamma draw underflowed: fall back to the posterior mean
                    let sum: f64 = alphas.iter().sum();
                    row = alphas.iter().map(|al| al / sum).collect();
                }
                trans[s][a] = row;
            }
        }
        Ok(TabularMdp::new(rewards, trans, RewardKind::Bernoulli)?)
    }

    fn new_episode(&mut self) -> Result<(), AgentError> {
        if self.tracker.episodes() > 0 {
            self.previous_length = self.tracker.t() - self.tracker.episode_start();
        }
        self.tracker.begin_episode();
        let model = self.sample_model()?;
        let (plan, _) = optimal_gain_within(&model, self.plan_tolerance, TSDE_PLAN_SWEEPS)?;
        self.policy = Some(plan.policy);
        Ok(())
    }

    fn should_end(&self) -> bool {
        let length = self.tracker.t() - self.tracker.episode_start();
        length > self.previous_length
            || self
                .tracker
                .start_counts()
                .iter()
                .zip(self.tracker.episode_counts())
                .any(|(n, k)| n + k > 2 * n)
    }

    fn action(&self, s: usize) -> Result<usize, AgentError> {
        self.policy.as_ref().map(|p| p.action(s)).ok_or(AgentError::NotStarted)
    }
}

impl Agent for Tsde {
    fn name(&self) -> &'static str {
        "tsde"
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
        if self.should_end() {
            self.new_episode()?;
        }
        self.action(s_next)
    }

    fn episodes(&self) -> usize {
        self.tracker.episodes()
    }
}
