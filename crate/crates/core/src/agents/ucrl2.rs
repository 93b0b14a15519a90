use super::{Agent, AgentError, EpisodeRule, EpisodeTracker};
use crate::mdp::Policy;
use crate::planner::{extended_value_iteration, OptimisticSet};

/// Reward and L1 transition radii: `sqrt(7 ln(2SAt/δ) / (2 max(1, n)))` and
/// `sqrt(14 S ln(2At/δ) / max(1, n))`.
pub fn ucrl2_radii(delta: f64, num_states: usize, num_actions: usize, t: u64, n: u64) -> (f64, f64) {
    let (s, a, t) = (num_states as f64, num_actions as f64, t as f64);
    let n = n.max(1) as f64;
    let reward = (7.0 * (2.0 * s * a * t / delta).ln() / (2.0 * n)).sqrt();
    let l1 = (14.0 * s * (2.0 * a * t / delta).ln() / n).sqrt();
    (reward, l1)
}

/// Maximizes `Σ p u` over `{p : ‖p - p_hat‖₁ <= budget}`: moves up to
/// `budget / 2` onto the best state, then drains the excess from the worst
/// states upward. `order` lists states by decreasing `u`.
pub fn l1_optimistic_row(p_hat: &[f64], budget: f64, order: &[usize], out: &mut [f64]) {
    out.copy_from_slice(p_hat);
    let best = order[0];
    out[best] = (p_hat[best] + budget / 2.0).min(1.0);
    let mut total: f64 = out.iter().sum();
    for &state in order[1..].iter().rev() {
        if total <= 1.0 {
            break;
        }
        let removed = out[state].min(total - 1.0);
        out[state] -= removed;
        total -= removed;
    }
    if total < 1.0 {
        out[best] += 1.0 - total;
    }
}

/// Reward upper bounds plus an L1 ball around each empirical row.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Set {
    num_states: usize,
    num_actions: usize,
    reward_upper: Vec<f64>,
    p_hat: Vec<f64>,
    budget: Vec<f64>,
}

impl L1Set {
    /// `p_hat` rows of unvisited pairs may be all zero.
    pub fn new(num_states: usize, num_actions: usize, reward_upper: Vec<f64>, p_hat: Vec<f64>, budget: Vec<f64>) -> Self {
        assert_eq!(reward_upper.len(), num_states * num_actions);
        assert_eq!(budget.len(), num_states * num_actions);
        assert_eq!(p_hat.len(), num_states * num_states * num_actions);
        Self {
            num_states,
            num_actions,
            reward_upper,
            p_hat,
            budget,
        }
    }
}

impl OptimisticSet for L1Set {
    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn reward_upper(&self, s: usize, a: usize) -> f64 {
        self.reward_upper[s * self.num_actions + a]
    }

    fn optimistic_row(
        &mut self,
        s: usize,
        a: usize,
        order: &[usize],
        out: &mut [f64],
    ) -> Result<(), crate::planner::PlannerError> {
        let pair = s * self.num_actions + a;
        let i = pair * self.num_states;
        l1_optimistic_row(&self.p_hat[i..i + self.num_states], self.budget[pair], order, out);
        Ok(())
    }
}

/// UCRL2 with raw-reward means, classical doubling episodes and `ε = 1/√t_k`.
pub struct Ucrl2 {
    num_states: usize,
    num_actions: usize,
    delta: f64,
    reward_sum: Vec<f64>,
    next_count: Vec<u64>,
    tracker: EpisodeTracker,
    policy: Option<Policy>,
}

impl Ucrl2 {
    pub fn new(num_states: usize, num_actions: usize, delta: f64) -> Self {
        let pairs = num_states * num_actions;
        Self {
            num_states,
            num_actions,
            delta,
            reward_sum: vec![0.0; pairs],
            next_count: vec![0; pairs * num_states],
            tracker: EpisodeTracker::new(pairs, EpisodeRule::Doubling),
            policy: None,
        }
    }

    pub fn build_set(&self) -> L1Set {
        let (ns, na) = (self.num_states, self.num_actions);
        let t = self.tracker.t();
        let pairs = ns * na;
        let mut reward_upper = Vec::with_capacity(pairs);
        let mut budget = Vec::with_capacity(pairs);
        let mut p_hat = vec![0.0; pairs * ns];
        for pair in 0..pairs {
            let row = &self.next_count[pair * ns..(pair + 1) * ns];
            let n: u64 = row.iter().sum();
            let (r_rad, p_rad) = ucrl2_radii(self.delta, ns, na, t, n);
            let mean = if n == 0 { 0.0 } else { self.reward_sum[pair] / n as f64 };
            reward_upper.push((mean + r_rad).min(1.0));
            budget.push(p_rad);
            if n > 0 {
                for (p, c) in p_hat[pair * ns..(pair + 1) * ns].iter_mut().zip(row) {
                    *p = *c as f64 / n as f64;
                }
            }
        }
        L1Set::new(ns, na, reward_upper, p_hat, budget)
    }

    fn new_episode(&mut self) -> Result<(), AgentError> {
        self.tracker.begin_episode();
        let mut set = self.build_set();
        let epsilon = 1.0 / (self.tracker.episode_start() as f64).sqrt();
        self.policy = Some(extended_value_iteration(&mut set, epsilon, None)?.policy);
        Ok(())
    }

    fn action(&self, s: usize) -> Result<usize, AgentError> {
        self.policy.as_ref().map(|p| p.action(s)).ok_or(AgentError::NotStarted)
    }
}

impl Agent for Ucrl2 {
    fn name(&self) -> &'static str {
        "ucrl2"
    }

    fn start(&mut self, s: usize) -> Result<usize, AgentError> {
        self.new_episode()?;
        self.action(s)
    }

    fn step(&mut self, s: usize, a: usize, reward: f64, s_next: usize) -> Result<usize, AgentError> {
        if self.policy.is_none() {
            return Err(AgentError::NotStarted);
        }
        let pair = s * self.num_actions + a;
        self.reward_sum[pair] += reward;
        self.next_count[pair * self.num_states + s_next] += 1;
        self.tracker.visit(pair);
        if self.tracker.should_end() {
            self.new_episode()?;
        }
        self.action(s_next)
    }

    fn episodes(&self) -> usize {
        self.tracker.episodes()
    }
}
