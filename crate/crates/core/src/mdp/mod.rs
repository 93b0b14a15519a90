//! Ground-truth tabular MDPs and exact solution tools.

mod envs;
mod solve;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use envs::{make_environment, EnvParams, EnvSpec, ENVIRONMENT_NAMES};
pub(crate) use solve::min_max;
pub use solve::{diameter, optimal_gain, optimal_gain_within, policy_gain, GainResult, SOLVER_MAX_SWEEPS};

#[derive(Debug, Error)]
pub enum MdpError {
    #[error("state {state} out of range (S = {num_states})")]
    StateOutOfRange { state: usize, num_states: usize },
    #[error("action {action} out of range (A = {num_actions})")]
    ActionOutOfRange { action: usize, num_actions: usize },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("unknown environment {0:?}")]
    UnknownEnvironment(String),
    #[error("value iteration did not reach tolerance {tol} within {sweeps} sweeps")]
    NoConvergence { tol: f64, sweeps: usize },
    #[error("reading environment spec: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing environment spec: {0}")]
    Parse(String),
}

/// Shape of the reward distribution behind each mean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardKind {
    /// `Bernoulli(mean)`.
    #[default]
    Bernoulli,
    /// Uniform on `[mean - w, mean + w]` with `w = min(mean, 1 - mean)`.
    Uniform,
}

/// Full ground-truth model over `S` states and `A` actions.
///
/// Rewards and transitions are stored flat, row-major in `(s, a)` and
/// `(s, a, s')`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    num_states: usize,
    num_actions: usize,
    reward_mean: Vec<f64>,
    transition: Vec<f64>,
    reward_kind: RewardKind,
}

/// Tolerance within which a transition row is renormalized instead of rejected.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

impl TabularMdp {
    /// Builds a model from nested `[s][a]` rewards and `[s][a][s']` transitions.
    ///
    /// Rows within [`STOCHASTIC_TOLERANCE`] of summing to one are renormalized.
    pub fn new(
        reward_mean: Vec<Vec<f64>>,
        transition: Vec<Vec<Vec<f64>>>,
        reward_kind: RewardKind,
    ) -> Result<Self, MdpError> {
        let num_states = reward_mean.len();
        if num_states == 0 {
            return Err(MdpError::Invalid("no states".into()));
        }
        let num_actions = reward_mean[0].len();
        if num_actions == 0 {
            return Err(MdpError::Invalid("no actions".into()));
        }
        if transition.len() != num_states {
            return Err(MdpError::Invalid(format!(
                "transition has {} state rows, expected {num_states}",
                transition.len()
            )));
        }
        let mut rewards = Vec::with_capacity(num_states * num_actions);
        let mut probs = Vec::with_capacity(num_states * num_actions * num_states);
        for (s, (r_row, p_rows)) in reward_mean.iter().zip(&transition).enumerate() {
            if r_row.len() != num_actions || p_rows.len() != num_actions {
                return Err(MdpError::Invalid(format!("state {s} does not have {num_actions} actions")));
            }
            for (a, (&r, row)) in r_row.iter().zip(p_rows).enumerate() {
                if !(0.0..=1.0).contains(&r) {
                    return Err(MdpError::Invalid(format!("reward mean {r} at ({s}, {a}) outside [0, 1]")));
                }
                rewards.push(r);
                if row.len() != num_states {
                    return Err(MdpError::Invalid(format!("transition row ({s}, {a}) has length {}", row.len())));
                }
                if row.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
                    return Err(MdpError::Invalid(format!("negative or non-finite probability in row ({s}, {a})")));
                }
                let total: f64 = row.iter().sum();
                if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
                    return Err(MdpError::Invalid(format!("transition row ({s}, {a}) sums to {total}")));
                }
                probs.extend(row.iter().map(|p| p / total));
            }
        }
        Ok(Self {
            num_states,
            num_actions,
            reward_mean: rewards,
            transition: probs,
            reward_kind,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn reward_kind(&self) -> RewardKind {
        self.reward_kind
    }

    pub fn reward_mean(&self, s: usize, a: usize) -> f64 {
        self.reward_mean[s * self.num_actions + a]
    }

    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        let start = (s * self.num_actions + a) * self.num_states;
        &self.transition[start..start + self.num_states]
    }

    /// Same dynamics with a different reward distribution family.
    pub fn with_reward_kind(mut self, kind: RewardKind) -> Self {
        self.reward_kind = kind;
        self
    }

    /// Relabels states: new state `perm[s]` plays the role of old state `s`.
    pub fn permute_states(&self, perm: &[usize]) -> Result<Self, MdpError> {
        let n = self.num_states;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(MdpError::Invalid("not a permutation".into()));
        }
        let mut rewards = vec![vec![0.0; self.num_actions]; n];
        let mut trans = vec![vec![vec![0.0; n]; self.num_actions]; n];
        for s in 0..n {
            for a in 0..self.num_actions {
                rewards[perm[s]][a] = self.reward_mean(s, a);
                for (t, p) in self.transition_row(s, a).iter().enumerate() {
                    trans[perm[s]][a][perm[t]] = *p;
                }
            }
        }
        Self::new(rewards, trans, self.reward_kind)
    }

    pub fn check_index(&self, s: usize, a: usize) -> Result<(), MdpError> {
        if s >= self.num_states {
            return Err(MdpError::StateOutOfRange { state: s, num_states: self.num_states });
        }
        if a >= self.num_actions {
            return Err(MdpError::ActionOutOfRange { action: a, num_actions: self.num_actions });
        }
        Ok(())
    }

    /// Samples one round: a reward in `[0, 1]` and the next state.
    pub fn step<R: Rng + ?Sized>(&self, s: usize, a: usize, rng: &mut R) -> Result<(f64, usize), MdpError> {
        self.check_index(s, a)?;
        let mean = self.reward_mean(s, a);
        let reward = match self.reward_kind {
            RewardKind::Bernoulli => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
            RewardKind::Uniform => {
                let w = mean.min(1.0 - mean);
                (mean - w + 2.0 * w * rng.random::<f64>()).clamp(0.0, 1.0)
            }
        };
        let u: f64 = rng.random();
        let row = self.transition_row(s, a);
        let mut acc = 0.0;
        let mut next = None;
        for (t, p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                next = Some(t);
                break;
            }
        }
        // rounding can leave acc a hair below u; fall back to the last reachable state
        let next = next.unwrap_or_else(|| row.iter().rposition(|p| *p > 0.0).unwrap_or(0));
        Ok((reward, next))
    }
}

/// Deterministic stationary policy: one action per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy(pub Vec<usize>);

impl Policy {
    pub fn constant(num_states: usize, action: usize) -> Self {
        Policy(vec![action; num_states])
    }

    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }

    pub fn is_valid_for(&self, mdp: &TabularMdp) -> bool {
        self.0.len() == mdp.num_states() && self.0.iter().all(|&a| a < mdp.num_actions())
    }

    /// All `A^S` deterministic policies, for brute-force checks on small models.
    pub fn enumerate(num_states: usize, num_actions: usize) -> impl Iterator<Item = Policy> {
        let total = num_actions.pow(num_states as u32);
        (0..total).map(move |mut code| {
            let mut actions = Vec::with_capacity(num_states);
            for _ in 0..num_states {
                actions.push(code % num_actions);
                code /= num_actions;
            }
            Policy(actions)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn two_state() -> TabularMdp {
        TabularMdp::new(
            vec![vec![0.0, 0.3], vec![1.0, 0.5]],
            vec![
                vec![vec![0.0, 1.0], vec![0.2, 0.8]],
                vec![vec![1.0, 0.0], vec![0.5, 0.5]],
            ],
            RewardKind::Bernoulli,
        )
        .unwrap()
    }

    #[test]
    fn deterministic_row_and_zero_reward() {
        let mdp = two_state();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let (r, next) = mdp.step(0, 0, &mut rng).unwrap();
            assert_eq!(next, 1);
            assert_eq!(r, 0.0);
            let (r, next) = mdp.step(1, 0, &mut rng).unwrap();
            assert_eq!((r, next), (1.0, 0));
        }
    }

    #[test]
    fn empirical_frequencies_match_row() {
        let mdp = two_state();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000;
        let mut hits = 0usize;
        let mut reward_sum = 0.0;
        for _ in 0..draws {
            let (r, next) = mdp.step(0, 1, &mut rng).unwrap();
            hits += (next == 1) as usize;
            reward_sum += r;
        }
        let p = 0.8;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((hits as f64 / draws as f64 - p).abs() < 3.0 * sigma);
        let sigma = (0.3 * 0.7 / draws as f64).sqrt();
        assert!((reward_sum / draws as f64 - 0.3).abs() < 3.0 * sigma);
    }

    #[test]
    fn uniform_rewards_stay_in_unit_interval() {
        let mdp = two_state().with_reward_kind(RewardKind::Uniform);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sum = 0.0;
        for _ in 0..20_000 {
            let (r, _) = mdp.step(1, 1, &mut rng).unwrap();
            assert!((0.0..=1.0).contains(&r));
            sum += r;
        }
        assert!((sum / 20_000.0 - 0.5).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_models_and_indices() {
        let mdp = two_state();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(mdp.step(2, 0, &mut rng), Err(MdpError::StateOutOfRange { .. })));
        assert!(matches!(mdp.step(0, 2, &mut rng), Err(MdpError::ActionOutOfRange { .. })));
        assert!(TabularMdp::new(vec![vec![1.5]], vec![vec![vec![1.0]]], RewardKind::Bernoulli).is_err());
        assert!(TabularMdp::new(vec![vec![0.5]], vec![vec![vec![0.9]]], RewardKind::Bernoulli).is_err());
        let nearly = TabularMdp::new(vec![vec![0.5]], vec![vec![vec![1.0 + 1e-10]]], RewardKind::Bernoulli).unwrap();
        assert_eq!(nearly.transition_row(0, 0), &[1.0]);
    }

    #[test]
    fn policy_enumeration_covers_all() {
        let all: Vec<_> = Policy::enumerate(3, 2).collect();
        assert_eq!(all.len(), 8);
        let mut uniq = all.clone();
        uniq.dedup();
        assert_eq!(uniq.len(), 8);
    }
}
