use serde::{Deserialize, Serialize};

/// When an optimistic agent closes its current episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpisodeRule {
    /// `Σ N_k(s,a) / max(1, N_{t_k}(s,a)) >= 1`.
    ExtendedDoubling,
    /// Some pair reached `N_k(s,a) >= max(1, N_{t_k}(s,a))`.
    Doubling,
}

/// Episode-start counts `N_{t_k}`, in-episode counts `N_k` and the round counter.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTracker {
    rule: EpisodeRule,
    start_counts: Vec<u64>,
    episode_counts: Vec<u64>,
    t: u64,
    t_k: u64,
    episodes: usize,
}

impl EpisodeTracker {
    pub fn new(pairs: usize, rule: EpisodeRule) -> Self {
        Self {
            rule,
            start_counts: vec![0; pairs],
            episode_counts: vec![0; pairs],
            t: 1,
            t_k: 1,
            episodes: 0,
        }
    }

    /// Current round `t`: one more than the number of recorded visits.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Round at which the current episode started.
    pub fn episode_start(&self) -> u64 {
        self.t_k
    }

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    pub fn start_counts(&self) -> &[u64] {
        &self.start_counts
    }

    pub fn episode_counts(&self) -> &[u64] {
        &self.episode_counts
    }

    pub fn visit(&mut self, pair: usize) {
        self.episode_counts[pair] += 1;
        self.t += 1;
    }

    pub fn should_end(&self) -> bool {
        let ratio = |(k, n): (&u64, &u64)| *k as f64 / (*n).max(1) as f64;
        let mut pairs = self.episode_counts.iter().zip(&self.start_counts);
        match self.rule {
            EpisodeRule::ExtendedDoubling => pairs.map(ratio).sum::<f64>() >= 1.0,
            EpisodeRule::Doubling => pairs.any(|p| ratio(p) >= 1.0),
        }
    }

    /// Folds `N_k` into `N_{t_k}` and starts episode `k + 1` at the current round.
    pub fn begin_episode(&mut self) {
        for (n, k) in self.start_counts.iter_mut().zip(self.episode_counts.iter_mut()) {
            *n += *k;
            *k = 0;
        }
        self.t_k = self.t;
        self.episodes += 1;
    }
}
