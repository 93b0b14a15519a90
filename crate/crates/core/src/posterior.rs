//! Beta-posterior bookkeeping for Bernoulli-reduced rewards and subset
//! transitions.
//!
//! Upper quantiles come from the `Beta(1, 0)` prior and lower quantiles from
//! the `Beta(0, 1)` prior. Both priors are improper; their posteriors are
//! handled as limits, which reduce to three rules for `x` successes in `n`
//! trials:
//!
//! - `n = 0` gives the vacuous pair `(0, 1)`;
//! - `x = 0` gives a lower quantile of `0`;
//! - `x = n` gives an upper quantile of `1`;
//!
//! and otherwise `lower = Q(Beta(x, n - x + 1), δ)` and
//! `upper = Q(Beta(x + 1, n - x), 1 - δ)`, the Clopper–Pearson limits.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::{self, special::solve_lower_tail, NumericsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePair {
    pub lower: f64,
    pub upper: f64,
}

impl QuantilePair {
    pub const VACUOUS: QuantilePair = QuantilePair { lower: 0.0, upper: 1.0 };

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Sufficient statistics of every `(s, a)` posterior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosteriorState {
    num_states: usize,
    num_actions: usize,
    visits: Vec<u64>,
    reward_successes: Vec<u64>,
    next_count: Vec<u64>,
}

impl PosteriorState {
    pub fn new(num_states: usize, num_actions: usize) -> Self {
        let pairs = num_states * num_actions;
        Self {
            num_states,
            num_actions,
            visits: vec![0; pairs],
            reward_successes: vec![0; pairs],
            next_count: vec![0; pairs * num_states],
        }
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn pair(&self, s: usize, a: usize) -> usize {
        s * self.num_actions + a
    }

    /// Records one observation with an already Bernoulli-reduced reward.
    pub fn record(&mut self, s: usize, a: usize, bernoulli_reward: bool, s_next: usize) {
        assert!(s < self.num_states && a < self.num_actions && s_next < self.num_states);
        let i = self.pair(s, a);
        self.visits[i] += 1;
        self.reward_successes[i] += bernoulli_reward as u64;
        self.next_count[i * self.num_states + s_next] += 1;
    }

    pub fn visits(&self, s: usize, a: usize) -> u64 {
        self.visits[self.pair(s, a)]
    }

    pub fn reward_successes(&self, s: usize, a: usize) -> u64 {
        self.reward_successes[self.pair(s, a)]
    }

    pub fn next_counts(&self, s: usize, a: usize) -> &[u64] {
        let start = self.pair(s, a) * self.num_states;
        &self.next_count[start..start + self.num_states]
    }

    pub fn total_visits(&self) -> u64 {
        self.visits.iter().sum()
    }

    /// Empirical transition frequencies, or `None` for an unvisited pair.
    pub fn empirical_row(&self, s: usize, a: usize) -> Option<Vec<f64>> {
        let n = self.visits(s, a);
        (n > 0).then(|| self.next_counts(s, a).iter().map(|c| *c as f64 / n as f64).collect())
    }

    /// Versioned flat-table dump: one `s,a,n,successes,next_0..next_{S-1}` row per pair.
    pub fn to_checkpoint(&self) -> String {
        let mut out = format!(
            "{CHECKPOINT_MAGIC}\nstates={}\nactions={}\n",
            self.num_states, self.num_actions
        );
        for s in 0..self.num_states {
            for a in 0..self.num_actions {
                write!(out, "{s},{a},{},{}", self.visits(s, a), self.reward_successes(s, a)).unwrap();
                for c in self.next_counts(s, a) {
                    write!(out, ",{c}").unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self, CheckpointError> {
        let mut lines = text.lines();
        if lines.next() != Some(CHECKPOINT_MAGIC) {
            return Err(CheckpointError("missing or unsupported version header".into()));
        }
        let mut header = |key: &str| -> Result<usize, CheckpointError> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(key))
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CheckpointError(format!("bad {key} line")))
        };
        let num_states = header("states")?;
        let num_actions = header("actions")?;
        let mut state = Self::new(num_states, num_actions);
        let mut seen = 0;
        for (lineno, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = || CheckpointError(format!("row {}: malformed", lineno + 4));
            let fields: Vec<u64> = line
                .split(',')
                .map(|f| f.trim().parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            if fields.len() != 4 + num_states {
                return Err(bad());
            }
            let (s, a) = (fields[0] as usize, fields[1] as usize);
            if s >= num_states || a >= num_actions {
                return Err(bad());
            }
            let (n, x) = (fields[2], fields[3]);
            let next = &fields[4..];
            if x > n || next.iter().sum::<u64>() != n {
                return Err(CheckpointError(format!("row {}: counts are inconsistent", lineno + 4)));
            }
            let i = state.pair(s, a);
            state.visits[i] = n;
            state.reward_successes[i] = x;
            state.next_count[i * num_states..(i + 1) * num_states].copy_from_slice(next);
            seen += 1;
        }
        if seen != num_states * num_actions {
            return Err(CheckpointError(format!("expected {} rows, found {seen}", num_states * num_actions)));
        }
        Ok(state)
    }
}

pub const CHECKPOINT_MAGIC: &str = "# bucrl-posterior v1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("posterior checkpoint: {0}")]
pub struct CheckpointError(pub String);

/// Bernoulli reduction of a bounded reward: `1` with probability `r`.
pub fn bernoulli_trial<R: Rng + ?Sized>(r: f64, rng: &mut R) -> Result<bool, NumericsError> {
    numerics::check((0.0..=1.0).contains(&r), "reward", r, "[0, 1]")?;
    Ok(rng.random::<f64>() < r)
}

fn check_counts(x: u64, n: u64, delta: f64) -> Result<(), NumericsError> {
    numerics::check(x <= n, "x", x as f64, "[0, n]")?;
    numerics::check(delta > 0.0 && delta <= 0.5, "delta", delta, "(0, 0.5]")
}

/// Lower `δ` and upper `1 - δ` posterior quantiles for `x` successes in `n` trials.
pub fn reward_quantiles(x: u64, n: u64, delta: f64) -> Result<QuantilePair, NumericsError> {
    check_counts(x, n, delta)?;
    if n == 0 {
        return Ok(QuantilePair::VACUOUS);
    }
    let (xf, nf) = (x as f64, n as f64);
    let lower = if x == 0 {
        0.0
    } else {
        numerics::beta_quantile_exact(xf, nf - xf + 1.0, delta)?
    };
    let upper = if x == n {
        1.0
    } else {
        numerics::beta_quantile_upper_tail(xf + 1.0, nf - xf, delta)?
    };
    Ok(QuantilePair { lower, upper })
}

/// Posterior quantiles for the probability of landing in a subset of next
/// states that was hit `c` times in `n` visits. Only the count matters.
pub fn subset_transition_quantiles(c: u64, n: u64, delta: f64) -> Result<QuantilePair, NumericsError> {
    reward_quantiles(c, n, delta)
}

/// Memoized subset-transition quantiles for one `(s, a)` at fixed `(n, δ)`.
///
/// For `c < n`, `upper(c) = 1 - r_c` and `lower(n - c) = r_c` where `r_c` is
/// the `δ`-quantile of `Beta(n - c, c + 1)`, so the cache stores one root per
/// count. Values are bit-identical to [`subset_transition_quantiles`].
#[derive(Debug, Clone)]
pub struct QuantileCache {
    n: u64,
    delta: f64,
    roots: HashMap<u64, f64>,
    inversions: usize,
}

impl QuantileCache {
    pub fn new(n: u64, delta: f64) -> Result<Self, NumericsError> {
        check_counts(0, n, delta)?;
        Ok(Self {
            n,
            delta,
            roots: HashMap::new(),
            inversions: 0,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Drops every memoized value if `(n, δ)` changed.
    pub fn reset(&mut self, n: u64, delta: f64) -> Result<(), NumericsError> {
        check_counts(0, n, delta)?;
        if n != self.n || delta != self.delta {
            self.n = n;
            self.delta = delta;
            self.roots.clear();
        }
        Ok(())
    }

    /// Number of Beta inversions performed since construction.
    pub fn inversions(&self) -> usize {
        self.inversions
    }

    fn root(&mut self, c: u64) -> Result<f64, NumericsError> {
        debug_assert!(c < self.n);
        if let Some(r) = self.roots.get(&c) {
            return Ok(*r);
        }
        let (cf, nf) = (c as f64, self.n as f64);
        let r = solve_lower_tail(nf - cf, cf + 1.0, self.delta)?;
        self.inversions += 1;
        self.roots.insert(c, r);
        Ok(r)
    }

    pub fn upper(&mut self, c: u64) -> Result<f64, NumericsError> {
        numerics::check(c <= self.n, "c", c as f64, "[0, n]")?;
        if self.n == 0 || c == self.n {
            return Ok(1.0);
        }
        Ok(1.0 - self.root(c)?)
    }

    pub fn lower(&mut self, c: u64) -> Result<f64, NumericsError> {
        numerics::check(c <= self.n, "c", c as f64, "[0, n]")?;
        if c == 0 {
            return Ok(0.0);
        }
        self.root(self.n - c)
    }

    pub fn get(&mut self, c: u64) -> Result<QuantilePair, NumericsError> {
        Ok(QuantilePair {
            lower: self.lower(c)?,
            upper: self.upper(c)?,
        })
    }
}
