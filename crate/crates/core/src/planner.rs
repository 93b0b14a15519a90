//! Extended value iteration over a plausible set of MDPs.
//!
//! A plausible set bounds, for every `(s, a)`, the mean reward and the
//! probability of every subset of next states. Because those subset bounds
//! depend only on the subset's observed count, the inner maximization of
//! `Σ p(s') u(s')` reduces to a greedy pass over the states sorted by `u`.

use serde::{Deserialize, Serialize};

use crate::mdp::{Policy, TabularMdp};
use crate::numerics::NumericsError;
use crate::posterior::{reward_quantiles, PosteriorState, QuantileCache, QuantilePair};

const FEASIBILITY_SLACK: f64 = 1e-12;
/// Above this many states, containment checks only singletons and their complements.
pub const EXHAUSTIVE_SUBSET_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlannerError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("infeasible bounds at ({s}, {a}): residual mass {mass} exceeds upper bound {bound}")]
    Infeasible { s: usize, a: usize, mass: f64, bound: f64 },
    #[error("extended value iteration did not reach span {epsilon} within {sweeps} sweeps")]
    SweepBudget { epsilon: f64, sweeps: usize },
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("{0}")]
    Shape(String),
}

/// Anything extended value iteration can maximize over.
pub trait OptimisticSet {
    fn num_states(&self) -> usize;
    fn num_actions(&self) -> usize;
    /// Optimistic reward; EVI clips it to 1.
    fn reward_upper(&self, s: usize, a: usize) -> f64;
    /// Writes into `out` the row maximizing `Σ p(s') u(s')`, where `order`
    /// lists the states by decreasing `u` (ties by index).
    fn optimistic_row(&mut self, s: usize, a: usize, order: &[usize], out: &mut [f64]) -> Result<(), PlannerError>;
}

/// How subset-transition bounds are derived from a subset count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SubsetBoundRule {
    /// Posterior Beta quantiles at tail mass `delta`.
    BetaQuantile { delta: f64 },
    /// `c/n ± (sqrt(2 v L / n) + 7L / (3n))` with `v = (c/n)(1 - c/n)` and
    /// `L = ln(scale · max(1, n))`.
    EmpiricalBernstein { scale: f64 },
}

/// Empirical-Bernstein interval for `c` successes in `n` trials.
pub fn bernstein_interval(c: u64, n: u64, scale: f64) -> QuantilePair {
    if n == 0 {
        return QuantilePair::VACUOUS;
    }
    let nf = n as f64;
    let mean = c as f64 / nf;
    let l = (scale * nf).ln().max(0.0);
    let w = (2.0 * mean * (1.0 - mean) * l / nf).sqrt() + 7.0 * l / (3.0 * nf);
    QuantilePair {
        lower: (mean - w).max(0.0),
        upper: (mean + w).min(1.0),
    }
}

#[derive(Debug, Clone)]
enum SubsetOracle {
    Beta(Vec<QuantileCache>),
    Bernstein(f64),
}

/// Reward intervals plus per-pair subset-transition bounds.
#[derive(Debug, Clone)]
pub struct PlausibleSet {
    num_states: usize,
    num_actions: usize,
    reward_bounds: Vec<QuantilePair>,
    visits: Vec<u64>,
    next_counts: Vec<u64>,
    oracle: SubsetOracle,
}

impl PlausibleSet {
    /// `reward_bounds` has one entry per `(s, a)` in row-major order and
    /// `next_counts` one row of length `num_states` per pair.
    pub fn from_counts(
        num_states: usize,
        num_actions: usize,
        reward_bounds: Vec<QuantilePair>,
        next_counts: Vec<u64>,
        rule: SubsetBoundRule,
    ) -> Result<Self, PlannerError> {
        let pairs = num_states * num_actions;
        if num_states == 0 || num_actions == 0 {
            return Err(PlannerError::Shape("empty state or action space".into()));
        }
        if reward_bounds.len() != pairs || next_counts.len() != pairs * num_states {
            return Err(PlannerError::Shape(format!(
                "expected {pairs} reward bounds and {} counts",
                pairs * num_states
            )));
        }
        if reward_bounds.iter().any(|b| !(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0)) {
            return Err(PlannerError::Shape("reward bounds must satisfy 0 <= lower <= upper <= 1".into()));
        }
        let visits: Vec<u64> = next_counts.chunks(num_states).map(|row| row.iter().sum()).collect();
        let oracle = match rule {
            SubsetBoundRule::BetaQuantile { delta } => SubsetOracle::Beta(
                visits
                    .iter()
                    .map(|&n| QuantileCache::new(n, delta))
                    .collect::<Result<_, _>>()?,
            ),
            SubsetBoundRule::EmpiricalBernstein { scale } => {
                if !(scale >= 1.0 && scale.is_finite()) {
                    return Err(PlannerError::Shape(format!("Bernstein scale {scale} must be >= 1")));
                }
                SubsetOracle::Bernstein(scale)
            }
        };
        Ok(Self {
            num_states,
            num_actions,
            reward_bounds,
            visits,
            next_counts,
            oracle,
        })
    }

    /// BUCRL's set: Beta quantiles at `delta_r` for rewards and `delta_p` for subsets.
    pub fn from_posterior(posterior: &PosteriorState, delta_r: f64, delta_p: f64) -> Result<Self, PlannerError> {
        let (ns, na) = (posterior.num_states(), posterior.num_actions());
        let mut rewards = Vec::with_capacity(ns * na);
        for s in 0..ns {
            for a in 0..na {
                rewards.push(reward_quantiles(posterior.reward_successes(s, a), posterior.visits(s, a), delta_r)?);
            }
        }
        Self::from_counts(ns, na, rewards, flat_counts(posterior), SubsetBoundRule::BetaQuantile { delta: delta_p })
    }

    /// Empirical-Bernstein set with separate confidence scales for rewards and subsets.
    pub fn bernstein(posterior: &PosteriorState, reward_scale: f64, transition_scale: f64) -> Result<Self, PlannerError> {
        let (ns, na) = (posterior.num_states(), posterior.num_actions());
        let mut rewards = Vec::with_capacity(ns * na);
        for s in 0..ns {
            for a in 0..na {
                rewards.push(bernstein_interval(
                    posterior.reward_successes(s, a),
                    posterior.visits(s, a),
                    reward_scale,
                ));
            }
        }
        Self::from_counts(
            ns,
            na,
            rewards,
            flat_counts(posterior),
            SubsetBoundRule::EmpiricalBernstein { scale: transition_scale },
        )
    }

    fn pair(&self, s: usize, a: usize) -> usize {
        s * self.num_actions + a
    }

    pub fn reward_bounds(&self, s: usize, a: usize) -> QuantilePair {
        self.reward_bounds[self.pair(s, a)]
    }

    pub fn visits(&self, s: usize, a: usize) -> u64 {
        self.visits[self.pair(s, a)]
    }

    pub fn next_counts(&self, s: usize, a: usize) -> &[u64] {
        let i = self.pair(s, a) * self.num_states;
        &self.next_counts[i..i + self.num_states]
    }

    /// Bounds on the probability of a subset of next states hit `c` times.
    pub fn subset_bounds(&mut self, s: usize, a: usize, c: u64) -> Result<QuantilePair, PlannerError> {
        let i = self.pair(s, a);
        let n = self.visits[i];
        if c > n {
            return Err(PlannerError::Shape(format!("subset count {c} exceeds visits {n}")));
        }
        Ok(match &mut self.oracle {
            SubsetOracle::Beta(caches) => caches[i].get(c)?,
            SubsetOracle::Bernstein(scale) => bernstein_interval(c, n, *scale),
        })
    }

    fn subset_upper(&mut self, pair: usize, c: u64) -> Result<f64, PlannerError> {
        Ok(match &mut self.oracle {
            SubsetOracle::Beta(caches) => caches[pair].upper(c)?,
            SubsetOracle::Bernstein(scale) => bernstein_interval(c, self.visits[pair], *scale).upper,
        })
    }

    fn subset_lower(&mut self, pair: usize, c: u64) -> Result<f64, PlannerError> {
        Ok(match &mut self.oracle {
            SubsetOracle::Beta(caches) => caches[pair].lower(c)?,
            SubsetOracle::Bernstein(scale) => bernstein_interval(c, self.visits[pair], *scale).lower,
        })
    }

    /// Total Beta inversions performed by the subset caches so far.
    pub fn inversions(&self) -> usize {
        match &self.oracle {
            SubsetOracle::Beta(caches) => caches.iter().map(QuantileCache::inversions).sum(),
            SubsetOracle::Bernstein(_) => 0,
        }
    }

    /// Whether `mdp` satisfies every reward bound and every subset bound.
    ///
    /// All `2^S - 2` proper subsets are checked up to
    /// [`EXHAUSTIVE_SUBSET_LIMIT`] states; beyond that only singletons and
    /// their complements.
    pub fn contains_model(&mut self, mdp: &TabularMdp) -> Result<bool, PlannerError> {
        if mdp.num_states() != self.num_states || mdp.num_actions() != self.num_actions {
            return Err(PlannerError::Shape("model size differs from the plausible set".into()));
        }
        let ns = self.num_states;
        for s in 0..ns {
            for a in 0..self.num_actions {
                let rb = self.reward_bounds(s, a);
                let r = mdp.reward_mean(s, a);
                if r < rb.lower - FEASIBILITY_SLACK || r > rb.upper + FEASIBILITY_SLACK {
                    return Ok(false);
                }
                let row = mdp.transition_row(s, a).to_vec();
                let counts = self.next_counts(s, a).to_vec();
                let check = |mass: f64, c: u64, this: &mut Self| -> Result<bool, PlannerError> {
                    let b = this.subset_bounds(s, a, c)?;
                    Ok(mass >= b.lower - FEASIBILITY_SLACK && mass <= b.upper + FEASIBILITY_SLACK)
                };
                if ns <= EXHAUSTIVE_SUBSET_LIMIT {
                    for mask in 1u32..(1u32 << ns) - 1 {
                        let (mut mass, mut c) = (0.0, 0u64);
                        for j in (0..ns).filter(|j| mask >> j & 1 == 1) {
                            mass += row[j];
                            c += counts[j];
                        }
                        if !check(mass, c, self)? {
                            return Ok(false);
                        }
                    }
                } else {
                    let n = self.visits(s, a);
                    for j in 0..ns {
                        if !check(row[j], counts[j], self)? || !check(1.0 - row[j], n - counts[j], self)? {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }
}

fn flat_counts(posterior: &PosteriorState) -> Vec<u64> {
    let mut out = Vec::with_capacity(posterior.num_states() * posterior.num_states() * posterior.num_actions());
    for s in 0..posterior.num_states() {
        for a in 0..posterior.num_actions() {
            out.extend_from_slice(posterior.next_counts(s, a));
        }
    }
    out
}

impl OptimisticSet for PlausibleSet {
    fn num_states(&self) -> usize {
        self.num_states
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn reward_upper(&self, s: usize, a: usize) -> f64 {
        self.reward_bounds(s, a).upper
    }

    fn optimistic_row(&mut self, s: usize, a: usize, order: &[usize], out: &mut [f64]) -> Result<(), PlannerError> {
        let ns = self.num_states;
        let n = self.visits(s, a);
        let pair = self.pair(s, a);
        let i = pair * ns;
        let mut cum = 0u64;
        let mut prev = 0.0f64;
        for &state in &order[..ns - 1] {
            cum += self.next_counts[i + state];
            let top = self.subset_upper(pair, cum)?;
            let rest = self.subset_lower(pair, n - cum)?;
            let c = top.min(1.0 - rest).max(prev).min(1.0);
            out[state] = c - prev;
            prev = c;
        }
        let last = order[ns - 1];
        let mass = 1.0 - prev;
        let bound = self.subset_upper(pair, self.next_counts[i + last])?;
        if mass > bound + FEASIBILITY_SLACK {
            return Err(PlannerError::Infeasible { s, a, mass, bound });
        }
        out[last] = mass;
        Ok(())
    }
}

/// States sorted by decreasing value, ties broken by index.
pub fn descending_order(u: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..u.len()).collect();
    order.sort_by(|&i, &j| u[j].total_cmp(&u[i]).then(i.cmp(&j)));
    order
}

/// The row of `(s, a)` maximizing `Σ p(s') u(s')` over `set`.
pub fn optimistic_transition_row<O: OptimisticSet + ?Sized>(
    u: &[f64],
    s: usize,
    a: usize,
    set: &mut O,
) -> Result<Vec<f64>, PlannerError> {
    if u.len() != set.num_states() {
        return Err(PlannerError::Shape("value vector length differs from the state count".into()));
    }
    let mut row = vec![0.0; u.len()];
    set.optimistic_row(s, a, &descending_order(u), &mut row)?;
    Ok(row)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueVector(pub Vec<f64>);

impl ValueVector {
    pub fn span(&self) -> f64 {
        let (lo, hi) = crate::mdp::min_max(&self.0);
        hi - lo
    }

    /// Shifts so that the minimum is zero.
    pub fn normalize(&mut self) {
        let lo = self.0.iter().copied().fold(f64::INFINITY, f64::min);
        self.0.iter_mut().for_each(|v| *v -= lo);
    }
}

/// Rewards and transitions realized at the final EVI sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimisticModel {
    num_states: usize,
    num_actions: usize,
    reward: Vec<f64>,
    transition: Vec<f64>,
}

impl OptimisticModel {
    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward[s * self.num_actions + a]
    }

    pub fn transition_row(&self, s: usize, a: usize) -> &[f64] {
        let i = (s * self.num_actions + a) * self.num_states;
        &self.transition[i..i + self.num_states]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EviResult {
    pub policy: Policy,
    pub model: OptimisticModel,
    pub gain_estimate: f64,
    pub bias: ValueVector,
    pub sweeps: usize,
}

pub fn default_sweep_cap(num_states: usize) -> usize {
    (1_000_000 / num_states.max(1)).max(1)
}

/// Value iteration with an inner maximization over `set`, stopped once the
/// span of the increment is at most `epsilon`.
///
/// Optimistic rows are recomputed only when the value ordering changes, since
/// they depend on `u` through its ordering alone.
pub fn extended_value_iteration<O: OptimisticSet + ?Sized>(
    set: &mut O,
    epsilon: f64,
    max_sweeps: Option<usize>,
) -> Result<EviResult, PlannerError> {
    if !(epsilon > 0.0) {
        return Err(PlannerError::InvalidEpsilon(epsilon));
    }
    let (ns, na) = (set.num_states(), set.num_actions());
    let cap = max_sweeps.unwrap_or_else(|| default_sweep_cap(ns));
    let reward: Vec<f64> = (0..ns * na).map(|i| set.reward_upper(i / na, i % na).min(1.0)).collect();
    let mut transition = vec![0.0; ns * na * ns];
    let mut u = vec![0.0; ns];
    let mut next = vec![0.0; ns];
    let mut actions = vec![0usize; ns];
    let mut last_order: Option<Vec<usize>> = None;

    for sweep in 1..=cap {
        let order = descending_order(&u);
        if last_order.as_ref() != Some(&order) {
            for s in 0..ns {
                for a in 0..na {
                    let i = (s * na + a) * ns;
                    set.optimistic_row(s, a, &order, &mut transition[i..i + ns])?;
                }
            }
            last_order = Some(order);
        }
        for s in 0..ns {
            let mut best = f64::NEG_INFINITY;
            for a in 0..na {
                let i = (s * na + a) * ns;
                let q = reward[s * na + a]
                    + transition[i..i + ns].iter().zip(&u).map(|(p, v)| p * v).sum::<f64>();
                if q > best {
                    best = q;
                    actions[s] = a;
                }
            }
            next[s] = best;
        }
        let (lo, hi) = crate::mdp::min_max(&next.iter().zip(&u).map(|(x, y)| x - y).collect::<Vec<_>>());
        std::mem::swap(&mut u, &mut next);
        let mut values = ValueVector(u);
        values.normalize();
        u = values.0;
        if hi - lo <= epsilon {
            return Ok(EviResult {
                policy: Policy(actions),
                model: OptimisticModel {
                    num_states: ns,
                    num_actions: na,
                    reward,
                    transition,
                },
                gain_estimate: 0.5 * (hi + lo),
                bias: ValueVector(u),
                sweeps: sweep,
            });
        }
    }
    Err(PlannerError::SweepBudget { epsilon, sweeps: cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{optimal_gain, RewardKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn single_pair_set(counts: &[u64], rule: SubsetBoundRule) -> PlausibleSet {
        let s = counts.len();
        let mut all = vec![0u64; s * s];
        all[..s].copy_from_slice(counts);
        PlausibleSet::from_counts(s, 1, vec![QuantilePair::VACUOUS; s], all, rule).unwrap()
    }

    #[test]
    fn unvisited_pair_puts_all_mass_on_argmax() {
        let mut set = single_pair_set(&[0, 0, 0, 0], SubsetBoundRule::BetaQuantile { delta: 0.01 });
        let row = optimistic_transition_row(&[0.2, 0.9, 0.1, 0.9], 0, 0, &mut set).unwrap();
        assert_eq!(row, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn rows_are_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let s = rng.random_range(2..7);
            let counts: Vec<u64> = (0..s).map(|_| rng.random_range(0..15)).collect();
            let rule = if rng.random_bool(0.5) {
                SubsetBoundRule::BetaQuantile { delta: 0.01 }
            } else {
                SubsetBoundRule::EmpiricalBernstein { scale: 50.0 }
            };
            let mut set = single_pair_set(&counts, rule);
            let u: Vec<f64> = (0..s).map(|_| rng.random::<f64>()).collect();
            let row = optimistic_transition_row(&u, 0, 0, &mut set).unwrap();
            assert!(row.iter().all(|p| *p >= 0.0));
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn optimistic_row_dominates_empirical_row() {
        let counts = [5u64, 1, 9, 3];
        let n: u64 = counts.iter().sum();
        let mut set = single_pair_set(&counts, SubsetBoundRule::BetaQuantile { delta: 0.05 });
        let u = [0.4, 1.3, 0.0, 0.8];
        let row = optimistic_transition_row(&u, 0, 0, &mut set).unwrap();
        let opt: f64 = row.iter().zip(&u).map(|(p, v)| p * v).sum();
        let emp: f64 = counts.iter().zip(&u).map(|(c, v)| *c as f64 / n as f64 * v).sum();
        assert!(opt >= emp);
    }

    #[test]
    fn one_sweep_uses_few_inversions() {
        let counts = [12u64, 7, 0, 30, 2, 9];
        let mut set = single_pair_set(&counts, SubsetBoundRule::BetaQuantile { delta: 1e-3 });
        let u = [0.3, 0.9, 0.1, 0.5, 0.7, 0.2];
        optimistic_transition_row(&u, 0, 0, &mut set).unwrap();
        assert!(set.inversions() <= counts.len() + 1);
    }

    #[test]
    fn bernstein_interval_contains_mean() {
        assert_eq!(bernstein_interval(0, 0, 10.0), QuantilePair::VACUOUS);
        for (c, n) in [(0u64, 5u64), (3, 10), (10, 10), (400, 1000)] {
            assert!(bernstein_interval(c, n, 10.0).contains(c as f64 / n as f64));
        }
    }

    #[test]
    fn vacuous_set_has_gain_one() {
        let post = PosteriorState::new(3, 2);
        let mut set = PlausibleSet::from_posterior(&post, 0.01, 0.001).unwrap();
        let res = extended_value_iteration(&mut set, 1e-6, None).unwrap();
        assert!((res.gain_estimate - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn bandit_with_exact_bounds() {
        let means = [0.2, 0.65, 0.4];
        let bounds = means.iter().map(|&m| QuantilePair { lower: m, upper: m }).collect();
        let mut set = PlausibleSet::from_counts(
            1,
            3,
            bounds,
            vec![10, 10, 10],
            SubsetBoundRule::BetaQuantile { delta: 0.05 },
        )
        .unwrap();
        let res = extended_value_iteration(&mut set, 1e-8, None).unwrap();
        assert!((res.gain_estimate - 0.65).abs() <= 1e-8);
        assert_eq!(res.policy, Policy(vec![1]));
    }

    fn random_mdp(rng: &mut ChaCha8Rng, s: usize, a: usize) -> TabularMdp {
        let rewards = (0..s).map(|_| (0..a).map(|_| rng.random::<f64>()).collect()).collect();
        let trans = (0..s)
            .map(|_| {
                (0..a)
                    .map(|_| {
                        let w: Vec<f64> = (0..s).map(|_| rng.random::<f64>() + 0.05).collect();
                        let t: f64 = w.iter().sum();
                        w.into_iter().map(|x| x / t).collect()
                    })
                    .collect()
            })
            .collect();
        TabularMdp::new(rewards, trans, RewardKind::Bernoulli).unwrap()
    }

    fn sample_posterior(rng: &mut ChaCha8Rng, mdp: &TabularMdp, steps: usize) -> PosteriorState {
        let mut post = PosteriorState::new(mdp.num_states(), mdp.num_actions());
        for _ in 0..steps {
            let s = rng.random_range(0..mdp.num_states());
            let a = rng.random_range(0..mdp.num_actions());
            let (r, next) = mdp.step(s, a, rng).unwrap();
            let bit = crate::posterior::bernoulli_trial(r, rng).unwrap();
            post.record(s, a, bit, next);
        }
        post
    }

    #[test]
    fn optimism_when_truth_is_plausible() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        for _ in 0..30 {
            let mdp = random_mdp(&mut rng, 3, 2);
            let post = sample_posterior(&mut rng, &mdp, 200);
            let mut set = PlausibleSet::from_posterior(&post, 0.01, 0.005).unwrap();
            if !set.contains_model(&mdp).unwrap() {
                continue;
            }
            checked += 1;
            let eps = 1e-4;
            let res = extended_value_iteration(&mut set, eps, None).unwrap();
            let truth = optimal_gain(&mdp, 1e-9).unwrap().gain;
            assert!(res.gain_estimate >= truth - eps, "{} < {truth}", res.gain_estimate);
        }
        assert!(checked > 20);
    }

    #[test]
    fn wider_bounds_never_lower_the_gain() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let mdp = random_mdp(&mut rng, 4, 2);
            let post = sample_posterior(&mut rng, &mdp, 300);
            let mut narrow = PlausibleSet::from_posterior(&post, 0.05, 0.05).unwrap();
            let mut wide = PlausibleSet::from_posterior(&post, 0.001, 0.001).unwrap();
            let g_n = extended_value_iteration(&mut narrow, 1e-7, None).unwrap().gain_estimate;
            let g_w = extended_value_iteration(&mut wide, 1e-7, None).unwrap().gain_estimate;
            assert!(g_w >= g_n - 2e-7);
        }
    }

    #[test]
    fn identical_inputs_identical_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mdp = random_mdp(&mut rng, 5, 3);
        let post = sample_posterior(&mut rng, &mdp, 500);
        let a = extended_value_iteration(&mut PlausibleSet::from_posterior(&post, 0.01, 0.01).unwrap(), 1e-5, None);
        let b = extended_value_iteration(&mut PlausibleSet::from_posterior(&post, 0.01, 0.01).unwrap(), 1e-5, None);
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_model_is_plausible() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mdp = random_mdp(&mut rng, 4, 2);
        let post = sample_posterior(&mut rng, &mdp, 400);
        let mut set = PlausibleSet::from_posterior(&post, 0.01, 0.01).unwrap();
        for s in 0..4 {
            for a in 0..2 {
                let n = post.visits(s, a);
                if n == 0 {
                    continue;
                }
                for mask in 1u32..15 {
                    let c: u64 = (0..4).filter(|j| mask >> j & 1 == 1).map(|j| post.next_counts(s, a)[j]).sum();
                    assert!(set.subset_bounds(s, a, c).unwrap().contains(c as f64 / n as f64));
                }
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut set = single_pair_set(&[1, 1], SubsetBoundRule::BetaQuantile { delta: 0.05 });
        assert!(matches!(
            extended_value_iteration(&mut set, 0.0, None),
            Err(PlannerError::InvalidEpsilon(_))
        ));
        assert!(optimistic_transition_row(&[0.0], 0, 0, &mut set).is_err());
        assert!(PlausibleSet::from_counts(2, 1, vec![], vec![0; 4], SubsetBoundRule::BetaQuantile { delta: 0.1 }).is_err());
    }
}
