//! Tabular average-reward reinforcement learning with Bayesian quantile
//! optimism (BUCRL), its baselines, and a seeded regret harness.
//!
//! Module map:
//!
//! - [`numerics`]: Bernoulli KL, Binomial/Beta CDFs and quantiles, closed-form bounds.
//! - [`mdp`]: ground-truth MDPs, benchmark environments, gain and diameter solvers.
//! - [`posterior`]: Beta posterior bookkeeping and marginal quantiles.
//! - [`planner`]: extended value iteration over a plausible set of MDPs.
//! - [`agents`]: BUCRL, UCRL2, a UCRL-V-style Bernstein agent, and TSDE.
//! - [`harness`]: trials, experiments, CSV/JSON persistence and the regret bound.

pub mod agents;
pub mod harness;
pub mod mdp;
pub mod numerics;
pub mod planner;
pub mod posterior;
