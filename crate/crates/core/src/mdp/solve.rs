//! Average-reward solvers used as ground truth for regret.
//!
//! Both gain solvers run relative value iteration on the aperiodicity
//! transform `P' = τI + (1-τ)P`, which has the same gain and bias as `P`
//! but cannot oscillate on periodic chains. The stopping certificate is
//! computed with the untransformed operator `T`:
//! `min_s (Tu - u)(s) <= gain <= max_s (Tu - u)(s)` for any `u`.

use super::{MdpError, Policy, TabularMdp};

pub const SOLVER_MAX_SWEEPS: usize = 2_000_000;
const APERIODICITY: f64 = 0.5;
const DIAMETER_CAP: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct GainResult {
    pub gain: f64,
    /// Relative values, normalized so that the minimum is zero.
    pub bias: Vec<f64>,
    pub policy: Policy,
}

fn expected_value(row: &[f64], u: &[f64]) -> f64 {
    row.iter().zip(u).map(|(p, v)| p * v).sum()
}

fn relative_value_iteration<F>(
    mdp: &TabularMdp,
    tol: f64,
    max_sweeps: usize,
    mut backup: F,
) -> Result<(GainResult, bool), MdpError>
where
    F: FnMut(usize, &[f64]) -> (f64, usize),
{
    if !(tol > 0.0) {
        return Err(MdpError::Invalid(format!("tolerance {tol} must be positive")));
    }
    let n = mdp.num_states();
    let mut u = vec![0.0; n];
    let mut increment = vec![0.0; n];
    let mut actions = vec![0usize; n];
    for sweep in 1..=max_sweeps {
        for s in 0..n {
            let (best, a) = backup(s, &u);
            increment[s] = best - u[s];
            actions[s] = a;
        }
        let (lo, hi) = min_max(&increment);
        let converged = hi - lo < tol;
        if converged || sweep == max_sweeps {
            let floor = u.iter().copied().fold(f64::INFINITY, f64::min);
            let result = GainResult {
                gain: 0.5 * (hi + lo),
                bias: u.iter().map(|v| v - floor).collect(),
                policy: Policy(actions),
            };
            return Ok((result, converged));
        }
        for s in 0..n {
            u[s] += (1.0 - APERIODICITY) * increment[s];
        }
        let floor = u.iter().copied().fold(f64::INFINITY, f64::min);
        u.iter_mut().for_each(|v| *v -= floor);
    }
    Err(MdpError::Invalid("sweep budget must be positive".into()))
}

fn greedy_backup(mdp: &TabularMdp) -> impl FnMut(usize, &[f64]) -> (f64, usize) + '_ {
    |s, u| {
        let mut best = f64::NEG_INFINITY;
        let mut best_a = 0;
        for a in 0..mdp.num_actions() {
            let q = mdp.reward_mean(s, a) + expected_value(mdp.transition_row(s, a), u);
            if q > best {
                best = q;
                best_a = a;
            }
        }
        (best, best_a)
    }
}

pub(crate) fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)))
}

/// Optimal gain, bias and a greedy optimal policy. Assumes a communicating MDP.
pub fn optimal_gain(mdp: &TabularMdp, tol: f64) -> Result<GainResult, MdpError> {
    match relative_value_iteration(mdp, tol, SOLVER_MAX_SWEEPS, greedy_backup(mdp))? {
        (result, true) => Ok(result),
        (_, false) => Err(MdpError::NoConvergence { tol, sweeps: SOLVER_MAX_SWEEPS }),
    }
}

/// Like [`optimal_gain`] but returns the greedy policy of the last sweep when
/// the budget runs out; the flag reports whether `tol` was reached.
pub fn optimal_gain_within(mdp: &TabularMdp, tol: f64, max_sweeps: usize) -> Result<(GainResult, bool), MdpError> {
    relative_value_iteration(mdp, tol, max_sweeps, greedy_backup(mdp))
}

/// Average reward of a fixed policy whose chain is unichain.
pub fn policy_gain(mdp: &TabularMdp, policy: &Policy, tol: f64) -> Result<f64, MdpError> {
    if !policy.is_valid_for(mdp) {
        return Err(MdpError::Invalid("policy does not fit the model".into()));
    }
    let backup = |s: usize, u: &[f64]| {
        let a = policy.action(s);
        (mdp.reward_mean(s, a) + expected_value(mdp.transition_row(s, a), u), a)
    };
    match relative_value_iteration(mdp, tol, SOLVER_MAX_SWEEPS, backup)? {
        (result, true) => Ok(result.gain),
        (_, false) => Err(MdpError::NoConvergence { tol, sweeps: SOLVER_MAX_SWEEPS }),
    }
}

/// Max over ordered pairs of the minimal expected hitting time.
///
/// Returns `+inf` when some state cannot reach another (the iteration runs
/// past its sweep budget or value cap). A single-state MDP has diameter 0.
pub fn diameter(mdp: &TabularMdp, tol: f64) -> f64 {
    let n = mdp.num_states();
    if n < 2 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    let mut hit = vec![0.0; n];
    let mut next = vec![0.0; n];
    for target in 0..n {
        hit.iter_mut().for_each(|v| *v = 0.0);
        let mut converged = false;
        for _ in 0..SOLVER_MAX_SWEEPS {
            let mut change: f64 = 0.0;
            for s in 0..n {
                if s == target {
                    next[s] = 0.0;
                    continue;
                }
                let best = (0..mdp.num_actions())
                    .map(|a| {
                        let row = mdp.transition_row(s, a);
                        1.0 + row
                            .iter()
                            .zip(&hit)
                            .enumerate()
                            .filter(|(u, _)| *u != target)
                            .map(|(_, (p, t))| p * t)
                            .sum::<f64>()
                    })
                    .fold(f64::INFINITY, f64::min);
                change = change.max((best - hit[s]).abs());
                next[s] = best;
            }
            std::mem::swap(&mut hit, &mut next);
            if hit.iter().any(|t| *t > DIAMETER_CAP) {
                return f64::INFINITY;
            }
            if change < tol * 1e-3 {
                converged = true;
                break;
            }
        }
        if !converged {
            return f64::INFINITY;
        }
        worst = worst.max(hit.iter().copied().fold(0.0, f64::max));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{make_environment, EnvParams, RewardKind};

    fn bandit(means: &[f64]) -> TabularMdp {
        TabularMdp::new(
            vec![means.to_vec()],
            vec![vec![vec![1.0]; means.len()]],
            RewardKind::Bernoulli,
        )
        .unwrap()
    }

    fn swap_cycle() -> TabularMdp {
        TabularMdp::new(
            vec![vec![0.0], vec![1.0]],
            vec![vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]],
            RewardKind::Bernoulli,
        )
        .unwrap()
    }

    #[test]
    fn bandit_gain_is_best_arm() {
        let mdp = bandit(&[0.3, 0.7]);
        let g = optimal_gain(&mdp, 1e-9).unwrap();
        assert_eq!(g.gain, 0.7);
        assert_eq!(g.policy, Policy(vec![1]));
        assert_eq!(policy_gain(&mdp, &Policy(vec![0]), 1e-9).unwrap(), 0.3);
        assert_eq!(diameter(&mdp, 1e-9), 0.0);
    }

    #[test]
    fn zero_rewards_give_zero_gain() {
        let mdp = TabularMdp::new(
            vec![vec![0.0, 0.0]; 3],
            vec![vec![vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0]]; 3],
            RewardKind::Bernoulli,
        )
        .unwrap();
        assert_eq!(optimal_gain(&mdp, 1e-9).unwrap().gain, 0.0);
    }

    #[test]
    fn periodic_cycle_averages() {
        let mdp = swap_cycle();
        let g = policy_gain(&mdp, &Policy(vec![0, 0]), 1e-10).unwrap();
        assert!((g - 0.5).abs() < 1e-10);
        assert!((diameter(&mdp, 1e-9) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn riverswim_left_policy_gain() {
        let mdp = make_environment("riverswim", &EnvParams::default()).unwrap();
        let g = policy_gain(&mdp, &Policy::constant(6, 0), 1e-10).unwrap();
        assert!((g - 0.005).abs() < 1e-9);
        let opt = optimal_gain(&mdp, 1e-10).unwrap();
        assert!(opt.bias.iter().copied().fold(f64::INFINITY, f64::min) == 0.0);
        assert!((0.0..=1.0).contains(&opt.gain));
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(optimal_gain(&swap_cycle(), 0.0).is_err());
    }

    #[test]
    fn disconnected_model_has_infinite_diameter() {
        let mdp = TabularMdp::new(
            vec![vec![0.5], vec![0.5]],
            vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]],
            RewardKind::Bernoulli,
        )
        .unwrap();
        assert!(diameter(&mdp, 1e-6).is_infinite());
    }
}
