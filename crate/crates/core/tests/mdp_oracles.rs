mod common;

use bucrl_core::mdp::{diameter, make_environment, optimal_gain, policy_gain, EnvParams, Policy, RewardKind, TabularMdp};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

const TOL: f64 = 1e-10;

/// Dense model with every transition probability positive, so each policy is
/// unichain and aperiodic.
fn mixing_mdp(rng: &mut impl Rng, s: usize, a: usize) -> TabularMdp {
    let rewards = (0..s).map(|_| (0..a).map(|_| rng.random::<f64>()).collect()).collect();
    let trans = (0..s)
        .map(|_| {
            (0..a)
                .map(|_| {
                    let w: Vec<f64> = (0..s).map(|_| 0.05 + rng.random::<f64>()).collect();
                    let total: f64 = w.iter().sum();
                    w.into_iter().map(|x| x / total).collect()
                })
                .collect()
        })
        .collect();
    TabularMdp::new(rewards, trans, RewardKind::Bernoulli).unwrap()
}

/// Gain of a unichain policy from `(I - P) h + g 1 = r`, `h_0 = 0`.
fn exact_policy_gain(mdp: &TabularMdp, policy: &Policy) -> f64 {
    let n = mdp.num_states();
    let mut m = DMatrix::zeros(n, n);
    let mut r = DVector::zeros(n);
    for s in 0..n {
        let a = policy.action(s);
        let row = mdp.transition_row(s, a);
        r[s] = mdp.reward_mean(s, a);
        // column 0 carries g since h_0 is pinned to zero
        m[(s, 0)] = 1.0;
        for t in 1..n {
            m[(s, t)] = if s == t { 1.0 } else { 0.0 } - row[t];
        }
    }
    m.lu().solve(&r).expect("unichain system is regular")[0]
}

/// Expected hitting times of `target` under a fixed policy.
fn hitting_times(mdp: &TabularMdp, policy: &Policy, target: usize) -> Vec<f64> {
    let n = mdp.num_states();
    let others: Vec<usize> = (0..n).filter(|&s| s != target).collect();
    let k = others.len();
    let mut m = DMatrix::zeros(k, k);
    for (i, &s) in others.iter().enumerate() {
        let row = mdp.transition_row(s, policy.action(s));
        for (j, &t) in others.iter().enumerate() {
            m[(i, j)] = if i == j { 1.0 } else { 0.0 } - row[t];
        }
    }
    let h = m.lu().solve(&DVector::from_element(k, 1.0)).expect("target is reachable");
    let mut out = vec![0.0; n];
    for (i, &s) in others.iter().enumerate() {
        out[s] = h[i];
    }
    out
}

fn brute_force_diameter(mdp: &TabularMdp) -> f64 {
    let n = mdp.num_states();
    let mut worst: f64 = 0.0;
    for target in 0..n {
        let mut best = vec![f64::INFINITY; n];
        for policy in Policy::enumerate(n, mdp.num_actions()) {
            for (b, h) in best.iter_mut().zip(hitting_times(mdp, &policy, target)) {
                *b = b.min(h);
            }
        }
        worst = worst.max(best.into_iter().fold(0.0, f64::max));
    }
    worst
}

#[test]
fn optimal_gain_matches_policy_enumeration() {
    let mut rng = common::rng(11);
    for _ in 0..60 {
        let (s, a) = (rng.random_range(1..=4), rng.random_range(1..=3));
        let mdp = mixing_mdp(&mut rng, s, a);
        let best = Policy::enumerate(s, a)
            .map(|p| exact_policy_gain(&mdp, &p))
            .fold(f64::NEG_INFINITY, f64::max);
        let solved = optimal_gain(&mdp, TOL).unwrap();
        assert!((solved.gain - best).abs() < 1e-8, "{} vs {best}", solved.gain);
        let greedy = exact_policy_gain(&mdp, &solved.policy);
        assert!(greedy > best - 1e-8);
    }
}

#[test]
fn policy_gain_matches_linear_solve() {
    let mut rng = common::rng(12);
    for _ in 0..40 {
        let (s, a) = (rng.random_range(1..=4), rng.random_range(1..=3));
        let mdp = mixing_mdp(&mut rng, s, a);
        let policy = Policy((0..s).map(|_| rng.random_range(0..a)).collect());
        let vi = policy_gain(&mdp, &policy, TOL).unwrap();
        assert!((vi - exact_policy_gain(&mdp, &policy)).abs() < 1e-8);
        let opt = optimal_gain(&mdp, TOL).unwrap().gain;
        assert!(opt >= vi - 2.0 * TOL);
    }
}

#[test]
fn diameter_matches_brute_force() {
    let mut rng = common::rng(13);
    for _ in 0..40 {
        let (s, a) = (rng.random_range(2..=4), rng.random_range(1..=3));
        let mdp = mixing_mdp(&mut rng, s, a);
        let exact = brute_force_diameter(&mdp);
        let d = diameter(&mdp, 1e-10);
        assert!((d - exact).abs() < 1e-6 * exact.max(1.0), "{d} vs {exact}");
    }
}

#[test]
fn diameter_is_permutation_invariant() {
    let mut rng = common::rng(14);
    let river = make_environment("riverswim", &EnvParams::default()).unwrap();
    let mut models = vec![river];
    for _ in 0..10 {
        models.push(mixing_mdp(&mut rng, 5, 2));
    }
    for mdp in models {
        let mut perm: Vec<usize> = (0..mdp.num_states()).collect();
        perm.shuffle(&mut rng);
        let shuffled = mdp.permute_states(&perm).unwrap();
        let (d0, d1) = (diameter(&mdp, 1e-10), diameter(&shuffled, 1e-10));
        assert!((d0 - d1).abs() < 1e-7 * d0, "{d0} vs {d1}");
        let (g0, g1) = (optimal_gain(&mdp, TOL).unwrap().gain, optimal_gain(&shuffled, TOL).unwrap().gain);
        assert!((g0 - g1).abs() < 1e-9);
    }
}

#[test]
fn step_frequencies_follow_the_model() {
    let mut rng = common::rng(15);
    let mdp = make_environment("riverswim", &EnvParams::default()).unwrap();
    let n = 200_000;
    for (s, a) in [(0, 1), (3, 1), (5, 1), (2, 0)] {
        let mut counts = vec![0u64; mdp.num_states()];
        let mut reward = 0.0;
        for _ in 0..n {
            let (r, next) = mdp.step(s, a, &mut rng).unwrap();
            counts[next] += 1;
            reward += r;
        }
        for (t, &p) in mdp.transition_row(s, a).iter().enumerate() {
            let sd = (p * (1.0 - p) / n as f64).sqrt();
            let freq = counts[t] as f64 / n as f64;
            assert!((freq - p).abs() <= 3.0 * sd + 1e-12, "P({t}|{s},{a}) = {p}, observed {freq}");
        }
        let mean = mdp.reward_mean(s, a);
        let sd = (mean * (1.0 - mean) / n as f64).sqrt();
        assert!((reward / n as f64 - mean).abs() <= 3.0 * sd + 1e-12);
    }
}

#[test]
fn riverswim_gain_is_always_right() {
    let mdp = make_environment("riverswim", &EnvParams::default()).unwrap();
    let right = Policy::constant(mdp.num_states(), 1);
    let exact = exact_policy_gain(&mdp, &right);
    let solved = optimal_gain(&mdp, TOL).unwrap();
    assert!((solved.gain - exact).abs() < 1e-9, "{} vs {exact}", solved.gain);
    assert_eq!(solved.policy, right);
}
