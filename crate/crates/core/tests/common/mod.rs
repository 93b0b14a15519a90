#![allow(dead_code)]

use bucrl_core::planner::{PlausibleSet, SubsetBoundRule};
use bucrl_core::posterior::QuantilePair;
use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LP_SCALE: f64 = 1e4;

/// A random single-pair inner-max instance: values, next-state counts and a rule.
pub struct RowInstance {
    pub u: Vec<f64>,
    pub counts: Vec<u64>,
    pub rule: SubsetBoundRule,
}

impl RowInstance {
    pub fn random(rng: &mut ChaCha8Rng, num_states: usize) -> Self {
        let max_count = *[0u64, 3, 20, 200].get(rng.random_range(0..4)).unwrap();
        let counts = (0..num_states).map(|_| rng.random_range(0..=max_count)).collect();
        let mut u: Vec<f64> = (0..num_states).map(|_| rng.random::<f64>() * 5.0).collect();
        if rng.random_bool(0.2) {
            u[rng.random_range(0..num_states)] = u[0];
        }
        let rule = if rng.random_bool(0.7) {
            SubsetBoundRule::BetaQuantile {
                delta: 10f64.powf(-rng.random_range(1.0..8.0)),
            }
        } else {
            SubsetBoundRule::EmpiricalBernstein {
                scale: 10f64.powf(rng.random_range(0.5..6.0)),
            }
        };
        Self { u, counts, rule }
    }

    pub fn set(&self) -> PlausibleSet {
        let s = self.counts.len();
        let mut all = vec![0u64; s * s];
        all[..s].copy_from_slice(&self.counts);
        PlausibleSet::from_counts(s, 1, vec![QuantilePair::VACUOUS; s], all, self.rule).unwrap()
    }

    /// Maximum of `Σ p u` over the simplex intersected with every proper
    /// subset constraint, by linear programming.
    ///
    /// minilp works to an absolute tolerance of 1e-8, which is coarser than
    /// the smallest subset bounds, so the problem is posed in `q = LP_SCALE p`
    /// with the objective scaled by `LP_SCALE` as well.
    pub fn lp_optimum(&self) -> f64 {
        let s = self.counts.len();
        let mut set = self.set();
        let mut problem = Problem::new(OptimizationDirection::Maximize);
        let vars: Vec<_> = self
            .u
            .iter()
            .map(|&v| problem.add_var(v * LP_SCALE, (0.0, LP_SCALE)))
            .collect();
        let all: Vec<_> = vars.iter().map(|&v| (v, 1.0)).collect();
        problem.add_constraint(all.as_slice(), ComparisonOp::Eq, LP_SCALE);
        for mask in 1u32..(1 << s) - 1 {
            let members: Vec<_> = (0..s).filter(|j| mask >> j & 1 == 1).collect();
            let c = members.iter().map(|&j| self.counts[j]).sum();
            let b = set.subset_bounds(0, 0, c).unwrap();
            let expr: Vec<_> = members.iter().map(|&j| (vars[j], 1.0)).collect();
            if b.lower > 0.0 {
                problem.add_constraint(expr.as_slice(), ComparisonOp::Ge, b.lower * LP_SCALE);
            }
            if b.upper < 1.0 {
                problem.add_constraint(expr.as_slice(), ComparisonOp::Le, b.upper * LP_SCALE);
            }
        }
        problem.solve().expect("plausible polytope is nonempty").objective() / (LP_SCALE * LP_SCALE)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
