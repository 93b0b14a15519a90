//! Special functions and concentration bounds for Bernoulli, Binomial and
//! Beta distributions.
//!
//! Everything here is a pure `f64` function. The exact quantiles
//! ([`beta_quantile_exact`], [`binomial_quantile_exact`]) drive the agents;
//! the closed-form bounds in [`bounds`] and [`kl`] are elementary-function
//! envelopes around them and are what the regret analysis relies on.

pub mod binomial;
pub mod bounds;
pub mod kl;
pub mod special;

use thiserror::Error;

pub use binomial::{binomial_cdf, binomial_pmf_table, binomial_quantile_exact};
pub use bounds::{
    beta_quantile_lower_bound, beta_quantile_upper_bound, binomial_quantile_lower,
    binomial_quantile_upper, BoundShape, BINOMIAL_LOWER_OFFSET, BINOMIAL_UPPER_OFFSET,
};
pub use kl::{bernoulli_kl, kl_lower_bound, kl_upper_bound_loose, kl_upper_bound_tight};
pub use special::{
    beta_quantile_exact, beta_quantile_upper_tail, ln_beta, normal_quantile,
    regularized_incomplete_beta,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("{name} = {value} is outside its domain {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("beta quantile did not converge for a={a}, b={b}, target={target}")]
    NoConvergence { a: f64, b: f64, target: f64 },
}

pub(crate) fn check(
    ok: bool,
    name: &'static str,
    value: f64,
    expected: &'static str,
) -> Result<(), NumericsError> {
    if ok {
        Ok(())
    } else {
        Err(NumericsError::Domain {
            name,
            value,
            expected,
        })
    }
}
