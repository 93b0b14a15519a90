//! Bernoulli KL divergence and its elementary sandwich bounds.
//!
//! For `q = 1 - p` and a deviation `0 <= x <= q`:
//!
//! ```text
//! x² / (2(pq + x(q-p)/3))  <=  KL(p+x || p)  <=  x² / (2(pq - xp/2))  <=  x² / (pq)
//! ```

use super::{check, NumericsError};

fn xlogx_over(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        // a ln(a/b) written as a ln1p((a-b)/b) to keep precision when a ≈ b
        a * ((a - b) / b).ln_1p()
    }
}

/// `KL(Bern(r) || Bern(p))` in nats, with `0 ln 0 = 0`.
///
/// Returns `+inf` when `r` puts mass on an outcome `p` rules out.
pub fn bernoulli_kl(p: f64, r: f64) -> f64 {
    if p == r {
        return 0.0;
    }
    let v = xlogx_over(r, p) + xlogx_over(1.0 - r, 1.0 - p);
    v.max(0.0)
}

fn check_deviation(p: f64, x: f64) -> Result<f64, NumericsError> {
    check(p > 0.0 && p < 1.0, "p", p, "(0, 1)")?;
    let q = 1.0 - p;
    check(x >= 0.0 && x <= q, "x", x, "[0, 1 - p]")?;
    Ok(q)
}

/// Bernstein-type lower bound `x² / (2(pq + x(q-p)/3))` on `KL(p+x || p)`.
pub fn kl_lower_bound(p: f64, x: f64) -> Result<f64, NumericsError> {
    let q = check_deviation(p, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(x * x / (2.0 * (p * q + x * (q - p) / 3.0)))
}

/// Upper bound `x² / (2(pq - xp/2))` on `KL(p+x || p)`.
///
/// Its leading term matches the KL divergence as `x -> 0`.
pub fn kl_upper_bound_tight(p: f64, x: f64) -> Result<f64, NumericsError> {
    let q = check_deviation(p, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(x * x / (2.0 * (p * q - x * p / 2.0)))
}

/// Looser upper bound `x² / (pq)`, using `2(pq - xp/2) = pq + p(q - x) >= pq`.
pub fn kl_upper_bound_loose(p: f64, x: f64) -> Result<f64, NumericsError> {
    let q = check_deviation(p, x)?;
    Ok(x * x / (p * q))
}
