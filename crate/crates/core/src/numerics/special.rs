//! Normal quantile, regularized incomplete beta, and exact Beta quantiles.

use statrs::function::{erf::erfc_inv, gamma::ln_gamma};

use super::{check, NumericsError};

const CF_MAX_ITER: usize = 20_000;
const CF_EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const QUANTILE_MAX_ITER: usize = 1_000;

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Standard normal quantile `Φ⁻¹(q)`.
///
/// Exactly antisymmetric: `normal_quantile(1 - q) == -normal_quantile(q)`
/// whenever `1 - q` is representable.
pub fn normal_quantile(q: f64) -> Result<f64, NumericsError> {
    check(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    if q > 0.5 {
        Ok(-lower_normal_quantile(1.0 - q))
    } else {
        Ok(lower_normal_quantile(q))
    }
}

fn lower_normal_quantile(q: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * q)
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Returns `(I_x(a, b), 1 - I_x(a, b))`, each accurate in its own tail.
pub(crate) fn beta_inc_pair(a: f64, b: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        let lower = (ln_front.exp() * beta_cf(a, b, x) / a).clamp(0.0, 1.0);
        (lower, 1.0 - lower)
    } else {
        let upper = (ln_front.exp() * beta_cf(b, a, 1.0 - x) / b).clamp(0.0, 1.0);
        (1.0 - upper, upper)
    }
}

/// Regularized incomplete beta function `I_x(a, b)`, the CDF of `Beta(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64, NumericsError> {
    check(a > 0.0 && a.is_finite(), "a", a, "(0, inf)")?;
    check(b > 0.0 && b.is_finite(), "b", b, "(0, inf)")?;
    check((0.0..=1.0).contains(&x), "x", x, "[0, 1]")?;
    Ok(beta_inc_pair(a, b, x).0)
}

fn beta_density(a: f64, b: f64, x: f64, ln_b: f64) -> f64 {
    ((a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - ln_b).exp()
}

/// Solves `I_x(a, b) = target` by Newton steps safeguarded with bisection.
///
/// Arguments are assumed valid; both public quantile functions reduce to this.
pub(crate) fn solve_lower_tail(a: f64, b: f64, target: f64) -> Result<f64, NumericsError> {
    let ln_b = ln_beta(a, b);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);

    // I_x ≈ x^a / (a B(a, b)) near zero
    let mut x = ((target * a).ln() + ln_b) / a;
    x = x.exp();
    if !(x > 0.0 && x < 1.0) {
        x = a / (a + b);
    }
    for _ in 0..QUANTILE_MAX_ITER {
        let f = beta_inc_pair(a, b, x).0 - target;
        if f == 0.0 {
            return Ok(x);
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let density = beta_density(a, b, x, ln_b);
        let mut next = x - f / density;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = if lo == 0.0 && hi < 1e-3 {
                // geometric bisection for quantiles deep in the left tail
                hi * 0.5
            } else {
                0.5 * (lo + hi)
            };
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.max(next) || hi - lo <= f64::EPSILON * hi {
            return Ok(next);
        }
        x = next;
    }
    Err(NumericsError::NoConvergence { a, b, target })
}

fn check_beta_args(a: f64, b: f64, q: f64, name: &'static str) -> Result<(), NumericsError> {
    check(a > 0.0 && a.is_finite(), "a", a, "(0, inf)")?;
    check(b > 0.0 && b.is_finite(), "b", b, "(0, inf)")?;
    check(q > 0.0 && q < 1.0, name, q, "(0, 1)")
}

/// The `q`-quantile of `Beta(a, b)`: the `x` with `I_x(a, b) = q`.
pub fn beta_quantile_exact(a: f64, b: f64, q: f64) -> Result<f64, NumericsError> {
    check_beta_args(a, b, q, "q")?;
    if q <= 0.5 {
        solve_lower_tail(a, b, q)
    } else {
        Ok(1.0 - solve_lower_tail(b, a, 1.0 - q)?)
    }
}

/// The `(1 - tail)`-quantile of `Beta(a, b)`, taking the tail mass directly so
/// that tiny tails do not lose precision to `1 - tail` rounding.
pub fn beta_quantile_upper_tail(a: f64, b: f64, tail: f64) -> Result<f64, NumericsError> {
    check_beta_args(a, b, tail, "tail")?;
    if tail <= 0.5 {
        Ok(1.0 - solve_lower_tail(b, a, tail)?)
    } else {
        solve_lower_tail(a, b, 1.0 - tail)
    }
}
