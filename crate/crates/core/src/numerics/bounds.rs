//! Closed-form Bernstein-shaped bounds on Binomial and Beta quantiles.
//!
//! These only use elementary functions of `n`, the empirical frequency and
//! `y = Φ⁻¹(1 - δ)`. The agents never plan with them; they certify how far
//! the exact posterior quantiles can drift from the empirical mean.

use super::{check, normal_quantile, NumericsError};

/// Additive slack on the upper Binomial quantile bound (the integer rounding
/// of the KL-lower-bound inversion). Pinned by the exhaustive sandwich test.
pub const BINOMIAL_UPPER_OFFSET: f64 = 1.0;
/// Subtractive slack on the lower Binomial quantile bound. Pinned by the
/// exhaustive sandwich test.
pub const BINOMIAL_LOWER_OFFSET: f64 = 1.0;

/// Sample count, tail mass and the matching normal quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundShape {
    pub n: u64,
    pub y: f64,
    pub delta: f64,
}

impl BoundShape {
    pub fn new(n: u64, delta: f64) -> Result<Self, NumericsError> {
        check(n >= 1, "n", n as f64, "[1, inf)")?;
        check(delta > 0.0 && delta <= 0.5, "delta", delta, "(0, 0.5]")?;
        let y = normal_quantile(1.0 - delta)?;
        Ok(Self { n, y, delta })
    }

    /// Bernstein half-width around `x / n` shared by both Beta bounds.
    fn beta_half_width(&self, x: u64) -> f64 {
        let nf = self.n as f64;
        let m = x as f64 / nf;
        let y = self.y;
        let root_n = nf.sqrt();
        let spread = (m * (1.0 - m)).sqrt() + (((7.0 * y * y + 24.0) / 12.0).sqrt() + y / 2.0) / root_n;
        y / root_n * spread + y * y / (6.0 * nf) + 2.0 / nf
    }
}

fn check_delta(delta: f64) -> Result<f64, NumericsError> {
    check(delta > 0.0 && delta <= 0.5, "delta", delta, "(0, 0.5]")?;
    normal_quantile(1.0 - delta)
}

/// `C_u(x, y) = sqrt(n x(1-x) y² + (1-2x)² y⁴/36) + (1-2x) y²/6`.
fn c_upper(n: f64, x: f64, y: f64) -> f64 {
    let y2 = y * y;
    let skew = 1.0 - 2.0 * x;
    (n * x * (1.0 - x) * y2 + skew * skew * y2 * y2 / 36.0).sqrt() + skew * y2 / 6.0
}

/// `C_l(x, y) = sqrt(n x(1-x) y² + x² y⁴/16) - x y²/4`.
fn c_lower(n: f64, x: f64, y: f64) -> f64 {
    let y2 = y * y;
    (n * x * (1.0 - x) * y2 + x * x * y2 * y2 / 16.0).sqrt() - x * y2 / 4.0
}

/// Upper bound on the `(1 - δ)`-quantile of `Binom(n, p)`.
pub fn binomial_quantile_upper(n: u64, p: f64, delta: f64) -> Result<f64, NumericsError> {
    check((0.0..=1.0).contains(&p), "p", p, "[0, 1]")?;
    let y = check_delta(delta)?;
    let nf = n as f64;
    Ok(nf * p + c_upper(nf, p, y) + BINOMIAL_UPPER_OFFSET)
}

/// Lower bound on the `(1 - δ)`-quantile of `Binom(n, p)`.
pub fn binomial_quantile_lower(n: u64, p: f64, delta: f64) -> Result<f64, NumericsError> {
    check((0.0..=1.0).contains(&p), "p", p, "[0, 1]")?;
    let y = check_delta(delta)?;
    let nf = n as f64;
    let np = nf * p;
    Ok(np + (np - 1.0).min(c_lower(nf, p, y)).max(0.0) - BINOMIAL_LOWER_OFFSET)
}

/// Upper bound on the `(1 - δ)`-quantile of the upper posterior `Beta(x + 1, n - x)`,
/// clipped to `[0, 1]`.
pub fn beta_quantile_upper_bound(x: u64, n: u64, delta: f64) -> Result<f64, NumericsError> {
    let shape = BoundShape::new(n, delta)?;
    check(x <= n, "x", x as f64, "[0, n]")?;
    let m = x as f64 / n as f64;
    Ok((m + shape.beta_half_width(x)).clamp(0.0, 1.0))
}

/// Lower bound on the `δ`-quantile of the lower posterior `Beta(x, n - x + 1)`,
/// clipped to `[0, 1]`.
pub fn beta_quantile_lower_bound(x: u64, n: u64, delta: f64) -> Result<f64, NumericsError> {
    let shape = BoundShape::new(n, delta)?;
    check(x >= 1 && x <= n, "x", x as f64, "[1, n]")?;
    let m = x as f64 / n as f64;
    Ok((m - shape.beta_half_width(x)).clamp(0.0, 1.0))
}
