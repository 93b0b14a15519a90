use super::HarnessError;

/// `20 sqrt(min(S, log₂²(2D)) D T S A ln T ln(B/δ)) + 9 D S A ln(B/δ)` with
/// `B = 9 S sqrt(T D S A) ln(T S A)`.
pub fn theoretical_bound(
    num_states: usize,
    num_actions: usize,
    diameter: f64,
    horizon: u64,
    delta: f64,
) -> Result<f64, HarnessError> {
    if num_states == 0 || num_actions == 0 || horizon == 0 {
        return Err(HarnessError::Config("S, A and T must be positive".into()));
    }
    if !(diameter > 0.0 && diameter.is_finite()) {
        return Err(HarnessError::Config(format!("diameter {diameter} must be positive and finite")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(HarnessError::Config(format!("delta {delta} outside (0, 1)")));
    }
    let (s, a, d, t) = (num_states as f64, num_actions as f64, diameter, horizon as f64);
    let b = 9.0 * s * (t * d * s * a).sqrt() * (t * s * a).ln();
    let log_b = (b / delta).ln();
    let factor = s.min((2.0 * d).log2().powi(2));
    Ok(20.0 * (factor * d * t * s * a * t.ln() * log_b).sqrt() + 9.0 * d * s * a * log_b)
}
