use super::{check, NumericsError};

/// Probability mass function of `Binom(n, p)` as a vector over `0..=n`.
///
/// Terms are generated by the ratio recurrence outward from the mode and then
/// normalized by their own sum, so there is no factorial or `ln Γ` round-off
/// and the table sums to one up to accumulated rounding.
pub fn binomial_pmf_table(n: u64, p: f64) -> Vec<f64> {
    let len = n as usize + 1;
    let mut w = vec![0.0; len];
    if p <= 0.0 {
        w[0] = 1.0;
        return w;
    }
    if p >= 1.0 {
        w[len - 1] = 1.0;
        return w;
    }
    let q = 1.0 - p;
    let odds = p / q;
    let nf = n as f64;
    let mode = (((nf + 1.0) * p).floor() as usize).min(n as usize);
    w[mode] = 1.0;
    for j in mode + 1..len {
        let jf = j as f64;
        w[j] = w[j - 1] * (nf - jf + 1.0) / jf * odds;
        if w[j] == 0.0 {
            break;
        }
    }
    for j in (0..mode).rev() {
        let jf = j as f64;
        w[j] = w[j + 1] * (jf + 1.0) / (nf - jf) / odds;
        if w[j] == 0.0 {
            break;
        }
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// `P(X ≤ k)` for `X ~ Binom(n, p)`; `0` for `k < 0` and `1` for `k ≥ n`.
pub fn binomial_cdf(n: u64, p: f64, k: i64) -> f64 {
    if k < 0 {
        return 0.0;
    }
    if k as u64 >= n {
        return 1.0;
    }
    let pmf = binomial_pmf_table(n, p);
    pmf[..=k as usize].iter().sum::<f64>().min(1.0)
}

/// Smallest `k` with `P(X ≤ k) ≥ q`, by a scan over the CDF.
pub fn binomial_quantile_exact(n: u64, p: f64, q: f64) -> Result<u64, NumericsError> {
    check((0.0..=1.0).contains(&p), "p", p, "[0, 1]")?;
    check(q > 0.0 && q < 1.0, "q", q, "(0, 1)")?;
    Ok(quantile_from_pmf(&binomial_pmf_table(n, p), q))
}

pub(crate) fn quantile_from_pmf(pmf: &[f64], q: f64) -> u64 {
    let mut acc = 0.0;
    for (k, mass) in pmf.iter().enumerate() {
        acc += mass;
        if acc >= q {
            return k as u64;
        }
    }
    (pmf.len() - 1) as u64
}
