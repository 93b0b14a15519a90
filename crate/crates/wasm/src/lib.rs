//! WebAssembly bindings for the static page in `www/`.
//!
//! Each export returns flat `f64` arrays or a JSON string so the page needs
//! no serialization glue beyond what wasm-bindgen generates.

use bucrl_core::agents::AgentKind;
use bucrl_core::harness::{checkpoint_times, run_trial, ExperimentConfig, TrialOptions, TrialSetup};
use bucrl_core::numerics::{
    bernoulli_kl, beta_quantile_lower_bound, beta_quantile_upper_bound, kl_lower_bound, kl_upper_bound_loose,
    kl_upper_bound_tight,
};
use bucrl_core::posterior::reward_quantiles;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Longest run the page may request; larger horizons stall the tab.
pub const MAX_DEMO_HORIZON: u64 = 1 << 17;

/// Rows of `[x, lower, upper, bound_lower, bound_upper]` for every success
/// count `x` in `0..=n`. Closed-form bounds are NaN where undefined.
pub fn quantile_table(n: u64, delta: f64) -> Result<Vec<f64>, String> {
    if n == 0 || n > 5000 {
        return Err(format!("n = {n} outside 1..=5000"));
    }
    let mut out = Vec::with_capacity(5 * (n as usize + 1));
    for x in 0..=n {
        let q = reward_quantiles(x, n, delta).map_err(|e| e.to_string())?;
        let lo = if x == 0 {
            f64::NAN
        } else {
            beta_quantile_lower_bound(x, n, delta).map_err(|e| e.to_string())?
        };
        let hi = beta_quantile_upper_bound(x, n, delta).map_err(|e| e.to_string())?;
        out.extend([x as f64, q.lower, q.upper, lo, hi]);
    }
    Ok(out)
}

/// Rows of `[x, KL(p+x || p), lower, tight upper, loose upper]` on an even
/// grid of deviations in `[0, 1 - p)`.
pub fn kl_table(p: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(p > 0.0 && p < 1.0) {
        return Err(format!("p = {p} outside (0, 1)"));
    }
    let points = points.clamp(2, 2000);
    let mut out = Vec::with_capacity(5 * points);
    for j in 0..points {
        let x = (1.0 - p) * (j as f64 / points as f64);
        let row = [
            x,
            bernoulli_kl(p, p + x),
            kl_lower_bound(p, x).map_err(|e| e.to_string())?,
            kl_upper_bound_tight(p, x).map_err(|e| e.to_string())?,
            kl_upper_bound_loose(p, x).map_err(|e| e.to_string())?,
        ];
        out.extend(row);
    }
    Ok(out)
}

/// One trial per agent; returns `{"optimal_gain", "checkpoints", "curves": {agent: [regret...]}}`.
pub fn regret_json(env: &str, agents: &str, horizon: u64, seed: u64) -> Result<String, String> {
    if horizon == 0 || horizon > MAX_DEMO_HORIZON {
        return Err(format!("horizon {horizon} outside 1..={MAX_DEMO_HORIZON}"));
    }
    let roster = agents
        .split(',')
        .map(|a| a.trim().parse::<AgentKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let mut config = ExperimentConfig::new(env, roster);
    config.horizon = horizon;
    config.trials = 1;
    config.seed = seed;
    let setup = TrialSetup::from_config(&config).map_err(|e| e.to_string())?;
    let mut curves = serde_json::Map::new();
    for (kind, label) in config.agents.iter().zip(config.agent_labels()) {
        let outcome = run_trial(&setup, kind, &label, 0, TrialOptions::default()).map_err(|e| format!("{label}: {e}"))?;
        let regret: Vec<f64> = outcome.curve.points.iter().map(|p| p.1).collect();
        curves.insert(label, json!(regret));
    }
    Ok(json!({
        "optimal_gain": setup.optimal_gain,
        "checkpoints": checkpoint_times(horizon),
        "curves": curves,
    })
    .to_string())
}

#[wasm_bindgen(js_name = quantileTable)]
pub fn quantile_table_js(n: u32, delta: f64) -> Result<Vec<f64>, JsError> {
    quantile_table(n as u64, delta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = klTable)]
pub fn kl_table_js(p: f64, points: u32) -> Result<Vec<f64>, JsError> {
    kl_table(p, points as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = regretRun)]
pub fn regret_run_js(env: &str, agents: &str, horizon: u32, seed: u32) -> Result<String, JsError> {
    regret_json(env, agents, horizon as u64, seed as u64).map_err(|e| JsError::new(&e))
}
