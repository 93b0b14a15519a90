use bucrl_wasm::{kl_table, quantile_table, regret_json, MAX_DEMO_HORIZON};

#[test]
fn quantile_rows_are_ordered() {
    let rows = quantile_table(40, 0.05).unwrap();
    assert_eq!(rows.len(), 5 * 41);
    for r in rows.chunks(5) {
        let (x, lo, hi, blo, bhi) = (r[0], r[1], r[2], r[3], r[4]);
        let mean = x / 40.0;
        assert!(lo <= mean && mean <= hi && hi <= bhi + 1e-12);
        assert!(x == 0.0 && blo.is_nan() || blo <= lo + 1e-12);
    }
    assert!(quantile_table(0, 0.05).is_err());
    assert!(quantile_table(10, 0.9).is_err());
}

#[test]
fn kl_rows_are_sandwiched() {
    let rows = kl_table(0.3, 100).unwrap();
    assert_eq!(rows.len(), 500);
    for r in rows.chunks(5) {
        assert!(r[2] <= r[1] * (1.0 + 1e-12) && r[1] <= r[3] * (1.0 + 1e-12) && r[3] <= r[4] * (1.0 + 1e-12));
    }
    assert!(kl_table(1.0, 10).is_err());
}

#[test]
fn regret_json_has_one_curve_per_agent() {
    let text = regret_json("riverswim", "bucrl, ucrl2", 256, 3).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["checkpoints"].as_array().unwrap().len(), 9);
    for agent in ["bucrl", "ucrl2"] {
        assert_eq!(doc["curves"][agent].as_array().unwrap().len(), 9);
    }
    assert_eq!(text, regret_json("riverswim", "bucrl, ucrl2", 256, 3).unwrap());
    assert!(regret_json("riverswim", "bucrl", MAX_DEMO_HORIZON + 1, 0).is_err());
    assert!(regret_json("riverswim", "sarsa", 16, 0).is_err());
    assert!(regret_json("atlantis", "bucrl", 16, 0).is_err());
}
