use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::{run_trial, summarize, ExperimentResult, TrialOptions, TrialSetup};
use super::{ExperimentConfig, HarnessError};

pub const CSV_HEADER: &str = "env,agent,trial,t,cumulative_regret";
const SUMMARY_HEADER: &str = "env,agent,t,mean,sd,n_trials";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub env: String,
    pub agent: String,
    pub t: u64,
    pub mean: f64,
    pub sd: f64,
    pub n_trials: usize,
}

/// One row of the per-trial CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub env: String,
    pub agent: String,
    pub trial: usize,
    pub t: u64,
    pub cumulative_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestCell {
    pub agent: String,
    pub trial: usize,
    pub seed: u64,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_regret: Option<f64>,
    pub wall_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: ExperimentConfig,
    /// File names relative to the manifest's directory.
    pub csv: String,
    pub summary: String,
    pub optimal_gain: f64,
    /// Absent when the environment is not communicating.
    pub diameter: Option<f64>,
    pub num_states: usize,
    pub num_actions: usize,
    pub wall_secs: f64,
    pub cells: Vec<ManifestCell>,
}

/// `results.csv` becomes `results.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

/// `results.csv` becomes `results.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn curves_csv(result: &ExperimentResult) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for c in result.curves() {
        for (t, r) in &c.points {
            writeln!(out, "{},{},{},{t},{r:.16e}", c.env, c.agent, c.trial).unwrap();
        }
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        writeln!(out, "{},{},{},{:.16e},{:.16e},{}", r.env, r.agent, r.t, r.mean, r.sd, r.n_trials).unwrap();
    }
    out
}

/// Writes the per-trial CSV at `out` plus its summary and manifest; returns
/// the three paths.
pub fn write_outputs(result: &ExperimentResult, out: &Path) -> Result<[PathBuf; 3], HarnessError> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let summary = summary_path(out);
    let manifest = manifest_path(out);
    std::fs::write(out, curves_csv(result))?;
    std::fs::write(&summary, summary_csv(&summarize(result)))?;

    let mut config = result.config.clone();
    config.out = Some(out.to_path_buf());
    let cells = result
        .cells
        .iter()
        .map(|c| {
            let (status, error, episodes, final_regret) = match &c.outcome {
                Ok(o) => ("ok", None, Some(o.episodes), Some(o.curve.final_regret())),
                Err(e) => ("failed", Some(e.clone()), None, None),
            };
            ManifestCell {
                agent: c.agent.clone(),
                trial: c.trial,
                seed: c.seed,
                status: status.to_string(),
                error,
                episodes,
                final_regret,
                wall_secs: c.wall_secs,
            }
        })
        .collect();
    let doc = Manifest {
        version: format!("bucrl-core {}", env!("CARGO_PKG_VERSION")),
        config,
        csv: file_name(out),
        summary: file_name(&summary),
        optimal_gain: result.optimal_gain,
        diameter: result.diameter.is_finite().then_some(result.diameter),
        num_states: result.num_states,
        num_actions: result.num_actions,
        wall_secs: result.wall_secs,
        cells,
    };
    std::fs::write(&manifest, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok([out.to_path_buf(), summary, manifest])
}

pub fn parse_curves_csv(text: &str) -> Result<Vec<CsvRow>, HarnessError> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(HarnessError::Results(format!("expected header '{CSV_HEADER}'")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let bad = || HarnessError::Results(format!("line {}: '{line}'", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(CsvRow {
                env: f[0].to_string(),
                agent: f[1].to_string(),
                trial: f[2].parse().map_err(|_| bad())?,
                t: f[3].parse().map_err(|_| bad())?,
                cumulative_regret: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub agent: String,
    pub trial: usize,
    pub checkpoints: usize,
    /// Checkpoints whose time or value differs bit-wise from the file.
    pub mismatches: usize,
    pub max_abs_diff: f64,
}

impl ReplayReport {
    pub fn is_exact(&self) -> bool {
        self.mismatches == 0
    }
}

/// Re-runs one persisted trial (default: first agent, trial 0) and compares
/// it bit-wise with the stored curve.
pub fn replay(manifest: &Path, agent: Option<&str>, trial: Option<usize>) -> Result<ReplayReport, HarnessError> {
    let doc: Manifest = serde_json::from_str(&std::fs::read_to_string(manifest)?)?;
    let config = &doc.config;
    let labels = config.agent_labels();
    let label = agent.map(str::to_string).unwrap_or_else(|| labels[0].clone());
    let index = labels
        .iter()
        .position(|l| *l == label)
        .ok_or_else(|| HarnessError::Config(format!("agent '{label}' not in the manifest roster")))?;
    let trial = trial.unwrap_or(0);
    if trial >= config.trials {
        return Err(HarnessError::Config(format!("trial {trial} out of range (trials = {})", config.trials)));
    }

    let csv = manifest.parent().unwrap_or(Path::new(".")).join(&doc.csv);
    let stored: Vec<(u64, f64)> = parse_curves_csv(&std::fs::read_to_string(&csv)?)?
        .into_iter()
        .filter(|r| r.agent == label && r.trial == trial)
        .map(|r| (r.t, r.cumulative_regret))
        .collect();
    if stored.is_empty() {
        return Err(HarnessError::Results(format!("no rows for {label} trial {trial} in {}", csv.display())));
    }

    let setup = TrialSetup::from_config(config)?;
    let fresh = run_trial(&setup, &config.agents[index], &label, trial, TrialOptions::default())?.curve.points;
    let mut mismatches = stored.len().abs_diff(fresh.len());
    let mut max_abs_diff: f64 = 0.0;
    for (a, b) in stored.iter().zip(&fresh) {
        if a.0 != b.0 || a.1.to_bits() != b.1.to_bits() {
            mismatches += 1;
            max_abs_diff = max_abs_diff.max((a.1 - b.1).abs());
        }
    }
    Ok(ReplayReport {
        agent: label,
        trial,
        checkpoints: stored.len(),
        mismatches,
        max_abs_diff,
    })
}
