//! Experiment execution and golden-file regression.
//!
//! A run writes, in order: `manifest.json` (before any training, so a metrics
//! file can never exist without one), `metrics.csv` (one row at step 0 and one
//! per evaluation), and `checkpoint.bin`. Identical (config, seed, build)
//! produce byte-identical CSVs.

use crate::checkpoint::save_networks;
use crate::config::{EnvName, ScenarioConfig, ScenarioKind};
use crate::manifest::RunManifest;
use anyhow::{bail, Context, Result};
use ompo_core::agent::{run_algorithm1, LogRow, OmpoAgent, RunConfig};
use ompo_core::env::{Domain, DynamicsSchedule, EnvKind, Environment};
use ompo_core::rng::Rng;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str =
    "env_step,episode,return,critic_loss,actor_loss,discriminator_loss,mean_R,std_R,merge_events";

fn env_kind(name: EnvName) -> EnvKind {
    match name {
        EnvName::PointMass => EnvKind::PointMass,
        EnvName::Pendulum => EnvKind::Pendulum,
    }
}

/// (interaction env, optional lockstep source env, evaluation env) for one
/// scenario. Under domain adaptation the agent interacts with and is
/// evaluated on the target dynamics while the source env feeds the global
/// buffer.
pub fn build_environments(
    config: &ScenarioConfig,
) -> Result<(Box<dyn Environment>, Option<Box<dyn Environment>>, Box<dyn Environment>)> {
    let kind = env_kind(config.environment);
    let (schedule, source) = match config.scenario {
        ScenarioKind::Stationary => (DynamicsSchedule::stationary(config.env_params), None),
        ScenarioKind::DomainAdaptation => {
            let schedule = DynamicsSchedule::domain_adaptation(config.env_params, config.randomization);
            let source = kind.build(schedule.clone(), Domain::Source);
            (schedule, Some(source))
        }
        ScenarioKind::NonStationary => (
            DynamicsSchedule::non_stationary(
                config.gravity_schedule.to_core(),
                config.wind_schedule.to_core(),
                config.length_schedule.to_core(),
            ),
            None,
        ),
    };
    schedule.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    let env = kind.build(schedule.clone(), Domain::Target);
    let eval_env = kind.build(schedule, Domain::Target);
    Ok((env, source, eval_env))
}

pub fn format_row(row: &LogRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.env_step,
        row.episode,
        row.eval_return,
        row.critic_loss,
        row.actor_loss,
        row.discriminator_loss,
        row.mean_shift,
        row.std_shift,
        row.merge_events
    )
}

pub fn rows_to_csv(rows: &[LogRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format_row(row));
        out.push('\n');
    }
    out
}

pub struct RunOutputs {
    pub metrics_path: PathBuf,
    pub manifest_path: PathBuf,
    pub checkpoint_path: PathBuf,
    pub rows: Vec<LogRow>,
}

pub fn run_experiment(config: &ScenarioConfig, out_dir: &Path) -> Result<RunOutputs> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let manifest_path = out_dir.join("manifest.json");
    RunManifest::new(config).write(&manifest_path)?;

    let (mut env, mut source, mut eval_env) = build_environments(config)?;
    let mut agent_config = config.agent.clone();
    agent_config.ablation = config.ablation;
    let mut rng = Rng::new(config.seed);
    let mut agent = OmpoAgent::new(agent_config, env.obs_dim(), env.act_dim(), &mut rng)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let run = RunConfig {
        total_steps: config.total_env_steps,
        eval_every: config.eval_every,
        n_eval_episodes: config.n_eval_episodes,
    };
    let rows = run_algorithm1(
        &mut agent,
        env.as_mut(),
        source.as_deref_mut(),
        eval_env.as_mut(),
        &run,
        &mut rng,
    )
    .map_err(|e| anyhow::anyhow!("{e}"))?;

    let metrics_path = out_dir.join("metrics.csv");
    std::fs::write(&metrics_path, rows_to_csv(&rows))
        .with_context(|| format!("writing {}", metrics_path.display()))?;
    let checkpoint_path = out_dir.join("checkpoint.bin");
    save_networks(&checkpoint_path, &agent)?;
    Ok(RunOutputs { metrics_path, manifest_path, checkpoint_path, rows })
}

/// Per-column comparison bands for [`golden_compare`]. Integer columns are
/// always exact.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Absolute band for the `return` column.
    pub eval_return: f64,
    /// Absolute band for loss and shift-statistic columns.
    pub losses: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { eval_return: 1e-9, losses: 1e-9 }
    }
}

fn parse_csv(text: &str, what: &str) -> Result<Vec<Vec<String>>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != CSV_HEADER {
        bail!("{what}: schema mismatch: expected header `{CSV_HEADER}`, got `{header}`");
    }
    let n_cols = CSV_HEADER.split(',').count();
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        if fields.len() != n_cols {
            bail!("{what}: row {}: expected {n_cols} columns, got {}", idx + 1, fields.len());
        }
        rows.push(fields);
    }
    Ok(rows)
}

/// Compares a metrics file against a golden file: exact on the integer
/// columns (env_step, episode, merge_events), tolerance-banded on the float
/// columns. Failures name the offending row and column.
pub fn golden_compare(metrics_path: &Path, golden_path: &Path, tol: Tolerances) -> Result<()> {
    let metrics = std::fs::read_to_string(metrics_path)
        .with_context(|| format!("reading {}", metrics_path.display()))?;
    let golden = std::fs::read_to_string(golden_path)
        .with_context(|| format!("reading {}", golden_path.display()))?;
    let m_rows = parse_csv(&metrics, "metrics")?;
    let g_rows = parse_csv(&golden, "golden")?;
    if m_rows.len() != g_rows.len() {
        bail!("row count mismatch: metrics has {}, golden has {}", m_rows.len(), g_rows.len());
    }
    let columns: Vec<&str> = CSV_HEADER.split(',').collect();
    for (r, (m, g)) in m_rows.iter().zip(&g_rows).enumerate() {
        for (c, name) in columns.iter().enumerate() {
            let exact = matches!(*name, "env_step" | "episode" | "merge_events");
            if exact {
                if m[c] != g[c] {
                    bail!("row {}, column {name}: {} != {}", r + 1, m[c], g[c]);
                }
                continue;
            }
            let mv: f64 = m[c].parse().with_context(|| format!("metrics row {}, column {name}", r + 1))?;
            let gv: f64 = g[c].parse().with_context(|| format!("golden row {}, column {name}", r + 1))?;
            let band = if *name == "return" { tol.eval_return } else { tol.losses };
            if !((mv - gv).abs() <= band) {
                bail!("row {}, column {name}: {mv} deviates from golden {gv} by more than {band}", r + 1);
            }
        }
    }
    Ok(())
}
