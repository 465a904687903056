//! `ompo`: scenario runner, self-check suite and golden-file comparator for
//! the shift-aware actor-critic learner.

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use ompo_cli::config::{ablation_from_str, ScenarioConfig};
use ompo_cli::{runner, verify};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "ompo", about = "Seeded training runs, numerical self-checks and metrics regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a config file.
    Run {
        /// Path to a flat `key = value` scenario config.
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Run several independent seeds; outputs land in `<out>/seed_<N>/`.
        #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
        seeds: Option<Vec<u64>>,
        /// Override the config's ablation (no-discriminator | raw-reward).
        #[arg(long)]
        ablation: Option<String>,
        /// Output directory (default: the config's directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the numerical self-check suite and print a pass/fail table.
    Verify,
    /// Compare a metrics CSV against a golden file.
    Compare { metrics: PathBuf, golden: PathBuf },
}

fn cmd_run(
    config_path: &PathBuf,
    seed: Option<u64>,
    seeds: Option<Vec<u64>>,
    ablation: Option<String>,
    out: Option<PathBuf>,
) -> Result<()> {
    let mut config = ScenarioConfig::from_file(config_path)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(a) = &ablation {
        config.ablation = ablation_from_str(a).ok_or_else(|| anyhow::anyhow!("unknown ablation `{a}`"))?;
    }
    let out_dir = match out {
        Some(dir) => dir,
        None => config_path.parent().map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
    };
    match seeds {
        None => {
            let outputs = runner::run_experiment(&config, &out_dir)?;
            println!("wrote {}", outputs.metrics_path.display());
        }
        Some(seeds) => {
            if seeds.is_empty() {
                bail!("--seeds needs at least one seed");
            }
            for s in seeds {
                let mut c = config.clone();
                c.seed = s;
                let outputs = runner::run_experiment(&c, &out_dir.join(format!("seed_{s}")))?;
                println!("seed {s}: wrote {}", outputs.metrics_path.display());
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result: Result<()> = match cli.command {
        Command::Run { config, seed, seeds, ablation, out } => cmd_run(&config, seed, seeds, ablation, out),
        Command::Verify => {
            if verify::run_verify() {
                Ok(())
            } else {
                Err(anyhow::anyhow!("verification failed"))
            }
        }
        Command::Compare { metrics, golden } => {
            runner::golden_compare(&metrics, &golden, runner::Tolerances::default()).map(|()| {
                println!("match");
            })
        }
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
