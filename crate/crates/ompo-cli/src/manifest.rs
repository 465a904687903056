//! Run manifest: the fully resolved configuration plus every defaulted
//! implementation decision, written before training starts so a metrics file
//! can never exist without its provenance.

use crate::config::{ablation_to_str, ScenarioConfig};
use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    /// Canonical flat-text serialization of the resolved config.
    pub resolved_config: String,
    pub seed: u64,
    pub ablation: String,
    /// Decisions the configuration format does not expose.
    pub decisions: Decisions,
    pub started_unix_secs: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decisions {
    pub weight_init: String,
    pub critic_steps_per_actor_step: usize,
    pub discriminator_steps_per_refresh: usize,
    pub h_clamp: f64,
    pub log_std_clip: (f64, f64),
    pub discriminator_label_convention: String,
    pub bootstrap: String,
    pub target_network: String,
    pub conjugate: String,
}

impl RunManifest {
    pub fn new(config: &ScenarioConfig) -> Self {
        RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            resolved_config: config.to_text(),
            seed: config.seed,
            ablation: ablation_to_str(config.ablation).to_string(),
            decisions: Decisions {
                weight_init: "uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases".into(),
                critic_steps_per_actor_step: config.agent.critic_steps_per_actor_step,
                discriminator_steps_per_refresh: config.agent.discriminator_steps,
                h_clamp: ompo_core::discriminator::H_CLAMP,
                log_std_clip: (ompo_core::policy::LOG_STD_MIN, ompo_core::policy::LOG_STD_MAX),
                discriminator_label_convention:
                    "classifier output trained toward 1 on global-buffer samples and 0 on local-buffer \
                     samples; the learner consumes R = ln(rho_local / rho_global) = -recover_r(h), \
                     i.e. the on-policy-over-buffer log ratio"
                        .into(),
                bootstrap: "single next-action sample, masked by (1 - terminal)".into(),
                target_network: "none; stability via the two-timescale learning-rate ratio".into(),
                conjugate:
                    "f*(x) = x + |x|^q/q for x >= -1, constant -1/p below: the conjugate of \
                     (1/p)|y-1|^p over the nonnegative-ratio domain, bounded below so the dual \
                     critic loss has a minimum"
                        .into(),
            },
            started_unix_secs: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}
