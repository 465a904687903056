//! Flat `key = value` scenario configuration.
//!
//! Grammar: one `key = value` pair per line, `#` starts a comment, blank
//! lines ignored, dotted prefixes group related keys (`agent.`, `env.`,
//! `schedule.`, `dr.`). Unknown keys are hard errors so typos cannot
//! silently fall back to defaults.

use ompo_core::agent::{Ablation, AgentConfig};
use ompo_core::env::{DynamicsParams, RandomizationRanges, SineSchedule};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Stationary,
    DomainAdaptation,
    NonStationary,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Stationary => "stationary",
            ScenarioKind::DomainAdaptation => "domain_adaptation",
            ScenarioKind::NonStationary => "non_stationary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvName {
    PointMass,
    Pendulum,
}

impl EnvName {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvName::PointMass => "point_mass",
            EnvName::Pendulum => "pendulum",
        }
    }
}

/// Sinusoid coefficients for one scheduled field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSchedule {
    pub base: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub noise: f64,
}

impl FieldSchedule {
    pub fn to_core(self) -> SineSchedule {
        SineSchedule {
            base: self.base,
            amplitude: self.amplitude,
            frequency: self.frequency,
            noise_half_width: self.noise,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub environment: EnvName,
    pub seed: u64,
    pub total_env_steps: u64,
    pub eval_every: u64,
    pub n_eval_episodes: usize,
    pub ablation: Ablation,
    pub agent: AgentConfig,
    pub env_params: DynamicsParams,
    pub gravity_schedule: FieldSchedule,
    pub wind_schedule: FieldSchedule,
    pub length_schedule: FieldSchedule,
    pub randomization: Option<RandomizationRanges>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: ScenarioKind::Stationary,
            environment: EnvName::PointMass,
            seed: 0,
            total_env_steps: 50_000,
            eval_every: 2_500,
            n_eval_episodes: 10,
            ablation: Ablation::None,
            agent: AgentConfig::default(),
            env_params: DynamicsParams::default(),
            // transplanted non-stationary sinusoids: gravity and wind vary
            // per step, length per episode
            gravity_schedule: FieldSchedule { base: 14.715, amplitude: 4.905, frequency: 0.5, noise: 3.0 },
            wind_schedule: FieldSchedule { base: 1.0, amplitude: 0.2, frequency: 0.5, noise: 0.1 },
            length_schedule: FieldSchedule { base: 0.4, amplitude: 0.1, frequency: 0.2, noise: 0.0 },
            randomization: None,
        }
    }
}

fn parse_as<T: std::str::FromStr>(value: &str, line: usize) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Parse {
        line,
        message: format!("cannot parse value `{value}`"),
    })
}

fn parse_dims(value: &str, line: usize) -> Result<Vec<usize>, ConfigError> {
    value
        .split(',')
        .map(|part| parse_as::<usize>(part.trim(), line))
        .collect()
}

pub fn ablation_from_str(value: &str) -> Option<Ablation> {
    match value {
        "none" => Some(Ablation::None),
        "no_discriminator" | "no-discriminator" => Some(Ablation::NoDiscriminator),
        "raw_reward" | "raw-reward" => Some(Ablation::RawReward),
        _ => None,
    }
}

pub fn ablation_to_str(ablation: Ablation) -> &'static str {
    match ablation {
        Ablation::None => "none",
        Ablation::NoDiscriminator => "no_discriminator",
        Ablation::RawReward => "raw_reward",
    }
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self, ConfigError> {
        let mut config = ScenarioConfig::default();
        // Domain-randomization ranges are assembled only if any dr.* key
        // appears with dr.enabled = true.
        let mut dr_enabled = false;
        let mut dr = RandomizationRanges {
            gravity: (16.62, 22.62),
            wind: (0.5, 1.2),
            length: (0.4, 0.4),
        };
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "scenario" => {
                    config.scenario = match value {
                        "stationary" => ScenarioKind::Stationary,
                        "domain_adaptation" => ScenarioKind::DomainAdaptation,
                        "non_stationary" => ScenarioKind::NonStationary,
                        other => {
                            return Err(ConfigError::Parse {
                                line,
                                message: format!("unknown scenario `{other}`"),
                            })
                        }
                    }
                }
                "environment" => {
                    config.environment = match value {
                        "point_mass" => EnvName::PointMass,
                        "pendulum" => EnvName::Pendulum,
                        other => {
                            return Err(ConfigError::Parse {
                                line,
                                message: format!("unknown environment `{other}`"),
                            })
                        }
                    }
                }
                "seed" => config.seed = parse_as(value, line)?,
                "total_env_steps" => config.total_env_steps = parse_as(value, line)?,
                "eval_every" => config.eval_every = parse_as(value, line)?,
                "n_eval_episodes" => config.n_eval_episodes = parse_as(value, line)?,
                "ablation" => {
                    config.ablation = ablation_from_str(value).ok_or_else(|| ConfigError::Parse {
                        line,
                        message: format!("unknown ablation `{value}`"),
                    })?
                }
                "agent.gamma" => config.agent.gamma = parse_as(value, line)?,
                "agent.alpha" => config.agent.alpha = parse_as(value, line)?,
                "agent.q_order" => config.agent.q_order = parse_as(value, line)?,
                "agent.batch_size" => config.agent.batch_size = parse_as(value, line)?,
                "agent.critic_lr" => config.agent.critic_lr = parse_as(value, line)?,
                "agent.actor_lr" => config.agent.actor_lr = parse_as(value, line)?,
                "agent.discriminator_lr" => config.agent.discriminator_lr = parse_as(value, line)?,
                "agent.critic_steps_per_actor_step" => {
                    config.agent.critic_steps_per_actor_step = parse_as(value, line)?
                }
                "agent.hidden_dims" => config.agent.hidden_dims = parse_dims(value, line)?,
                "agent.updates_per_merge" => config.agent.updates_per_merge = parse_as(value, line)?,
                "agent.discriminator_steps" => config.agent.discriminator_steps = parse_as(value, line)?,
                "agent.local_buffer" => config.agent.local_capacity = parse_as(value, line)?,
                "agent.global_buffer" => config.agent.global_capacity = parse_as(value, line)?,
                "env.gravity" => config.env_params.gravity = parse_as(value, line)?,
                "env.wind" => config.env_params.wind = parse_as(value, line)?,
                "env.length" => config.env_params.length = parse_as(value, line)?,
                "schedule.gravity_base" => config.gravity_schedule.base = parse_as(value, line)?,
                "schedule.gravity_amplitude" => config.gravity_schedule.amplitude = parse_as(value, line)?,
                "schedule.gravity_frequency" => config.gravity_schedule.frequency = parse_as(value, line)?,
                "schedule.gravity_noise" => config.gravity_schedule.noise = parse_as(value, line)?,
                "schedule.wind_base" => config.wind_schedule.base = parse_as(value, line)?,
                "schedule.wind_amplitude" => config.wind_schedule.amplitude = parse_as(value, line)?,
                "schedule.wind_frequency" => config.wind_schedule.frequency = parse_as(value, line)?,
                "schedule.wind_noise" => config.wind_schedule.noise = parse_as(value, line)?,
                "schedule.length_base" => config.length_schedule.base = parse_as(value, line)?,
                "schedule.length_amplitude" => config.length_schedule.amplitude = parse_as(value, line)?,
                "schedule.length_frequency" => config.length_schedule.frequency = parse_as(value, line)?,
                "schedule.length_noise" => config.length_schedule.noise = parse_as(value, line)?,
                "dr.enabled" => dr_enabled = parse_as(value, line)?,
                "dr.gravity_lo" => dr.gravity.0 = parse_as(value, line)?,
                "dr.gravity_hi" => dr.gravity.1 = parse_as(value, line)?,
                "dr.wind_lo" => dr.wind.0 = parse_as(value, line)?,
                "dr.wind_hi" => dr.wind.1 = parse_as(value, line)?,
                "dr.length_lo" => dr.length.0 = parse_as(value, line)?,
                "dr.length_hi" => dr.length.1 = parse_as(value, line)?,
                other => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        if dr_enabled {
            config.randomization = Some(dr);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.total_env_steps == 0 || self.eval_every == 0 || self.n_eval_episodes == 0 {
            return Err(ConfigError::Invalid(
                "total_env_steps, eval_every and n_eval_episodes must be positive".into(),
            ));
        }
        self.agent
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.env_params
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(r) = &self.randomization {
            for (lo, hi) in [r.gravity, r.wind, r.length] {
                if lo > hi {
                    return Err(ConfigError::Invalid("randomization range inverted".into()));
                }
            }
        }
        Ok(())
    }

    /// Canonical serialization; `from_str(to_text(c)) == c`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let dims = self
            .agent
            .hidden_dims
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let _ = writeln!(out, "scenario = {}", self.scenario.as_str());
        let _ = writeln!(out, "environment = {}", self.environment.as_str());
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "total_env_steps = {}", self.total_env_steps);
        let _ = writeln!(out, "eval_every = {}", self.eval_every);
        let _ = writeln!(out, "n_eval_episodes = {}", self.n_eval_episodes);
        let _ = writeln!(out, "ablation = {}", ablation_to_str(self.ablation));
        let _ = writeln!(out, "agent.gamma = {}", self.agent.gamma);
        let _ = writeln!(out, "agent.alpha = {}", self.agent.alpha);
        let _ = writeln!(out, "agent.q_order = {}", self.agent.q_order);
        let _ = writeln!(out, "agent.batch_size = {}", self.agent.batch_size);
        let _ = writeln!(out, "agent.critic_lr = {}", self.agent.critic_lr);
        let _ = writeln!(out, "agent.actor_lr = {}", self.agent.actor_lr);
        let _ = writeln!(out, "agent.discriminator_lr = {}", self.agent.discriminator_lr);
        let _ = writeln!(
            out,
            "agent.critic_steps_per_actor_step = {}",
            self.agent.critic_steps_per_actor_step
        );
        let _ = writeln!(out, "agent.hidden_dims = {dims}");
        let _ = writeln!(out, "agent.updates_per_merge = {}", self.agent.updates_per_merge);
        let _ = writeln!(out, "agent.discriminator_steps = {}", self.agent.discriminator_steps);
        let _ = writeln!(out, "agent.local_buffer = {}", self.agent.local_capacity);
        let _ = writeln!(out, "agent.global_buffer = {}", self.agent.global_capacity);
        let _ = writeln!(out, "env.gravity = {}", self.env_params.gravity);
        let _ = writeln!(out, "env.wind = {}", self.env_params.wind);
        let _ = writeln!(out, "env.length = {}", self.env_params.length);
        for (name, s) in [
            ("gravity", &self.gravity_schedule),
            ("wind", &self.wind_schedule),
            ("length", &self.length_schedule),
        ] {
            let _ = writeln!(out, "schedule.{name}_base = {}", s.base);
            let _ = writeln!(out, "schedule.{name}_amplitude = {}", s.amplitude);
            let _ = writeln!(out, "schedule.{name}_frequency = {}", s.frequency);
            let _ = writeln!(out, "schedule.{name}_noise = {}", s.noise);
        }
        if let Some(r) = &self.randomization {
            let _ = writeln!(out, "dr.enabled = true");
            let _ = writeln!(out, "dr.gravity_lo = {}", r.gravity.0);
            let _ = writeln!(out, "dr.gravity_hi = {}", r.gravity.1);
            let _ = writeln!(out, "dr.wind_lo = {}", r.wind.0);
            let _ = writeln!(out, "dr.wind_hi = {}", r.wind.1);
            let _ = writeln!(out, "dr.length_lo = {}", r.length.0);
            let _ = writeln!(out, "dr.length_hi = {}", r.length.1);
        }
        out
    }
}
