//! Desk-scale continuous-control environments with parameterized dynamics:
//! a point mass on a tilted, windy plane and a variable-gravity pendulum
//! swing-up. Dynamics parameters follow stationary, domain-adaptation or
//! non-stationary (sinusoid + uniform noise) schedules.

use crate::error::{CoreError, Result};
use crate::math;
use crate::rng::Rng;
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

pub const REWARD_MIN: f64 = 0.01;
pub const REWARD_MAX: f64 = 1.0;

/// Physical parameters a schedule can vary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicsParams {
    /// m/s^2, > 0.
    pub gravity: f64,
    /// Signed horizontal wind speed, m/s.
    pub wind: f64,
    /// Pendulum link length (m) or point-mass arena scale; > 0.
    pub length: f64,
}

impl DynamicsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gravity > 0.0) || !(self.length > 0.0) || !self.wind.is_finite() {
            return Err(CoreError::InvalidConfig("gravity and length must be > 0, wind finite".into()));
        }
        Ok(())
    }
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams { gravity: 9.81, wind: 0.0, length: 0.4 }
    }
}

/// base + amplitude * sin(frequency * episode) + U(-noise, +noise).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SineSchedule {
    pub base: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub noise_half_width: f64,
}

impl SineSchedule {
    pub const fn constant(base: f64) -> Self {
        SineSchedule { base, amplitude: 0.0, frequency: 0.0, noise_half_width: 0.0 }
    }

    /// Schedule value at (possibly fractional) episode phase.
    pub fn value(&self, episode: f64, rng: &mut Rng) -> f64 {
        let noise = if self.noise_half_width > 0.0 {
            rng.uniform(-self.noise_half_width, self.noise_half_width)
        } else {
            0.0
        };
        self.base + self.amplitude * math::sin(self.frequency * episode) + noise
    }
}

/// Per-field closed intervals for domain randomization of source dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomizationRanges {
    pub gravity: (f64, f64),
    pub wind: (f64, f64),
    pub length: (f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    Stationary,
    DomainAdaptation,
    NonStationary,
}

/// Which dynamics a domain-adaptation rollout interacts with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Source,
    Target,
}

/// Dynamics parameter generator for the three shift scenarios.
#[derive(Clone, Debug)]
pub struct DynamicsSchedule {
    pub kind: ScheduleKind,
    pub source_params: DynamicsParams,
    pub target_params: DynamicsParams,
    /// Optional per-episode uniform draw for the source domain.
    pub randomization: Option<RandomizationRanges>,
    pub gravity_schedule: SineSchedule,
    pub wind_schedule: SineSchedule,
    pub length_schedule: SineSchedule,
}

impl DynamicsSchedule {
    pub fn stationary(params: DynamicsParams) -> Self {
        DynamicsSchedule {
            kind: ScheduleKind::Stationary,
            source_params: params,
            target_params: params,
            randomization: None,
            gravity_schedule: SineSchedule::constant(params.gravity),
            wind_schedule: SineSchedule::constant(params.wind),
            length_schedule: SineSchedule::constant(params.length),
        }
    }

    /// Target dynamics double gravity and add a 1 m/s wind over the source.
    pub fn domain_adaptation(source: DynamicsParams, randomization: Option<RandomizationRanges>) -> Self {
        let target = DynamicsParams {
            gravity: 2.0 * source.gravity,
            wind: source.wind + 1.0,
            length: source.length,
        };
        DynamicsSchedule {
            kind: ScheduleKind::DomainAdaptation,
            source_params: source,
            target_params: target,
            randomization,
            gravity_schedule: SineSchedule::constant(source.gravity),
            wind_schedule: SineSchedule::constant(source.wind),
            length_schedule: SineSchedule::constant(source.length),
        }
    }

    /// Sinusoidal gravity/wind (refreshed every step) and length (refreshed
    /// every episode).
    pub fn non_stationary(gravity: SineSchedule, wind: SineSchedule, length: SineSchedule) -> Self {
        let base = DynamicsParams { gravity: gravity.base, wind: wind.base, length: length.base };
        DynamicsSchedule {
            kind: ScheduleKind::NonStationary,
            source_params: base,
            target_params: base,
            randomization: None,
            gravity_schedule: gravity,
            wind_schedule: wind,
            length_schedule: length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.source_params.validate()?;
        self.target_params.validate()?;
        if self.kind == ScheduleKind::NonStationary
            && (self.gravity_schedule.frequency <= 0.0
                || self.wind_schedule.frequency <= 0.0
                || self.length_schedule.frequency <= 0.0)
        {
            return Err(CoreError::InvalidConfig("non-stationary schedule needs frequency > 0".into()));
        }
        if let Some(r) = &self.randomization {
            for (lo, hi) in [r.gravity, r.wind, r.length] {
                if lo > hi {
                    return Err(CoreError::InvalidConfig("randomization range inverted".into()));
                }
            }
        }
        Ok(())
    }

    /// Parameters at (episode i, step j). Length-type fields only depend on
    /// the episode; for non-stationary dynamics the gravity/wind noise is
    /// redrawn on every call, which realizes the per-step variation.
    pub fn schedule_params(&self, domain: Domain, episode: usize, _step: usize, rng: &mut Rng) -> DynamicsParams {
        match self.kind {
            ScheduleKind::Stationary => self.source_params,
            ScheduleKind::DomainAdaptation => match domain {
                Domain::Target => self.target_params,
                Domain::Source => match &self.randomization {
                    None => self.source_params,
                    Some(r) => DynamicsParams {
                        gravity: rng.uniform(r.gravity.0, r.gravity.1),
                        wind: rng.uniform(r.wind.0, r.wind.1),
                        length: rng.uniform(r.length.0, r.length.1),
                    },
                },
            },
            ScheduleKind::NonStationary => DynamicsParams {
                gravity: self.gravity_schedule.value(episode as f64, rng),
                wind: self.wind_schedule.value(episode as f64, rng),
                length: self.length_schedule.value(episode as f64, rng),
            },
        }
    }

    fn step_refresh(&self, episode: usize, params: &mut DynamicsParams, rng: &mut Rng) {
        if self.kind == ScheduleKind::NonStationary {
            params.gravity = self.gravity_schedule.value(episode as f64, rng);
            params.wind = self.wind_schedule.value(episode as f64, rng);
        }
    }
}

/// A desk-scale episodic environment.
pub trait Environment {
    fn obs_dim(&self) -> usize;
    fn act_dim(&self) -> usize;
    fn horizon(&self) -> usize;
    /// Starts episode `episode`; freezes per-episode dynamics fields.
    fn reset(&mut self, episode: usize, rng: &mut Rng) -> Vec<f64>;
    /// Returns (next_obs, reward, episode_over). Rewards are in
    /// [REWARD_MIN, REWARD_MAX], strictly positive by construction.
    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<(Vec<f64>, f64, bool)>;
    /// Whether episode ends are plain time limits rather than absorbing
    /// terminal states. Fixed-horizon environments return true, and the
    /// learner then bootstraps through resets; masking the bootstrap at a
    /// time limit biases the flow balance and lets the critic drift
    /// unboundedly.
    fn episode_end_is_timeout(&self) -> bool {
        true
    }
    fn params(&self) -> DynamicsParams;
    fn clone_boxed(&self) -> Box<dyn Environment>;
}

pub const POINT_MASS_DT: f64 = 0.05;
pub const POINT_MASS_HORIZON: usize = 200;
const POINT_MASS_ACCEL: f64 = 4.0;
const POINT_MASS_DRAG: f64 = 0.5;
const POINT_MASS_SLOPE: f64 = 0.05;
const POINT_MASS_KAPPA: f64 = 2.0;

/// Point mass on a plane tilted along +x, with drag-coupled wind along x.
/// Goal at the origin; reward decays exponentially in goal distance.
/// Observation [px, py, vx, vy], action (ax, ay) in (-1,1)^2.
#[derive(Clone, Debug)]
pub struct PointMassEnv {
    schedule: DynamicsSchedule,
    domain: Domain,
    state: [f64; 4],
    episode: usize,
    step_idx: usize,
    params: DynamicsParams,
    slope: f64,
}

impl PointMassEnv {
    pub fn new(schedule: DynamicsSchedule, domain: Domain) -> Self {
        let params = schedule.source_params;
        PointMassEnv { schedule, domain, state: [0.0; 4], episode: 0, step_idx: 0, params, slope: POINT_MASS_SLOPE }
    }

    /// Overrides the arena tilt; slope 0 gives a flat arena where gravity has
    /// no effect on the mass.
    pub fn with_slope(mut self, slope: f64) -> Self {
        self.slope = slope;
        self
    }
}

impl Environment for PointMassEnv {
    fn obs_dim(&self) -> usize {
        4
    }

    fn act_dim(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        POINT_MASS_HORIZON
    }

    fn reset(&mut self, episode: usize, rng: &mut Rng) -> Vec<f64> {
        self.episode = episode;
        self.step_idx = 0;
        self.params = self.schedule.schedule_params(self.domain, episode, 0, rng);
        // mu0: position uniform in the start square scaled by arena scale,
        // zero velocity.
        let scale = self.params.length / 0.4; // arena scale 1 at the default length
        let px = rng.uniform(0.3, 0.6) * scale;
        let py = rng.uniform(0.3, 0.6) * scale;
        self.state = [px, py, 0.0, 0.0];
        self.state.to_vec()
    }

    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<(Vec<f64>, f64, bool)> {
        if action.len() != 2 {
            return Err(CoreError::DimensionMismatch { expected: 2, got: action.len(), what: "point-mass action" });
        }
        if action.iter().any(|a| !a.is_finite()) {
            return Err(CoreError::NonFinite("action"));
        }
        self.schedule.step_refresh(self.episode, &mut self.params, rng);
        let [px, py, vx, vy] = self.state;
        let ax = action[0].clamp(-1.0, 1.0) * POINT_MASS_ACCEL
            - POINT_MASS_DRAG * (vx - self.params.wind)
            - self.params.gravity * self.slope;
        let ay = action[1].clamp(-1.0, 1.0) * POINT_MASS_ACCEL - POINT_MASS_DRAG * vy;
        // semi-implicit Euler
        let nvx = vx + POINT_MASS_DT * ax;
        let nvy = vy + POINT_MASS_DT * ay;
        let npx = px + POINT_MASS_DT * nvx;
        let npy = py + POINT_MASS_DT * nvy;
        self.state = [npx, npy, nvx, nvy];
        self.step_idx += 1;
        let dist = math::sqrt(npx * npx + npy * npy);
        let reward = REWARD_MIN + (REWARD_MAX - REWARD_MIN) * math::exp(-POINT_MASS_KAPPA * dist);
        let terminal = self.step_idx >= POINT_MASS_HORIZON;
        Ok((self.state.to_vec(), reward, terminal))
    }

    fn params(&self) -> DynamicsParams {
        self.params
    }

    fn clone_boxed(&self) -> Box<dyn Environment> {
        Box::new(self.clone())
    }
}

pub const PENDULUM_DT: f64 = 0.05;
pub const PENDULUM_HORIZON: usize = 200;
const PENDULUM_TORQUE: f64 = 15.0;
const PENDULUM_DAMPING: f64 = 0.005;
const PENDULUM_WIND_DRAG: f64 = 0.5;
const PENDULUM_MAX_SPEED: f64 = 12.0;

/// Pendulum swing-up; theta measured from upright, reset near hanging.
/// Observation [cos(theta), sin(theta), theta_dot], 1-d torque action.
#[derive(Clone, Debug)]
pub struct PendulumEnv {
    schedule: DynamicsSchedule,
    domain: Domain,
    theta: f64,
    theta_dot: f64,
    episode: usize,
    step_idx: usize,
    params: DynamicsParams,
}

impl PendulumEnv {
    pub fn new(schedule: DynamicsSchedule, domain: Domain) -> Self {
        let params = schedule.source_params;
        PendulumEnv { schedule, domain, theta: math::PI, theta_dot: 0.0, episode: 0, step_idx: 0, params }
    }

    fn obs(&self) -> Vec<f64> {
        vec![math::cos(self.theta), math::sin(self.theta), self.theta_dot / PENDULUM_MAX_SPEED]
    }
}

impl Environment for PendulumEnv {
    fn obs_dim(&self) -> usize {
        3
    }

    fn act_dim(&self) -> usize {
        1
    }

    fn horizon(&self) -> usize {
        PENDULUM_HORIZON
    }

    fn reset(&mut self, episode: usize, rng: &mut Rng) -> Vec<f64> {
        self.episode = episode;
        self.step_idx = 0;
        self.params = self.schedule.schedule_params(self.domain, episode, 0, rng);
        self.theta = math::PI + rng.uniform(-0.1, 0.1);
        self.theta_dot = 0.0;
        self.obs()
    }

    fn step(&mut self, action: &[f64], rng: &mut Rng) -> Result<(Vec<f64>, f64, bool)> {
        if action.len() != 1 {
            return Err(CoreError::DimensionMismatch { expected: 1, got: action.len(), what: "pendulum action" });
        }
        if !action[0].is_finite() {
            return Err(CoreError::NonFinite("action"));
        }
        self.schedule.step_refresh(self.episode, &mut self.params, rng);
        let g = self.params.gravity;
        let len = self.params.length;
        let torque = action[0].clamp(-1.0, 1.0) * PENDULUM_TORQUE;
        let theta_dd = (g / len) * math::sin(self.theta)
            + (PENDULUM_WIND_DRAG * self.params.wind / len) * math::cos(self.theta)
            + torque
            - PENDULUM_DAMPING * self.theta_dot;
        self.theta_dot = (self.theta_dot + PENDULUM_DT * theta_dd).clamp(-PENDULUM_MAX_SPEED, PENDULUM_MAX_SPEED);
        self.theta += PENDULUM_DT * self.theta_dot;
        self.step_idx += 1;
        let reward = REWARD_MIN + (REWARD_MAX - REWARD_MIN) * 0.5 * (1.0 + math::cos(self.theta));
        let terminal = self.step_idx >= PENDULUM_HORIZON;
        Ok((self.obs(), reward, terminal))
    }

    fn params(&self) -> DynamicsParams {
        self.params
    }

    fn clone_boxed(&self) -> Box<dyn Environment> {
        Box::new(self.clone())
    }
}

/// Known environments, constructible by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvKind {
    PointMass,
    Pendulum,
}

impl EnvKind {
    pub fn build(self, schedule: DynamicsSchedule, domain: Domain) -> Box<dyn Environment> {
        match self {
            EnvKind::PointMass => Box::new(PointMassEnv::new(schedule, domain)),
            EnvKind::Pendulum => Box::new(PendulumEnv::new(schedule, domain)),
        }
    }
}
