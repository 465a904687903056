//! Dual actor-critic learner driven by a transition-occupancy ratio.
//!
//! The critic minimizes
//!   (1 - gamma) E_{D0, pi}[Q(s0, a0)] + alpha E_{D_G}[f*(Psi / alpha)]
//! and the actor descends the negation of
//!   (1 - gamma) E_{D0, pi}[Q(s0, a0)] + alpha E_{D_G}[f*'(Psi / alpha)],
//! where the residual is
//!   Psi = ln r - alpha R + gamma (1 - done) Q(s', a') - Q(s, a)
//! and R = ln(rho_on-policy / rho_buffer) comes from the discriminator.
//! Gradients are exact: the actor path is reparameterized through
//! a = tanh(mean + std * noise) and chained through f*'' on the Q(s', a')
//! branch. Both losses are pure functions of a pre-sampled [`LossBatch`]
//! (records, ratios, initial states and Gaussian noise all drawn up front),
//! which keeps them checkable by finite differences.

use crate::buffer::{BufferSet, TransitionRecord};
use crate::discriminator::{balanced_batch_sampler, discriminator_loss_and_grad, discriminator_outputs, recover_r};
use crate::env::Environment;
use crate::error::{CoreError, Result};
use crate::fenchel::{fenchel_star, fenchel_star_deriv, fenchel_star_second_deriv};
use crate::math;
use crate::nn::{adam_step, mlp_backward_batch, mlp_forward_batch, Activation, ForwardCache, MlpSpec, Network, ParamVector};
use crate::policy::{deterministic_action, policy_sample, GaussianHead};
use crate::rng::Rng;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Learner ablations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ablation {
    /// Full learner.
    None,
    /// Force R = 0: the residual degrades to a plain log-reward Bellman form.
    NoDiscriminator,
    /// Use r instead of ln r in the residual.
    RawReward,
}

/// Learner hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentConfig {
    pub gamma: f64,
    pub alpha: f64,
    /// Conjugate order q of f*(x) = x^q / q + x.
    pub q_order: f64,
    pub batch_size: usize,
    pub critic_lr: f64,
    pub actor_lr: f64,
    pub discriminator_lr: f64,
    pub critic_steps_per_actor_step: usize,
    pub hidden_dims: Vec<usize>,
    /// Two-timescale updates run per local-buffer refresh event.
    pub updates_per_merge: usize,
    /// Gradient steps of discriminator training per refresh event.
    pub discriminator_steps: usize,
    pub local_capacity: usize,
    pub global_capacity: usize,
    pub ablation: Ablation,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.99,
            alpha: 0.001,
            q_order: 1.5,
            batch_size: 256,
            critic_lr: 3e-4,
            actor_lr: 1e-4,
            discriminator_lr: 3e-4,
            critic_steps_per_actor_step: 5,
            hidden_dims: vec![256, 256],
            updates_per_merge: 32,
            discriminator_steps: 16,
            local_capacity: 1000,
            global_capacity: 1_000_000,
            ablation: Ablation::None,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma > 0.0
            && self.gamma < 1.0
            && self.alpha > 0.0
            && self.q_order > 1.0
            && self.batch_size > 0
            && self.critic_lr > 0.0
            && self.actor_lr > 0.0
            && self.discriminator_lr > 0.0
            && self.critic_steps_per_actor_step > 0
            && !self.hidden_dims.is_empty()
            && !self.hidden_dims.contains(&0)
            && self.updates_per_merge > 0
            && self.discriminator_steps > 0
            && self.local_capacity > 0
            && self.global_capacity >= self.local_capacity;
        if !ok {
            return Err(CoreError::InvalidConfig("agent hyperparameters out of range".into()));
        }
        Ok(())
    }
}

/// One residual evaluation. `reward_term` is ln r (or r under the raw-reward
/// ablation), `shift_log_ratio` is R.
pub fn residual_psi(
    reward_term: f64,
    shift_log_ratio: f64,
    q_sa: f64,
    q_next: f64,
    terminal: bool,
    alpha: f64,
    gamma: f64,
) -> f64 {
    let bootstrap = if terminal { 0.0 } else { gamma * q_next };
    reward_term - alpha * shift_log_ratio + bootstrap - q_sa
}

/// Everything one loss evaluation consumes, drawn up front so the losses are
/// deterministic functions of the parameters.
#[derive(Clone, Debug)]
pub struct LossBatch {
    pub records: Vec<TransitionRecord>,
    /// R per record; zeros under the no-discriminator ablation.
    pub shift_log_ratio: Vec<f64>,
    pub init_states: Vec<Vec<f64>>,
    /// Standard-normal draws for a' = pi(s'), one row per record.
    pub noise_next: Vec<Vec<f64>>,
    /// Standard-normal draws for a0 = pi(s0), one row per initial state.
    pub noise_init: Vec<Vec<f64>>,
}

impl LossBatch {
    pub fn validate(&self) -> Result<()> {
        if self.records.is_empty() {
            return Err(CoreError::EmptyBuffer("loss batch records"));
        }
        if self.init_states.is_empty() {
            return Err(CoreError::EmptyBuffer("loss batch initial states"));
        }
        if self.shift_log_ratio.len() != self.records.len() || self.noise_next.len() != self.records.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.records.len(),
                got: self.shift_log_ratio.len(),
                what: "loss batch ratio/noise rows",
            });
        }
        if self.noise_init.len() != self.init_states.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.init_states.len(),
                got: self.noise_init.len(),
                what: "loss batch initial noise rows",
            });
        }
        if self.shift_log_ratio.iter().any(|r| !r.is_finite()) {
            return Err(CoreError::NonFinite("shift_log_ratio"));
        }
        Ok(())
    }
}

/// Scalar metrics from one two-timescale update.
#[derive(Clone, Copy, Debug, Default)]
pub struct UpdateMetrics {
    pub critic_loss: f64,
    pub actor_loss: f64,
    pub mean_shift: f64,
    pub std_shift: f64,
}

/// The learner: critic Q(s, a), squashed-Gaussian actor and the transition
/// discriminator, each with its own Adam state.
#[derive(Clone, Debug)]
pub struct OmpoAgent {
    pub config: AgentConfig,
    pub obs_dim: usize,
    pub act_dim: usize,
    pub critic: Network,
    pub actor: Network,
    pub discriminator: Network,
}

fn flatten(rows: &[Vec<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows.len() * rows.first().map_or(0, |r| r.len()));
    for r in rows {
        out.extend_from_slice(r);
    }
    out
}

impl OmpoAgent {
    pub fn new(config: AgentConfig, obs_dim: usize, act_dim: usize, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        if obs_dim == 0 || act_dim == 0 {
            return Err(CoreError::InvalidConfig("obs_dim and act_dim must be positive".into()));
        }
        let critic_spec = MlpSpec::new(obs_dim + act_dim, 1, config.hidden_dims.clone(), Activation::Elu)?;
        let actor_spec = MlpSpec::new(obs_dim, 2 * act_dim, config.hidden_dims.clone(), Activation::Elu)?;
        let disc_spec = MlpSpec::new(2 * obs_dim + act_dim, 1, config.hidden_dims.clone(), Activation::Tanh)?;
        let mut r_critic = rng.split(1);
        let mut r_actor = rng.split(2);
        let mut r_disc = rng.split(3);
        Ok(OmpoAgent {
            obs_dim,
            act_dim,
            critic: Network::new(critic_spec, config.critic_lr, &mut r_critic),
            actor: Network::new(actor_spec, config.actor_lr, &mut r_actor),
            discriminator: Network::new(disc_spec, config.discriminator_lr, &mut r_disc),
            config,
        })
    }

    /// Policy heads for a batch of states, plus the actor forward cache.
    fn actor_heads(&self, states: &[Vec<f64>]) -> Result<(Vec<GaussianHead>, ForwardCache)> {
        let flat = flatten(states);
        let (raw, cache) = mlp_forward_batch(&self.actor.spec, &self.actor.params, &flat, states.len())?;
        let d = 2 * self.act_dim;
        let mut heads = Vec::with_capacity(states.len());
        for row in raw.chunks(d) {
            heads.push(GaussianHead::from_raw(row)?);
        }
        Ok((heads, cache))
    }

    /// Stochastic action for environment interaction.
    pub fn sample_action(&self, state: &[f64], rng: &mut Rng) -> Result<Vec<f64>> {
        let (heads, _) = self.actor_heads(core::slice::from_ref(&state.to_vec()))?;
        let noise = rng.normal_vec(self.act_dim);
        let (action, _) = policy_sample(&heads[0], &noise)?;
        Ok(action)
    }

    /// Deterministic evaluation action tanh(mean).
    pub fn eval_action(&self, state: &[f64]) -> Result<Vec<f64>> {
        let (heads, _) = self.actor_heads(core::slice::from_ref(&state.to_vec()))?;
        Ok(deterministic_action(&heads[0]))
    }

    /// R = ln(rho_on-policy / rho_buffer) for each record, from the current
    /// discriminator. The classifier pushes h -> 1 on buffer samples, so the
    /// on-policy-over-buffer ratio is the negated logit recovery.
    pub fn shift_log_ratios(&self, records: &[TransitionRecord]) -> Result<Vec<f64>> {
        let features: Vec<Vec<f64>> = records.iter().map(|r| r.features()).collect();
        let h = discriminator_outputs(&self.discriminator.spec, &self.discriminator.params, &features)?;
        Ok(h.iter().map(|&hv| -recover_r(hv)).collect())
    }

    /// Draws a training batch: records and initial states with replacement,
    /// ratios from the current discriminator and fresh reparameterization
    /// noise.
    pub fn sample_loss_batch(&self, buffers: &BufferSet, rng: &mut Rng) -> Result<LossBatch> {
        let b = self.config.batch_size;
        let mut records = Vec::with_capacity(b);
        for _ in 0..b {
            records.push(buffers.global.sample(rng)?.clone());
        }
        let shift_log_ratio = if self.config.ablation == Ablation::NoDiscriminator {
            vec![0.0; b]
        } else {
            self.shift_log_ratios(&records)?
        };
        let mut init_states = Vec::with_capacity(b);
        for _ in 0..b {
            init_states.push(buffers.sample_initial_state(rng)?.clone());
        }
        let noise_next = (0..b).map(|_| rng.normal_vec(self.act_dim)).collect();
        let noise_init = (0..b).map(|_| rng.normal_vec(self.act_dim)).collect();
        Ok(LossBatch { records, shift_log_ratio, init_states, noise_next, noise_init })
    }

    fn reward_term(&self, reward: f64) -> f64 {
        match self.config.ablation {
            Ablation::RawReward => reward,
            _ => math::log(reward),
        }
    }

    /// Samples actions for each (head, noise) row; returns them and the flat
    /// critic input rows [state; action].
    fn build_critic_rows(
        &self,
        states: &[Vec<f64>],
        heads: &[GaussianHead],
        noise: &[Vec<f64>],
    ) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let mut actions = Vec::with_capacity(states.len());
        let mut rows = Vec::with_capacity(states.len() * (self.obs_dim + self.act_dim));
        for i in 0..states.len() {
            let (a, _) = policy_sample(&heads[i], &noise[i])?;
            rows.extend_from_slice(&states[i]);
            rows.extend_from_slice(&a);
            actions.push(a);
        }
        Ok((actions, rows))
    }

    /// Critic objective and its exact parameter gradient at the current
    /// parameters. Actions are sampled from the (frozen) actor.
    pub fn critic_loss_and_grad(&self, batch: &LossBatch) -> Result<(f64, ParamVector)> {
        batch.validate()?;
        let cfg = &self.config;
        let (b0, b) = (batch.init_states.len(), batch.records.len());
        let next_states: Vec<Vec<f64>> = batch.records.iter().map(|r| r.next_state.clone()).collect();
        let (init_heads, _) = self.actor_heads(&batch.init_states)?;
        let (next_heads, _) = self.actor_heads(&next_states)?;
        let (_, init_rows) = self.build_critic_rows(&batch.init_states, &init_heads, &batch.noise_init)?;
        let (_, next_rows) = self.build_critic_rows(&next_states, &next_heads, &batch.noise_next)?;

        // One critic pass over [init rows | (s,a) rows | (s',a') rows].
        let mut inputs = init_rows;
        for r in &batch.records {
            inputs.extend_from_slice(&r.state);
            inputs.extend_from_slice(&r.action);
        }
        inputs.extend_from_slice(&next_rows);
        let total = b0 + 2 * b;
        let (q, cache) = mlp_forward_batch(&self.critic.spec, &self.critic.params, &inputs, total)?;

        let mut loss = 0.0;
        let mut out_grad = vec![0.0; total];
        let w0 = (1.0 - cfg.gamma) / b0 as f64;
        for i in 0..b0 {
            loss += w0 * q[i];
            out_grad[i] = w0;
        }
        for i in 0..b {
            let rec = &batch.records[i];
            let psi = residual_psi(
                self.reward_term(rec.reward),
                batch.shift_log_ratio[i],
                q[b0 + i],
                q[b0 + b + i],
                rec.terminal,
                cfg.alpha,
                cfg.gamma,
            );
            let x = psi / cfg.alpha;
            loss += cfg.alpha * fenchel_star(x, cfg.q_order) / b as f64;
            let w = fenchel_star_deriv(x, cfg.q_order) / b as f64;
            out_grad[b0 + i] = -w;
            out_grad[b0 + b + i] = if rec.terminal { 0.0 } else { w * cfg.gamma };
        }
        let (grad, _) = mlp_backward_batch(&self.critic.spec, &self.critic.params, &cache, &out_grad)?;
        Ok((loss, grad))
    }

    /// Actor loss (negated dual objective, so gradient descent improves the
    /// policy) and its exact parameter gradient. The critic is frozen; the
    /// gradient flows through the reparameterized actions at s0 and s'.
    pub fn actor_loss_and_grad(&self, batch: &LossBatch) -> Result<(f64, ParamVector)> {
        batch.validate()?;
        let cfg = &self.config;
        let (b0, b) = (batch.init_states.len(), batch.records.len());
        let next_states: Vec<Vec<f64>> = batch.records.iter().map(|r| r.next_state.clone()).collect();
        let (init_heads, init_cache) = self.actor_heads(&batch.init_states)?;
        let (next_heads, next_cache) = self.actor_heads(&next_states)?;
        let (init_actions, init_rows) = self.build_critic_rows(&batch.init_states, &init_heads, &batch.noise_init)?;
        let (next_actions, next_rows) = self.build_critic_rows(&next_states, &next_heads, &batch.noise_next)?;

        let mut inputs = init_rows;
        for r in &batch.records {
            inputs.extend_from_slice(&r.state);
            inputs.extend_from_slice(&r.action);
        }
        inputs.extend_from_slice(&next_rows);
        let total = b0 + 2 * b;
        let (q, cache) = mlp_forward_batch(&self.critic.spec, &self.critic.params, &inputs, total)?;

        // Objective value and per-row weights dL/dQ(row). L is the negated
        // dual objective; rows where Q is only evaluated (s,a) carry no
        // actor-side gradient.
        let mut objective = 0.0;
        let mut out_grad = vec![0.0; total];
        let w0 = (1.0 - cfg.gamma) / b0 as f64;
        for i in 0..b0 {
            objective += w0 * q[i];
            out_grad[i] = -w0;
        }
        for i in 0..b {
            let rec = &batch.records[i];
            let psi = residual_psi(
                self.reward_term(rec.reward),
                batch.shift_log_ratio[i],
                q[b0 + i],
                q[b0 + b + i],
                rec.terminal,
                cfg.alpha,
                cfg.gamma,
            );
            let x = psi / cfg.alpha;
            objective += cfg.alpha * fenchel_star_deriv(x, cfg.q_order) / b as f64;
            // d/dQ(s',a') of alpha f*'(psi/alpha) = f*''(x) gamma (1 - done)
            let w = fenchel_star_second_deriv(x, cfg.q_order) / b as f64;
            out_grad[b0 + b + i] = if rec.terminal { 0.0 } else { -w * cfg.gamma };
        }
        let loss = -objective;

        // Critic input gradients give dL/da per sampled-action row.
        let (_, input_grad) = mlp_backward_batch(&self.critic.spec, &self.critic.params, &cache, &out_grad)?;
        let row_dim = self.obs_dim + self.act_dim;
        let action_grad = |row: usize| -> &[f64] { &input_grad[row * row_dim + self.obs_dim..(row + 1) * row_dim] };

        // Chain through a = tanh(mean + std * noise) into the raw actor
        // outputs [mean; log_std], honoring the log-std clip mask.
        let chain = |heads: &[GaussianHead], actions: &[Vec<f64>], noise: &[Vec<f64>], row0: usize| -> Vec<f64> {
            let d = self.act_dim;
            let mut g = vec![0.0; heads.len() * 2 * d];
            for (i, head) in heads.iter().enumerate() {
                let ga = action_grad(row0 + i);
                let grow = &mut g[i * 2 * d..(i + 1) * 2 * d];
                for k in 0..d {
                    let sech2 = 1.0 - actions[i][k] * actions[i][k];
                    let dmean = ga[k] * sech2;
                    grow[k] = dmean;
                    if head.log_std_active[k] {
                        grow[d + k] = dmean * math::exp(head.log_std[k]) * noise[i][k];
                    }
                }
            }
            g
        };
        let g_init = chain(&init_heads, &init_actions, &batch.noise_init, 0);
        let g_next = chain(&next_heads, &next_actions, &batch.noise_next, b0 + b);
        let (mut grad, _) = mlp_backward_batch(&self.actor.spec, &self.actor.params, &init_cache, &g_init)?;
        let (grad_next, _) = mlp_backward_batch(&self.actor.spec, &self.actor.params, &next_cache, &g_next)?;
        grad.axpy(1.0, &grad_next);
        Ok((loss, grad))
    }

    /// k critic steps followed by one actor step, each on a freshly sampled
    /// batch.
    pub fn two_timescale_update(&mut self, buffers: &BufferSet, rng: &mut Rng) -> Result<UpdateMetrics> {
        let mut metrics = UpdateMetrics::default();
        for _ in 0..self.config.critic_steps_per_actor_step {
            let batch = self.sample_loss_batch(buffers, rng)?;
            let (loss, grad) = self.critic_loss_and_grad(&batch)?;
            adam_step(&mut self.critic.params, &grad, &mut self.critic.adam)?;
            metrics.critic_loss = loss;
        }
        let batch = self.sample_loss_batch(buffers, rng)?;
        let (loss, grad) = self.actor_loss_and_grad(&batch)?;
        adam_step(&mut self.actor.params, &grad, &mut self.actor.adam)?;
        metrics.actor_loss = loss;
        let n = batch.shift_log_ratio.len() as f64;
        let mean = batch.shift_log_ratio.iter().sum::<f64>() / n;
        let var = batch.shift_log_ratio.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
        metrics.mean_shift = mean;
        metrics.std_shift = math::sqrt(var);
        Ok(metrics)
    }

    /// Ascends the classifier objective on balanced global/local batches.
    /// Returns the final descent-convention loss (negated objective).
    pub fn train_discriminator(&mut self, buffers: &BufferSet, rng: &mut Rng) -> Result<f64> {
        let mut last = 0.0;
        for _ in 0..self.config.discriminator_steps {
            let batch = balanced_batch_sampler(&buffers.global, &buffers.local, rng)?;
            let (objective, mut grad) =
                discriminator_loss_and_grad(&self.discriminator.spec, &self.discriminator.params, &batch)?;
            for g in grad.data.iter_mut() {
                *g = -*g;
            }
            adam_step(&mut self.discriminator.params, &grad, &mut self.discriminator.adam)?;
            last = -objective;
        }
        Ok(last)
    }
}

/// Training-loop shape, independent of the learner hyperparameters.
#[derive(Clone, Copy, Debug)]
pub struct RunConfig {
    pub total_steps: u64,
    pub eval_every: u64,
    pub n_eval_episodes: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total_steps == 0 || self.eval_every == 0 || self.n_eval_episodes == 0 {
            return Err(CoreError::InvalidConfig("run parameters must be positive".into()));
        }
        Ok(())
    }
}

/// One metrics row, emitted at step 0 and every `eval_every` steps.
#[derive(Clone, Copy, Debug)]
pub struct LogRow {
    pub env_step: u64,
    pub episode: u64,
    pub eval_return: f64,
    pub critic_loss: f64,
    pub actor_loss: f64,
    pub discriminator_loss: f64,
    pub mean_shift: f64,
    pub std_shift: f64,
    pub merge_events: u64,
}

/// Median undiscounted return of the deterministic policy.
pub fn evaluate_policy(
    agent: &OmpoAgent,
    env: &mut dyn Environment,
    n_episodes: usize,
    rng: &mut Rng,
) -> Result<f64> {
    let mut returns = Vec::with_capacity(n_episodes);
    for ep in 0..n_episodes {
        let mut obs = env.reset(ep, rng);
        let mut total = 0.0;
        loop {
            let action = agent.eval_action(&obs)?;
            let (next, r, done) = env.step(&action, rng)?;
            total += r;
            obs = next;
            if done {
                break;
            }
        }
        returns.push(total);
    }
    returns.sort_by(|a, b| a.partial_cmp(b).expect("returns are finite"));
    let n = returns.len();
    Ok(if n % 2 == 1 { returns[n / 2] } else { 0.5 * (returns[n / 2 - 1] + returns[n / 2]) })
}

/// Full training loop.
///
/// Fresh interaction transitions fill the local buffer; a full local buffer
/// triggers a discriminator refresh, `updates_per_merge` two-timescale agent
/// updates from the global buffer, then the local buffer is merged into the
/// global one and cleared. Under domain adaptation `source_env` is stepped in
/// lockstep and its transitions go straight to the global buffer; initial
/// states from the interaction environment feed the initial-state buffer.
pub fn run_algorithm1(
    agent: &mut OmpoAgent,
    env: &mut dyn Environment,
    mut source_env: Option<&mut (dyn Environment + 'static)>,
    eval_env: &mut dyn Environment,
    run: &RunConfig,
    rng: &mut Rng,
) -> Result<Vec<LogRow>> {
    run.validate()?;
    if env.obs_dim() != agent.obs_dim || env.act_dim() != agent.act_dim {
        return Err(CoreError::InvalidConfig(format!(
            "env dims ({}, {}) do not match agent dims ({}, {})",
            env.obs_dim(),
            env.act_dim(),
            agent.obs_dim,
            agent.act_dim
        )));
    }
    let mut buffers = BufferSet::new(agent.config.global_capacity, agent.config.local_capacity);
    let mut episode = 0u64;
    let mut merge_events = 0u64;
    let mut metrics = UpdateMetrics::default();
    let mut disc_loss = 0.0;
    let mut rows = Vec::new();

    let mut obs = env.reset(0, rng);
    buffers.push_initial_state(obs.clone());
    let mut src_obs = match source_env.as_deref_mut() {
        Some(src) => Some(src.reset(0, rng)),
        None => None,
    };
    let mut src_episode = 0usize;

    let mut eval_rng = rng.split(0x_e7a1);
    rows.push(LogRow {
        env_step: 0,
        episode: 0,
        eval_return: evaluate_policy(agent, eval_env, run.n_eval_episodes, &mut eval_rng)?,
        critic_loss: 0.0,
        actor_loss: 0.0,
        discriminator_loss: 0.0,
        mean_shift: 0.0,
        std_shift: 0.0,
        merge_events: 0,
    });

    let timeout_env = env.episode_end_is_timeout();
    for step in 1..=run.total_steps {
        let action = agent.sample_action(&obs, rng)?;
        let (next, reward, done) = env.step(&action, rng)?;
        let full = buffers.push_local(TransitionRecord {
            state: obs,
            action,
            next_state: next.clone(),
            reward,
            terminal: done && !timeout_env,
        })?;
        obs = if done {
            episode += 1;
            let o = env.reset(episode as usize, rng);
            buffers.push_initial_state(o.clone());
            o
        } else {
            next
        };

        if let (Some(src), Some(so)) = (source_env.as_deref_mut(), src_obs.as_mut()) {
            let a = agent.sample_action(so, rng)?;
            let (n, r, d) = src.step(&a, rng)?;
            let src_timeout = src.episode_end_is_timeout();
            buffers.push_global(TransitionRecord {
                state: core::mem::take(so),
                action: a,
                next_state: n.clone(),
                reward: r,
                terminal: d && !src_timeout,
            })?;
            *so = if d {
                src_episode += 1;
                src.reset(src_episode, rng)
            } else {
                n
            };
        }

        if full {
            if buffers.global.is_empty() {
                // Nothing to classify against or sample yet; seed the global
                // buffer with the first local fill.
                buffers.merge_local_into_global()?;
            } else {
                if agent.config.ablation != Ablation::NoDiscriminator {
                    disc_loss = agent.train_discriminator(&buffers, rng)?;
                }
                for _ in 0..agent.config.updates_per_merge {
                    metrics = agent.two_timescale_update(&buffers, rng)?;
                }
                buffers.merge_local_into_global()?;
            }
            merge_events += 1;
        }

        if step % run.eval_every == 0 {
            rows.push(LogRow {
                env_step: step,
                episode,
                eval_return: evaluate_policy(agent, eval_env, run.n_eval_episodes, &mut eval_rng)?,
                critic_loss: metrics.critic_loss,
                actor_loss: metrics.actor_loss,
                discriminator_loss: disc_loss,
                mean_shift: metrics.mean_shift,
                std_shift: metrics.std_shift,
                merge_events,
            });
        }
    }
    Ok(rows)
}
