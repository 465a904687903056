//! Squashed-Gaussian policy head: tanh-transformed diagonal Gaussian with the
//! change-of-variables correction, SAC style. The actor MLP emits mean and
//! log-std as two output heads; log-std is clipped to [-20, 2] on every
//! forward pass.

use crate::error::{CoreError, Result};
use crate::math;
use alloc::vec::Vec;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;

/// tanh saturates to exactly 1.0 in f64 for |u| > ~19; actions are clamped
/// just inside the boundary so they stay strictly within (-1, 1).
const ACTION_BOUND: f64 = 1.0 - 1e-15;

const HALF_LN_TAU: f64 = 0.918_938_533_204_672_74; // 0.5 ln(2 pi)

#[derive(Clone, Debug)]
pub struct GaussianHead {
    pub mean: Vec<f64>,
    pub log_std: Vec<f64>,
    /// Per-component clip mask: false where the raw log-std was clipped, so
    /// gradients through the clip are zeroed.
    pub log_std_active: Vec<bool>,
}

impl GaussianHead {
    /// Splits a raw actor output [mean; log_std] and applies the clip.
    pub fn from_raw(raw: &[f64]) -> Result<Self> {
        if raw.len() % 2 != 0 {
            return Err(CoreError::DimensionMismatch {
                expected: raw.len() + 1,
                got: raw.len(),
                what: "GaussianHead raw output (must be 2 * action_dim)",
            });
        }
        let d = raw.len() / 2;
        let mean = raw[..d].to_vec();
        let mut log_std = Vec::with_capacity(d);
        let mut log_std_active = Vec::with_capacity(d);
        for &ls in &raw[d..] {
            log_std.push(math::clamp(ls, LOG_STD_MIN, LOG_STD_MAX));
            log_std_active.push(ls > LOG_STD_MIN && ls < LOG_STD_MAX);
        }
        Ok(GaussianHead { mean, log_std, log_std_active })
    }

    pub fn action_dim(&self) -> usize {
        self.mean.len()
    }
}

/// Reparameterized sample: action = tanh(mean + std * noise), together with
/// its log-density under the squashed Gaussian.
pub fn policy_sample(head: &GaussianHead, noise: &[f64]) -> Result<(Vec<f64>, f64)> {
    let d = head.action_dim();
    if noise.len() != d {
        return Err(CoreError::DimensionMismatch { expected: d, got: noise.len(), what: "policy noise" });
    }
    let mut action = Vec::with_capacity(d);
    let mut log_prob = 0.0;
    for i in 0..d {
        let std = math::exp(head.log_std[i]);
        let u = head.mean[i] + std * noise[i];
        action.push(math::clamp(math::tanh(u), -ACTION_BOUND, ACTION_BOUND));
        // Gaussian log-density at u, minus the tanh log-det correction.
        log_prob += -HALF_LN_TAU - head.log_std[i] - 0.5 * noise[i] * noise[i];
        log_prob -= math::tanh_log_one_minus_sq(u);
    }
    Ok((action, log_prob))
}

/// Log-density of an action strictly inside (-1, 1)^d.
pub fn policy_log_prob(head: &GaussianHead, action: &[f64]) -> Result<f64> {
    let d = head.action_dim();
    if action.len() != d {
        return Err(CoreError::DimensionMismatch { expected: d, got: action.len(), what: "policy action" });
    }
    let mut log_prob = 0.0;
    for i in 0..d {
        let a = action[i];
        if !(math::fabs(a) < 1.0) {
            return Err(CoreError::ActionOnBoundary);
        }
        let u = math::atanh(a);
        let std = math::exp(head.log_std[i]);
        let z = (u - head.mean[i]) / std;
        log_prob += -HALF_LN_TAU - head.log_std[i] - 0.5 * z * z;
        log_prob -= math::tanh_log_one_minus_sq(u);
    }
    Ok(log_prob)
}

/// Deterministic evaluation action: tanh(mean).
pub fn deterministic_action(head: &GaussianHead) -> Vec<f64> {
    head.mean.iter().map(|&m| math::tanh(m)).collect()
}
