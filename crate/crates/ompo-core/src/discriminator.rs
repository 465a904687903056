//! GAN-style transition classifier and the log occupancy-ratio it encodes.
//!
//! The discriminator is trained so that h(s,a,s') -> 1 on global-buffer
//! samples and -> 0 on local-buffer samples; at the optimum
//! h* = rho_G / (rho_G + rho_L) and recover_r(h*) = ln(rho_G / rho_L).
//! The learner consumes the negation, ln(rho_on-policy / rho_buffer).

use crate::buffer::{RingBuffer, TransitionRecord};
use crate::error::{CoreError, Result};
use crate::math;
use crate::nn::{mlp_backward_batch, mlp_forward_batch, MlpSpec, ParamVector};
use crate::rng::Rng;
use alloc::vec;
use alloc::vec::Vec;

/// Clamp applied to h before the logit inversion; bounds |R| by ~13.8155.
pub const H_CLAMP: f64 = 1e-6;

/// Inverts the optimal-discriminator identity: R = -ln(1/h - 1) after
/// clamping h into [H_CLAMP, 1 - H_CLAMP].
pub fn recover_r(h: f64) -> f64 {
    let hc = math::clamp(h, H_CLAMP, 1.0 - H_CLAMP);
    -math::log(1.0 / hc - 1.0)
}

/// One balanced training batch: |D_L| feature vectors per side.
#[derive(Clone, Debug)]
pub struct DiscriminatorBatch {
    pub global: Vec<Vec<f64>>,
    pub local: Vec<Vec<f64>>,
}

impl DiscriminatorBatch {
    pub fn validate(&self) -> Result<()> {
        if self.global.is_empty() {
            return Err(CoreError::EmptyBuffer("discriminator global side"));
        }
        if self.local.is_empty() {
            return Err(CoreError::EmptyBuffer("discriminator local side"));
        }
        if self.global.len() != self.local.len() {
            return Err(CoreError::DimensionMismatch {
                expected: self.local.len(),
                got: self.global.len(),
                what: "discriminator batch sides",
            });
        }
        Ok(())
    }
}

/// Draws |D_L| samples from each buffer: with replacement from D_G, and the
/// whole of D_L (a without-replacement draw of its own size).
pub fn balanced_batch_sampler(
    global: &RingBuffer,
    local: &[TransitionRecord],
    rng: &mut Rng,
) -> Result<DiscriminatorBatch> {
    if global.is_empty() {
        return Err(CoreError::EmptyBuffer("global buffer"));
    }
    if local.is_empty() {
        return Err(CoreError::EmptyBuffer("local buffer"));
    }
    let n = local.len();
    let mut g = Vec::with_capacity(n);
    for _ in 0..n {
        g.push(global.get(rng.index(global.len())).features());
    }
    let l = local.iter().map(|r| r.features()).collect();
    Ok(DiscriminatorBatch { global: g, local: l })
}

/// Sigmoid discriminator output for one feature vector.
pub fn discriminator_output(spec: &MlpSpec, params: &ParamVector, features: &[f64]) -> Result<f64> {
    let (out, _) = mlp_forward_batch(spec, params, features, 1)?;
    Ok(math::sigmoid(out[0]))
}

/// Batched sigmoid outputs.
pub fn discriminator_outputs(spec: &MlpSpec, params: &ParamVector, features: &[Vec<f64>]) -> Result<Vec<f64>> {
    let batch = features.len();
    let mut flat = Vec::with_capacity(batch * spec.input_dim);
    for f in features {
        flat.extend_from_slice(f);
    }
    let (out, _) = mlp_forward_batch(spec, params, &flat, batch)?;
    Ok(out.iter().map(|&z| math::sigmoid(z)).collect())
}

/// Classifier objective value and its exact parameter gradient:
/// loss = mean_G ln h + mean_L ln(1-h).
///
/// Training ascends this objective (the trainer feeds Adam the negated
/// gradient), driving h -> 1 on global samples and -> 0 on local samples.
pub fn discriminator_loss_and_grad(
    spec: &MlpSpec,
    params: &ParamVector,
    batch: &DiscriminatorBatch,
) -> Result<(f64, ParamVector)> {
    batch.validate()?;
    let (n_g, n_l) = (batch.global.len(), batch.local.len());
    let total = n_g + n_l;
    let mut flat = Vec::with_capacity(total * spec.input_dim);
    for f in batch.global.iter().chain(&batch.local) {
        if f.len() != spec.input_dim {
            return Err(CoreError::DimensionMismatch {
                expected: spec.input_dim,
                got: f.len(),
                what: "discriminator features",
            });
        }
        flat.extend_from_slice(f);
    }
    let (logits, cache) = mlp_forward_batch(spec, params, &flat, total)?;
    let mut loss = 0.0;
    let mut out_grad = vec![0.0; total];
    let eps = 1e-12;
    for (i, &z) in logits.iter().enumerate() {
        let h = math::clamp(math::sigmoid(z), eps, 1.0 - eps);
        if i < n_g {
            loss += math::log(h) / n_g as f64;
            // d ln h / d z = 1 - h
            out_grad[i] = (1.0 - h) / n_g as f64;
        } else {
            loss += math::log(1.0 - h) / n_l as f64;
            // d ln(1-h) / d z = -h
            out_grad[i] = -h / n_l as f64;
        }
    }
    let (grad, _) = mlp_backward_batch(spec, params, &cache, &out_grad)?;
    Ok((loss, grad))
}
