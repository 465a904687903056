//! Multilayer perceptrons with hand-derived backpropagation and Adam.
//!
//! Parameters live in one flat array (layer-major, weights then biases per
//! layer) so the optimizer, checkpointing and finite-difference probes all
//! operate on a single type. Forward/backward come in batched form; the
//! single-sample entry points are thin wrappers.

use crate::error::{CoreError, Result};
use crate::math;
use crate::rng::Rng;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Elu,
    Tanh,
    Relu,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Elu => {
                if x > 0.0 {
                    x
                } else {
                    math::exp(x) - 1.0
                }
            }
            Activation::Tanh => math::tanh(x),
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
        }
    }

    /// Derivative as a function of the pre-activation.
    fn deriv(self, x: f64) -> f64 {
        match self {
            Activation::Elu => {
                if x > 0.0 {
                    1.0
                } else {
                    math::exp(x)
                }
            }
            Activation::Tanh => {
                let t = math::tanh(x);
                1.0 - t * t
            }
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub output_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub activation: Activation,
}

impl MlpSpec {
    pub fn new(input_dim: usize, output_dim: usize, hidden_dims: Vec<usize>, activation: Activation) -> Result<Self> {
        if input_dim == 0 || output_dim == 0 || hidden_dims.is_empty() || hidden_dims.contains(&0) {
            return Err(CoreError::InvalidConfig("MLP dims must be positive and hidden_dims non-empty".into()));
        }
        Ok(MlpSpec { input_dim, output_dim, hidden_dims, activation })
    }

    /// Layer widths including input and output.
    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 2);
        dims.push(self.input_dim);
        dims.extend_from_slice(&self.hidden_dims);
        dims.push(self.output_dim);
        dims
    }

    pub fn n_layers(&self) -> usize {
        self.hidden_dims.len() + 1
    }

    pub fn param_count(&self) -> usize {
        let dims = self.layer_dims();
        dims.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    /// (weight_offset, bias_offset, fan_in, fan_out) per layer.
    fn layout(&self) -> Vec<(usize, usize, usize, usize)> {
        let dims = self.layer_dims();
        let mut out = Vec::with_capacity(self.n_layers());
        let mut offset = 0;
        for w in dims.windows(2) {
            let (m, n) = (w[0], w[1]);
            out.push((offset, offset + m * n, m, n));
            offset += m * n + n;
        }
        out
    }
}

/// Flat parameter (or gradient) storage for one network.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub data: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(n: usize) -> Self {
        ParamVector { data: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn axpy(&mut self, alpha: f64, other: &ParamVector) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }
}

/// Uniform fan-in initialization: every weight and bias of a layer drawn from
/// U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
pub fn init_params(spec: &MlpSpec, rng: &mut Rng) -> ParamVector {
    let mut params = ParamVector::zeros(spec.param_count());
    for (w_off, b_off, fan_in, fan_out) in spec.layout() {
        let bound = 1.0 / math::sqrt(fan_in as f64);
        for i in 0..fan_in * fan_out {
            params.data[w_off + i] = rng.uniform(-bound, bound);
        }
        for i in 0..fan_out {
            params.data[b_off + i] = rng.uniform(-bound, bound);
        }
    }
    params
}

/// Activations cached by a batched forward pass, sufficient for an exact
/// backward pass.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    batch: usize,
    /// Layer inputs: acts[0] is the input batch, acts[l] the post-activation
    /// output of layer l-1. Length n_layers (the final output is not needed).
    acts: Vec<Vec<f64>>,
    /// Pre-activations of the hidden layers.
    pre: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn batch(&self) -> usize {
        self.batch
    }
}

fn check_params(spec: &MlpSpec, params: &ParamVector) -> Result<()> {
    if params.len() != spec.param_count() {
        return Err(CoreError::DimensionMismatch {
            expected: spec.param_count(),
            got: params.len(),
            what: "ParamVector",
        });
    }
    Ok(())
}

/// Four-lane unrolled dot product. The fixed accumulator grouping keeps the
/// summation order deterministic while letting the compiler vectorize.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let chunks = n / 4;
    let mut acc = [0.0f64; 4];
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..n {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Batched forward pass. `inputs` is row-major batch x input_dim; returns the
/// row-major batch x output_dim outputs plus the cache for backprop.
pub fn mlp_forward_batch(
    spec: &MlpSpec,
    params: &ParamVector,
    inputs: &[f64],
    batch: usize,
) -> Result<(Vec<f64>, ForwardCache)> {
    check_params(spec, params)?;
    if inputs.len() != batch * spec.input_dim {
        return Err(CoreError::DimensionMismatch {
            expected: batch * spec.input_dim,
            got: inputs.len(),
            what: "mlp input batch",
        });
    }
    if inputs.iter().any(|x| !x.is_finite()) {
        return Err(CoreError::NonFinite("mlp input"));
    }
    let layout = spec.layout();
    let n_layers = spec.n_layers();
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
    let mut pre: Vec<Vec<f64>> = Vec::with_capacity(n_layers - 1);
    acts.push(inputs.to_vec());
    let mut output = Vec::new();
    for (l, &(w_off, b_off, fan_in, fan_out)) in layout.iter().enumerate() {
        let mut z = vec![0.0; batch * fan_out];
        {
            let current = &acts[l];
            for b in 0..batch {
                let x = &current[b * fan_in..(b + 1) * fan_in];
                let zrow = &mut z[b * fan_out..(b + 1) * fan_out];
                for j in 0..fan_out {
                    let wrow = &params.data[w_off + j * fan_in..w_off + (j + 1) * fan_in];
                    zrow[j] = params.data[b_off + j] + dot(wrow, x);
                }
            }
        }
        if l + 1 < n_layers {
            let mut a = vec![0.0; batch * fan_out];
            for (av, &zv) in a.iter_mut().zip(&z) {
                *av = spec.activation.apply(zv);
            }
            pre.push(z);
            acts.push(a);
        } else {
            output = z;
        }
    }
    Ok((output, ForwardCache { batch, acts, pre }))
}

/// Batched backward pass. `out_grad` is row-major batch x output_dim; the
/// parameter gradient is summed over the batch (scale per-sample weights into
/// `out_grad`). Also returns the gradient w.r.t. the input batch.
pub fn mlp_backward_batch(
    spec: &MlpSpec,
    params: &ParamVector,
    cache: &ForwardCache,
    out_grad: &[f64],
) -> Result<(ParamVector, Vec<f64>)> {
    check_params(spec, params)?;
    let batch = cache.batch;
    if out_grad.len() != batch * spec.output_dim {
        return Err(CoreError::DimensionMismatch {
            expected: batch * spec.output_dim,
            got: out_grad.len(),
            what: "mlp output gradient",
        });
    }
    if cache.acts.len() != spec.n_layers() {
        return Err(CoreError::DimensionMismatch {
            expected: spec.n_layers(),
            got: cache.acts.len(),
            what: "forward cache",
        });
    }
    let layout = spec.layout();
    let mut grad = ParamVector::zeros(spec.param_count());
    let mut g: Vec<f64> = out_grad.to_vec();
    for l in (0..spec.n_layers()).rev() {
        let (w_off, b_off, fan_in, fan_out) = layout[l];
        let x = &cache.acts[l];
        if x.len() != batch * fan_in {
            return Err(CoreError::DimensionMismatch {
                expected: batch * fan_in,
                got: x.len(),
                what: "cached activation",
            });
        }
        // weight and bias gradients
        for b in 0..batch {
            let grow = &g[b * fan_out..(b + 1) * fan_out];
            let xrow = &x[b * fan_in..(b + 1) * fan_in];
            for j in 0..fan_out {
                let gj = grow[j];
                if gj != 0.0 {
                    let wgrad = &mut grad.data[w_off + j * fan_in..w_off + (j + 1) * fan_in];
                    for i in 0..fan_in {
                        wgrad[i] += gj * xrow[i];
                    }
                    grad.data[b_off + j] += gj;
                }
            }
        }
        // gradient w.r.t. the layer input
        let mut gin = vec![0.0; batch * fan_in];
        for b in 0..batch {
            let grow = &g[b * fan_out..(b + 1) * fan_out];
            let ginrow = &mut gin[b * fan_in..(b + 1) * fan_in];
            for j in 0..fan_out {
                let gj = grow[j];
                if gj != 0.0 {
                    let wrow = &params.data[w_off + j * fan_in..w_off + (j + 1) * fan_in];
                    for i in 0..fan_in {
                        ginrow[i] += gj * wrow[i];
                    }
                }
            }
        }
        if l > 0 {
            let z = &cache.pre[l - 1];
            for (gv, &zv) in gin.iter_mut().zip(z) {
                *gv *= spec.activation.deriv(zv);
            }
        }
        g = gin;
    }
    Ok((grad, g))
}

/// Single-sample forward pass.
pub fn mlp_forward(spec: &MlpSpec, params: &ParamVector, input: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
    mlp_forward_batch(spec, params, input, 1)
}

/// Single-sample backward pass.
pub fn mlp_backward(
    spec: &MlpSpec,
    params: &ParamVector,
    cache: &ForwardCache,
    out_grad: &[f64],
) -> Result<(ParamVector, Vec<f64>)> {
    mlp_backward_batch(spec, params, cache, out_grad)
}

/// Adam optimizer state for one ParamVector.
#[derive(Clone, Debug)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(n_params: usize, learning_rate: f64) -> Self {
        AdamState {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Standard Adam update with bias correction. Non-finite gradients are hard
/// errors; training must not silently absorb NaN.
pub fn adam_step(params: &mut ParamVector, grad: &ParamVector, state: &mut AdamState) -> Result<()> {
    if params.len() != grad.len() || params.len() != state.m.len() {
        return Err(CoreError::DimensionMismatch {
            expected: params.len(),
            got: grad.len(),
            what: "adam_step",
        });
    }
    if !grad.is_finite() {
        return Err(CoreError::NonFinite("gradient"));
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - math::pow(state.beta1, t as f64);
    let bc2 = 1.0 - math::pow(state.beta2, t as f64);
    for i in 0..params.len() {
        let g = grad.data[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params.data[i] -= state.learning_rate * m_hat / (math::sqrt(v_hat) + state.epsilon);
    }
    Ok(())
}

/// A network bundled with its parameters and optimizer state.
#[derive(Clone, Debug)]
pub struct Network {
    pub spec: MlpSpec,
    pub params: ParamVector,
    pub adam: AdamState,
}

impl Network {
    pub fn new(spec: MlpSpec, learning_rate: f64, rng: &mut Rng) -> Self {
        let params = init_params(&spec, rng);
        let adam = AdamState::new(params.len(), learning_rate);
        Network { spec, params, adam }
    }
}
