//! Scalar math shims over `libm` so the rest of the crate stays `no_std`.

pub use libm::{atan2, cos, exp, fabs, log, pow, sin, sqrt, tanh};

pub const LN_2: f64 = core::f64::consts::LN_2;
pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = core::f64::consts::TAU;

/// ln(1 + e^x) without overflow for large |x|.
pub fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else if x < -30.0 {
        exp(x)
    } else {
        log(1.0 + exp(x))
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + exp(-x))
    } else {
        let e = exp(x);
        e / (1.0 + e)
    }
}

/// Numerically stable ln(1 - tanh^2(u)) = 2 (ln 2 - u - softplus(-2u)).
pub fn tanh_log_one_minus_sq(u: f64) -> f64 {
    2.0 * (LN_2 - u - softplus(-2.0 * u))
}

pub fn atanh(x: f64) -> f64 {
    0.5 * log((1.0 + x) / (1.0 - x))
}

pub fn clamp(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo
    } else if x > hi {
        hi
    } else {
        x
    }
}
