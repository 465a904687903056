//! Conjugate pair for f(y) = (1/p)|y - 1|^p over the valid ratio domain
//! y >= 0, with 1/p + 1/q = 1.
//!
//! Taking the supremum over y >= 0 (rather than all of R) gives
//!
//!   f*(x) = x + (1/q)|x|^q          for x >= -1,
//!   f*(x) = -1/p                    for x <  -1,
//!
//! which agrees with the usual (1/q) x^q + x on x >= 0 but is bounded below
//! by -1/p instead of running off linearly. That lower bound matters: with a
//! linear negative branch the dual critic objective is unbounded below (the
//! critic can shrink its loss forever by wedging Q upward on buffer actions
//! relative to policy actions, and training diverges). The derivative
//! f*'(x) = max(1 + sign(x)|x|^(q-1), 0) is the optimal ratio estimate and is
//! correctly pinned at 0 — a nonnegative density ratio — once x <= -1.

use crate::math;

pub fn fenchel_star(x: f64, q_order: f64) -> f64 {
    debug_assert!(q_order > 1.0);
    if x >= -1.0 {
        math::pow(math::fabs(x), q_order) / q_order + x
    } else {
        1.0 / q_order - 1.0
    }
}

pub fn fenchel_star_deriv(x: f64, q_order: f64) -> f64 {
    debug_assert!(q_order > 1.0);
    if x >= 0.0 {
        math::pow(x, q_order - 1.0) + 1.0
    } else if x >= -1.0 {
        1.0 - math::pow(-x, q_order - 1.0)
    } else {
        0.0
    }
}

/// Second derivative of f*, needed by the reparameterized actor gradient.
/// Zero outside (-1, 0) and (0, inf); for 1 < q < 2 the curvature blows up
/// as x -> 0, so the convention at exactly 0 is 0.
pub fn fenchel_star_second_deriv(x: f64, q_order: f64) -> f64 {
    debug_assert!(q_order > 1.0);
    if x == 0.0 || x <= -1.0 {
        0.0
    } else {
        (q_order - 1.0) * math::pow(math::fabs(x), q_order - 2.0)
    }
}
