//! Core algorithms for occupancy-matching policy optimization.
//!
//! The crate is split into an exact tabular occupancy oracle ([`oracle`]),
//! a minimal differentiable MLP stack ([`nn`], [`policy`]), a density-ratio
//! discriminator ([`discriminator`]), the Fenchel-dual actor-critic learner
//! ([`agent`], [`fenchel`]) and desk-scale environments with parameterized
//! dynamics shifts ([`env`]).
//!
//! Everything here is `no_std` + `alloc`: pure functions over value inputs,
//! deterministic given an explicit [`rng::Rng`] seed. IO, configuration and
//! file formats live in the companion `ompo-cli` crate.

#![no_std]

extern crate alloc;

pub mod agent;
pub mod buffer;
pub mod discriminator;
pub mod env;
pub mod error;
pub mod fenchel;
pub mod linalg;
pub mod math;
pub mod nn;
pub mod oracle;
pub mod policy;
pub mod rng;

pub use error::{CoreError, Result};
pub use rng::Rng;
