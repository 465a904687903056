//! Command-line harness around the core learner: scenario configs, seeded
//! experiment runs, MDP fixtures, checkpoints, numerical self-checks and
//! golden-file regression.

pub mod checkpoint;
pub mod config;
pub mod fixtures;
pub mod manifest;
pub mod runner;
pub mod verify;
