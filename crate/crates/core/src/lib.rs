//! Nested, hierarchical and flat Double-DQN agents on a block-building grid world.
//!
//! The crate is organised bottom-up:
//!
//! - [`arena`]: the deterministic 15×15 building arena and its scenarios.
//! - [`approximator`]: a small tanh MLP with backprop, Adam and checkpoints.
//! - [`ddqn`]: replay memory, ε schedules and the Double-DQN learner.
//! - [`frameworks`]: the three agent architectures being compared.
//! - [`oracle`]: a branch-and-bound planner and tabular Q-learning used as ground truth.
//! - [`harness`]: multi-trial experiments, aggregation and CSV output.
//! - [`plot`]: SVG learning-curve rendering.

pub mod approximator;
pub mod arena;
pub mod config;
pub mod ddqn;
pub mod error;
pub mod frameworks;
pub mod harness;
pub mod oracle;
pub mod plot;

pub use error::{Error, Result};
