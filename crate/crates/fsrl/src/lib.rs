//! Frame-skipping and action-repetition for reinforcement learning.
//!
//! `fsrl` bundles three layers:
//!
//! - **Exact machinery** ([`tabular`], [`bounds`]): dense finite MRPs/MDPs,
//!   linear-solve policy evaluation, value iteration, induced `d`-step
//!   models, the price of inertia, and machine checks of the closed-form
//!   deficit, greedy-loss and aggregate bounds.
//! - **Simulation and learning** ([`envs`], [`prediction`], [`control`],
//!   [`bandit`]): a pitted grid world, Acrobot, chain MRPs; frame-skipped
//!   TD(lambda) prediction, tile-coded Sarsa, aliased Q-learning,
//!   REINFORCE, FiGAR, and an EXP3.1 outer loop that picks the frame skip
//!   per episode.
//! - **An experiment harness** ([`harness`] and the `fsrl` binary):
//!   key-value configs, counter-based seed streams, CSV persistence,
//!   aggregation with standard errors, and plot-data emission.
//!
//! Everything is deterministic given a master seed. The companion guide in
//! `book/` walks through the concepts; its code snippets are compiled and
//! run as doc-tests via the [`guide`] module.

pub mod bandit;
pub mod bounds;
pub mod control;
pub mod envs;
pub mod error;
pub mod guide;
pub mod harness;
pub mod prediction;
pub mod tabular;

pub use error::{Error, Result};
