//! Tabular exploration with long-term visitation values.
//!
//! Finite MDPs with exact dynamics, Q-learning with replay memory, a family of
//! behavior policies (including the two W-function strategies), exact
//! evaluation metrics and an experiment harness.

pub mod envs;
pub mod error;
pub mod evaluation;
pub mod exploration;
pub mod harness;
pub mod learning;
pub mod mdp;
pub mod rng;

pub use error::{Error, Result};
pub use mdp::{argmax_tiebreak, EnvModel, Episode, ExactModel, GridLayout, Transition};
pub use rng::RngStream;
