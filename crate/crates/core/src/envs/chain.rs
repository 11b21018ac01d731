use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{EnvModel, ExactModel, GridLayout};

pub const FORWARD: usize = 0;
pub const BACKWARD: usize = 1;
pub const STAY: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_states: usize,
    pub p: f64,
    pub r_small: f64,
    pub r_goal: f64,
}

impl ChainSpec {
    pub fn new(n_states: usize) -> Self {
        Self {
            n_states,
            p: 0.99,
            r_small: 1e-8,
            r_goal: 1.0,
        }
    }
}

/// Single-episode horizon used for the chain.
pub const CHAIN_HORIZON: usize = 200_000;

/// Ergodic chain. "forward" and "backward" succeed with probability p and
/// otherwise move the other way; "stay" stays with probability p and otherwise
/// moves one cell either way with equal odds. Moves clip at both ends.
pub fn make_chainworld(spec: ChainSpec) -> Result<EnvModel> {
    let n = spec.n_states;
    if n < 2 {
        return Err(Error::Config(format!("chain needs at least 2 states, got {n}")));
    }
    if !(spec.p > 0.0 && spec.p <= 1.0) {
        return Err(Error::Config(format!("chain success probability {} outside (0, 1]", spec.p)));
    }
    if !spec.r_small.is_finite() || !spec.r_goal.is_finite() {
        return Err(Error::Config("chain rewards must be finite".into()));
    }
    let p = spec.p;
    let mut rows = Vec::with_capacity(3 * n);
    let mut reward = Vec::with_capacity(3 * n);
    for s in 0..n {
        let fwd = (s + 1).min(n - 1);
        let back = s.saturating_sub(1);
        rows.push(vec![(fwd, p), (back, 1.0 - p)]);
        rows.push(vec![(back, p), (fwd, 1.0 - p)]);
        rows.push(vec![(s, p), (back, (1.0 - p) / 2.0), (fwd, (1.0 - p) / 2.0)]);
        reward.extend([0.0, 0.0, 0.0]);
        if s == 0 {
            reward[3 * s + STAY] = spec.r_small;
        }
        if s == n - 1 {
            reward[3 * s + STAY] = spec.r_goal;
        }
    }
    let exact = ExactModel::from_rows(n, 3, rows, reward, vec![false; 3 * n])?;
    EnvModel::new(
        format!("chain:{n}"),
        exact,
        vec![(0, 1.0)],
        CHAIN_HORIZON,
        CHAIN_HORIZON,
        0.99,
        spec.r_goal.max(spec.r_small),
        Some(GridLayout {
            width: n,
            height: 1,
            cell_of_state: (0..n).map(|c| (0, c)).collect(),
        }),
        vec!["forward".into(), "backward".into(), "stay".into()],
    )
}
