//! Q-tables, TD updates, replay memory and the ε schedule.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::Transition;

/// Dense |S|×|A| table, row-major by state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTable {
    n_states: usize,
    n_actions: usize,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn filled(n_states: usize, n_actions: usize, value: f64) -> Self {
        Self {
            n_states,
            n_actions,
            values: vec![value; n_states * n_actions],
        }
    }

    pub fn zeros(n_states: usize, n_actions: usize) -> Self {
        Self::filled(n_states, n_actions, 0.0)
    }

    pub fn from_vec(n_states: usize, n_actions: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_states * n_actions {
            return Err(Error::Contract(format!(
                "{} values for a {n_states}x{n_actions} table",
                values.len()
            )));
        }
        Ok(Self {
            n_states,
            n_actions,
            values,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.n_actions + a]
    }

    #[inline]
    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.n_actions + a] = v;
    }

    #[inline]
    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    pub fn row_mut(&mut self, s: usize) -> &mut [f64] {
        &mut self.values[s * self.n_actions..(s + 1) * self.n_actions]
    }

    #[inline]
    pub fn max_row(&self, s: usize) -> f64 {
        let row = self.row(s);
        let mut m = row[0];
        for &v in &row[1..] {
            if v > m {
                m = v;
            }
        }
        m
    }

    #[inline]
    pub fn min_row(&self, s: usize) -> f64 {
        let row = self.row(s);
        let mut m = row[0];
        for &v in &row[1..] {
            if v < m {
                m = v;
            }
        }
        m
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &ValueTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    Zero,
    Optimistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub eta: f64,
    pub gamma: f64,
    pub init_mode: InitMode,
    pub q_max: f64,
    pub q_min: f64,
}

impl LearnerConfig {
    /// Q_max = r_max / (1 − γ), Q_min = 0.
    pub fn new(eta: f64, gamma: f64, init_mode: InitMode, r_max: f64) -> Result<Self> {
        let cfg = Self {
            eta,
            gamma,
            init_mode,
            q_max: r_max / (1.0 - gamma),
            q_min: 0.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!("learning rate {} outside (0, 1]", self.eta)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        if !(self.q_max >= self.q_min) || !self.q_max.is_finite() || !self.q_min.is_finite() {
            return Err(Error::Config("need finite q_max >= q_min".into()));
        }
        Ok(())
    }

    /// Initial value of behavior tables.
    pub fn base_value(&self) -> f64 {
        match self.init_mode {
            InitMode::Zero => 0.0,
            InitMode::Optimistic => self.q_max,
        }
    }
}

/// Behavior table initialization. The target table is always zero-initialized.
pub fn q_init(config: &LearnerConfig, n_states: usize, n_actions: usize) -> ValueTable {
    ValueTable::filled(n_states, n_actions, config.base_value())
}

/// Q-learning step with the transition's own reward.
#[inline]
pub fn td_update(q: &mut ValueTable, t: &Transition, eta: f64, gamma: f64) {
    td_update_with_reward(q, t, t.r, eta, gamma);
}

/// Q-learning step with a substituted reward (used by reward augmentation).
#[inline]
pub fn td_update_with_reward(q: &mut ValueTable, t: &Transition, r: f64, eta: f64, gamma: f64) {
    let target = if t.terminal { r } else { r + gamma * q.max_row(t.s_next) };
    let i = t.s * q.n_actions + t.a;
    q.values[i] += eta * (target - q.values[i]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Capacity {
    Infinite,
    Bounded(usize),
}

/// Insertion-ordered transition log with optional FIFO eviction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayMemory {
    tuples: VecDeque<Transition>,
    capacity: Capacity,
    minibatch_size: Option<usize>,
}

impl ReplayMemory {
    pub fn new(capacity: Capacity, minibatch_size: Option<usize>) -> Result<Self> {
        if capacity == Capacity::Bounded(0) || minibatch_size == Some(0) {
            return Err(Error::Config("memory capacity and minibatch size must be positive".into()));
        }
        Ok(Self {
            tuples: VecDeque::new(),
            capacity,
            minibatch_size,
        })
    }

    pub fn infinite() -> Self {
        Self::new(Capacity::Infinite, None).unwrap()
    }

    pub fn push(&mut self, t: Transition) {
        if let Capacity::Bounded(cap) = self.capacity {
            if self.tuples.len() == cap {
                self.tuples.pop_front();
            }
        }
        self.tuples.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    pub fn minibatch_size(&self) -> Option<usize> {
        self.minibatch_size
    }

    pub fn get(&self, i: usize) -> &Transition {
        &self.tuples[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.tuples.iter()
    }

    /// The stored tuples as at most two contiguous slices, oldest first.
    pub fn as_slices(&self) -> (&[Transition], &[Transition]) {
        self.tuples.as_slices()
    }
}

/// One TD pass over the whole memory, oldest tuple first.
pub fn replay_sweep(q: &mut ValueTable, mem: &ReplayMemory, eta: f64, gamma: f64) {
    let (a, b) = mem.as_slices();
    for t in a.iter().chain(b) {
        td_update(q, t, eta, gamma);
    }
}

/// Geometric decay from eps0 to eps_end over total_steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub eps0: f64,
    pub eps_end: f64,
    pub total_steps: usize,
    pub xi: f64,
}

impl EpsilonSchedule {
    pub fn new(eps0: f64, eps_end: f64, total_steps: usize) -> Result<Self> {
        if !(0.0 < eps_end && eps_end <= eps0 && eps0 <= 1.0) || total_steps == 0 {
            return Err(Error::Config(format!(
                "invalid epsilon schedule {eps0} -> {eps_end} over {total_steps} steps"
            )));
        }
        Ok(Self {
            eps0,
            eps_end,
            total_steps,
            xi: (eps_end / eps0).powf(1.0 / total_steps as f64),
        })
    }

    pub fn standard(total_steps: usize) -> Result<Self> {
        Self::new(1.0, 0.1, total_steps)
    }
}

/// eps0·xi^i, floored at eps_end. Evaluated as eps0·(eps_end/eps0)^(i/total)
/// so the end point is exact up to one rounding.
pub fn epsilon_at(sched: &EpsilonSchedule, i: usize) -> f64 {
    let e = sched.eps0 * (sched.eps_end / sched.eps0).powf(i as f64 / sched.total_steps as f64);
    e.max(sched.eps_end)
}
