use serde::{Deserialize, Serialize};

use super::select_eps_greedy;
use crate::error::{Error, Result};
use crate::learning::{LearnerConfig, ReplayMemory, ValueTable};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableChoice {
    PerEpisode,
    PerStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub b: usize,
    pub minibatch: usize,
    /// Pull of each table towards its prior; 0 disables the prior term.
    pub nu: f64,
    pub table_choice: TableChoice,
    /// Prior tables, all zero when absent.
    #[serde(default)]
    pub prior_tables: Option<Vec<ValueTable>>,
    /// Standard deviation of the Gaussian noise added at initialization.
    pub init_noise: f64,
}

impl EnsembleConfig {
    pub fn bootstrap(table_choice: TableChoice, nu: f64) -> Self {
        Self {
            b: 10,
            minibatch: 1024,
            nu,
            table_choice,
            prior_tables: None,
            init_noise: 1.0,
        }
    }

    pub fn validate(&self, n_states: usize, n_actions: usize) -> Result<()> {
        if self.b == 0 || self.minibatch == 0 {
            return Err(Error::Config("ensemble size and minibatch must be positive".into()));
        }
        if !(self.nu >= 0.0) || !(self.init_noise >= 0.0) {
            return Err(Error::Config("nu and init_noise must be non-negative".into()));
        }
        if let Some(p) = &self.prior_tables {
            if p.len() != self.b || p.iter().any(|t| t.n_states() != n_states || t.n_actions() != n_actions) {
                return Err(Error::Config("one prior table of the right shape per member".into()));
            }
        }
        Ok(())
    }
}

/// Behavior tables plus the index of the table currently acting.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub tables: Vec<ValueTable>,
    pub choice: TableChoice,
    pub current: usize,
}

/// B tables, each the base initialization plus i.i.d. Gaussian noise.
pub fn ensemble_init(
    config: &EnsembleConfig,
    learner: &LearnerConfig,
    n_states: usize,
    n_actions: usize,
    rng: &mut RngStream,
) -> Result<Vec<ValueTable>> {
    config.validate(n_states, n_actions)?;
    let base = learner.base_value();
    Ok((0..config.b)
        .map(|_| {
            let mut t = ValueTable::filled(n_states, n_actions, base);
            for v in t.as_mut_slice() {
                *v += config.init_noise * rng.normal();
            }
            t
        })
        .collect())
}

/// Picks the acting table (per episode at boundaries, or every step) and acts
/// ε-greedily on it.
pub fn ensemble_act(ens: &mut Ensemble, episode_boundary: bool, s: usize, eps: f64, rng: &mut RngStream) -> usize {
    let resample = match ens.choice {
        TableChoice::PerEpisode => episode_boundary,
        TableChoice::PerStep => true,
    };
    if resample {
        ens.current = rng.below(ens.tables.len());
    }
    select_eps_greedy(&ens.tables[ens.current], s, eps, rng)
}

/// Each table takes TD steps on its own minibatch, drawn uniformly with
/// replacement. With ν > 0 the error gains ν(Q_p − Q_b).
pub fn ensemble_update(
    tables: &mut [ValueTable],
    mem: &ReplayMemory,
    config: &EnsembleConfig,
    learner: &LearnerConfig,
    rng: &mut RngStream,
) -> Result<()> {
    if mem.is_empty() {
        return Err(Error::Contract("ensemble update on an empty memory".into()));
    }
    let batch = mem.minibatch_size().unwrap_or(config.minibatch);
    let (eta, gamma) = (learner.eta, learner.gamma);
    for (b, q) in tables.iter_mut().enumerate() {
        let prior = config.prior_tables.as_ref().map(|p| &p[b]);
        for _ in 0..batch {
            let t = mem.get(rng.below(mem.len()));
            let target = if t.terminal { t.r } else { t.r + gamma * q.max_row(t.s_next) };
            let cur = q.get(t.s, t.a);
            let mut delta = target - cur;
            if config.nu > 0.0 {
                let p = prior.map(|p| p.get(t.s, t.a)).unwrap_or(0.0);
                delta += config.nu * (p - cur);
            }
            q.set(t.s, t.a, cur + eta * delta);
        }
    }
    Ok(())
}
