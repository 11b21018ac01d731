//! Behavior policies and the quantities they are built from.

mod ensemble;
mod wfun;

pub use ensemble::{ensemble_act, ensemble_init, ensemble_update, Ensemble, EnsembleConfig, TableChoice};
pub use wfun::{
    pseudocount, select_w_count, select_w_ucb, w_count_bonus, w_count_reward, w_count_update,
    w_count_zero_bound, w_td_update, w_ucb_init, w_ucb_reward, w_ucb_update, WTable, WVariant,
    BOUND_MARGIN,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::ValueTable;
use crate::mdp::{argmax_ties, Transition};
use crate::rng::RngStream;

/// State-action visit counts with per-state totals and the running maximum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisitCounter {
    n_states: usize,
    n_actions: usize,
    n: Vec<u64>,
    state_total: Vec<u64>,
    max_count: u64,
    total: u64,
}

impl VisitCounter {
    pub fn new(n_states: usize, n_actions: usize) -> Self {
        Self {
            n_states,
            n_actions,
            n: vec![0; n_states * n_actions],
            state_total: vec![0; n_states],
            max_count: 0,
            total: 0,
        }
    }

    /// Counter with the given counts, row-major by state.
    pub fn from_counts(n_states: usize, n_actions: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n_states * n_actions {
            return Err(Error::Contract("count vector has the wrong length".into()));
        }
        let state_total = counts.chunks(n_actions).map(|r| r.iter().sum()).collect();
        Ok(Self {
            n_states,
            n_actions,
            max_count: counts.iter().copied().max().unwrap_or(0),
            total: counts.iter().sum(),
            n: counts,
            state_total,
        })
    }

    pub fn increment(&mut self, s: usize, a: usize) {
        let c = &mut self.n[s * self.n_actions + a];
        *c += 1;
        self.max_count = self.max_count.max(*c);
        self.state_total[s] += 1;
        self.total += 1;
    }

    #[inline]
    pub fn count(&self, s: usize, a: usize) -> u64 {
        self.n[s * self.n_actions + a]
    }

    #[inline]
    pub fn state_total(&self, s: usize) -> u64 {
        self.state_total[s]
    }

    pub fn max_count(&self) -> u64 {
        self.max_count
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn counts(&self) -> &[u64] {
        &self.n
    }

    pub fn states_visited(&self) -> usize {
        self.state_total.iter().filter(|&&t| t > 0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExplorationConfig {
    pub kappa: f64,
    pub gamma_w: f64,
    pub q_max: f64,
    pub q_min: f64,
    pub alpha: f64,
    /// Add 1 inside every logarithm of summed (pseudo)counts. The zero-count
    /// bounds follow the same rule, see [`zero_count_bonus`].
    pub use_log_plus_one: bool,
}

impl ExplorationConfig {
    /// κ = Q_max = r_max / (1 − γ), Q_min = 0, α = 0.1.
    pub fn new(r_max: f64, gamma: f64, gamma_w: f64) -> Result<Self> {
        let q_max = r_max / (1.0 - gamma);
        let cfg = Self {
            kappa: q_max,
            gamma_w,
            q_max,
            q_min: 0.0,
            alpha: 0.1,
            use_log_plus_one: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::Config(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(0.0..1.0).contains(&self.gamma_w) {
            return Err(Error::Config(format!("gamma_w {} outside [0, 1)", self.gamma_w)));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::Config("alpha must be non-negative".into()));
        }
        if !(self.q_max >= self.q_min) {
            return Err(Error::Config("need q_max >= q_min".into()));
        }
        Ok(())
    }

    /// (Q_max − Q_min) / κ.
    pub fn value_span(&self) -> f64 {
        (self.q_max - self.q_min) / self.kappa
    }

    /// Logarithm of a summed count under the configured stabilization.
    #[inline]
    pub fn log_sum(&self, x: f64) -> f64 {
        if self.use_log_plus_one {
            x.ln_1p()
        } else {
            x.ln()
        }
    }
}

/// UCB1 bonus of an unexecuted action: (Q_max − Q_min)/κ plus the largest bonus
/// a visited action can have when every other action has count one. With the
/// +1 rule that bonus is sqrt(2·ln d_A).
pub fn zero_count_bonus(config: &ExplorationConfig, n_actions: usize) -> f64 {
    let others = n_actions.saturating_sub(1) as f64;
    config.value_span() + (2.0 * config.log_sum(others)).max(0.0).sqrt()
}

pub fn select_random(n_actions: usize, rng: &mut RngStream) -> usize {
    rng.below(n_actions)
}

pub fn select_eps_greedy(q_beta: &ValueTable, s: usize, eps: f64, rng: &mut RngStream) -> usize {
    if rng.uniform() < eps {
        rng.below(q_beta.n_actions())
    } else {
        argmax_ties(q_beta.row(s), rng)
    }
}

/// sqrt(2·log(1 + Σ_j n(s,a_j)) / n(s,a)), or the zero-count bound when n(s,a) = 0.
pub fn ucb_bonus(counter: &VisitCounter, s: usize, a: usize, config: &ExplorationConfig) -> f64 {
    let n = counter.count(s, a);
    if n == 0 {
        return zero_count_bonus(config, counter.n_actions());
    }
    (2.0 * config.log_sum(counter.state_total(s) as f64) / n as f64).max(0.0).sqrt()
}

pub fn select_ucb1(
    q_beta: &ValueTable,
    counter: &VisitCounter,
    s: usize,
    config: &ExplorationConfig,
    rng: &mut RngStream,
) -> usize {
    let scores: Vec<f64> = (0..q_beta.n_actions())
        .map(|a| q_beta.get(s, a) + config.kappa * ucb_bonus(counter, s, a, config))
        .collect();
    argmax_ties(&scores, rng)
}

/// r + α·n(s,a)^(−1/2) using the current count.
pub fn bonus_augment(t: &Transition, counter: &VisitCounter, alpha: f64) -> Result<f64> {
    let n = counter.count(t.s, t.a);
    if n == 0 {
        return Err(Error::Contract(format!("bonus for unvisited pair ({}, {})", t.s, t.a)));
    }
    Ok(t.r + alpha / (n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ExplorationConfig {
        ExplorationConfig::new(1.0, 0.99, 0.99).unwrap()
    }

    #[test]
    fn counter_bookkeeping() {
        let mut c = VisitCounter::new(2, 2);
        c.increment(0, 1);
        c.increment(0, 1);
        c.increment(1, 0);
        assert_eq!((c.count(0, 1), c.state_total(0), c.max_count(), c.total()), (2, 2, 2, 3));
        assert_eq!(c, VisitCounter::from_counts(2, 2, vec![0, 2, 1, 0]).unwrap());
    }

    #[test]
    fn ucb_bonus_values() {
        let c = VisitCounter::from_counts(1, 4, vec![0, 0, 0, 0]).unwrap();
        assert!((ucb_bonus(&c, 0, 0, &cfg()) - (1.0 + (2.0 * 4f64.ln()).sqrt())).abs() < 1e-12);
        let c = VisitCounter::from_counts(1, 2, vec![1, 0]).unwrap();
        assert!((ucb_bonus(&c, 0, 0, &cfg()) - (2.0 * 2f64.ln()).sqrt()).abs() < 1e-12);
        let c = VisitCounter::from_counts(1, 3, vec![5, 5, 5]).unwrap();
        let b: Vec<f64> = (0..3).map(|a| ucb_bonus(&c, 0, a, &cfg())).collect();
        assert!(b[0] == b[1] && b[1] == b[2]);
    }

    #[test]
    fn ucb1_prefers_unexecuted() {
        let q = ValueTable::zeros(1, 2);
        let c = VisitCounter::from_counts(1, 2, vec![1, 0]).unwrap();
        let mut rng = RngStream::new(0);
        assert_eq!(select_ucb1(&q, &c, 0, &cfg(), &mut rng), 1);
    }

    #[test]
    fn bonus_arithmetic() {
        let t = Transition { s: 0, a: 0, r: 0.0, s_next: 0, terminal: false };
        let c1 = VisitCounter::from_counts(1, 1, vec![1]).unwrap();
        assert!((bonus_augment(&t, &c1, 0.1).unwrap() - 0.1).abs() < 1e-15);
        let c4 = VisitCounter::from_counts(1, 1, vec![4]).unwrap();
        assert!((bonus_augment(&t, &c4, 0.1).unwrap() - 0.05).abs() < 1e-15);
        let c0 = VisitCounter::new(1, 1);
        assert!(matches!(bonus_augment(&t, &c0, 0.1), Err(Error::Contract(_))));
    }

    #[test]
    fn eps_greedy_extremes() {
        let q = ValueTable::from_vec(1, 2, vec![1.0, 0.0]).unwrap();
        let mut rng = RngStream::new(4);
        assert!((0..1000).all(|_| select_eps_greedy(&q, 0, 0.0, &mut rng) == 0));
        let n = 10_000;
        let zeros = (0..n).filter(|_| select_eps_greedy(&q, 0, 0.5, &mut rng) == 0).count();
        assert!((zeros as f64 / n as f64 - 0.75).abs() < 0.02);
    }
}
