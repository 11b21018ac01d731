//! Visitation-value functions.
//!
//! `W_ucb` accumulates discounted UCB bonuses and starts optimistic; `W_count`
//! accumulates discounted counts, bootstraps with a min and starts at zero.
//! Terminal pairs receive their reward scaled by 1/(1 − γ_w), as if the pair
//! were repeated forever, so that ending an episode is never attractive.

use serde::{Deserialize, Serialize};

use super::{zero_count_bonus, ExplorationConfig, VisitCounter};
use crate::error::{Error, Result};
use crate::learning::ValueTable;
use crate::mdp::{argmax_ties, Transition};
use crate::rng::RngStream;

/// Additive margin turning the closed-form bounds into strict inequalities.
pub const BOUND_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WVariant {
    Ucb,
    Count,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WTable {
    pub variant: WVariant,
    pub table: ValueTable,
}

impl WTable {
    pub fn ucb(n_states: usize, n_actions: usize, config: &ExplorationConfig) -> Result<Self> {
        Ok(Self {
            variant: WVariant::Ucb,
            table: ValueTable::filled(n_states, n_actions, w_ucb_init(config, n_actions)?),
        })
    }

    pub fn count(n_states: usize, n_actions: usize) -> Self {
        Self {
            variant: WVariant::Count,
            table: ValueTable::zeros(n_states, n_actions),
        }
    }
}

/// Initial W_ucb value, chosen so an unexecuted action beats every executed
/// one whatever the Q values in [Q_min, Q_max].
///
/// Worst case: the other d_A − 1 actions have count one, so an executed action
/// is worth at most b + γ_w·W0 with b = sqrt(2·log(d_A − 1)) under the log
/// rule in force. Requiring κ(1 − γ_w)W0 > (Q_max − Q_min) + κ(1 − γ_w)(b + γ_w·W0) gives
/// W0 = (Q_max − Q_min)/(κ(1 − γ_w)²) + b/(1 − γ_w), plus the margin.
pub fn w_ucb_init(config: &ExplorationConfig, n_actions: usize) -> Result<f64> {
    if n_actions < 2 {
        return Err(Error::Config(format!("W_ucb needs at least 2 actions, got {n_actions}")));
    }
    let g = 1.0 - config.gamma_w;
    let b = (2.0 * config.log_sum((n_actions - 1) as f64)).max(0.0).sqrt();
    Ok(config.value_span() / (g * g) + b / g + BOUND_MARGIN)
}

/// W_count exploration term for an unexecuted action.
///
/// Worst case: one executed action has the smallest possible pseudocount
/// 1 − γ_w and the remaining d_A − 2 have pseudocount 1, so its bonus is
/// sqrt(2·log((1 − γ_w) + d_A − 2)/(1 − γ_w)). The bound adds (Q_max − Q_min)/κ and the margin.
pub fn w_count_zero_bound(config: &ExplorationConfig, n_actions: usize) -> f64 {
    let g = 1.0 - config.gamma_w;
    let sum = g + n_actions.saturating_sub(2) as f64;
    config.value_span() + (2.0 * config.log_sum(sum) / g).max(0.0).sqrt() + BOUND_MARGIN
}

/// Visitation reward of W_ucb: the UCB bonus, scaled by 1/(1 − γ_w) on terminal pairs.
#[inline]
pub fn w_ucb_reward(counter: &VisitCounter, s: usize, a: usize, terminal: bool, config: &ExplorationConfig) -> f64 {
    let n = counter.count(s, a);
    let r = if n == 0 {
        zero_count_bonus(config, counter.n_actions())
    } else {
        (2.0 * config.log_sum(counter.state_total(s) as f64) / n as f64).max(0.0).sqrt()
    };
    if terminal {
        r / (1.0 - config.gamma_w)
    } else {
        r
    }
}

/// Visitation reward of W_count: the count, or max count/(1 − γ_w) on terminal pairs.
#[inline]
pub fn w_count_reward(counter: &VisitCounter, s: usize, a: usize, terminal: bool, gamma_w: f64) -> f64 {
    if terminal {
        counter.max_count() as f64 / (1.0 - gamma_w)
    } else {
        counter.count(s, a) as f64
    }
}

/// TD step on a W table with a given visitation reward. UCB bootstraps with
/// the max over next actions, count with the min.
#[inline]
pub fn w_td_update(w: &mut ValueTable, variant: WVariant, t: &Transition, r_w: f64, eta: f64, gamma_w: f64) {
    let target = if t.terminal {
        r_w
    } else {
        let next = match variant {
            WVariant::Ucb => w.max_row(t.s_next),
            WVariant::Count => w.min_row(t.s_next),
        };
        r_w + gamma_w * next
    };
    let old = w.get(t.s, t.a);
    w.set(t.s, t.a, old + eta * (target - old));
}

pub fn w_ucb_update(w: &mut ValueTable, t: &Transition, counter: &VisitCounter, eta: f64, config: &ExplorationConfig) {
    let r = w_ucb_reward(counter, t.s, t.a, t.terminal, config);
    w_td_update(w, WVariant::Ucb, t, r, eta, config.gamma_w);
}

pub fn w_count_update(w: &mut ValueTable, t: &Transition, counter: &VisitCounter, eta: f64, gamma_w: f64) {
    let r = w_count_reward(counter, t.s, t.a, t.terminal, gamma_w);
    w_td_update(w, WVariant::Count, t, r, eta, gamma_w);
}

/// argmax over Q_β(s,a) + κ(1 − γ_w)·W(s,a).
pub fn select_w_ucb(
    q_beta: &ValueTable,
    w: &ValueTable,
    s: usize,
    config: &ExplorationConfig,
    rng: &mut RngStream,
) -> usize {
    let scale = config.kappa * (1.0 - config.gamma_w);
    let scores: Vec<f64> = (0..q_beta.n_actions())
        .map(|a| q_beta.get(s, a) + scale * w.get(s, a))
        .collect();
    argmax_ties(&scores, rng)
}

/// n̂(s,a) = (1 − γ_w)·W_count(s,a).
pub fn pseudocount(w: &ValueTable, s: usize, a: usize, gamma_w: f64) -> f64 {
    (1.0 - gamma_w) * w.get(s, a)
}

/// UCB term built from pseudocounts. Actions never executed (raw count 0) get
/// the zero-count bound; so does a non-positive pseudocount, which can occur
/// transiently before W has absorbed a new visit.
pub fn w_count_bonus(w: &ValueTable, counter: &VisitCounter, s: usize, a: usize, config: &ExplorationConfig) -> f64 {
    let n_actions = w.n_actions();
    let n_hat = pseudocount(w, s, a, config.gamma_w);
    if counter.count(s, a) == 0 || n_hat <= 0.0 {
        return w_count_zero_bound(config, n_actions);
    }
    let sum: f64 = (0..n_actions).map(|b| pseudocount(w, s, b, config.gamma_w)).sum();
    (2.0 * config.log_sum(sum) / n_hat).max(0.0).sqrt()
}

pub fn select_w_count(
    q_beta: &ValueTable,
    w: &ValueTable,
    counter: &VisitCounter,
    s: usize,
    config: &ExplorationConfig,
    rng: &mut RngStream,
) -> usize {
    let scores: Vec<f64> = (0..q_beta.n_actions())
        .map(|a| q_beta.get(s, a) + config.kappa * w_count_bonus(w, counter, s, a, config))
        .collect();
    argmax_ties(&scores, rng)
}
