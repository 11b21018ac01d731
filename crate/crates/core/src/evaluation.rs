//! Exact solvers and run metrics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exploration::VisitCounter;
use crate::learning::ValueTable;
use crate::mdp::{argmax_ties, EnvModel, ExactModel};
use crate::rng::RngStream;

/// Deterministic policy: one action per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyVector(pub Vec<usize>);

impl PolicyVector {
    pub fn validate(&self, model: &ExactModel) -> Result<()> {
        if self.0.len() != model.n_states() {
            return Err(Error::Contract(format!(
                "policy covers {} states, model has {}",
                self.0.len(),
                model.n_states()
            )));
        }
        if let Some(a) = self.0.iter().find(|&&a| a >= model.n_actions()) {
            return Err(Error::Contract(format!("policy action {a} out of range")));
        }
        Ok(())
    }
}

/// Greedy policy of a table with random tie-breaking.
pub fn greedy_policy(q: &ValueTable, rng: &mut RngStream) -> PolicyVector {
    PolicyVector((0..q.n_states()).map(|s| argmax_ties(q.row(s), rng)).collect())
}

/// Greedy policy that keeps its previous action while that action is still
/// maximal, so the policy only changes when the table forces it to.
#[derive(Debug, Clone)]
pub struct GreedyTracker {
    pub policy: PolicyVector,
}

impl GreedyTracker {
    pub fn new(q: &ValueTable, rng: &mut RngStream) -> Self {
        Self {
            policy: greedy_policy(q, rng),
        }
    }

    /// Re-examines state `s`; returns true if its action changed.
    pub fn refresh_state(&mut self, q: &ValueTable, s: usize, rng: &mut RngStream) -> bool {
        let row = q.row(s);
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if row[self.policy.0[s]] == best {
            return false;
        }
        self.policy.0[s] = argmax_ties(row, rng);
        true
    }

    pub fn refresh_all(&mut self, q: &ValueTable, rng: &mut RngStream) -> bool {
        let mut changed = false;
        for s in 0..q.n_states() {
            changed |= self.refresh_state(q, s, rng);
        }
        changed
    }
}

/// Largest model solved with a dense LU factorization; larger ones use
/// Gauss-Seidel sweeps on the sparse rows.
pub const DENSE_SOLVE_LIMIT: usize = 800;
pub const RESIDUAL_TOL: f64 = 1e-9;

/// ‖(I − γP^π)V − R^π‖∞, with terminal pairs contributing no bootstrap.
pub fn policy_residual(model: &ExactModel, pi: &PolicyVector, gamma: f64, v: &[f64]) -> f64 {
    (0..model.n_states())
        .map(|s| (v[s] - model.backup(s, pi.0[s], gamma, v)).abs())
        .fold(0.0, f64::max)
}

/// V^π = (I − γP^π)^(−1) R^π.
pub fn exact_value(model: &ExactModel, pi: &PolicyVector, gamma: f64) -> Result<Vec<f64>> {
    pi.validate(model)?;
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::Numerical(format!("gamma {gamma} makes the system singular or divergent")));
    }
    let n = model.n_states();
    let mut v = if n <= DENSE_SOLVE_LIMIT {
        dense_solve(model, pi, gamma)?
    } else {
        vec![0.0; n]
    };
    // Gauss-Seidel: the main solver for large models, iterative refinement for small ones.
    let mut sweeps = 0;
    while policy_residual(model, pi, gamma, &v) >= RESIDUAL_TOL * 0.01 {
        for s in 0..n {
            let a = pi.0[s];
            let r = model.reward(s, a);
            if model.is_terminal(s, a) {
                v[s] = r;
                continue;
            }
            let (t, p) = model.row(s, a);
            let mut acc = r;
            let mut self_p = 0.0;
            for (&j, &q) in t.iter().zip(p) {
                if j == s {
                    self_p += q;
                } else {
                    acc += gamma * q * v[j];
                }
            }
            v[s] = acc / (1.0 - gamma * self_p);
        }
        sweeps += 1;
        if sweeps > 200_000 {
            break;
        }
    }
    let res = policy_residual(model, pi, gamma, &v);
    if !(res < RESIDUAL_TOL) {
        return Err(Error::Numerical(format!("policy evaluation residual {res:e}")));
    }
    Ok(v)
}

fn dense_solve(model: &ExactModel, pi: &PolicyVector, gamma: f64) -> Result<Vec<f64>> {
    let n = model.n_states();
    let mut m = DMatrix::<f64>::identity(n, n);
    let mut r = DVector::<f64>::zeros(n);
    for s in 0..n {
        let a = pi.0[s];
        r[s] = model.reward(s, a);
        if model.is_terminal(s, a) {
            continue;
        }
        let (t, p) = model.row(s, a);
        for (&j, &q) in t.iter().zip(p) {
            m[(s, j)] -= gamma * q;
        }
    }
    let v = m
        .lu()
        .solve(&r)
        .ok_or_else(|| Error::Numerical("singular policy-evaluation system".into()))?;
    Ok(v.iter().copied().collect())
}

pub const VI_TOL: f64 = 1e-10;

/// Q* by Gauss-Seidel value iteration until ‖ΔV‖∞ < tol.
pub fn optimal_q(model: &ExactModel, gamma: f64, tol: f64) -> ValueTable {
    let (n, na) = (model.n_states(), model.n_actions());
    let mut v = vec![0.0; n];
    loop {
        let mut delta: f64 = 0.0;
        for s in 0..n {
            let best = (0..na)
                .map(|a| model.backup(s, a, gamma, &v))
                .fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max((best - v[s]).abs());
            v[s] = best;
        }
        if delta < tol {
            break;
        }
    }
    let mut q = ValueTable::zeros(n, na);
    for s in 0..n {
        for a in 0..na {
            q.set(s, a, model.backup(s, a, gamma, &v));
        }
    }
    q
}

pub fn optimal_value(model: &ExactModel, gamma: f64, tol: f64) -> Vec<f64> {
    let q = optimal_q(model, gamma, tol);
    (0..q.n_states()).map(|s| q.max_row(s)).collect()
}

pub fn msve(v_star: &[f64], v_pi: &[f64]) -> Result<f64> {
    if v_star.len() != v_pi.len() || v_star.is_empty() {
        return Err(Error::Contract(format!(
            "value vectors of lengths {} and {}",
            v_star.len(),
            v_pi.len()
        )));
    }
    Ok(v_star.iter().zip(v_pi).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / v_star.len() as f64)
}

/// Number of logged gaps V*(s_t) − V^{π_t}(s_t) exceeding ε.
pub fn count_suboptimal(gaps: &[f64], eps: f64) -> usize {
    gaps.iter().filter(|&&g| g > eps).count()
}

/// Evaluation horizon: ten percent longer than training, rounded up.
pub fn eval_horizon(training_horizon: usize) -> usize {
    (11 * training_horizon).div_ceil(10)
}

/// Discounted return of π from the initial distribution. Deterministic models
/// are rolled out for `eval_horizon` steps (no randomness involved);
/// stochastic ones use the closed-form V^π.
pub fn greedy_return(env: &EnvModel, pi: &PolicyVector, eval_horizon: usize) -> Result<f64> {
    pi.validate(&env.exact)?;
    if !env.is_deterministic() {
        let v = exact_value(&env.exact, pi, env.gamma)?;
        return Ok(env.initial.iter().map(|&(s, p)| p * v[s]).sum());
    }
    let mut total = 0.0;
    for &(s0, p) in &env.initial {
        let mut s = s0;
        let mut g = 0.0;
        let mut disc = 1.0;
        for _ in 0..eval_horizon {
            let a = pi.0[s];
            g += disc * env.exact.reward(s, a);
            if env.exact.is_terminal(s, a) {
                break;
            }
            disc *= env.gamma;
            s = env.exact.row(s, a).0[0];
        }
        total += p * g;
    }
    Ok(total)
}

/// Monte-Carlo estimate of the discounted return over `horizon` steps.
pub fn monte_carlo_return(
    env: &EnvModel,
    pi: &PolicyVector,
    horizon: usize,
    rng: &mut RngStream,
    n_episodes: usize,
) -> Result<f64> {
    pi.validate(&env.exact)?;
    if n_episodes == 0 {
        return Err(Error::Contract("need at least one episode".into()));
    }
    let mut sum = 0.0;
    for _ in 0..n_episodes {
        let mut s = env.reset(rng);
        let mut disc = 1.0;
        for _ in 0..horizon {
            let t = env.step(s, pi.0[s], rng)?;
            sum += disc * t.r;
            if t.terminal {
                break;
            }
            disc *= env.gamma;
            s = t.s_next;
        }
    }
    Ok(sum / n_episodes as f64)
}

/// Visited states over reachable states.
pub fn discovery_fraction(counter: &VisitCounter, env: &EnvModel) -> f64 {
    let reach = env.reachable();
    let visited = (0..env.n_states)
        .filter(|&s| reach[s] && counter.state_total(s) > 0)
        .count();
    visited as f64 / env.n_reachable() as f64
}

/// Per-cell visit totals, summed over non-positional state factors.
pub fn visitation_heatmap(counter: &VisitCounter, env: &EnvModel) -> Result<Vec<Vec<u64>>> {
    let layout = env
        .layout
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} has no grid layout", env.name)))?;
    let mut grid = vec![vec![0u64; layout.width]; layout.height];
    for (s, &(r, c)) in layout.cell_of_state.iter().enumerate() {
        grid[r][c] += counter.state_total(s);
    }
    Ok(grid)
}
