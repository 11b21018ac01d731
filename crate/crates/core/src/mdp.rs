use serde::{Deserialize, Serialize};

use crate::envs::GridSource;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// One environment step. `terminal` means the episode ends after this step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub s: usize,
    pub a: usize,
    pub r: f64,
    pub s_next: usize,
    pub terminal: bool,
}

/// Sparse tabular dynamics. Rows are stored per (s, a) in CSR layout with
/// sorted, merged successor indices and strictly positive probabilities.
///
/// Terminal pairs keep a row so that sampling still yields a successor, but
/// solvers never bootstrap through them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactModel {
    n_states: usize,
    n_actions: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    probs: Vec<f64>,
    reward: Vec<f64>,
    terminal: Vec<bool>,
}

pub const ROW_SUM_TOL: f64 = 1e-12;

impl ExactModel {
    /// Builds a model from one successor list per (s, a), indexed `s * n_actions + a`.
    pub fn from_rows(
        n_states: usize,
        n_actions: usize,
        rows: Vec<Vec<(usize, f64)>>,
        reward: Vec<f64>,
        terminal: Vec<bool>,
    ) -> Result<Self> {
        let n_pairs = n_states * n_actions;
        if n_states == 0 || n_actions == 0 {
            return Err(Error::Config("model needs at least one state and one action".into()));
        }
        if rows.len() != n_pairs || reward.len() != n_pairs || terminal.len() != n_pairs {
            return Err(Error::Config(format!(
                "expected {n_pairs} rows, got {} transitions, {} rewards, {} terminal flags",
                rows.len(),
                reward.len(),
                terminal.len()
            )));
        }
        let mut offsets = Vec::with_capacity(n_pairs + 1);
        let mut targets = Vec::new();
        let mut probs = Vec::new();
        offsets.push(0);
        for (sa, mut row) in rows.into_iter().enumerate() {
            let (s, a) = (sa / n_actions, sa % n_actions);
            if !reward[sa].is_finite() {
                return Err(Error::Config(format!("reward at ({s}, {a}) is not finite")));
            }
            row.sort_by_key(|&(t, _)| t);
            let mut sum = 0.0;
            let start = targets.len();
            for (t, p) in row {
                if t >= n_states {
                    return Err(Error::Config(format!("successor {t} out of range at ({s}, {a})")));
                }
                if !(0.0..=1.0 + ROW_SUM_TOL).contains(&p) {
                    return Err(Error::Config(format!("probability {p} at ({s}, {a})")));
                }
                sum += p;
                if p == 0.0 {
                    continue;
                }
                if targets.len() > start && targets[targets.len() - 1] == t {
                    *probs.last_mut().unwrap() += p;
                } else {
                    targets.push(t);
                    probs.push(p);
                }
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Config(format!(
                    "row ({s}, {a}) sums to {sum}, not 1"
                )));
            }
            offsets.push(targets.len());
        }
        Ok(Self {
            n_states,
            n_actions,
            offsets,
            targets,
            probs,
            reward,
            terminal,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Successors and their probabilities for (s, a).
    pub fn row(&self, s: usize, a: usize) -> (&[usize], &[f64]) {
        let sa = s * self.n_actions + a;
        let (lo, hi) = (self.offsets[sa], self.offsets[sa + 1]);
        (&self.targets[lo..hi], &self.probs[lo..hi])
    }

    pub fn prob(&self, s: usize, a: usize, s_next: usize) -> f64 {
        let (t, p) = self.row(s, a);
        t.binary_search(&s_next).map(|i| p[i]).unwrap_or(0.0)
    }

    /// Dense copy of P[s][a][.].
    pub fn dense_row(&self, s: usize, a: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n_states];
        let (t, p) = self.row(s, a);
        for (&j, &q) in t.iter().zip(p) {
            out[j] = q;
        }
        out
    }

    pub fn reward(&self, s: usize, a: usize) -> f64 {
        self.reward[s * self.n_actions + a]
    }

    pub fn is_terminal(&self, s: usize, a: usize) -> bool {
        self.terminal[s * self.n_actions + a]
    }

    /// True when every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.offsets.windows(2).all(|w| w[1] - w[0] == 1)
    }

    /// Expected one-step backup r + gamma * E[v(s')], without bootstrap on terminal pairs.
    pub fn backup(&self, s: usize, a: usize, gamma: f64, v: &[f64]) -> f64 {
        let r = self.reward(s, a);
        if self.is_terminal(s, a) {
            return r;
        }
        let (t, p) = self.row(s, a);
        r + gamma * t.iter().zip(p).map(|(&j, &q)| q * v[j]).sum::<f64>()
    }

    fn sample(&self, s: usize, a: usize, rng: &mut RngStream) -> usize {
        let (t, p) = self.row(s, a);
        if t.len() == 1 {
            return t[0];
        }
        let u = rng.uniform();
        let mut acc = 0.0;
        for (&j, &q) in t.iter().zip(p) {
            acc += q;
            if u < acc {
                return j;
            }
        }
        t[t.len() - 1]
    }
}

/// Row-major grid positions used for heatmaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub width: usize,
    pub height: usize,
    /// (row, col) of each state, row 0 at the top.
    pub cell_of_state: Vec<(usize, usize)>,
}

/// A finite MDP with exact dynamics, horizons and reward bounds.
#[derive(Debug, Clone)]
pub struct EnvModel {
    pub name: String,
    pub n_states: usize,
    pub n_actions: usize,
    /// Training horizon in use.
    pub horizon: usize,
    pub horizon_short: usize,
    pub horizon_long: usize,
    pub gamma: f64,
    pub r_max: f64,
    pub r_min: f64,
    /// Initial-state distribution; a point mass everywhere except deep sea.
    pub initial: Vec<(usize, f64)>,
    pub exact: ExactModel,
    pub layout: Option<GridLayout>,
    pub action_names: Vec<String>,
    /// Construction recipe for gridworld-family models.
    pub grid: Option<GridSource>,
    reachable: Vec<bool>,
}

impl EnvModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        exact: ExactModel,
        initial: Vec<(usize, f64)>,
        horizon_short: usize,
        horizon_long: usize,
        gamma: f64,
        r_max: f64,
        layout: Option<GridLayout>,
        action_names: Vec<String>,
    ) -> Result<Self> {
        let n_states = exact.n_states();
        let n_actions = exact.n_actions();
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::Config(format!("gamma {gamma} outside [0, 1)")));
        }
        if horizon_short == 0 || horizon_long == 0 {
            return Err(Error::Config("horizons must be positive".into()));
        }
        let total: f64 = initial.iter().map(|&(_, p)| p).sum();
        if initial.is_empty() || (total - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::Config("initial distribution must sum to 1".into()));
        }
        if initial.iter().any(|&(s, _)| s >= n_states) {
            return Err(Error::Config("initial state out of range".into()));
        }
        if let Some(l) = &layout {
            if l.cell_of_state.len() != n_states
                || l.cell_of_state.iter().any(|&(r, c)| r >= l.height || c >= l.width)
            {
                return Err(Error::Config("layout does not cover the state space".into()));
            }
        }
        if action_names.len() != n_actions {
            return Err(Error::Config("one name per action required".into()));
        }
        let mut r_lo = f64::INFINITY;
        let mut r_hi = f64::NEG_INFINITY;
        for s in 0..n_states {
            for a in 0..n_actions {
                r_lo = r_lo.min(exact.reward(s, a));
                r_hi = r_hi.max(exact.reward(s, a));
            }
        }
        let reachable = flood_fill(&exact, &initial);
        Ok(Self {
            name: name.into(),
            n_states,
            n_actions,
            horizon: horizon_short,
            horizon_short,
            horizon_long,
            gamma,
            r_max: r_max.max(r_hi),
            r_min: r_lo,
            initial,
            exact,
            layout,
            action_names,
            grid: None,
            reachable,
        })
    }

    /// First state of the initial distribution.
    pub fn initial_state(&self) -> usize {
        self.initial[0].0
    }

    pub fn with_grid(mut self, grid: GridSource) -> Self {
        self.grid = Some(grid);
        self
    }

    /// Copy with a different training horizon.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon.max(1);
        self
    }

    pub fn reachable(&self) -> &[bool] {
        &self.reachable
    }

    pub fn n_reachable(&self) -> usize {
        self.reachable.iter().filter(|&&r| r).count()
    }

    pub fn is_deterministic(&self) -> bool {
        self.exact.is_deterministic()
    }

    /// Samples a start state. Draws from `rng` only when the distribution has
    /// more than one support point.
    pub fn reset(&self, rng: &mut RngStream) -> usize {
        if self.initial.len() == 1 {
            return self.initial[0].0;
        }
        let u = rng.uniform();
        let mut acc = 0.0;
        for &(s, p) in &self.initial {
            acc += p;
            if u < acc {
                return s;
            }
        }
        self.initial[self.initial.len() - 1].0
    }

    pub fn step(&self, s: usize, a: usize, rng: &mut RngStream) -> Result<Transition> {
        if s >= self.n_states {
            return Err(Error::Contract(format!("state {s} out of range (n_states = {})", self.n_states)));
        }
        if a >= self.n_actions {
            return Err(Error::Contract(format!("action {a} out of range (n_actions = {})", self.n_actions)));
        }
        let s_next = self.exact.sample(s, a, rng);
        Ok(Transition {
            s,
            a,
            r: self.exact.reward(s, a),
            s_next,
            terminal: self.exact.is_terminal(s, a),
        })
    }
}

fn flood_fill(exact: &ExactModel, initial: &[(usize, f64)]) -> Vec<bool> {
    let mut seen = vec![false; exact.n_states()];
    let mut stack: Vec<usize> = initial.iter().filter(|&&(_, p)| p > 0.0).map(|&(s, _)| s).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(s) = stack.pop() {
        for a in 0..exact.n_actions() {
            if exact.is_terminal(s, a) {
                continue;
            }
            for &t in exact.row(s, a).0 {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen
}

/// Episode bookkeeping: stepping after the episode ended is a usage error.
#[derive(Debug, Clone)]
pub struct Episode {
    pub state: usize,
    pub t: usize,
    pub done: bool,
}

impl Episode {
    pub fn start(env: &EnvModel, rng: &mut RngStream) -> Self {
        Self {
            state: env.reset(rng),
            t: 0,
            done: false,
        }
    }

    pub fn step(&mut self, env: &EnvModel, a: usize, rng: &mut RngStream) -> Result<Transition> {
        if self.done {
            return Err(Error::Usage("episode already ended; reset before stepping".into()));
        }
        let tr = env.step(self.state, a, rng)?;
        self.t += 1;
        self.state = tr.s_next;
        self.done = tr.terminal || self.t >= env.horizon;
        Ok(tr)
    }
}

/// Index of a maximal value, ties broken uniformly at random. Consumes a draw
/// only when there is more than one maximiser.
pub fn argmax_tiebreak(values: &[f64], rng: &mut RngStream) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::Contract("argmax of an empty list".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Contract("NaN in argmax input".into()));
    }
    Ok(argmax_ties(values, rng))
}

/// Unchecked variant for hot loops; callers guarantee finite input.
pub(crate) fn argmax_ties(values: &[f64], rng: &mut RngStream) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut n_best = 0usize;
    let mut idx = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            n_best = 1;
            idx = i;
        } else if v == best {
            n_best += 1;
        }
    }
    if n_best <= 1 {
        return idx;
    }
    let mut k = rng.below(n_best);
    for (i, &v) in values.iter().enumerate() {
        if v == best {
            if k == 0 {
                return i;
            }
            k -= 1;
        }
    }
    unreachable!()
}
