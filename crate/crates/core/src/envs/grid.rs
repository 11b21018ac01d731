use serde::{Deserialize, Serialize};

use super::map::{CellKind, GridSpec};
use crate::error::{Error, Result};
use crate::mdp::{EnvModel, ExactModel, GridLayout, ROW_SUM_TOL};

pub const GRID_ACTIONS: [&str; 4] = ["up", "down", "left", "right"];
const MOVES: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Noise applied to every intended move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticWrapSpec {
    pub p_succeed: f64,
    pub p_stay: f64,
    pub p_random_adjacent: f64,
}

impl Default for StochasticWrapSpec {
    fn default() -> Self {
        Self {
            p_succeed: 0.9,
            p_stay: 0.05,
            p_random_adjacent: 0.05,
        }
    }
}

impl StochasticWrapSpec {
    pub fn validate(&self) -> Result<()> {
        let ps = [self.p_succeed, self.p_stay, self.p_random_adjacent];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Config("wrap probabilities must lie in [0, 1]".into()));
        }
        let sum: f64 = ps.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::Config(format!("wrap probabilities sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Everything needed to rebuild a gridworld model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSource {
    pub spec: GridSpec,
    pub prison_success: f64,
    pub wrap: Option<StochasticWrapSpec>,
}

pub const DEFAULT_PRISON_SUCCESS: f64 = 0.001;

/// Free cells in row-major order and the inverse map.
pub(crate) struct CellIndex {
    pub cells: Vec<(usize, usize)>,
    pub state_of: Vec<Option<usize>>,
}

impl CellIndex {
    pub fn new(width: usize, height: usize, is_wall: impl Fn(usize, usize) -> bool) -> Self {
        let mut cells = Vec::new();
        let mut state_of = vec![None; width * height];
        for r in 0..height {
            for c in 0..width {
                if !is_wall(r, c) {
                    state_of[r * width + c] = Some(cells.len());
                    cells.push((r, c));
                }
            }
        }
        Self { cells, state_of }
    }
}

/// Cell reached by moving from (r, c); bumps into walls, edges and blocked moves stay put.
pub(crate) fn move_target(spec: &GridSpec, (r, c): (usize, usize), a: usize) -> (usize, usize) {
    let (dr, dc) = MOVES[a];
    let (nr, nc) = (r as isize + dr, c as isize + dc);
    if nr < 0 || nc < 0 || nr >= spec.height as isize || nc >= spec.width as isize {
        return (r, c);
    }
    let to = (nr as usize, nc as usize);
    if spec.cell(to.0, to.1).is_wall() || spec.blocked.iter().any(|b| b.from == (r, c) && b.to == to) {
        return (r, c);
    }
    to
}

pub fn make_gridworld(spec: &GridSpec, prison_success: f64) -> Result<EnvModel> {
    build(
        "gridworld",
        &GridSource {
            spec: spec.clone(),
            prison_success,
            wrap: None,
        },
    )
}

pub fn stochasticize(env: &EnvModel, wrap: StochasticWrapSpec) -> Result<EnvModel> {
    wrap.validate()?;
    let mut src = env
        .grid
        .clone()
        .ok_or_else(|| Error::Config(format!("{} is not a gridworld", env.name)))?;
    src.wrap = Some(wrap);
    let out = build(&env.name, &src)?;
    Ok(out.with_horizon(env.horizon))
}

pub(crate) fn build(name: &str, src: &GridSource) -> Result<EnvModel> {
    let spec = &src.spec;
    spec.validate()?;
    if !(0.0..=1.0).contains(&src.prison_success) {
        return Err(Error::Config("prison success probability must lie in [0, 1]".into()));
    }
    if let Some(w) = &src.wrap {
        w.validate()?;
    }
    let index = CellIndex::new(spec.width, spec.height, |r, c| spec.cell(r, c).is_wall());
    let n_states = index.cells.len();
    let sid = |cell: (usize, usize)| index.state_of[cell.0 * spec.width + cell.1].unwrap();
    let mut rows = Vec::with_capacity(n_states * 4);
    let mut reward = Vec::with_capacity(n_states * 4);
    let mut terminal = Vec::with_capacity(n_states * 4);
    for (s, &cell) in index.cells.iter().enumerate() {
        let kind = spec.cell(cell.0, cell.1);
        let neighbours: Vec<usize> = {
            let mut v: Vec<usize> = (0..4)
                .map(|a| sid(move_target(spec, cell, a)))
                .filter(|&t| t != s)
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        for a in 0..4 {
            reward.push(spec.step_penalty + kind.payoff());
            if kind.is_terminal() {
                terminal.push(true);
                rows.push(vec![(s, 1.0)]);
                continue;
            }
            terminal.push(false);
            let target = sid(move_target(spec, cell, a));
            let mut moved = match &src.wrap {
                None => vec![(target, 1.0)],
                Some(w) => {
                    let mut row = vec![(target, w.p_succeed), (s, w.p_stay)];
                    if neighbours.is_empty() {
                        row.push((s, w.p_random_adjacent));
                    } else {
                        let share = w.p_random_adjacent / neighbours.len() as f64;
                        row.extend(neighbours.iter().map(|&n| (n, share)));
                    }
                    row
                }
            };
            if matches!(kind, CellKind::Prison) {
                for e in moved.iter_mut() {
                    e.1 *= src.prison_success;
                }
                moved.push((s, 1.0 - src.prison_success));
            }
            rows.push(moved);
        }
    }
    let exact = ExactModel::from_rows(n_states, 4, rows, reward, terminal)?;
    let start = sid(spec.start().unwrap());
    let nominal = spec.cells.iter().map(|c| c.payoff()).fold(0.0, f64::max);
    let layout = GridLayout {
        width: spec.width,
        height: spec.height,
        cell_of_state: index.cells.clone(),
    };
    let env = EnvModel::new(
        name,
        exact,
        vec![(start, 1.0)],
        spec.horizon_short,
        spec.horizon_long,
        0.99,
        nominal,
        Some(layout),
        GRID_ACTIONS.iter().map(|s| s.to_string()).collect(),
    )?;
    Ok(env.with_grid(src.clone()))
}
