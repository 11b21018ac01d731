//! Benchmark environments and the id registry.

pub mod chain;
pub mod deep_sea;
pub mod grid;
pub mod map;
pub mod taxi;

pub use chain::{make_chainworld, ChainSpec};
pub use deep_sea::{deep_sea_state, make_deep_sea};
pub use grid::{make_gridworld, stochasticize, GridSource, StochasticWrapSpec, DEFAULT_PRISON_SUCCESS};
pub use map::{parse_map, render_map, BlockedMove, CellKind, GridSpec};
pub use taxi::{make_taxi, parse_taxi_map, taxi_state};

use crate::error::{Error, Result};
use crate::mdp::EnvModel;

pub const TOY_MAP: &str = include_str!("../../assets/toy.map");
pub const PRISON_MAP: &str = include_str!("../../assets/prison.map");
pub const WALL_MAP: &str = include_str!("../../assets/wall.map");
pub const TOY3_MAP: &str = include_str!("../../assets/toy3.map");

/// Deep gridworld layout: 5 rows by 11 columns, start at the left end of the
/// middle row. The rest of the middle row is a corridor that can only be
/// entered from its left end; leaving it up or down is allowed. Corridor cells
/// except the last are puddles costing 0.01; the last holds treasure 2. Two
/// treasures of 1 sit two moves from the start.
pub fn deep_grid_spec() -> GridSpec {
    let (width, height) = (11, 5);
    let mut cells = vec![CellKind::Empty; width * height];
    cells[2 * width] = CellKind::Start;
    for c in 1..10 {
        cells[2 * width + c] = CellKind::Penalty {
            value: -0.01,
            terminal: false,
        };
    }
    cells[2 * width + 10] = CellKind::Reward {
        value: 2.0,
        terminal: true,
    };
    cells[width + 1] = CellKind::Reward {
        value: 1.0,
        terminal: true,
    };
    cells[3 * width + 1] = CellKind::Reward {
        value: 1.0,
        terminal: true,
    };
    let mut blocked = Vec::new();
    for c in 1..width {
        blocked.push(BlockedMove { from: (1, c), to: (2, c) });
        blocked.push(BlockedMove { from: (3, c), to: (2, c) });
    }
    GridSpec {
        width,
        height,
        cells,
        step_penalty: 0.0,
        horizon_short: 55,
        horizon_long: 110,
        blocked,
    }
}

pub fn make_deep_gridworld() -> Result<EnvModel> {
    grid::build(
        "deep_grid",
        &GridSource {
            spec: deep_grid_spec(),
            prison_success: DEFAULT_PRISON_SUCCESS,
            wrap: None,
        },
    )
}

/// Shipped environment ids. `deep_sea:N` and `chain:N` take a size.
pub const ENV_IDS: &[(&str, &str)] = &[
    ("toy", "5x5 gridworld, one treasure"),
    ("prison", "5x5 gridworld with distractors and a prison cell"),
    ("wall", "50x50 gridworld split by a wall with one gap"),
    ("taxi", "7x7 taxi with three passengers"),
    ("deep_grid", "5x11 gridworld with a one-way corridor"),
    ("deep_sea:N", "NxN deep sea (default N = 10)"),
    ("chain:N", "ergodic N-state chain (default N = 27)"),
    ("toy3", "3x3 toy domain with a prison"),
    ("stoch_toy", "toy with noisy moves"),
    ("stoch_prison", "prison with noisy moves"),
    ("stoch_deep_grid", "deep_grid with noisy moves"),
];

fn named_grid(name: &str, text: &str) -> Result<EnvModel> {
    grid::build(
        name,
        &GridSource {
            spec: parse_map(text)?,
            prison_success: DEFAULT_PRISON_SUCCESS,
            wrap: None,
        },
    )
}

fn sized(id: &str, default: usize) -> Result<usize> {
    match id.split_once(':') {
        None => Ok(default),
        Some((_, n)) => n
            .parse()
            .map_err(|_| Error::Config(format!("invalid size in env id {id:?}"))),
    }
}

fn stochastic(base: EnvModel, name: &str, horizon: usize) -> Result<EnvModel> {
    let mut env = stochasticize(&base, StochasticWrapSpec::default())?;
    env.name = name.to_string();
    env.horizon_short = horizon;
    env.horizon_long = 2 * horizon;
    Ok(env.with_horizon(horizon))
}

/// Builds an environment by id, with the short horizon selected.
pub fn make_env(id: &str) -> Result<EnvModel> {
    let base = id.split(':').next().unwrap_or(id);
    match base {
        "toy" => named_grid("toy", TOY_MAP),
        "prison" => named_grid("prison", PRISON_MAP),
        "wall" => named_grid("wall", WALL_MAP),
        "toy3" => named_grid("toy3", TOY3_MAP),
        "taxi" => make_taxi(),
        "deep_grid" => make_deep_gridworld(),
        "deep_sea" => make_deep_sea(sized(id, 10)?),
        "chain" => make_chainworld(ChainSpec::new(sized(id, 27)?)),
        "stoch_toy" => stochastic(named_grid("toy", TOY_MAP)?, "stoch_toy", 15),
        "stoch_prison" => stochastic(named_grid("prison", PRISON_MAP)?, "stoch_prison", 25),
        "stoch_deep_grid" => stochastic(make_deep_gridworld()?, "stoch_deep_grid", 55),
        _ => Err(Error::Config(format!("unknown env id {id:?}"))),
    }
    .and_then(|env| {
        if id.contains(':') && !matches!(base, "deep_sea" | "chain") {
            return Err(Error::Config(format!("env id {id:?} takes no size")));
        }
        Ok(env)
    })
}
