use super::grid::{move_target, CellIndex, GRID_ACTIONS};
use super::map::{parse_header_values, tokenize, CellKind, GridSpec};
use crate::error::{Error, Result};
use crate::mdp::{EnvModel, ExactModel, GridLayout};

pub const TAXI_MAP: &str = include_str!("../../assets/taxi.map");

/// Payout for delivering 0, 1, 2 or 3 passengers.
pub const TAXI_PAYOUT: [f64; 4] = [0.0, 1.0, 3.0, 15.0];

/// Parsed taxi asset: a grid plus passenger and destination cells.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxiMap {
    pub grid: GridSpec,
    pub passengers: Vec<(usize, usize)>,
    pub destination: (usize, usize),
}

/// Taxi grammar: the gridworld tokens `.`, `#`, `S` plus `T` (passenger) and `D` (destination).
pub fn parse_taxi_map(text: &str) -> Result<TaxiMap> {
    let raw = tokenize(text)?;
    let height = raw.rows.len();
    let width = raw.rows[0].len();
    let mut cells = Vec::with_capacity(width * height);
    let mut passengers = Vec::new();
    let mut destination = None;
    let mut starts = 0;
    for (r, row) in raw.rows.iter().enumerate() {
        for (c, tok) in row.iter().enumerate() {
            let err = |message: String| Error::Parse {
                line: tok.line,
                column: tok.column,
                message,
            };
            cells.push(match tok.text {
                "." => CellKind::Empty,
                "#" => CellKind::Wall,
                "S" => {
                    starts += 1;
                    if starts > 1 {
                        return Err(err("second start cell".into()));
                    }
                    CellKind::Start
                }
                "T" => {
                    passengers.push((r, c));
                    CellKind::Empty
                }
                "D" => {
                    if destination.replace((r, c)).is_some() {
                        return Err(err("second destination".into()));
                    }
                    CellKind::Empty
                }
                t => return Err(err(format!("unknown taxi token {t:?}"))),
            });
        }
    }
    let (step_penalty, horizon_short, horizon_long) = parse_header_values(&raw.headers, width * height)?;
    let grid = GridSpec {
        width,
        height,
        cells,
        step_penalty,
        horizon_short,
        horizon_long,
        blocked: Vec::new(),
    };
    grid.validate()?;
    if passengers.len() != 3 {
        return Err(Error::Config(format!("taxi needs 3 passengers, found {}", passengers.len())));
    }
    let destination = destination.ok_or_else(|| Error::Config("taxi map has no destination".into()))?;
    Ok(TaxiMap {
        grid,
        passengers,
        destination,
    })
}

/// Flat index of (free-cell index, pickup mask): `cell * 8 + mask`.
pub fn taxi_state(cell: usize, mask: usize) -> usize {
    cell * 8 + mask
}

pub fn make_taxi() -> Result<EnvModel> {
    make_taxi_from(&parse_taxi_map(TAXI_MAP)?)
}

/// Passengers are picked up by entering their cell. Any action at the
/// destination ends the episode and pays according to the passengers on board.
/// No step penalty is charged.
pub fn make_taxi_from(map: &TaxiMap) -> Result<EnvModel> {
    let g = &map.grid;
    let index = CellIndex::new(g.width, g.height, |r, c| g.cell(r, c).is_wall());
    let sid = |cell: (usize, usize)| index.state_of[cell.0 * g.width + cell.1].unwrap();
    let n_states = index.cells.len() * 8;
    let mut rows = Vec::with_capacity(n_states * 4);
    let mut reward = Vec::with_capacity(n_states * 4);
    let mut terminal = Vec::with_capacity(n_states * 4);
    let mut layout = Vec::with_capacity(n_states);
    for (ci, &cell) in index.cells.iter().enumerate() {
        for mask in 0..8usize {
            let s = taxi_state(ci, mask);
            layout.push(cell);
            for a in 0..4 {
                if cell == map.destination {
                    rows.push(vec![(s, 1.0)]);
                    reward.push(TAXI_PAYOUT[mask.count_ones() as usize]);
                    terminal.push(true);
                    continue;
                }
                let to = move_target(g, cell, a);
                let mut m = mask;
                if let Some(i) = map.passengers.iter().position(|&p| p == to) {
                    m |= 1 << i;
                }
                rows.push(vec![(taxi_state(sid(to), m), 1.0)]);
                reward.push(0.0);
                terminal.push(false);
            }
        }
    }
    let exact = ExactModel::from_rows(n_states, 4, rows, reward, terminal)?;
    let start = taxi_state(sid(g.start().unwrap()), 0);
    EnvModel::new(
        "taxi",
        exact,
        vec![(start, 1.0)],
        g.horizon_short,
        g.horizon_long,
        0.99,
        TAXI_PAYOUT[3],
        Some(GridLayout {
            width: g.width,
            height: g.height,
            cell_of_state: layout,
        }),
        GRID_ACTIONS.iter().map(|s| s.to_string()).collect(),
    )
}
