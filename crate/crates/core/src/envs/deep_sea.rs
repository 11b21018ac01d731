use crate::error::{Error, Result};
use crate::mdp::{EnvModel, ExactModel, GridLayout};

pub const TREASURE: usize = 0;
pub const BOMB: usize = 1;
pub const LEFT: usize = 0;
pub const RIGHT: usize = 1;

/// Flat index of (flag, row, col): `flag * N² + row * N + col`.
pub fn deep_sea_state(n: usize, flag: usize, row: usize, col: usize) -> usize {
    flag * n * n + row * n + col
}

/// N×N deep sea. The ship starts top-left and descends one row per step,
/// moving left or right; left clips at column 0. Every action in the bottom
/// row ends the episode, and "right" in the bottom-right cell opens the chest
/// (+1 with the treasure flag, −1 with the bomb). "Right" on the diagonal
/// costs 0.01/N. The flag is drawn 50/50 at every reset.
pub fn make_deep_sea(n: usize) -> Result<EnvModel> {
    if n < 2 {
        return Err(Error::Config(format!("deep sea needs N >= 2, got {n}")));
    }
    let n_states = 2 * n * n;
    let mut rows = Vec::with_capacity(n_states * 2);
    let mut reward = Vec::with_capacity(n_states * 2);
    let mut terminal = Vec::with_capacity(n_states * 2);
    let mut cells = Vec::with_capacity(n_states);
    for flag in [TREASURE, BOMB] {
        for row in 0..n {
            for col in 0..n {
                let s = deep_sea_state(n, flag, row, col);
                cells.push((row, col));
                for a in [LEFT, RIGHT] {
                    let mut r = 0.0;
                    if a == RIGHT && row == col {
                        r -= 0.01 / n as f64;
                    }
                    if row == n - 1 {
                        if a == RIGHT && col == n - 1 {
                            r += if flag == TREASURE { 1.0 } else { -1.0 };
                        }
                        rows.push(vec![(s, 1.0)]);
                        terminal.push(true);
                    } else {
                        let nc = if a == RIGHT { (col + 1).min(n - 1) } else { col.saturating_sub(1) };
                        rows.push(vec![(deep_sea_state(n, flag, row + 1, nc), 1.0)]);
                        terminal.push(false);
                    }
                    reward.push(r);
                }
            }
        }
    }
    let exact = ExactModel::from_rows(n_states, 2, rows, reward, terminal)?;
    EnvModel::new(
        format!("deep_sea:{n}"),
        exact,
        vec![
            (deep_sea_state(n, TREASURE, 0, 0), 0.5),
            (deep_sea_state(n, BOMB, 0, 0), 0.5),
        ],
        n,
        n,
        0.99,
        1.0,
        Some(GridLayout {
            width: n,
            height: n,
            cell_of_state: cells,
        }),
        vec!["left".into(), "right".into()],
    )
}
