//! ASCII map documents.
//!
//! One row per line, whitespace-separated tokens: `.` empty, `#` wall, `S` start,
//! `P` prison, `R:<float>` terminal reward, `X:<float>` terminal penalty.
//! Optional header lines `step_penalty=`, `horizon_short=`, `horizon_long=`
//! precede the rows. Lines starting with `//` are comments.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellKind {
    Empty,
    Wall,
    Start,
    Prison,
    Reward { value: f64, terminal: bool },
    Penalty { value: f64, terminal: bool },
}

impl CellKind {
    pub fn is_wall(&self) -> bool {
        matches!(self, CellKind::Wall)
    }

    /// Payoff added to the step penalty when acting in this cell.
    pub fn payoff(&self) -> f64 {
        match *self {
            CellKind::Reward { value, .. } | CellKind::Penalty { value, .. } => value,
            _ => 0.0,
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            CellKind::Reward { terminal: true, .. } | CellKind::Penalty { terminal: true, .. }
        )
    }
}

/// A directed move that is refused (the agent stays put).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockedMove {
    pub from: (usize, usize),
    pub to: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    /// Row-major, row 0 at the top.
    pub cells: Vec<CellKind>,
    pub step_penalty: f64,
    pub horizon_short: usize,
    pub horizon_long: usize,
    #[serde(default)]
    pub blocked: Vec<BlockedMove>,
}

pub const DEFAULT_STEP_PENALTY: f64 = -0.01;

impl GridSpec {
    pub fn cell(&self, row: usize, col: usize) -> CellKind {
        self.cells[row * self.width + col]
    }

    pub fn start(&self) -> Option<(usize, usize)> {
        self.cells
            .iter()
            .position(|c| matches!(c, CellKind::Start))
            .map(|i| (i / self.width, i % self.width))
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Config("grid has no cells".into()));
        }
        if self.cells.len() != self.width * self.height {
            return Err(Error::Config(format!(
                "{} cells for a {}x{} grid",
                self.cells.len(),
                self.height,
                self.width
            )));
        }
        let starts = self.cells.iter().filter(|c| matches!(c, CellKind::Start)).count();
        if starts != 1 {
            return Err(Error::Config(format!("expected exactly one start cell, found {starts}")));
        }
        if !self.step_penalty.is_finite() || self.cells.iter().any(|c| !c.payoff().is_finite()) {
            return Err(Error::Config("rewards must be finite".into()));
        }
        if self.horizon_short == 0 || self.horizon_long == 0 {
            return Err(Error::Config("horizons must be positive".into()));
        }
        Ok(())
    }
}

/// Token with its 1-based line and column.
#[derive(Debug, Clone)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub line: usize,
    pub column: usize,
}

pub(crate) struct RawMap<'a> {
    pub headers: Vec<(&'a str, &'a str, usize)>,
    pub rows: Vec<Vec<Token<'a>>>,
}

/// Splits a document into header pairs and token rows, checking row lengths.
pub(crate) fn tokenize(text: &str) -> Result<RawMap<'_>> {
    let mut headers = Vec::new();
    let mut rows: Vec<Vec<Token>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with("//") {
            continue;
        }
        if let Some((k, v)) = trimmed.split_once('=') {
            if !rows.is_empty() {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: "header after grid rows".into(),
                });
            }
            headers.push((k.trim(), v.trim(), line_no));
            continue;
        }
        let mut row = Vec::new();
        let base = line.as_ptr() as usize;
        for tok in line.split_whitespace() {
            let column = tok.as_ptr() as usize - base + 1;
            row.push(Token {
                text: tok,
                line: line_no,
                column,
            });
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("row has {} cells, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            column: 1,
            message: "map has no rows".into(),
        });
    }
    Ok(RawMap { headers, rows })
}

pub(crate) fn parse_header_values(
    headers: &[(&str, &str, usize)],
    n_cells: usize,
) -> Result<(f64, usize, usize)> {
    let mut step_penalty = DEFAULT_STEP_PENALTY;
    let mut short = None;
    let mut long = None;
    for &(k, v, line) in headers {
        let bad = |what: &str| Error::Parse {
            line,
            column: 1,
            message: format!("invalid {what} value {v:?}"),
        };
        match k {
            "step_penalty" => {
                step_penalty = v.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| bad(k))?
            }
            "horizon_short" => short = Some(v.parse::<usize>().ok().filter(|&h| h > 0).ok_or_else(|| bad(k))?),
            "horizon_long" => long = Some(v.parse::<usize>().ok().filter(|&h| h > 0).ok_or_else(|| bad(k))?),
            _ => {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("unknown header {k:?}"),
                })
            }
        }
    }
    let short = short.unwrap_or(n_cells);
    let long = long.unwrap_or(2 * short);
    Ok((step_penalty, short, long))
}

fn parse_value(tok: &Token, rest: &str) -> Result<f64> {
    rest.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line: tok.line,
            column: tok.column,
            message: format!("invalid number in token {:?}", tok.text),
        })
}

pub fn parse_map(text: &str) -> Result<GridSpec> {
    let raw = tokenize(text)?;
    let height = raw.rows.len();
    let width = raw.rows[0].len();
    let mut cells = Vec::with_capacity(width * height);
    let mut start: Option<&Token> = None;
    for tok in raw.rows.iter().flatten() {
        let cell = match tok.text {
            "." => CellKind::Empty,
            "#" => CellKind::Wall,
            "P" => CellKind::Prison,
            "S" => {
                if start.is_some() {
                    return Err(Error::Parse {
                        line: tok.line,
                        column: tok.column,
                        message: "second start cell".into(),
                    });
                }
                start = Some(tok);
                CellKind::Start
            }
            t => {
                if let Some(v) = t.strip_prefix("R:") {
                    CellKind::Reward {
                        value: parse_value(tok, v)?,
                        terminal: true,
                    }
                } else if let Some(v) = t.strip_prefix("X:") {
                    CellKind::Penalty {
                        value: parse_value(tok, v)?,
                        terminal: true,
                    }
                } else {
                    return Err(Error::Parse {
                        line: tok.line,
                        column: tok.column,
                        message: format!("unknown token {t:?}"),
                    });
                }
            }
        };
        cells.push(cell);
    }
    if start.is_none() {
        let last = raw.rows.last().unwrap();
        return Err(Error::Parse {
            line: last.first().map(|t| t.line).unwrap_or(1),
            column: 1,
            message: "map has no start cell".into(),
        });
    }
    let (step_penalty, horizon_short, horizon_long) = parse_header_values(&raw.headers, width * height)?;
    Ok(GridSpec {
        width,
        height,
        cells,
        step_penalty,
        horizon_short,
        horizon_long,
        blocked: Vec::new(),
    })
}

/// Canonical text for a spec: headers first, single spaces between tokens.
/// Non-terminal reward cells and blocked moves have no token and are rejected.
pub fn render_map(spec: &GridSpec) -> Result<String> {
    if !spec.blocked.is_empty() {
        return Err(Error::Config("blocked moves cannot be written as a map".into()));
    }
    let mut out = String::new();
    let _ = writeln!(out, "step_penalty={}", spec.step_penalty);
    let _ = writeln!(out, "horizon_short={}", spec.horizon_short);
    let _ = writeln!(out, "horizon_long={}", spec.horizon_long);
    for row in spec.cells.chunks(spec.width) {
        let tokens: Result<Vec<String>> = row
            .iter()
            .map(|c| match *c {
                CellKind::Empty => Ok(".".to_string()),
                CellKind::Wall => Ok("#".to_string()),
                CellKind::Start => Ok("S".to_string()),
                CellKind::Prison => Ok("P".to_string()),
                CellKind::Reward { value, terminal: true } => Ok(format!("R:{value}")),
                CellKind::Penalty { value, terminal: true } => Ok(format!("X:{value}")),
                _ => Err(Error::Config("non-terminal reward cells have no map token".into())),
            })
            .collect();
        out.push_str(&tokens?.join(" "));
        out.push('\n');
    }
    Ok(out)
}
