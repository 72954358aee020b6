//! Plain-text value tables.
//!
//! ```text
//! # optional comment lines
//! 2
//! 0 0
//! 1 0
//! 2 0
//! 3 1
//! ```
//!
//! Line one holds `n`; then `2^n` lines `<subset-index> <value>` in ascending
//! index order, where bit `i` of the index marks player `i + 1`.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::exact::{check_exact, value_table, MAX_EXACT_PLAYERS};
use super::{Coalition, Game};
use crate::error::{Error, Result};
use crate::numeric::fmt_g17;

/// Table-lookup game, normalized so the empty coalition is worth 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularGame {
    n: usize,
    values: Vec<f64>,
}

impl TabularGame {
    /// Subtracts `values[0]` from every entry.
    pub fn from_values(n: usize, mut values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        check_exact(n, MAX_EXACT_PLAYERS)?;
        if values.len() != 1 << n {
            return Err(Error::Domain(format!(
                "expected {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        let offset = values[0];
        for v in values.iter_mut() {
            *v -= offset;
        }
        Ok(TabularGame { n, values })
    }

    pub fn from_game<G: Game + ?Sized>(game: &G) -> Result<Self> {
        Self::from_values(game.n(), value_table(game)?)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Game for TabularGame {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, coalition: Coalition) -> f64 {
        self.values[coalition.mask() as usize]
    }
}

pub fn parse_tabular_game(text: &str) -> Result<TabularGame> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'));

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::format(1, "missing player-count header"))?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::format(line_no, format!("bad header `{header}`")))?;
    if n == 0 {
        return Err(Error::format(line_no, "player count must be positive"));
    }
    check_exact(n, MAX_EXACT_PLAYERS)?;

    let expected = 1usize << n;
    let mut values = Vec::with_capacity(expected);
    let mut last_line = line_no;
    for (line_no, line) in lines {
        last_line = line_no;
        let mut fields = line.split_whitespace();
        let (Some(index), Some(value), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::format(line_no, "expected `<subset-index> <value>`"));
        };
        let index: usize = index
            .parse()
            .map_err(|_| Error::format(line_no, format!("bad subset index `{index}`")))?;
        if index != values.len() {
            return Err(Error::format(
                line_no,
                format!("expected subset index {}, found {index}", values.len()),
            ));
        }
        let value: f64 = value
            .parse()
            .map_err(|_| Error::format(line_no, format!("non-numeric value `{value}`")))?;
        if !value.is_finite() {
            return Err(Error::format(line_no, "value must be finite"));
        }
        values.push(value);
        if values.len() > expected {
            break;
        }
    }
    if values.len() != expected {
        return Err(Error::format(
            last_line,
            format!("expected {expected} entries, found {}", values.len()),
        ));
    }
    TabularGame::from_values(n, values)
}

pub fn load_tabular_game(path: impl AsRef<Path>) -> Result<TabularGame> {
    parse_tabular_game(&fs::read_to_string(path)?)
}

pub fn write_tabular_game<G: Game + ?Sized>(game: &G, mut out: impl Write) -> Result<()> {
    let table = value_table(game)?;
    writeln!(out, "{}", game.n())?;
    for (idx, v) in table.iter().enumerate() {
        writeln!(out, "{idx} {}", fmt_g17(*v))?;
    }
    Ok(())
}
