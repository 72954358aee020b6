use std::ops::Deref;

use super::{Coalition, Game};
use crate::error::{Error, Result};
use crate::numeric::{binomial_row, CompensatedSum};
use crate::par::{map_indices, Execution};

/// Player-count cap for routines that enumerate all `2^n` coalitions.
pub const MAX_EXACT_PLAYERS: usize = 25;

/// One value per player.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShapleyVector(pub Vec<f64>);

impl ShapleyVector {
    pub fn zeros(n: usize) -> Self {
        ShapleyVector(vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().copied().sum::<CompensatedSum>().value()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ShapleyVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ShapleyVector {
    fn from(v: Vec<f64>) -> Self {
        ShapleyVector(v)
    }
}

pub(crate) fn check_exact(n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::Size { n, max })
    } else {
        Ok(())
    }
}

const TABLE_CHUNK: usize = 1 << 14;

/// Worth of every coalition, indexed by mask in ascending order.
pub fn value_table<G: Game + ?Sized>(game: &G) -> Result<Vec<f64>> {
    value_table_with(game, Execution::default())
}

pub(crate) fn value_table_with<G: Game + ?Sized>(game: &G, exec: Execution) -> Result<Vec<f64>> {
    let n = game.n();
    check_exact(n, MAX_EXACT_PLAYERS)?;
    let len = 1usize << n;
    let chunks = len.div_ceil(TABLE_CHUNK);
    let parts = map_indices(exec, chunks, |c| {
        let start = c * TABLE_CHUNK;
        let end = (start + TABLE_CHUNK).min(len);
        (start..end)
            .map(|mask| game.value(Coalition::from_mask(n, mask as u64)))
            .collect::<Vec<_>>()
    });
    Ok(parts.concat())
}

/// Shapley values by the classic marginal-contribution sum over
/// `S ⊆ N \ {i}` with weights `1 / (n C(n-1, |S|))`.
pub fn exact_shapley<G: Game + ?Sized>(game: &G) -> Result<ShapleyVector> {
    exact_shapley_with(game, Execution::default())
}

pub fn exact_shapley_with<G: Game + ?Sized>(game: &G, exec: Execution) -> Result<ShapleyVector> {
    let n = game.n();
    check_exact(n, MAX_EXACT_PLAYERS)?;
    let table = value_table_with(game, exec)?;
    Ok(shapley_from_table(n, &table, exec))
}

pub(crate) fn shapley_from_table(n: usize, table: &[f64], exec: Execution) -> ShapleyVector {
    let binom = binomial_row(n - 1);
    let phi = map_indices(exec, n, |i| {
        let bit = 1usize << i;
        let mut by_size = vec![CompensatedSum::new(); n];
        for mask in 0..table.len() {
            if mask & bit == 0 {
                by_size[mask.count_ones() as usize] += table[mask | bit] - table[mask];
            }
        }
        by_size
            .iter()
            .enumerate()
            .map(|(s, acc)| acc.value() / (n as f64 * binom[s]))
            .sum::<CompensatedSum>()
            .value()
    });
    ShapleyVector(phi)
}

/// Shapley values through extended marginal contributions
/// `v(S ∪ {i}) - v(S \ {i})` over all `S ⊆ N`, weighted by
/// `1 / ((n+1) C(n, |S|))`.
pub fn exact_shapley_extended<G: Game + ?Sized>(game: &G) -> Result<ShapleyVector> {
    exact_shapley_extended_with(game, Execution::default())
}

pub fn exact_shapley_extended_with<G: Game + ?Sized>(
    game: &G,
    exec: Execution,
) -> Result<ShapleyVector> {
    let n = game.n();
    check_exact(n, MAX_EXACT_PLAYERS)?;
    let table = value_table_with(game, exec)?;
    let binom = binomial_row(n);
    let phi = map_indices(exec, n, |i| {
        let bit = 1usize << i;
        let mut by_size = vec![CompensatedSum::new(); n + 1];
        for mask in 0..table.len() {
            by_size[mask.count_ones() as usize] += table[mask | bit] - table[mask & !bit];
        }
        by_size
            .iter()
            .enumerate()
            .map(|(s, acc)| acc.value() / ((n + 1) as f64 * binom[s]))
            .sum::<CompensatedSum>()
            .value()
    });
    Ok(ShapleyVector(phi))
}
