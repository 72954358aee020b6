//! Exact moments of extended marginal contributions under the CMCS law,
//! by full enumeration.

use crate::error::{Error, Result};
use crate::game::{check_exact, shapley_from_table, value_table_with, Game, ShapleyVector};
use crate::numeric::{binomial_row, CompensatedSum};
use crate::par::{map_indices, Execution};

/// Largest game the moment oracles enumerate.
pub const MAX_MOMENT_PLAYERS: usize = 20;

/// Moments of `Δ'_i(S)` for `S` drawn with probability `1 / ((n+1) C(n, |S|))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameMoments {
    /// Exact Shapley values.
    pub phi: ShapleyVector,
    /// `E[Δ'_i]`, which equals `φ_i`.
    pub mean: Vec<f64>,
    /// `Var[Δ'_i]`.
    pub var: Vec<f64>,
    /// `Var[Δ_i]` of the plain marginal contribution under the marginal law.
    pub marginal_var: Vec<f64>,
    n: usize,
    cov: Vec<f64>,
    pair_var: Vec<f64>,
}

impl GameMoments {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `Cov[Δ'_i, Δ'_j]`; the diagonal holds the variances.
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.n + j]
    }

    /// `Var[Δ'_i - Δ'_j]`, enumerated directly rather than derived from
    /// the covariance matrix.
    pub fn pair_var(&self, i: usize, j: usize) -> f64 {
        self.pair_var[i * self.n + j]
    }
}

fn check_moment_size(n: usize) -> Result<()> {
    check_exact(n, MAX_MOMENT_PLAYERS)
}

/// Two-pass enumeration: means first, then centred second moments, all in
/// compensated sums over ascending masks.
pub fn exact_moments<G: Game + ?Sized>(game: &G) -> Result<GameMoments> {
    exact_moments_with(game, Execution::default())
}

pub fn exact_moments_with<G: Game + ?Sized>(game: &G, exec: Execution) -> Result<GameMoments> {
    let n = game.n();
    check_moment_size(n)?;
    let table = value_table_with(game, exec)?;
    let phi = shapley_from_table(n, &table, exec);
    let row = binomial_row(n);
    let weight: Vec<f64> = row.iter().map(|c| 1.0 / ((n + 1) as f64 * c)).collect();
    let w = |mask: usize| weight[mask.count_ones() as usize];
    let ext = |i: usize, mask: usize| table[mask | 1 << i] - table[mask & !(1 << i)];

    let mean = map_indices(exec, n, |i| {
        let mut acc = CompensatedSum::new();
        for mask in 0..table.len() {
            acc += w(mask) * ext(i, mask);
        }
        acc.value()
    });

    // row i covers columns j >= i
    let rows = map_indices(exec, n, |i| {
        let mut cov = vec![CompensatedSum::new(); n - i];
        let mut pair = vec![CompensatedSum::new(); n - i];
        for mask in 0..table.len() {
            let wm = w(mask);
            let di = ext(i, mask) - mean[i];
            for j in i..n {
                let dj = ext(j, mask) - mean[j];
                cov[j - i] += wm * di * dj;
                let d = di - dj;
                pair[j - i] += wm * d * d;
            }
        }
        (
            cov.iter().map(CompensatedSum::value).collect::<Vec<_>>(),
            pair.iter().map(CompensatedSum::value).collect::<Vec<_>>(),
        )
    });
    let mut cov = vec![0.0; n * n];
    let mut pair_var = vec![0.0; n * n];
    for (i, (c, p)) in rows.into_iter().enumerate() {
        for j in i..n {
            cov[i * n + j] = c[j - i];
            cov[j * n + i] = c[j - i];
            pair_var[i * n + j] = p[j - i].max(0.0);
            pair_var[j * n + i] = p[j - i].max(0.0);
        }
    }

    let marginal_row = binomial_row(n - 1);
    let marginal_var = map_indices(exec, n, |i| {
        let bit = 1usize << i;
        let mut acc = CompensatedSum::new();
        for mask in (0..table.len()).filter(|m| m & bit == 0) {
            let d = table[mask | bit] - table[mask] - phi[i];
            acc += d * d / (n as f64 * marginal_row[mask.count_ones() as usize]);
        }
        acc.value().max(0.0)
    });

    Ok(GameMoments {
        var: (0..n).map(|i| cov[i * n + i].max(0.0)).collect(),
        phi,
        mean,
        marginal_var,
        n,
        cov,
        pair_var,
    })
}

/// Covariance of two players' extended marginal contributions through the
/// closed form that sums over `S ⊆ N \ {i}` only:
///
/// `(1/(n+1)) Σ Δ_i(S) [Δ'_j(S) / C(n,|S|) + Δ'_j(S ∪ {i}) / C(n,|S|+1)] - φ_i φ_j`.
pub fn covariance_formula<G: Game + ?Sized>(game: &G, i: usize, j: usize) -> Result<f64> {
    let n = game.n();
    check_moment_size(n)?;
    if i == j {
        return Err(Error::SamePlayer(i + 1));
    }
    if i >= n || j >= n {
        return Err(Error::Domain(format!(
            "players {} and {} must be within 1..={n}",
            i + 1,
            j + 1
        )));
    }
    let table = value_table_with(game, Execution::Sequential)?;
    let phi = shapley_from_table(n, &table, Execution::Sequential);
    let row = binomial_row(n);
    let (bi, bj) = (1usize << i, 1usize << j);
    let ext_j = |mask: usize| table[mask | bj] - table[mask & !bj];
    let mut acc = CompensatedSum::new();
    for mask in (0..table.len()).filter(|m| m & bi == 0) {
        let size = mask.count_ones() as usize;
        let delta_i = table[mask | bi] - table[mask];
        acc += delta_i * (ext_j(mask) / row[size] + ext_j(mask | bi) / row[size + 1]);
    }
    Ok(acc.value() / (n + 1) as f64 - phi[i] * phi[j])
}
