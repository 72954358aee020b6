//! Running statistics shared by the estimators.

use crate::error::{Error, Result};
use crate::game::{Coalition, ShapleyVector};
use crate::sampling::{normal_cdf, normal_quantile};

/// Per-player sample statistics.
///
/// The estimate is the plain running sum divided by the count; the Welford
/// mean and second moment back the sample variance.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlayerStats {
    count: u64,
    sum: f64,
    mean: f64,
    m2: f64,
}

impl PlayerStats {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// 0 before the first sample.
    pub fn estimate(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Unbiased sample variance, `None` below two samples.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| (self.m2 / (self.count - 1) as f64).max(0.0))
    }
}

/// Joint statistics of a player pair `(a, b)` over rounds where both were sampled:
/// count, `Σ (Δ'_a - Δ'_b)` and `Σ (Δ'_a - Δ'_b)^2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairStats {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl PairStats {
    pub fn push(&mut self, diff: f64) {
        self.count += 1;
        self.sum += diff;
        self.sum_sq += diff * diff;
    }

    /// Statistics of the reversed pair.
    pub fn reversed(self) -> Self {
        PairStats {
            sum: -self.sum,
            ..self
        }
    }

    /// Mean of `Δ'_b - Δ'_a`, i.e. `-sum / count`.
    pub fn mean_gap(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            -self.sum / self.count as f64
        }
    }

    /// `(Γ - Σ²/M) / (M - 1)`, clamped at 0; `None` below two rounds.
    pub fn variance(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let m = self.count as f64;
        Some(((self.sum_sq - self.sum * self.sum / m) / (m - 1.0)).max(0.0))
    }
}

/// Estimated probability that the pair `(i, j)` is ordered wrongly, i.e.
/// `P(φ_i < φ_j)`, as `Φ(√M · δ̂ / σ̂)` with `δ̂` the mean of `Δ'_j - Δ'_i`.
///
/// Below two joint rounds the result is 0.5. A zero variance estimate maps
/// to the limit of `Φ`: 0, 0.5 or 1 by the sign of `δ̂`.
pub fn pair_probability(stats: &PairStats) -> f64 {
    let Some(var) = stats.variance() else {
        return 0.5;
    };
    let gap = stats.mean_gap();
    if var == 0.0 {
        return if gap > 0.0 {
            1.0
        } else if gap < 0.0 {
            0.0
        } else {
            0.5
        };
    }
    normal_cdf((stats.count as f64).sqrt() * gap / var.sqrt())
}

/// Upper-triangular table of [`PairStats`], one entry per unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    n: usize,
    stats: Vec<PairStats>,
}

impl PairTable {
    pub fn new(n: usize) -> Self {
        PairTable {
            n,
            stats: vec![PairStats::default(); n * n.saturating_sub(1) / 2],
        }
    }

    #[inline]
    fn slot(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b && b < self.n);
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// Statistics oriented as `(i, j)`: the stored sum is negated when `i > j`.
    pub fn get(&self, i: usize, j: usize) -> PairStats {
        assert_ne!(i, j, "pair needs two distinct players");
        if i < j {
            self.stats[self.slot(i, j)]
        } else {
            self.stats[self.slot(j, i)].reversed()
        }
    }

    /// Adds one joint round for every unordered pair within `players`.
    /// `deltas[p]` must hold this round's observation for each member `p`.
    pub fn update_complete(&mut self, players: Coalition, deltas: &[f64]) {
        let members: Vec<usize> = players.players().collect();
        for (idx, &a) in members.iter().enumerate() {
            for &b in &members[idx + 1..] {
                let slot = self.slot(a, b);
                self.stats[slot].push(deltas[a] - deltas[b]);
            }
        }
    }

    pub fn min_count(&self) -> u64 {
        self.stats.iter().map(|s| s.count).min().unwrap_or(u64::MAX)
    }

    /// Unordered pairs `(a, b)` with `a < b`, in slot order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &PairStats)> + '_ {
        (0..self.n)
            .flat_map(move |a| (a + 1..self.n).map(move |b| (a, b)))
            .zip(self.stats.iter())
    }
}

/// Estimates, counts and optional pair statistics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    players: Vec<PlayerStats>,
    pairs: Option<PairTable>,
}

impl EstimatorState {
    pub fn new(n: usize, track_pairs: bool) -> Self {
        EstimatorState {
            players: vec![PlayerStats::default(); n],
            pairs: track_pairs.then(|| PairTable::new(n)),
        }
    }

    pub fn n(&self) -> usize {
        self.players.len()
    }

    #[inline]
    pub fn record(&mut self, player: usize, value: f64) {
        self.players[player].push(value);
    }

    pub fn player(&self, player: usize) -> &PlayerStats {
        &self.players[player]
    }

    pub fn count(&self, player: usize) -> u64 {
        self.players[player].count
    }

    pub fn estimate(&self, player: usize) -> f64 {
        self.players[player].estimate()
    }

    pub fn estimates(&self) -> ShapleyVector {
        ShapleyVector(self.players.iter().map(PlayerStats::estimate).collect())
    }

    pub fn pairs(&self) -> Option<&PairTable> {
        self.pairs.as_ref()
    }

    pub fn update_pairs(&mut self, players: Coalition, deltas: &[f64]) {
        if let Some(table) = self.pairs.as_mut() {
            table.update_complete(players, deltas);
        }
    }

    /// Overwrites the statistics of one pair, oriented as `(i, j)`; used to
    /// build frozen states in tests.
    #[doc(hidden)]
    pub fn set_pair(&mut self, i: usize, j: usize, stats: PairStats) {
        let table = self
            .pairs
            .get_or_insert_with(|| PairTable::new(self.players.len()));
        let (a, b, s) = if i < j {
            (i, j, stats)
        } else {
            (j, i, stats.reversed())
        };
        let slot = table.slot(a, b);
        table.stats[slot] = s;
    }
}

/// The `k` players with the largest estimates; ties go to the lower index.
pub fn top_k_of(estimates: &[f64], k: usize) -> Result<Coalition> {
    let n = estimates.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| estimates[b].total_cmp(&estimates[a]).then(a.cmp(&b)));
    Ok(Coalition::from_players(n, order[..k].iter().copied()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    /// The sample variance was zero and the interval collapsed to a point.
    pub degenerate: bool,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Normal quantile for two-sided per-player intervals at level `δ / n`.
///
/// `δ >= 1` demands no confidence and yields 0, i.e. point intervals.
pub fn ci_multiplier(delta: f64, n: usize) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!(
            "confidence parameter must be in (0, 1], got {delta}"
        )));
    }
    if delta >= 1.0 {
        return Ok(0.0);
    }
    normal_quantile(1.0 - delta / (2.0 * n as f64))
}

/// `φ̂_i ± z σ̂_i / √M_i` for every player, `z` from [`ci_multiplier`].
pub fn ci_bounds(state: &EstimatorState, delta: f64) -> Result<Vec<Interval>> {
    let z = ci_multiplier(delta, state.n())?;
    state
        .players
        .iter()
        .enumerate()
        .map(|(p, stats)| {
            let var = stats.variance().ok_or_else(|| {
                Error::Domain(format!("player {} has fewer than two samples", p + 1))
            })?;
            let center = stats.estimate();
            let half = z * var.sqrt() / (stats.count as f64).sqrt();
            Ok(Interval {
                lower: center - half,
                upper: center + half,
                degenerate: var == 0.0,
            })
        })
        .collect()
}
