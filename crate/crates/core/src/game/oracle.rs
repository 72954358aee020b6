use super::{Coalition, Game};
use crate::error::{Error, Result};

/// Budget-metered access to a game.
///
/// `v(empty)` and `v(N)` are evaluated once at construction and served from
/// cache afterwards without charge. Every other evaluation is charged one
/// call, duplicates included. `accesses` counts every request, cached or
/// not; estimators measure their budget in accesses.
pub struct BudgetedOracle<'g, G: Game + ?Sized> {
    game: &'g G,
    limit: u64,
    calls: u64,
    accesses: u64,
    empty_value: f64,
    grand_value: f64,
    grand_mask: u64,
}

impl<'g, G: Game + ?Sized> BudgetedOracle<'g, G> {
    pub fn new(game: &'g G, limit: u64) -> Self {
        let n = game.n();
        BudgetedOracle {
            game,
            limit,
            calls: 0,
            accesses: 0,
            empty_value: game.value(Coalition::empty(n)),
            grand_value: game.value(Coalition::grand(n)),
            grand_mask: Coalition::grand(n).mask(),
        }
    }

    pub fn n(&self) -> usize {
        self.game.n()
    }

    pub fn game(&self) -> &'g G {
        self.game
    }

    /// Cached worth of the empty coalition, read without an access.
    pub fn empty_value(&self) -> f64 {
        self.empty_value
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Charged (non-cached) evaluations so far.
    pub fn calls_used(&self) -> u64 {
        self.calls
    }

    /// All evaluation requests so far, cached ones included.
    pub fn accesses(&self) -> u64 {
        self.accesses
    }

    pub fn evaluate(&mut self, coalition: Coalition) -> Result<f64> {
        debug_assert_eq!(coalition.n(), self.n());
        let mask = coalition.mask();
        if mask == 0 {
            self.accesses += 1;
            return Ok(self.empty_value);
        }
        if mask == self.grand_mask {
            self.accesses += 1;
            return Ok(self.grand_value);
        }
        if self.calls >= self.limit {
            return Err(Error::BudgetExhausted { limit: self.limit });
        }
        self.calls += 1;
        self.accesses += 1;
        Ok(self.game.value(coalition))
    }
}
