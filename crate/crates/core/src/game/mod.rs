//! Cooperative games, the budget-metered oracle and exhaustive solvers.
//!
//! Players are zero-based internally; [`Coalition`]'s `Display` and the CLI
//! use one-based labels.

mod coalition;
mod eligible;
mod exact;
mod oracle;
mod tabular;

use std::sync::Arc;

pub use coalition::{Coalition, MAX_PLAYERS};
pub use eligible::{eligible_sets, EligibleSets, TIE_TOLERANCE};
pub(crate) use exact::{check_exact, shapley_from_table, value_table_with};
pub use exact::{
    exact_shapley, exact_shapley_extended, exact_shapley_extended_with, exact_shapley_with,
    value_table, ShapleyVector, MAX_EXACT_PLAYERS,
};
pub use oracle::BudgetedOracle;
pub use tabular::{load_tabular_game, parse_tabular_game, write_tabular_game, TabularGame};

use crate::error::{Error, Result};
use crate::sampling::RandomSource;

/// A cooperative game `(N, v)` with `v(empty) = 0`.
///
/// `value` must be deterministic and is called concurrently by the
/// parallel solvers.
pub trait Game: Send + Sync {
    fn n(&self) -> usize;

    fn value(&self, coalition: Coalition) -> f64;
}

impl<G: Game + ?Sized> Game for &G {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn value(&self, coalition: Coalition) -> f64 {
        (**self).value(coalition)
    }
}

impl<G: Game + ?Sized> Game for Box<G> {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn value(&self, coalition: Coalition) -> f64 {
        (**self).value(coalition)
    }
}

impl<G: Game + ?Sized> Game for Arc<G> {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn value(&self, coalition: Coalition) -> f64 {
        (**self).value(coalition)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PLAYERS {
        Err(Error::InvalidSize(n))
    } else {
        Ok(())
    }
}

/// `v(S) = weight` if `carrier ⊆ S`, else 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierGame {
    carrier: Coalition,
    weight: f64,
}

impl CarrierGame {
    pub fn carrier(&self) -> Coalition {
        self.carrier
    }
}

impl Game for CarrierGame {
    fn n(&self) -> usize {
        self.carrier.n()
    }

    fn value(&self, coalition: Coalition) -> f64 {
        if self.carrier.is_subset_of(coalition) {
            self.weight
        } else {
            0.0
        }
    }
}

/// Only the grand coalition has worth (1); every player's value is `1/n`.
pub fn make_unanimity_game(n: usize) -> Result<CarrierGame> {
    check_size(n)?;
    Ok(CarrierGame {
        carrier: Coalition::grand(n),
        weight: 1.0,
    })
}

pub fn make_carrier_game(n: usize, carrier: Coalition) -> Result<CarrierGame> {
    check_size(n)?;
    if carrier.n() != n {
        return Err(Error::Domain(format!(
            "carrier is over {} players, game has {n}",
            carrier.n()
        )));
    }
    if carrier.is_empty() {
        return Err(Error::InvalidCarrier);
    }
    Ok(CarrierGame {
        carrier,
        weight: 1.0,
    })
}

/// `v(S) = max_{i in S} cost_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AirportGame {
    costs: Vec<f64>,
}

impl AirportGame {
    pub fn costs(&self) -> &[f64] {
        &self.costs
    }
}

impl Game for AirportGame {
    fn n(&self) -> usize {
        self.costs.len()
    }

    fn value(&self, coalition: Coalition) -> f64 {
        coalition
            .players()
            .map(|p| self.costs[p])
            .fold(0.0, f64::max)
    }
}

pub fn make_airport_game(costs: &[f64]) -> Result<AirportGame> {
    check_size(costs.len())?;
    if let Some(c) = costs.iter().find(|c| !c.is_finite() || **c < 0.0) {
        return Err(Error::Domain(format!(
            "airport costs must be finite and >= 0, got {c}"
        )));
    }
    Ok(AirportGame {
        costs: costs.to_vec(),
    })
}

/// `v(S) = sum_t w_t [U_t ⊆ S]` over non-empty carriers `U_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumOfUnanimityGame {
    n: usize,
    terms: Vec<(Coalition, f64)>,
}

impl SumOfUnanimityGame {
    pub fn new(n: usize, terms: Vec<(Coalition, f64)>) -> Result<Self> {
        check_size(n)?;
        for (carrier, _) in &terms {
            if carrier.is_empty() {
                return Err(Error::InvalidCarrier);
            }
            if carrier.n() != n {
                return Err(Error::Domain("carrier player count mismatch".into()));
            }
        }
        Ok(SumOfUnanimityGame { n, terms })
    }

    pub fn terms(&self) -> &[(Coalition, f64)] {
        &self.terms
    }
}

impl Game for SumOfUnanimityGame {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, coalition: Coalition) -> f64 {
        self.terms
            .iter()
            .filter(|(carrier, _)| carrier.is_subset_of(coalition))
            .map(|(_, w)| w)
            .sum()
    }
}

/// Random signed sum-of-unanimity game: carriers uniform over non-empty
/// subsets, weights uniform on `[-1, 1)`.
pub fn make_random_sou_game(n: usize, terms: usize, seed: u64) -> Result<SumOfUnanimityGame> {
    check_size(n)?;
    if terms == 0 {
        return Err(Error::Domain("need at least one term".into()));
    }
    let mut rng = RandomSource::new(seed);
    let nonempty = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let terms = (0..terms)
        .map(|_| {
            let mask = 1 + rng.below(nonempty);
            let weight = 2.0 * rng.unit() - 1.0;
            (Coalition::from_mask(n, mask), weight)
        })
        .collect();
    SumOfUnanimityGame::new(n, terms)
}

/// Wraps a closure as a game, shifting it so the empty coalition is worth 0.
pub struct FnGame<F> {
    n: usize,
    offset: f64,
    f: F,
}

impl<F> FnGame<F>
where
    F: Fn(Coalition) -> f64 + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Result<Self> {
        check_size(n)?;
        let offset = f(Coalition::empty(n));
        Ok(FnGame { n, offset, f })
    }
}

impl<F> Game for FnGame<F>
where
    F: Fn(Coalition) -> f64 + Send + Sync,
{
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, coalition: Coalition) -> f64 {
        if coalition.is_empty() {
            0.0
        } else {
            (self.f)(coalition) - self.offset
        }
    }
}
