//! The sampler ladder from fully independent marginal contributions up to
//! a shared coalition per round, plus permutation sampling (ApproShapley).

use super::{check_k, EstimatorState, RunOptions, RunResult, Session, Termination};
use crate::error::Result;
use crate::game::{Coalition, Game};
use crate::sampling::{CoalitionSampler, RandomSource};

/// Per round, every player draws its own coalition from the marginal law
/// and pays two accesses for `v(S ∪ {i}) - v(S)`. Players are served
/// round-robin until the budget runs out, so the last round may be partial.
pub fn run_independent<G: Game + ?Sized>(
    game: &G,
    budget: u64,
    k: usize,
    rng: &mut RandomSource,
    opts: &RunOptions,
) -> Result<RunResult> {
    let n = game.n();
    check_k(n, k)?;
    let mut session = Session::new(game, budget, opts);
    let mut state = EstimatorState::new(n, false);
    let mut sampler = CoalitionSampler::new(n);
    let mut round = 0;
    'rounds: loop {
        for player in 0..n {
            if !session.reserve(2, &state) {
                break 'rounds;
            }
            let s = sampler.marginal(player, rng);
            let delta = session.eval(s.with(player)) - session.eval(s);
            session.observe(&mut state, round, player, delta);
        }
        round += 1;
    }
    session.finish(&state, k, round, Termination::Budget)
}

/// Like [`run_independent`], but all players of a round share one coalition
/// size drawn uniformly from `0..n`.
pub fn run_same_length<G: Game + ?Sized>(
    game: &G,
    budget: u64,
    k: usize,
    rng: &mut RandomSource,
    opts: &RunOptions,
) -> Result<RunResult> {
    let n = game.n();
    check_k(n, k)?;
    let mut session = Session::new(game, budget, opts);
    let mut state = EstimatorState::new(n, false);
    let mut sampler = CoalitionSampler::new(n);
    let mut round = 0;
    'rounds: loop {
        if !session.reserve(2, &state) {
            break;
        }
        let size = rng.index(n);
        for player in 0..n {
            if !session.reserve(2, &state) {
                break 'rounds;
            }
            let s = sampler.subset_of_size(size, Some(player), rng);
            let delta = session.eval(s.with(player)) - session.eval(s);
            session.observe(&mut state, round, player, delta);
        }
        round += 1;
    }
    session.finish(&state, k, round, Termination::Budget)
}

#[inline]
fn extended_contribution<G: Game + ?Sized>(
    session: &mut Session<'_, G>,
    s: Coalition,
    player: usize,
) -> f64 {
    session.eval(s.with(player)) - session.eval(s.without(player))
}

/// One coalition per round from the CMCS law; each player's extended
/// marginal contribution is evaluated with two fresh accesses, `2n` per
/// round. Only complete rounds are run.
pub fn run_identical<G: Game + ?Sized>(
    game: &G,
    budget: u64,
    k: usize,
    rng: &mut RandomSource,
    opts: &RunOptions,
) -> Result<RunResult> {
    let n = game.n();
    check_k(n, k)?;
    let mut session = Session::new(game, budget, opts);
    let mut state = EstimatorState::new(n, false);
    let mut sampler = CoalitionSampler::new(n);
    let mut round = 0;
    while session.reserve(2 * n as u64, &state) {
        let s = sampler.cmcs(rng);
        for player in 0..n {
            let delta = extended_contribution(&mut session, s, player);
            session.observe(&mut state, round, player, delta);
        }
        round += 1;
    }
    session.finish(&state, k, round, Termination::Budget)
}

/// Castro et al.'s permutation sampling: walk a random ordering, charging
/// one access per prefix and reusing the previous prefix's worth. The empty
/// prefix is read from the oracle cache. A permutation starts only when `n`
/// accesses remain, so up to `n - 1` accesses of the budget go unspent.
pub fn run_appro_shapley<G: Game + ?Sized>(
    game: &G,
    budget: u64,
    k: usize,
    rng: &mut RandomSource,
    opts: &RunOptions,
) -> Result<RunResult> {
    let n = game.n();
    check_k(n, k)?;
    let mut session = Session::new(game, budget, opts);
    let mut state = EstimatorState::new(n, false);
    let mut sampler = CoalitionSampler::new(n);
    let mut order = Vec::with_capacity(n);
    let mut round = 0;
    // only whole permutations: a cut-off one would over-sample early positions
    while session.reserve(n as u64, &state) {
        order.clear();
        order.extend_from_slice(sampler.permutation(rng));
        let mut prefix = Coalition::empty(n);
        let mut previous = session.empty_value();
        for &player in &order {
            prefix = prefix.with(player);
            let worth = session.eval(prefix);
            session.observe(&mut state, round, player, worth - previous);
            previous = worth;
        }
        round += 1;
    }
    session.finish(&state, k, round, Termination::Budget)
}
