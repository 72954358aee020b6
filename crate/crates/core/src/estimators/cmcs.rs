//! Comparable marginal contributions sampling and its greedy, pair-driven
//! refinement.

use super::{check_k, EstimatorState, RunOptions, RunResult, Session, Termination};
use crate::error::Result;
use crate::game::{Coalition, Game};
use crate::sampling::{CoalitionSampler, RandomSource};

use super::state::{pair_probability, top_k_of};

/// One coalition per round with `v(S)` shared across players, so a round
/// costs `n + 1` accesses and yields `n` observations. Runs
/// `⌊T / (n + 1)⌋` rounds.
pub fn run_cmcs<G: Game + ?Sized>(
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
    while session.reserve(n as u64 + 1, &state) {
        let s = sampler.cmcs(rng);
        let v_s = session.eval(s);
        for player in 0..n {
            let delta = extended_from(&mut session, s, v_s, player);
            session.observe(&mut state, round, player, delta);
        }
        round += 1;
    }
    session.finish(&state, k, round, Termination::Budget)
}

/// `Δ'_i(S)` given the already evaluated `v(S)`: one further access.
#[inline]
pub(crate) fn extended_from<G: Game + ?Sized>(
    session: &mut Session<'_, G>,
    s: Coalition,
    v_s: f64,
    player: usize,
) -> f64 {
    if s.contains(player) {
        v_s - session.eval(s.without(player))
    } else {
        session.eval(s.with(player)) - v_s
    }
}

/// Players chosen for one Greedy CMCS round.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub players: Coalition,
    /// Sampled cross pairs `(i, j)` with `i` in the predicted top-k.
    pub pairs: Vec<(usize, usize)>,
    /// Some pair had fewer than `m_min` joint rounds, so everyone was chosen.
    pub warm_up: bool,
}

/// Chooses which players to sample next.
///
/// Until every pair has `m_min` joint rounds all players are selected. Then
/// each cross pair `(i, j)` between the predicted top-k and the rest is
/// scored by [`pair_probability`] and kept with probability
/// `(p - p_min) / (p_max - p_min)`, drawing in lexicographic pair order. If
/// all scores coincide, selecting is pointless and all players are chosen.
pub fn select_players(
    state: &EstimatorState,
    k: usize,
    m_min: u64,
    rng: &mut RandomSource,
) -> Result<Selection> {
    let n = state.n();
    let all = Selection {
        players: Coalition::grand(n),
        pairs: Vec::new(),
        warm_up: false,
    };
    let table = match state.pairs() {
        Some(table) if n >= 2 => table,
        _ => return Ok(all),
    };
    if table.min_count() < m_min {
        return Ok(Selection {
            warm_up: true,
            ..all
        });
    }
    let top = top_k_of(&state.estimates(), k)?;
    let mut scored = Vec::with_capacity(k * (n - k));
    for i in top.players() {
        for j in (0..n).filter(|&j| !top.contains(j)) {
            scored.push(((i, j), pair_probability(&table.get(i, j))));
        }
    }
    scored.sort_by_key(|&((i, j), _)| (i.min(j), i.max(j)));
    let (p_min, p_max) = scored
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, p)| {
            (lo.min(p), hi.max(p))
        });
    if scored.is_empty() || p_max == p_min {
        return Ok(all);
    }
    let span = p_max - p_min;
    let mut players = Coalition::empty(n);
    let mut pairs = Vec::new();
    for ((i, j), p) in scored {
        let keep = if p == p_max {
            true
        } else if p == p_min {
            false
        } else {
            rng.bernoulli((p - p_min) / span)
        };
        if keep {
            players = players.with(i).with(j);
            pairs.push((i, j));
        }
    }
    Ok(Selection {
        players,
        pairs,
        warm_up: false,
    })
}

/// CMCS restricted each round to the players of [`select_players`]. The
/// round pays one access for `v(S)` and one per selected player; pair
/// statistics over the whole selected set are updated once the round
/// completes. The run stops the moment the next access would exceed `T`.
pub fn run_greedy_cmcs<G: Game + ?Sized>(
    game: &G,
    budget: u64,
    k: usize,
    m_min: u64,
    rng: &mut RandomSource,
    opts: &RunOptions,
) -> Result<RunResult> {
    let n = game.n();
    check_k(n, k)?;
    let mut session = Session::new(game, budget, opts);
    let mut state = EstimatorState::new(n, true);
    let mut sampler = CoalitionSampler::new(n);
    let mut deltas = vec![0.0; n];
    let mut round = 0;
    'rounds: loop {
        let s = sampler.cmcs(rng);
        if !session.reserve(1, &state) {
            break;
        }
        let v_s = session.eval(s);
        let selection = select_players(&state, k, m_min, rng)?;
        for player in selection.players.players() {
            if !session.reserve(1, &state) {
                round += 1;
                break 'rounds;
            }
            let delta = extended_from(&mut session, s, v_s, player);
            deltas[player] = delta;
            session.observe(&mut state, round, player, delta);
        }
        state.update_pairs(selection.players, &deltas);
        round += 1;
    }
    session.finish(&state, k, round, Termination::Budget)
}
