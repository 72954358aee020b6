//! Top-k estimators that spend their budget on the pair whose confidence
//! intervals overlap most, with an optional PAC stopping rule.

use super::cmcs::extended_from;
use super::state::{ci_bounds, top_k_of};
use super::{check_k, EstimatorState, Mode, RunOptions, RunResult, Session, Termination};
use crate::error::{Error, Result};
use crate::game::{Coalition, Game};
use crate::sampling::{CoalitionSampler, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtKParams {
    /// Warm-up rounds; at least 2 so that every interval is defined.
    pub m_min: u64,
    /// Overall confidence parameter, split evenly over the players.
    pub delta: f64,
}

impl Default for AtKParams {
    fn default() -> Self {
        AtKParams {
            m_min: 30,
            delta: 0.001,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCheck {
    pub stop: bool,
    /// Cross pair `(i, j)`, `i` predicted in the top-k and `j` outside, with
    /// the largest `UCB_j - LCB_i`; `None` when `k = n`.
    pub worst_pair: Option<(usize, usize)>,
    /// `max(0, UCB_j - LCB_i)` over all cross pairs.
    pub max_overlap: f64,
}

/// Stops once no excluded player's upper bound reaches more than `epsilon`
/// above an included player's lower bound. Ties in the worst pair go to the
/// lowest `(i, j)`.
pub fn stopping_condition(
    state: &EstimatorState,
    k: usize,
    delta: f64,
    epsilon: f64,
) -> Result<StopCheck> {
    let intervals = ci_bounds(state, delta)?;
    let top = top_k_of(&state.estimates(), k)?;
    let n = state.n();
    let mut worst: Option<((usize, usize), f64)> = None;
    for i in top.players() {
        for j in (0..n).filter(|&j| !top.contains(j)) {
            let raw = intervals[j].upper - intervals[i].lower;
            if worst.is_none_or(|(_, w)| raw > w) {
                worst = Some(((i, j), raw));
            }
        }
    }
    let max_overlap = worst.map_or(0.0, |(_, raw)| raw.max(0.0));
    Ok(StopCheck {
        stop: max_overlap <= epsilon,
        worst_pair: worst.map(|(pair, _)| pair),
        max_overlap,
    })
}

fn check_params(params: &AtKParams, mode: &Mode) -> Result<()> {
    if params.m_min < 2 {
        return Err(Error::Domain(format!(
            "warm-up needs at least 2 rounds, got m_min = {}",
            params.m_min
        )));
    }
    if params.delta.is_nan() || params.delta <= 0.0 {
        return Err(Error::Domain(format!(
            "delta must be positive, got {}",
            params.delta
        )));
    }
    if let Mode::Pac { epsilon, .. } = mode {
        if !(*epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!(
                "epsilon must be finite and >= 0, got {epsilon}"
            )));
        }
    }
    Ok(())
}

/// What the phase-2 loop should do next.
enum Next {
    Sample(usize, usize),
    Stop(Termination),
}

fn next_step(state: &EstimatorState, k: usize, params: &AtKParams, mode: &Mode) -> Result<Next> {
    let epsilon = match *mode {
        Mode::Pac { epsilon, .. } => epsilon,
        // the rule is ignored, only the worst pair matters
        Mode::FixedBudget(_) => f64::INFINITY,
    };
    let check = stopping_condition(state, k, params.delta, epsilon)?;
    match (mode, check.worst_pair) {
        (Mode::Pac { .. }, _) if check.stop => Ok(Next::Stop(Termination::StoppingRule)),
        (_, Some((i, j))) => Ok(Next::Sample(i, j)),
        // k = n: nothing left to separate
        (_, None) => Ok(Next::Stop(Termination::Budget)),
    }
}

/// CMCS@K: `m_min` full CMCS rounds, then rounds that evaluate `v(S)`,
/// `Δ'_i(S)` and `Δ'_j(S)` for the worst pair only (3 accesses, 2
/// observations) and update that pair's joint statistics.
///
/// In fixed-budget mode the run always spends down to `T`; in PAC mode it
/// ends when [`stopping_condition`] holds or the cap is reached.
pub fn run_cmcs_at_k<G: Game + ?Sized>(
    game: &G,
    mode: Mode,
    k: usize,
    params: AtKParams,
    rng: &mut RandomSource,
    opts: &RunOptions,
) -> Result<RunResult> {
    let n = game.n();
    check_k(n, k)?;
    check_params(&params, &mode)?;
    let mut session = Session::new(game, mode.limit(), opts);
    let mut state = EstimatorState::new(n, true);
    let mut sampler = CoalitionSampler::new(n);
    let mut deltas = vec![0.0; n];
    let grand = Coalition::grand(n);
    let mut round = 0;

    let termination = 'run: {
        while round < params.m_min {
            if !session.reserve(1, &state) {
                break 'run Termination::Budget;
            }
            let s = sampler.cmcs(rng);
            let v_s = session.eval(s);
            for (player, slot) in deltas.iter_mut().enumerate() {
                if !session.reserve(1, &state) {
                    round += 1;
                    break 'run Termination::Budget;
                }
                let delta = extended_from(&mut session, s, v_s, player);
                *slot = delta;
                session.observe(&mut state, round, player, delta);
            }
            state.update_pairs(grand, &deltas);
            round += 1;
        }
        loop {
            let (i, j) = match next_step(&state, k, &params, &mode)? {
                Next::Sample(i, j) => (i, j),
                Next::Stop(t) => break 'run t,
            };
            if !session.reserve(1, &state) {
                break 'run Termination::Budget;
            }
            let s = sampler.cmcs(rng);
            let v_s = session.eval(s);
            for player in [i, j] {
                if !session.reserve(1, &state) {
                    round += 1;
                    break 'run Termination::Budget;
                }
                let delta = extended_from(&mut session, s, v_s, player);
                deltas[player] = delta;
                session.observe(&mut state, round, player, delta);
            }
            state.update_pairs(Coalition::from_players(n, [i, j]), &deltas);
            round += 1;
        }
    };
    session.finish(&state, k, round, termination)
}

/// SamplingSHAP@K: the same protocol on isolated marginal contributions.
/// Warm-up draws `m_min` samples per player from the marginal law (2
/// accesses each); every later round draws one fresh sample for each
/// player of the worst pair (4 accesses).
pub fn run_sampling_shap_at_k<G: Game + ?Sized>(
    game: &G,
    mode: Mode,
    k: usize,
    params: AtKParams,
    rng: &mut RandomSource,
    opts: &RunOptions,
) -> Result<RunResult> {
    let n = game.n();
    check_k(n, k)?;
    check_params(&params, &mode)?;
    let mut session = Session::new(game, mode.limit(), opts);
    let mut state = EstimatorState::new(n, false);
    let mut sampler = CoalitionSampler::new(n);
    let mut round = 0;

    let mut sample = |session: &mut Session<'_, G>, state: &mut EstimatorState, round, player| {
        if !session.reserve(2, state) {
            return false;
        }
        let s = sampler.marginal(player, rng);
        let delta = session.eval(s.with(player)) - session.eval(s);
        session.observe(state, round, player, delta);
        true
    };

    let termination = 'run: {
        while round < params.m_min {
            for player in 0..n {
                if !sample(&mut session, &mut state, round, player) {
                    if player > 0 {
                        round += 1;
                    }
                    break 'run Termination::Budget;
                }
            }
            round += 1;
        }
        loop {
            let (i, j) = match next_step(&state, k, &params, &mode)? {
                Next::Sample(i, j) => (i, j),
                Next::Stop(t) => break 'run t,
            };
            for (idx, player) in [i, j].into_iter().enumerate() {
                if !sample(&mut session, &mut state, round, player) {
                    if idx > 0 {
                        round += 1;
                    }
                    break 'run Termination::Budget;
                }
            }
            round += 1;
        }
    };
    session.finish(&state, k, round, termination)
}
