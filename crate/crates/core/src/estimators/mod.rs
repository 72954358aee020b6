//! Fixed-budget and PAC estimators.
//!
//! Every estimator measures its budget in value-function accesses: each
//! request to the oracle costs one unit, including requests for the empty
//! and grand coalitions that the oracle serves from cache without charging
//! a metered call. [`RunResult::oracle_calls`] reports the metered count.

mod at_k;
mod baselines;
mod cmcs;
mod state;

use std::fmt;
use std::str::FromStr;

pub use at_k::{run_cmcs_at_k, run_sampling_shap_at_k, stopping_condition, AtKParams, StopCheck};
pub use baselines::{run_appro_shapley, run_identical, run_independent, run_same_length};
pub use cmcs::{run_cmcs, run_greedy_cmcs, select_players, Selection};
pub use state::{
    ci_bounds, ci_multiplier, pair_probability, top_k_of, EstimatorState, Interval, PairStats,
    PairTable, PlayerStats,
};

use crate::error::{Error, Result};
use crate::game::{BudgetedOracle, Coalition, Game, ShapleyVector};
use crate::sampling::RandomSource;

/// Default safety cap on accesses for PAC-mode runs.
pub const DEFAULT_PAC_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Budget marks at which estimates are snapshotted.
    pub checkpoints: Vec<u64>,
    /// Keep every observation in [`RunResult::trace`].
    pub record_trace: bool,
}

impl RunOptions {
    pub fn with_checkpoints(marks: impl IntoIterator<Item = u64>) -> Self {
        RunOptions {
            checkpoints: marks.into_iter().collect(),
            record_trace: false,
        }
    }

    pub fn traced() -> Self {
        RunOptions {
            checkpoints: Vec::new(),
            record_trace: true,
        }
    }
}

/// Estimates as they stood when the run could no longer stay within `budget`.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub budget: u64,
    pub budget_used: u64,
    pub estimates: ShapleyVector,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub round: u64,
    pub player: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    Budget,
    StoppingRule,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Budget => "budget",
            Termination::StoppingRule => "stopping_rule",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub estimates: ShapleyVector,
    pub top_k: Coalition,
    /// Accesses spent, never above the budget.
    pub budget_used: u64,
    /// Metered (non-cached) oracle calls, at most `budget_used`.
    pub oracle_calls: u64,
    pub rounds: u64,
    pub counts: Vec<u64>,
    pub checkpoints: Vec<Checkpoint>,
    pub terminated_by: Termination,
    pub trace: Vec<Observation>,
}

/// Budget bookkeeping, checkpointing and tracing for one run.
pub(crate) struct Session<'g, G: Game + ?Sized> {
    oracle: BudgetedOracle<'g, G>,
    limit: u64,
    marks: Vec<u64>,
    next_mark: usize,
    checkpoints: Vec<Checkpoint>,
    trace: Option<Vec<Observation>>,
}

impl<'g, G: Game + ?Sized> Session<'g, G> {
    pub(crate) fn new(game: &'g G, limit: u64, opts: &RunOptions) -> Self {
        let mut marks = opts.checkpoints.clone();
        marks.sort_unstable();
        marks.dedup();
        Session {
            oracle: BudgetedOracle::new(game, limit),
            limit,
            marks,
            next_mark: 0,
            checkpoints: Vec::new(),
            trace: opts.record_trace.then(Vec::new),
        }
    }

    pub(crate) fn used(&self) -> u64 {
        self.oracle.accesses()
    }

    pub(crate) fn empty_value(&self) -> f64 {
        self.oracle.empty_value()
    }

    /// Claims room for `cost` accesses. Snapshots every mark the claim would
    /// cross before returning; returns `false` if the claim exceeds the limit.
    pub(crate) fn reserve(&mut self, cost: u64, state: &EstimatorState) -> bool {
        let used = self.used();
        if used + cost > self.limit {
            return false;
        }
        while self.next_mark < self.marks.len() && used + cost > self.marks[self.next_mark] {
            self.snapshot(self.marks[self.next_mark], state);
            self.next_mark += 1;
        }
        true
    }

    fn snapshot(&mut self, mark: u64, state: &EstimatorState) {
        self.checkpoints.push(Checkpoint {
            budget: mark,
            budget_used: self.used(),
            estimates: state.estimates(),
        });
    }

    /// Evaluates a coalition whose access was reserved.
    #[inline]
    pub(crate) fn eval(&mut self, coalition: Coalition) -> f64 {
        self.oracle
            .evaluate(coalition)
            .expect("access was reserved within the budget")
    }

    #[inline]
    pub(crate) fn observe(
        &mut self,
        state: &mut EstimatorState,
        round: u64,
        player: usize,
        value: f64,
    ) {
        state.record(player, value);
        if let Some(trace) = self.trace.as_mut() {
            trace.push(Observation {
                round,
                player,
                value,
            });
        }
    }

    pub(crate) fn finish(
        mut self,
        state: &EstimatorState,
        k: usize,
        rounds: u64,
        terminated_by: Termination,
    ) -> Result<RunResult> {
        while self.next_mark < self.marks.len() {
            self.snapshot(self.marks[self.next_mark], state);
            self.next_mark += 1;
        }
        let estimates = state.estimates();
        let top_k = top_k_of(&estimates, k)?;
        Ok(RunResult {
            top_k,
            estimates,
            budget_used: self.oracle.accesses(),
            oracle_calls: self.oracle.calls_used(),
            rounds,
            counts: (0..state.n()).map(|p| state.count(p)).collect(),
            checkpoints: self.checkpoints,
            terminated_by,
            trace: self.trace.unwrap_or_default(),
        })
    }
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::InvalidK { k, n })
    } else {
        Ok(())
    }
}

/// Budget regime of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Spend at most this many accesses.
    FixedBudget(u64),
    /// Stop once the confidence intervals separate to within `epsilon`, or
    /// at `max_budget` accesses.
    Pac { epsilon: f64, max_budget: u64 },
}

impl Mode {
    pub fn limit(&self) -> u64 {
        match *self {
            Mode::FixedBudget(t) => t,
            Mode::Pac { max_budget, .. } => max_budget,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Independent,
    SameLength,
    Identical,
    Cmcs,
    ApproShapley,
    GreedyCmcs { m_min: u64 },
    CmcsAtK(AtKParams),
    SamplingShapAtK(AtKParams),
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Independent => "independent",
            Algorithm::SameLength => "same_length",
            Algorithm::Identical => "identical",
            Algorithm::Cmcs => "cmcs",
            Algorithm::ApproShapley => "appro_shapley",
            Algorithm::GreedyCmcs { .. } => "greedy_cmcs",
            Algorithm::CmcsAtK(_) => "cmcs_at_k",
            Algorithm::SamplingShapAtK(_) => "sampling_shap_at_k",
        }
    }

    pub fn supports_pac(&self) -> bool {
        matches!(self, Algorithm::CmcsAtK(_) | Algorithm::SamplingShapAtK(_))
    }

    /// Runs the algorithm. PAC mode is only accepted by the @K variants.
    pub fn run<G: Game + ?Sized>(
        &self,
        game: &G,
        mode: Mode,
        k: usize,
        rng: &mut RandomSource,
        opts: &RunOptions,
    ) -> Result<RunResult> {
        let fixed = |mode: Mode| match mode {
            Mode::FixedBudget(t) => Ok(t),
            Mode::Pac { .. } => Err(Error::Domain(format!(
                "{} has no stopping rule and needs a fixed budget",
                self.name()
            ))),
        };
        match *self {
            Algorithm::Independent => run_independent(game, fixed(mode)?, k, rng, opts),
            Algorithm::SameLength => run_same_length(game, fixed(mode)?, k, rng, opts),
            Algorithm::Identical => run_identical(game, fixed(mode)?, k, rng, opts),
            Algorithm::Cmcs => run_cmcs(game, fixed(mode)?, k, rng, opts),
            Algorithm::ApproShapley => run_appro_shapley(game, fixed(mode)?, k, rng, opts),
            Algorithm::GreedyCmcs { m_min } => {
                run_greedy_cmcs(game, fixed(mode)?, k, m_min, rng, opts)
            }
            Algorithm::CmcsAtK(params) => run_cmcs_at_k(game, mode, k, params, rng, opts),
            Algorithm::SamplingShapAtK(params) => {
                run_sampling_shap_at_k(game, mode, k, params, rng, opts)
            }
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::GreedyCmcs { m_min } => write!(f, "greedy_cmcs:m_min={m_min}"),
            Algorithm::CmcsAtK(p) | Algorithm::SamplingShapAtK(p) => {
                write!(f, "{}:m_min={},delta={}", self.name(), p.m_min, p.delta)
            }
            _ => f.write_str(self.name()),
        }
    }
}

/// Parses `name` or `name:key=value,key=value` with keys `m_min` and `delta`.
impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let mut m_min = None;
        let mut delta = None;
        for kv in params.split(',').filter(|kv| !kv.is_empty()) {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
            match key.trim() {
                "m_min" => {
                    m_min = Some(
                        value
                            .trim()
                            .parse::<u64>()
                            .map_err(|e| format!("m_min: {e}"))?,
                    )
                }
                "delta" => {
                    delta = Some(
                        value
                            .trim()
                            .parse::<f64>()
                            .map_err(|e| format!("delta: {e}"))?,
                    )
                }
                other => return Err(format!("unknown parameter `{other}`")),
            }
        }
        let at_k = || {
            let d = AtKParams::default();
            AtKParams {
                m_min: m_min.unwrap_or(d.m_min),
                delta: delta.unwrap_or(d.delta),
            }
        };
        let plain = |alg: Algorithm| {
            if m_min.is_some() || delta.is_some() {
                Err(format!("`{name}` takes no parameters"))
            } else {
                Ok(alg)
            }
        };
        match name.trim() {
            "independent" => plain(Algorithm::Independent),
            "same_length" => plain(Algorithm::SameLength),
            "identical" => plain(Algorithm::Identical),
            "cmcs" => plain(Algorithm::Cmcs),
            "appro_shapley" => plain(Algorithm::ApproShapley),
            "greedy_cmcs" => {
                if delta.is_some() {
                    return Err("greedy_cmcs takes only m_min".into());
                }
                Ok(Algorithm::GreedyCmcs {
                    m_min: m_min.unwrap_or(AtKParams::default().m_min),
                })
            }
            "cmcs_at_k" => Ok(Algorithm::CmcsAtK(at_k())),
            "sampling_shap_at_k" => Ok(Algorithm::SamplingShapAtK(at_k())),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}
