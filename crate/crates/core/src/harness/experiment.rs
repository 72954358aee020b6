//! The `bench` and `pac` drivers.

use std::io::Write;
use std::path::Path;

use super::aggregate::{summarize, GroupSummary, MeanSe};
use super::config::ExperimentConfig;
use super::games::{GameSpec, SharedGame};
use super::rows::{ResultRow, ResultWriter};
use crate::batch::RunSpec;
use crate::error::Result;
use crate::estimators::{top_k_of, Algorithm, Mode, RunOptions, Termination};
use crate::game::{eligible_sets, exact_shapley, EligibleSets, ShapleyVector, TIE_TOLERANCE};
use crate::metrics::score;
use crate::par::{map_indices, Execution};
use crate::sampling::derive_seed;

/// Runs handed to the workers at a time; rows are written after each chunk.
const CHUNK: usize = 256;

struct Loaded {
    name: String,
    game: SharedGame,
    phi: ShapleyVector,
    eligible: Vec<EligibleSets>,
}

fn load(config: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Vec<Loaded>> {
    config
        .games
        .iter()
        .map(|spec: &GameSpec| {
            let game = spec.build(base_dir)?;
            let n = game.n();
            if let Some(&k) = config.k_values.iter().find(|&&k| k > n) {
                return Err(config.error("k", format!("k = {k} exceeds the {n} players of {spec}")));
            }
            let phi = exact_shapley(&*game)?;
            let eligible = config
                .k_values
                .iter()
                .map(|&k| eligible_sets(&phi, k))
                .collect::<Result<_>>()?;
            Ok(Loaded {
                name: spec.to_string(),
                game,
                phi,
                eligible,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Job {
    game: usize,
    algorithm: usize,
    k: usize,
    run: usize,
    ordinal: u64,
}

/// Every `(game, algorithm, k, run)` in output order; the ordinal seeds
/// the run.
fn jobs(config: &ExperimentConfig) -> Vec<Job> {
    let mut out = Vec::new();
    for game in 0..config.games.len() {
        for algorithm in 0..config.algorithms.len() {
            for k in 0..config.k_values.len() {
                for run in 0..config.runs {
                    let ordinal = out.len() as u64;
                    out.push(Job {
                        game,
                        algorithm,
                        k,
                        run,
                        ordinal,
                    });
                }
            }
        }
    }
    out
}

/// Runs jobs chunk by chunk and streams their rows. On the first failing
/// job the rows before it are kept and the output gets an incomplete
/// trailer.
fn drive<W, F>(out: W, all: &[Job], exec: Execution, run_job: F) -> Result<Vec<ResultRow>>
where
    W: Write,
    F: Fn(&Job) -> Result<Vec<ResultRow>> + Sync + Send,
{
    let mut writer = ResultWriter::new(out)?;
    let mut rows = Vec::new();
    for chunk in all.chunks(CHUNK) {
        let results = map_indices(exec, chunk.len(), |i| run_job(&chunk[i]));
        for result in results {
            match result {
                Ok(job_rows) => {
                    for row in &job_rows {
                        writer.write(row)?;
                    }
                    rows.extend(job_rows);
                }
                Err(e) => {
                    writer.abandon(&e.to_string())?;
                    return Err(e);
                }
            }
        }
    }
    writer.finish()?.flush()?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: usize,
    pub groups: Vec<GroupSummary>,
}

/// Fixed-budget experiment: one row per `(game, algorithm, k, run, T)`,
/// with every budget in the config read off a single run's checkpoints.
pub fn run_bench<W: Write>(
    config: &ExperimentConfig,
    base_dir: Option<&Path>,
    out: W,
    exec: Execution,
) -> Result<BenchReport> {
    let Some(&max_budget) = config.budgets.last() else {
        return Err(config.error("budgets", "bench needs at least one budget"));
    };
    let games = load(config, base_dir)?;
    let all = jobs(config);
    let rows = drive(out, &all, exec, |job| {
        let g = &games[job.game];
        let k = config.k_values[job.k];
        let algorithm = &config.algorithms[job.algorithm];
        let seed = derive_seed(config.base_seed, job.ordinal);
        let spec = RunSpec::new(*algorithm, Mode::FixedBudget(max_budget), k)
            .with_options(RunOptions::with_checkpoints(config.budgets.iter().copied()));
        let result = spec.run_seeded(&*g.game, seed)?;
        result
            .checkpoints
            .iter()
            .map(|cp| {
                let top = top_k_of(&cp.estimates, k)?;
                let s = score(&g.phi, &g.eligible[job.k], top, &cp.estimates)?;
                Ok(ResultRow {
                    game: g.name.clone(),
                    algorithm: algorithm.to_string(),
                    n: g.game.n(),
                    k,
                    budget: cp.budget,
                    run: job.run,
                    seed,
                    budget_used: cp.budget_used,
                    eps_inc_exc: s.eps_inc_exc,
                    ratio_precision: s.ratio_precision,
                    binary_precision: s.binary_precision,
                    mse: s.mse,
                    terminated_by: Termination::Budget,
                })
            })
            .collect()
    })?;
    Ok(BenchReport {
        rows: rows.len(),
        groups: summarize(&rows),
    })
}

/// PAC outcome of one `(game, algorithm, k)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PacSummary {
    pub game: String,
    pub algorithm: String,
    pub k: usize,
    pub runs: usize,
    /// Accesses until stopping.
    pub calls: MeanSe,
    /// Share of runs whose returned set is within `ε`.
    pub coverage: f64,
    /// Share of runs ended by the stopping rule rather than the cap.
    pub stopped: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacReport {
    pub rows: usize,
    pub epsilon: f64,
    pub summaries: Vec<PacSummary>,
}

/// PAC experiment: each run stops on its own rule or at `max_budget`;
/// one row per `(game, algorithm, k, run)` with `T` set to the cap.
pub fn run_pac<W: Write>(
    config: &ExperimentConfig,
    base_dir: Option<&Path>,
    out: W,
    exec: Execution,
) -> Result<PacReport> {
    let Some(epsilon) = config.epsilon else {
        return Err(config.error("epsilon", "pac needs epsilon"));
    };
    if let Some(alg) = config.algorithms.iter().find(|a| !a.supports_pac()) {
        return Err(config.error(
            "algorithms",
            format!("{alg} has no stopping rule; use cmcs_at_k or sampling_shap_at_k"),
        ));
    }
    let games = load(config, base_dir)?;
    let mode = Mode::Pac {
        epsilon,
        max_budget: config.max_budget,
    };
    let all = jobs(config);
    let rows = drive(out, &all, exec, |job| {
        let g = &games[job.game];
        let k = config.k_values[job.k];
        let algorithm: &Algorithm = &config.algorithms[job.algorithm];
        let seed = derive_seed(config.base_seed, job.ordinal);
        let result = RunSpec::new(*algorithm, mode, k).run_seeded(&*g.game, seed)?;
        let s = score(&g.phi, &g.eligible[job.k], result.top_k, &result.estimates)?;
        Ok(vec![ResultRow {
            game: g.name.clone(),
            algorithm: algorithm.to_string(),
            n: g.game.n(),
            k,
            budget: config.max_budget,
            run: job.run,
            seed,
            budget_used: result.budget_used,
            eps_inc_exc: s.eps_inc_exc,
            ratio_precision: s.ratio_precision,
            binary_precision: s.binary_precision,
            mse: s.mse,
            terminated_by: result.terminated_by,
        }])
    })?;
    let summaries = summarize(&rows)
        .into_iter()
        .map(|group| {
            let members: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| {
                    r.game == group.game && r.algorithm == group.algorithm && r.k == group.k
                })
                .collect();
            let share = |pred: &dyn Fn(&ResultRow) -> bool| {
                members.iter().filter(|r| pred(r)).count() as f64 / members.len() as f64
            };
            PacSummary {
                coverage: share(&|r| r.eps_inc_exc <= epsilon + TIE_TOLERANCE),
                stopped: share(&|r| r.terminated_by == Termination::StoppingRule),
                game: group.game,
                algorithm: group.algorithm,
                k: group.k,
                runs: group.runs,
                calls: group.budget_used,
            }
        })
        .collect();
    Ok(PacReport {
        rows: rows.len(),
        epsilon,
        summaries,
    })
}
