//! Many seeded repetitions of one estimator configuration.

use crate::error::Result;
use crate::estimators::{Algorithm, Mode, RunOptions, RunResult};
use crate::game::Game;
use crate::par::{map_indices, Execution};
use crate::sampling::{derive_seed, RandomSource};

/// One estimator configuration to repeat.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub k: usize,
    pub options: RunOptions,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm, mode: Mode, k: usize) -> Self {
        RunSpec {
            algorithm,
            mode,
            k,
            options: RunOptions::default(),
        }
    }

    pub fn with_options(mut self, options: RunOptions) -> Self {
        self.options = options;
        self
    }

    /// A single run from an explicit seed.
    pub fn run_seeded<G: Game + ?Sized>(&self, game: &G, seed: u64) -> Result<RunResult> {
        let mut rng = RandomSource::new(seed);
        self.algorithm
            .run(game, self.mode, self.k, &mut rng, &self.options)
    }
}

/// Runs `runs` repetitions, run `r` seeded with `derive_seed(base_seed, r)`.
/// Results come back in run order whatever the execution mode.
pub fn run_batch<G: Game + ?Sized>(
    game: &G,
    spec: &RunSpec,
    base_seed: u64,
    runs: usize,
    exec: Execution,
) -> Result<Vec<RunResult>> {
    map_indices(exec, runs, |r| {
        spec.run_seeded(game, derive_seed(base_seed, r as u64))
    })
    .into_iter()
    .collect()
}
