//! Mean and standard error per configuration group.

use super::rows::ResultRow;
use crate::numeric::mean_and_se;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    /// Sample standard deviation over `√runs`; 0 for a single run.
    pub se: f64,
}

impl MeanSe {
    pub fn of(xs: &[f64]) -> Self {
        let (mean, se) = mean_and_se(xs);
        MeanSe { mean, se }
    }
}

/// Aggregate over runs of one `(game, algorithm, k, T)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub game: String,
    pub algorithm: String,
    pub k: usize,
    pub budget: u64,
    pub runs: usize,
    pub budget_used: MeanSe,
    pub eps_inc_exc: MeanSe,
    pub ratio_precision: MeanSe,
    pub binary_precision: MeanSe,
    pub mse: MeanSe,
}

/// Groups rows by `(game, algorithm, k, T)` in order of first appearance.
pub fn summarize(rows: &[ResultRow]) -> Vec<GroupSummary> {
    let mut keys: Vec<(&str, &str, usize, u64)> = Vec::new();
    let mut members: Vec<Vec<&ResultRow>> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for row in rows {
        let key = (row.game.as_str(), row.algorithm.as_str(), row.k, row.budget);
        let slot = *index.entry(key).or_insert_with(|| {
            keys.push(key);
            members.push(Vec::new());
            keys.len() - 1
        });
        members[slot].push(row);
    }
    keys.into_iter()
        .zip(members)
        .map(|((game, algorithm, k, budget), group)| {
            let stat = |f: fn(&ResultRow) -> f64| {
                MeanSe::of(&group.iter().map(|r| f(r)).collect::<Vec<_>>())
            };
            GroupSummary {
                game: game.to_string(),
                algorithm: algorithm.to_string(),
                k,
                budget,
                runs: group.len(),
                budget_used: stat(|r| r.budget_used as f64),
                eps_inc_exc: stat(|r| r.eps_inc_exc),
                ratio_precision: stat(|r| r.ratio_precision),
                binary_precision: stat(|r| r.binary_precision),
                mse: stat(|r| r.mse),
            }
        })
        .collect()
}
