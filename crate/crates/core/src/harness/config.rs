//! Experiment configuration files.
//!
//! One `key = value` per line; list values are whitespace separated and
//! lines starting with `#` are ignored:
//!
//! ```text
//! games      = unanimity:8 airport:1,2,3
//! algorithms = cmcs independent greedy_cmcs:m_min=10
//! budgets    = 90 900
//! k          = 3
//! runs       = 100
//! base_seed  = 42
//! # PAC runs only
//! epsilon    = 0.1
//! max_budget = 1000000
//! ```
//!
//! `games`, `algorithms`, `k` and `runs` are required. `budgets` is required
//! by `bench` and ignored by `pac`, which instead needs `epsilon`.

use std::collections::HashMap;
use std::fmt::Display;
use std::str::FromStr;

use super::games::GameSpec;
use crate::error::{Error, Result};
use crate::estimators::{Algorithm, DEFAULT_PAC_CAP};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub games: Vec<GameSpec>,
    pub algorithms: Vec<Algorithm>,
    /// Strictly increasing checkpoint budgets.
    pub budgets: Vec<u64>,
    pub k_values: Vec<usize>,
    pub runs: usize,
    pub base_seed: u64,
    pub epsilon: Option<f64>,
    pub max_budget: u64,
    lines: HashMap<&'static str, usize>,
}

const KEYS: [&str; 8] = [
    "games",
    "algorithms",
    "budgets",
    "k",
    "runs",
    "base_seed",
    "epsilon",
    "max_budget",
];

impl ExperimentConfig {
    /// Line where `key` was set, 0 if it was not.
    pub fn line_of(&self, key: &str) -> usize {
        self.lines.get(key).copied().unwrap_or(0)
    }

    /// Error attributed to the line of `key`.
    pub fn error(&self, key: &str, msg: impl Into<String>) -> Error {
        Error::config(self.line_of(key), key, msg)
    }
}

fn parse_items<T>(line: usize, key: &str, value: &str) -> Result<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    let items = value
        .split_whitespace()
        .map(|item| {
            item.parse::<T>()
                .map_err(|e| Error::config(line, key, format!("`{item}`: {e}")))
        })
        .collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::config(line, key, "empty list"));
    }
    Ok(items)
}

fn parse_one<T>(line: usize, key: &str, value: &str) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::config(line, key, format!("`{value}`: {e}")))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut values: HashMap<&'static str, (usize, &str)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| {
            Error::config(line, "", format!("expected key = value, got `{trimmed}`"))
        })?;
        let key = key.trim();
        let known = KEYS
            .iter()
            .find(|&&k| k == key)
            .ok_or_else(|| Error::config(line, key, "unknown key"))?;
        if let Some((first, _)) = values.insert(known, (line, value.trim())) {
            return Err(Error::config(
                line,
                key,
                format!("already set on line {first}"),
            ));
        }
    }
    let required = |key: &'static str| {
        values
            .get(key)
            .copied()
            .ok_or_else(|| Error::config(0, key, "missing required key"))
    };

    let (line, v) = required("games")?;
    let games = parse_items::<GameSpec>(line, "games", v)?;
    let (line, v) = required("algorithms")?;
    let algorithms = parse_items::<Algorithm>(line, "algorithms", v)?;
    let (line, v) = required("k")?;
    let k_values = parse_items::<usize>(line, "k", v)?;
    if k_values.contains(&0) {
        return Err(Error::config(line, "k", "k must be at least 1"));
    }
    let (line, v) = required("runs")?;
    let runs = parse_one::<usize>(line, "runs", v)?;
    if runs == 0 {
        return Err(Error::config(line, "runs", "need at least one run"));
    }

    let budgets = match values.get("budgets") {
        Some(&(line, v)) => {
            let budgets = parse_items::<u64>(line, "budgets", v)?;
            if budgets.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::config(
                    line,
                    "budgets",
                    "budgets must be strictly increasing",
                ));
            }
            budgets
        }
        None => Vec::new(),
    };
    let base_seed = match values.get("base_seed") {
        Some(&(line, v)) => parse_one::<u64>(line, "base_seed", v)?,
        None => 0,
    };
    let epsilon = match values.get("epsilon") {
        Some(&(line, v)) => {
            let eps = parse_one::<f64>(line, "epsilon", v)?;
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(Error::config(line, "epsilon", "must be finite and >= 0"));
            }
            Some(eps)
        }
        None => None,
    };
    let max_budget = match values.get("max_budget") {
        Some(&(line, v)) => parse_one::<u64>(line, "max_budget", v)?,
        None => DEFAULT_PAC_CAP,
    };

    Ok(ExperimentConfig {
        games,
        algorithms,
        budgets,
        k_values,
        runs,
        base_seed,
        epsilon,
        max_budget,
        lines: values.into_iter().map(|(k, (line, _))| (k, line)).collect(),
    })
}
