//! Textual game descriptions.
//!
//! ```text
//! unanimity:N          v(S) = 1 iff S = N
//! carrier:N:1,3        v(S) = 1 iff S contains players 1 and 3 (one-based)
//! airport:1,2,3        v(S) = max cost in S
//! sou:N,TERMS,SEED     random sum of unanimity games
//! tabular:PATH         table file, PATH relative to the config file
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::game::{
    load_tabular_game, make_airport_game, make_carrier_game, make_random_sou_game,
    make_unanimity_game, Coalition, Game, MAX_PLAYERS,
};

#[derive(Debug, Clone, PartialEq)]
pub enum GameSpec {
    Unanimity(usize),
    Carrier { n: usize, players: Vec<usize> },
    Airport(Vec<f64>),
    RandomSou { n: usize, terms: usize, seed: u64 },
    Tabular(PathBuf),
}

pub type SharedGame = Arc<dyn Game>;

impl GameSpec {
    /// Builds the game; tabular paths are resolved against `base_dir`.
    pub fn build(&self, base_dir: Option<&Path>) -> Result<SharedGame> {
        Ok(match self {
            GameSpec::Unanimity(n) => Arc::new(make_unanimity_game(*n)?),
            GameSpec::Carrier { n, players } => {
                if *n > MAX_PLAYERS {
                    return Err(Error::InvalidSize(*n));
                }
                if let Some(p) = players.iter().find(|&&p| p == 0 || p > *n) {
                    return Err(Error::Domain(format!("carrier player {p} outside 1..={n}")));
                }
                let carrier = Coalition::from_players(*n, players.iter().map(|p| p - 1));
                Arc::new(make_carrier_game(*n, carrier)?)
            }
            GameSpec::Airport(costs) => Arc::new(make_airport_game(costs)?),
            GameSpec::RandomSou { n, terms, seed } => {
                Arc::new(make_random_sou_game(*n, *terms, *seed)?)
            }
            GameSpec::Tabular(path) => {
                let full = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                Arc::new(load_tabular_game(full)?)
            }
        })
    }
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(|item| {
            item.trim()
                .parse()
                .map_err(|e| format!("bad {what} `{}`: {e}", item.trim()))
        })
        .collect()
}

impl FromStr for GameSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("game `{s}` needs the form kind:parameters"))?;
        match kind {
            "unanimity" => Ok(GameSpec::Unanimity(
                rest.parse()
                    .map_err(|e| format!("bad player count `{rest}`: {e}"))?,
            )),
            "carrier" => {
                let (n, players) = rest
                    .split_once(':')
                    .ok_or("carrier needs carrier:N:p1,p2,...")?;
                let n: usize = n
                    .parse()
                    .map_err(|e| format!("bad player count `{n}`: {e}"))?;
                let players: Vec<usize> = parse_list(players, "player")?;
                if let Some(p) = players.iter().find(|&&p| p == 0 || p > n) {
                    return Err(format!("carrier player {p} outside 1..={n}"));
                }
                Ok(GameSpec::Carrier { n, players })
            }
            "airport" => Ok(GameSpec::Airport(parse_list(rest, "cost")?)),
            "sou" => {
                let parts: Vec<&str> = rest.split(',').collect();
                if parts.len() != 3 {
                    return Err("sou needs sou:N,TERMS,SEED".into());
                }
                let field = |i: usize, what: &str| -> std::result::Result<u64, String> {
                    parts[i]
                        .trim()
                        .parse()
                        .map_err(|e| format!("bad {what} `{}`: {e}", parts[i]))
                };
                Ok(GameSpec::RandomSou {
                    n: field(0, "player count")? as usize,
                    terms: field(1, "term count")? as usize,
                    seed: field(2, "seed")?,
                })
            }
            "tabular" if !rest.is_empty() => Ok(GameSpec::Tabular(PathBuf::from(rest))),
            "tabular" => Err("tabular needs a file path".into()),
            other => Err(format!("unknown game kind `{other}`")),
        }
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(",");
        match self {
            GameSpec::Unanimity(n) => write!(f, "unanimity:{n}"),
            GameSpec::Carrier { n, players } => {
                write!(
                    f,
                    "carrier:{n}:{}",
                    join(players.iter().map(|p| p.to_string()).collect())
                )
            }
            GameSpec::Airport(costs) => {
                write!(
                    f,
                    "airport:{}",
                    join(costs.iter().map(|c| c.to_string()).collect())
                )
            }
            GameSpec::RandomSou { n, terms, seed } => write!(f, "sou:{n},{terms},{seed}"),
            GameSpec::Tabular(path) => write!(f, "tabular:{}", path.display()),
        }
    }
}
