//! Exact oracles for one game, for inspection from the command line.

use std::fmt::{self, Write as _};
use std::path::Path;

use super::games::GameSpec;
use crate::error::Result;
use crate::game::{
    eligible_sets, exact_shapley, exact_shapley_extended, EligibleSets, ShapleyVector,
};
use crate::metrics::{exact_moments, GameMoments};
use crate::numeric::fmt_g17;

/// Eligible sets listed per k before the output is abbreviated.
const LIST_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct ExactReport {
    pub game: String,
    pub phi: ShapleyVector,
    pub phi_extended: ShapleyVector,
    /// Largest absolute difference between the two representations.
    pub discrepancy: f64,
    pub eligible: Vec<EligibleSets>,
    pub moments: GameMoments,
}

pub fn exact_report(spec: &GameSpec, base_dir: Option<&Path>) -> Result<ExactReport> {
    let game = spec.build(base_dir)?;
    // the moment oracle has the tighter size cap, so run it first
    let moments = exact_moments(&*game)?;
    let phi = exact_shapley(&*game)?;
    let phi_extended = exact_shapley_extended(&*game)?;
    let discrepancy = phi
        .iter()
        .zip(phi_extended.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let eligible = (1..=game.n())
        .map(|k| eligible_sets(&phi, k))
        .collect::<Result<_>>()?;
    Ok(ExactReport {
        game: spec.to_string(),
        phi,
        phi_extended,
        discrepancy,
        eligible,
        moments,
    })
}

impl fmt::Display for ExactReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.phi.n();
        writeln!(f, "game {} with {n} players", self.game)?;
        writeln!(f, "player shapley extended var_cmcs var_marginal")?;
        for i in 0..n {
            writeln!(
                f,
                "{} {} {} {} {}",
                i + 1,
                fmt_g17(self.phi[i]),
                fmt_g17(self.phi_extended[i]),
                fmt_g17(self.moments.var[i]),
                fmt_g17(self.moments.marginal_var[i]),
            )?;
        }
        writeln!(f, "max discrepancy {}", fmt_g17(self.discrepancy))?;
        for e in &self.eligible {
            let mut line = String::new();
            for (idx, set) in e.iter().enumerate() {
                if idx == LIST_LIMIT {
                    write!(line, " ... ({} total)", e.count())?;
                    break;
                }
                write!(line, " {set}")?;
            }
            writeln!(f, "eligible k={}:{line}", e.k())?;
        }
        writeln!(f, "covariance")?;
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| fmt_g17(self.moments.cov(i, j))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
