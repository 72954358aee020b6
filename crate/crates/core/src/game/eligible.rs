use super::Coalition;
use crate::error::{Error, Result};
use crate::numeric::binomial;

/// Absolute tolerance under which two Shapley values count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// The family of size-`k` coalitions with maximal total Shapley value.
///
/// Every eligible coalition contains all players strictly above the k-th
/// largest value and fills the remaining `choose` seats from the players
/// tied with it, so the family is stored as `(required, tied, choose)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EligibleSets {
    k: usize,
    required: Coalition,
    tied: Coalition,
    choose: usize,
}

pub fn eligible_sets(phi: &[f64], k: usize) -> Result<EligibleSets> {
    let n = phi.len();
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut sorted = phi.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let threshold = sorted[k - 1];
    let required =
        Coalition::from_players(n, (0..n).filter(|&i| phi[i] > threshold + TIE_TOLERANCE));
    let tied = Coalition::from_players(
        n,
        (0..n).filter(|&i| (phi[i] - threshold).abs() <= TIE_TOLERANCE),
    );
    Ok(EligibleSets {
        k,
        required,
        tied,
        choose: k - required.size(),
    })
}

impl EligibleSets {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.required.n()
    }

    /// Number of eligible coalitions.
    pub fn count(&self) -> f64 {
        binomial(self.tied.size(), self.choose)
    }

    pub fn contains(&self, coalition: Coalition) -> bool {
        coalition.size() == self.k
            && self.required.is_subset_of(coalition)
            && coalition.is_subset_of(self.required.union(self.tied))
    }

    /// `max_{K eligible} |K ∩ estimate|`.
    pub fn best_overlap(&self, estimate: Coalition) -> usize {
        self.required.intersection(estimate).size()
            + self.tied.intersection(estimate).size().min(self.choose)
    }

    /// All eligible coalitions in ascending mask order.
    pub fn iter(&self) -> impl Iterator<Item = Coalition> + '_ {
        let tied: Vec<usize> = self.tied.players().collect();
        let n = self.n();
        let mut combo: Vec<usize> = (0..self.choose).collect();
        let mut done = self.choose > tied.len();
        let mut out = Vec::new();
        while !done {
            let c = Coalition::from_players(n, combo.iter().map(|&j| tied[j]));
            out.push(self.required.union(c));
            // next combination in lexicographic order
            done = true;
            for pos in (0..self.choose).rev() {
                if combo[pos] < tied.len() - self.choose + pos {
                    combo[pos] += 1;
                    for next in pos + 1..self.choose {
                        combo[next] = combo[next - 1] + 1;
                    }
                    done = false;
                    break;
                }
            }
        }
        out.sort();
        out.into_iter()
    }
}
