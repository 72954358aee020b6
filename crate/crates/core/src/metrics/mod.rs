//! Quality measures for estimated top-k sets and Shapley vectors, plus
//! exact theoretical predictions derived from [`GameMoments`].

mod moments;

pub use moments::{
    covariance_formula, exact_moments, exact_moments_with, GameMoments, MAX_MOMENT_PLAYERS,
};

use crate::error::{Error, Result};
use crate::game::{Coalition, EligibleSets, TIE_TOLERANCE};
use crate::sampling::normal_cdf;

/// Mean squared error `(1/n) Σ (φ_i - φ̂_i)^2`.
pub fn mse(phi: &[f64], estimate: &[f64]) -> Result<f64> {
    if phi.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            left: phi.len(),
            right: estimate.len(),
        });
    }
    if phi.is_empty() {
        return Ok(0.0);
    }
    let sq: f64 = phi
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sq / phi.len() as f64)
}

fn check_size(estimate: Coalition, k: usize) -> Result<()> {
    if estimate.size() != k || k == 0 {
        Err(Error::InvalidK {
            k: estimate.size(),
            n: estimate.n(),
        })
    } else {
        Ok(())
    }
}

/// 1 if the estimate is an eligible coalition, else 0.
pub fn binary_precision(estimate: Coalition, eligible: &EligibleSets) -> Result<f64> {
    check_size(estimate, eligible.k())?;
    Ok(if eligible.contains(estimate) {
        1.0
    } else {
        0.0
    })
}

/// Share of the estimate that some single eligible coalition agrees with.
pub fn ratio_precision(estimate: Coalition, eligible: &EligibleSets) -> Result<f64> {
    check_size(estimate, eligible.k())?;
    Ok(eligible.best_overlap(estimate) as f64 / eligible.k() as f64)
}

/// The k-th largest Shapley value.
pub fn kth_largest(phi: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > phi.len() {
        return Err(Error::InvalidK { k, n: phi.len() });
    }
    let mut sorted = phi.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[k - 1])
}

/// Smallest `ε >= 0` such that every included player is at most `ε` below
/// the k-th largest value and every excluded player at most `ε` above it.
pub fn inclusion_exclusion_error(estimate: Coalition, phi: &[f64], k: usize) -> Result<f64> {
    if estimate.n() != phi.len() {
        return Err(Error::LengthMismatch {
            left: estimate.n(),
            right: phi.len(),
        });
    }
    check_size(estimate, k)?;
    let pivot = kth_largest(phi, k)?;
    let worst = (0..phi.len()).fold(0.0f64, |acc, p| {
        let gap = if estimate.contains(p) {
            pivot - phi[p]
        } else {
            phi[p] - pivot
        };
        acc.max(gap)
    });
    Ok(worst)
}

/// All four per-run measures against a known Shapley vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub eps_inc_exc: f64,
    pub ratio_precision: f64,
    pub binary_precision: f64,
    pub mse: f64,
}

pub fn score(
    phi: &[f64],
    eligible: &EligibleSets,
    top_k: Coalition,
    estimate: &[f64],
) -> Result<Scores> {
    Ok(Scores {
        eps_inc_exc: inclusion_exclusion_error(top_k, phi, eligible.k())?,
        ratio_precision: ratio_precision(top_k, eligible)?,
        binary_precision: binary_precision(top_k, eligible)?,
        mse: mse(phi, estimate)?,
    })
}

/// Lower bound on the probability that CMCS after `M` rounds returns a set
/// with inclusion-exclusion error at most `ε`, before and after clamping
/// to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub raw: f64,
    pub clamped: f64,
    /// Number of size-k sets within `ε`.
    pub sets: usize,
}

/// `Σ_{K: ρ(K) <= ε} [1 - Σ_{i ∈ K, j ∉ K} Φ(√M (φ_j - φ_i) / σ_ij)]`.
///
/// A pair with `σ_ij = 0` contributes the point-mass limit: 0.5 when
/// `φ_i = φ_j`, otherwise 0 or 1 by the sign of the gap.
pub fn top_k_lower_bound(
    moments: &GameMoments,
    rounds: u64,
    epsilon: f64,
    k: usize,
) -> Result<LowerBound> {
    let n = moments.n();
    if n > MAX_MOMENT_PLAYERS {
        return Err(Error::Size {
            n,
            max: MAX_MOMENT_PLAYERS,
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    if rounds == 0 {
        return Err(Error::Domain("the bound needs at least one round".into()));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::Domain(format!(
            "epsilon must be >= 0, got {epsilon}"
        )));
    }
    let phi = &moments.phi;
    let root_m = (rounds as f64).sqrt();
    let wrong_order = |i: usize, j: usize| -> f64 {
        let gap = phi[j] - phi[i];
        let var = moments.pair_var(i, j);
        if var > 0.0 {
            normal_cdf(root_m * gap / var.sqrt())
        } else if gap.abs() <= TIE_TOLERANCE {
            0.5
        } else if gap > 0.0 {
            1.0
        } else {
            0.0
        }
    };
    let mut raw = 0.0;
    let mut sets = 0;
    for mask in (0u64..1 << n).filter(|m| m.count_ones() as usize == k) {
        let candidate = Coalition::from_mask(n, mask);
        if inclusion_exclusion_error(candidate, phi, k)? > epsilon + TIE_TOLERANCE {
            continue;
        }
        sets += 1;
        let mut miss = 0.0;
        for i in candidate.players() {
            for j in (0..n).filter(|&j| !candidate.contains(j)) {
                miss += wrong_order(i, j);
            }
        }
        raw += 1.0 - miss;
    }
    Ok(LowerBound {
        raw,
        clamped: raw.clamp(0.0, 1.0),
        sets,
    })
}

/// `(1 / (n M)) Σ σ_i^2` with the marginal-law variances: the expected MSE
/// of an estimator that averages `M` independent marginal contributions per
/// player.
pub fn marginal_mse_prediction(moments: &GameMoments, samples: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample per player".into()));
    }
    let n = moments.n() as f64;
    Ok(moments.marginal_var.iter().sum::<f64>() / (n * samples as f64))
}

/// `((n + 1) / (n T)) Σ σ_i^2` with the CMCS-law variances: the expected MSE
/// of CMCS at budget `T`, which must be a positive multiple of `n + 1`.
pub fn cmcs_mse_prediction(moments: &GameMoments, budget: u64) -> Result<f64> {
    let step = moments.n() as u64 + 1;
    if budget == 0 || !budget.is_multiple_of(step) {
        return Err(Error::NotMultiple { budget, step });
    }
    let n = moments.n() as f64;
    Ok((n + 1.0) * moments.var.iter().sum::<f64>() / (n * budget as f64))
}
