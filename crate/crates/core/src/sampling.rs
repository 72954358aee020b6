//! Seeded randomness and the coalition distributions used by the estimators.
//!
//! # Generator
//!
//! [`RandomSource`] wraps ChaCha8 (`rand_chacha::ChaCha8Rng`), keyed through
//! `SeedableRng::seed_from_u64`. Integer draws use Lemire's multiply-shift
//! rejection method on full 64-bit words and real draws use the top 53 bits,
//! so a seed produces the same sequence on every platform.
//!
//! # Distributions
//!
//! * [`draw_cmcs_coalition`]: `P(S) = 1 / ((n+1) C(n, |S|))` over all subsets
//!   of `N`, realized as a uniform size in `0..=n` followed by a uniform
//!   subset of that size.
//! * [`draw_marginal_coalition`]: `P(S) = 1 / (n C(n-1, |S|))` over subsets
//!   of `N \ {i}`, the law of a random permutation prefix of `i`.
//! * [`draw_permutation`]: uniform ordering of `N`.
//!
//! Fixed-size subsets come from a partial Fisher-Yates shuffle over a player
//! buffer that is reset before each draw, so every draw depends only on the
//! generator state.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::game::Coalition;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child stream `stream` under `base`.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    splitmix64(base ^ splitmix64(stream).rotate_left(17))
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent child stream; equals `RandomSource::new(derive_seed(base, stream))`.
    pub fn derive(base: u64, stream: u64) -> Self {
        Self::new(derive_seed(base, stream))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform integer in `0..bound`. Panics if `bound == 0`.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let mut m = u128::from(self.next_u64()) * u128::from(bound);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(bound);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    #[inline]
    pub fn index(&mut self, bound: usize) -> usize {
        self.below(bound as u64) as usize
    }

    /// Uniform real in `[0, 1)`.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `true` with probability `p` (clamped to `[0, 1]`).
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}

/// Reusable scratch space for coalition and permutation draws.
#[derive(Debug, Clone)]
pub struct CoalitionSampler {
    n: usize,
    buf: Vec<usize>,
}

impl CoalitionSampler {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one player");
        CoalitionSampler {
            n,
            buf: Vec::with_capacity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn reset(&mut self, excluded: Option<usize>) {
        self.buf.clear();
        self.buf
            .extend((0..self.n).filter(|&p| Some(p) != excluded));
    }

    /// First `size` entries of the buffer after a partial shuffle.
    fn shuffle_prefix(&mut self, size: usize, rng: &mut RandomSource) {
        let len = self.buf.len();
        debug_assert!(size <= len);
        for idx in 0..size.min(len.saturating_sub(1)) {
            let j = idx + rng.index(len - idx);
            self.buf.swap(idx, j);
        }
    }

    fn prefix_coalition(&self, size: usize) -> Coalition {
        Coalition::from_players(self.n, self.buf[..size].iter().copied())
    }

    /// Uniform subset of `N \ {excluded}` (or of `N`) with exactly `size` members.
    pub fn subset_of_size(
        &mut self,
        size: usize,
        excluded: Option<usize>,
        rng: &mut RandomSource,
    ) -> Coalition {
        self.reset(excluded);
        self.shuffle_prefix(size, rng);
        self.prefix_coalition(size)
    }

    pub fn cmcs(&mut self, rng: &mut RandomSource) -> Coalition {
        let size = rng.index(self.n + 1);
        self.subset_of_size(size, None, rng)
    }

    pub fn marginal(&mut self, player: usize, rng: &mut RandomSource) -> Coalition {
        debug_assert!(player < self.n);
        let size = rng.index(self.n);
        self.subset_of_size(size, Some(player), rng)
    }

    /// Uniform permutation of `N`, valid until the next draw.
    pub fn permutation(&mut self, rng: &mut RandomSource) -> &[usize] {
        self.reset(None);
        self.shuffle_prefix(self.n, rng);
        &self.buf
    }
}

pub fn draw_cmcs_coalition(n: usize, rng: &mut RandomSource) -> Coalition {
    CoalitionSampler::new(n).cmcs(rng)
}

pub fn draw_marginal_coalition(player: usize, n: usize, rng: &mut RandomSource) -> Coalition {
    assert!(player < n, "player {player} out of range for n = {n}");
    CoalitionSampler::new(n).marginal(player, rng)
}

pub fn draw_permutation(n: usize, rng: &mut RandomSource) -> Vec<usize> {
    CoalitionSampler::new(n).permutation(rng).to_vec()
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Inverse of [`normal_cdf`] on the open unit interval.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "normal quantile needs 0 < p < 1, got {p}"
        )));
    }
    Ok(-std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RandomSource::new(7);
        let mut b = RandomSource::new(7);
        let mut sa = CoalitionSampler::new(10);
        let mut sb = CoalitionSampler::new(10);
        for _ in 0..10_000 {
            assert_eq!(sa.cmcs(&mut a), sb.cmcs(&mut b));
        }
        let mut c = RandomSource::new(8);
        assert_ne!(RandomSource::new(7).next_u64(), c.next_u64());
    }

    #[test]
    fn derived_streams_differ() {
        let seeds: std::collections::HashSet<u64> =
            (0..10_000).map(|s| derive_seed(42, s)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_eq!(
            RandomSource::derive(1, 2).next_u64(),
            RandomSource::new(derive_seed(1, 2)).next_u64()
        );
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut rng = RandomSource::new(1);
        let mut seen = [0u32; 7];
        for _ in 0..7000 {
            seen[rng.below(7) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800 && c < 1200), "{seen:?}");
        assert_eq!(rng.below(1), 0);
    }

    #[test]
    fn marginal_excludes_player() {
        let mut rng = RandomSource::new(3);
        let mut sampler = CoalitionSampler::new(6);
        for _ in 0..5000 {
            let s = sampler.marginal(2, &mut rng);
            assert!(!s.contains(2));
            assert!(s.size() <= 5);
        }
    }

    #[test]
    fn single_player_permutation() {
        let mut rng = RandomSource::new(0);
        assert_eq!(draw_permutation(1, &mut rng), vec![0]);
    }

    #[test]
    fn permutations_are_permutations() {
        let mut rng = RandomSource::new(9);
        for _ in 0..100 {
            let mut p = draw_permutation(9, &mut rng);
            p.sort_unstable();
            assert_eq!(p, (0..9).collect::<Vec<_>>());
        }
    }

    #[test]
    fn cdf_reference_points() {
        // reference values from 30-digit arithmetic
        let refs = [
            (1.96, 0.975_002_104_851_779_6),
            (2.0, 0.977_249_868_051_820_8),
            (-5.0, 2.866_515_718_791_939e-7),
            (-8.0, 6.220_960_574_271_784e-16),
            (3.3, 0.999_516_575_857_616_2),
        ];
        assert_eq!(normal_cdf(0.0), 0.5);
        for (x, p) in refs {
            assert!((normal_cdf(x) - p).abs() < 1e-10, "{x}: {}", normal_cdf(x));
        }
    }

    #[test]
    fn quantile_domain() {
        assert!(normal_quantile(0.0).is_err());
        assert!(normal_quantile(1.0).is_err());
        assert!(normal_quantile(f64::NAN).is_err());
        assert!(normal_quantile(0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for x in -3..=3 {
            let x = f64::from(x);
            let back = normal_quantile(normal_cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-7, "{x} -> {back}");
        }
        for p in [1e-9, 1e-4, 0.01, 0.3, 0.77, 0.999, 1.0 - 1e-9] {
            let x = normal_quantile(p).unwrap();
            assert!((normal_cdf(x) - p).abs() <= 1e-8 * p.max(1e-3), "{p}");
        }
    }
}
