use std::fmt;

use crate::error::{Error, Result};

/// Largest player count a [`Coalition`] mask can hold.
pub const MAX_PLAYERS: usize = 64;

/// A subset of the player set `{0, .., n-1}` stored as a bit mask.
///
/// Bit `i` is set iff player `i` is a member. Bits at positions `>= n` are
/// always clear.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition {
    mask: u64,
    n: u8,
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Coalition {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_PLAYERS, "at most {MAX_PLAYERS} players");
        Coalition {
            mask: 0,
            n: n as u8,
        }
    }

    pub fn grand(n: usize) -> Self {
        assert!(n <= MAX_PLAYERS, "at most {MAX_PLAYERS} players");
        Coalition {
            mask: full_mask(n),
            n: n as u8,
        }
    }

    pub fn try_from_mask(n: usize, mask: u64) -> Result<Self> {
        if n > MAX_PLAYERS {
            return Err(Error::InvalidSize(n));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::Domain(format!(
                "mask {mask:#x} has bits outside {n} players"
            )));
        }
        Ok(Coalition { mask, n: n as u8 })
    }

    /// Panics if `mask` has bits at or above `n`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self::try_from_mask(n, mask).expect("invalid coalition mask")
    }

    /// Builds a coalition from zero-based player indices.
    pub fn from_players(n: usize, players: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Coalition::empty(n);
        for p in players {
            assert!(p < n, "player {p} out of range for n = {n}");
            c.mask |= 1 << p;
        }
        c
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn n(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn size(self) -> usize {
        self.mask.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    #[inline]
    pub fn is_grand(self) -> bool {
        self.mask == full_mask(self.n())
    }

    #[inline]
    pub fn contains(self, player: usize) -> bool {
        player < self.n() && self.mask >> player & 1 == 1
    }

    #[inline]
    pub fn with(self, player: usize) -> Self {
        debug_assert!(player < self.n());
        Coalition {
            mask: self.mask | 1 << player,
            ..self
        }
    }

    #[inline]
    pub fn without(self, player: usize) -> Self {
        debug_assert!(player < self.n());
        Coalition {
            mask: self.mask & !(1 << player),
            ..self
        }
    }

    pub fn complement(self) -> Self {
        Coalition {
            mask: !self.mask & full_mask(self.n()),
            ..self
        }
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn intersection(self, other: Coalition) -> Self {
        Coalition {
            mask: self.mask & other.mask,
            ..self
        }
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition {
            mask: self.mask | other.mask,
            ..self
        }
    }

    /// Members in ascending order.
    pub fn players(self) -> impl Iterator<Item = usize> {
        let mut rest = self.mask;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let p = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(p)
            }
        })
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coalition({self})")
    }
}

/// One-based member list, e.g. `{1,3}`.
impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, p) in self.players().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        f.write_str("}")
    }
}
