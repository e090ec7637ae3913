//! Triangular enumeration `(1,1), (1,2), (2,2), (1,3), (2,3), (3,3), …` of
//! the index pairs `1 ≤ i ≤ j`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairIndex {
    i: u64,
    j: u64,
}

impl PairIndex {
    pub fn new(i: u64, j: u64) -> Result<Self> {
        if i == 0 || i > j {
            return Err(Error::InvalidConfig(format!("need 1 ≤ i ≤ j, got ({i}, {j})")));
        }
        Ok(PairIndex { i, j })
    }

    pub fn i(&self) -> u64 {
        self.i
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    /// Averaging length `r_j = 1/(j+1)`.
    pub fn r(&self) -> f64 {
        r_of(self.j)
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// `1/(j+1)`.
pub fn r_of(j: u64) -> f64 {
    assert!(j >= 1, "r_of needs j ≥ 1");
    1.0 / (j as f64 + 1.0)
}

fn triangle(j: u64) -> u128 {
    let j = u128::from(j);
    j * (j + 1) / 2
}

/// The `k`-th pair (from 1): `j` is the least integer with
/// `j(j+1)/2 ≥ k`, and `i = k - j(j-1)/2`. Exact for every `u64`.
pub fn pair_of(k: u64) -> PairIndex {
    assert!(k >= 1, "pair_of needs k ≥ 1");
    let k128 = u128::from(k);
    // j = ceil((sqrt(8k+1) - 1) / 2), from the integer square root
    let s = (8 * k128 + 1).isqrt();
    let mut j = ((s - 1) / 2) as u64;
    while triangle(j) < k128 {
        j += 1;
    }
    PairIndex {
        i: (k128 - triangle(j - 1)) as u64,
        j,
    }
}

/// Position of `p` in the enumeration: `j(j-1)/2 + i`.
///
/// Panics if the position does not fit in a `u64`.
pub fn index_of(p: PairIndex) -> u64 {
    u64::try_from(triangle(p.j - 1) + u128::from(p.i)).expect("pair index exceeds u64")
}

/// The first `k` pairs in order.
pub fn pairs(k: u64) -> impl Iterator<Item = PairIndex> {
    (1..=k).map(pair_of)
}
