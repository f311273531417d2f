//! Occupation-number bases and single-mode fermion operators on bit words.
//!
//! Orbital `k` (zero-based) is bit `k` of a `u64` word. Operators carry the
//! Jordan–Wigner sign `(−1)^{#occupied orbitals below k}`. In string form the
//! first orbital is the leftmost character, so `"10"` is orbital 0 occupied.

use crate::error::{Error, Result};

/// Largest orbital count accepted for the full (all particle numbers) sector.
pub const MAX_FULL_ORBITALS: usize = 16;
/// Largest basis accepted for a fixed particle number.
pub const MAX_FIXED_DIM: usize = 65536;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// All words with exactly `N` set bits.
    Fixed(usize),
    /// All `2^M` words.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockBasis {
    m: usize,
    sector: Sector,
    words: Vec<u64>,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn enumerate_basis(m: usize, sector: Sector) -> Result<FockBasis> {
    if m == 0 || m > 64 {
        return Err(Error::Dimension(format!("orbital count {m} outside 1..=64")));
    }
    let words = match sector {
        Sector::Full => {
            if m > MAX_FULL_ORBITALS {
                return Err(Error::TooLarge(format!(
                    "full sector needs M ≤ {MAX_FULL_ORBITALS}, got {m}"
                )));
            }
            (0..(1u64 << m)).collect()
        }
        Sector::Fixed(n) => {
            if n > m {
                return Err(Error::InvalidOccupation(format!("N = {n} exceeds M = {m}")));
            }
            let size = binomial(m, n);
            if size > MAX_FIXED_DIM as u128 {
                return Err(Error::TooLarge(format!(
                    "C({m},{n}) = {size} exceeds the cap {MAX_FIXED_DIM}"
                )));
            }
            let mut words = Vec::with_capacity(size as usize);
            if n == 0 {
                words.push(0);
            } else {
                // Gosper's hack walks fixed-weight words in increasing order.
                let limit = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
                let mut w: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
                loop {
                    words.push(w);
                    if words.len() as u128 == size {
                        break;
                    }
                    let c = w & w.wrapping_neg();
                    let r = w + c;
                    w = (((r ^ w) >> 2) / c) | r;
                    debug_assert!(w <= limit);
                }
            }
            words
        }
    };
    Ok(FockBasis { m, sector, words })
}

impl FockBasis {
    pub fn orbitals(&self) -> usize {
        self.m
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn word(&self, i: usize) -> u64 {
        self.words[i]
    }

    pub fn index_of(&self, word: u64) -> Option<usize> {
        match self.sector {
            Sector::Full => ((word as usize) < self.words.len()).then_some(word as usize),
            Sector::Fixed(_) => self.words.binary_search(&word).ok(),
        }
    }

    pub fn particle_number(&self) -> Option<usize> {
        match self.sector {
            Sector::Fixed(n) => Some(n),
            Sector::Full => None,
        }
    }
}

#[inline]
fn sign_below(word: u64, k: usize) -> f64 {
    let mask = (1u64 << k) - 1;
    if (word & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `a_k |word⟩ = sign |word'⟩`, or `None` if orbital `k` is empty.
#[inline]
pub fn annihilate(word: u64, k: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << k;
    (word & bit != 0).then(|| (word ^ bit, sign_below(word, k)))
}

/// `a†_k |word⟩ = sign |word'⟩`, or `None` if orbital `k` is occupied.
#[inline]
pub fn create(word: u64, k: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << k;
    (word & bit == 0).then(|| (word | bit, sign_below(word, k)))
}

pub fn word_to_string(word: u64, m: usize) -> String {
    (0..m).map(|k| if word >> k & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn word_from_string(s: &str) -> Result<u64> {
    if s.len() > 64 {
        return Err(Error::Dimension("occupation string longer than 64".into()));
    }
    s.chars().enumerate().try_fold(0u64, |w, (k, ch)| match ch {
        '0' => Ok(w),
        '1' => Ok(w | 1 << k),
        _ => Err(Error::InvalidOccupation(format!("bad occupation character `{ch}`"))),
    })
}
