//! Sign sequences: assignments of +1/-1 to the 2k variable slots.

use std::fmt;
use std::str::FromStr;

use crate::error::{CoreError, Result};

/// A function `{1..2k} -> {+1, -1}`, stored as a bit mask.
///
/// Bit `j` (0-based) set means slot `j+1` carries the sign -1. Slot `2j`
/// governs `x_{j+1}`, slot `2j+1` governs `y_{j+1}`. The mask encoding is
/// stable: it is what reports serialize and what the sweep enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignSequence {
    pairs: usize,
    neg_mask: u64,
}

impl SignSequence {
    /// The empty sequence (k = 0).
    pub fn empty() -> Self {
        SignSequence { pairs: 0, neg_mask: 0 }
    }

    /// Builds a sequence of `2 * pairs` signs from its negativity mask.
    pub fn from_mask(pairs: usize, neg_mask: u64) -> Result<Self> {
        if pairs > 31 {
            return Err(CoreError::TooManyPairs(pairs));
        }
        let width = 2 * pairs;
        if width < 64 && neg_mask >> width != 0 {
            return Err(CoreError::Parse(format!(
                "mask {neg_mask:#x} has bits beyond {width} slots"
            )));
        }
        Ok(SignSequence { pairs, neg_mask })
    }

    /// Builds a sequence from explicit signs; length must be even.
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        if !signs.len().is_multiple_of(2) {
            return Err(CoreError::Parse(format!(
                "sign sequence length {} is odd",
                signs.len()
            )));
        }
        let mut mask = 0u64;
        for (j, &s) in signs.iter().enumerate() {
            match s {
                1 => {}
                -1 => mask |= 1 << j,
                other => {
                    return Err(CoreError::Parse(format!("invalid sign value {other}")));
                }
            }
        }
        Self::from_mask(signs.len() / 2, mask)
    }

    /// Number of variable pairs k.
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    /// Number of sign slots, 2k.
    pub fn len(&self) -> usize {
        2 * self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs == 0
    }

    /// Sign of slot `slot` (0-based), +1 or -1.
    pub fn sign(&self, slot: usize) -> i8 {
        debug_assert!(slot < self.len());
        if self.neg_mask >> slot & 1 == 1 {
            -1
        } else {
            1
        }
    }

    /// The negativity mask (bit j set means slot j+1 is -1).
    pub fn mask(&self) -> u64 {
        self.neg_mask
    }

    /// Number of negative signs.
    pub fn neg_count(&self) -> u32 {
        self.neg_mask.count_ones()
    }

    /// Appends the two signs for extension index `i` in 0..=3:
    /// 0 -> (+,+), 1 -> (+,-), 2 -> (-,+), 3 -> (-,-). Earlier slots are
    /// unchanged.
    pub fn extended(&self, i: u8) -> Self {
        assert!(i < 4, "extension index must be 0..=3");
        let base = 2 * self.pairs;
        let x_neg = (u64::from(i) >> 1) & 1;
        let y_neg = u64::from(i) & 1;
        SignSequence {
            pairs: self.pairs + 1,
            neg_mask: self.neg_mask | x_neg << base | y_neg << (base + 1),
        }
    }

    /// Inverse of [`extended`](Self::extended): strips the last pair and
    /// returns the extension index it encoded. `None` for the empty sequence.
    pub fn split_last_pair(&self) -> Option<(Self, u8)> {
        if self.pairs == 0 {
            return None;
        }
        let base = 2 * (self.pairs - 1);
        let x_neg = (self.neg_mask >> base & 1) as u8;
        let y_neg = (self.neg_mask >> (base + 1) & 1) as u8;
        let trimmed = SignSequence {
            pairs: self.pairs - 1,
            neg_mask: self.neg_mask & !(0b11 << base),
        };
        Some((trimmed, x_neg << 1 | y_neg))
    }

    /// All 4^pairs sequences in ascending mask order.
    pub fn all(pairs: usize) -> impl Iterator<Item = SignSequence> {
        let total: u64 = 1 << (2 * pairs);
        (0..total).map(move |m| SignSequence { pairs, neg_mask: m })
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        for slot in 0..self.len() {
            fm.write_str(if self.sign(slot) == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for SignSequence {
    type Err = CoreError;

    /// Parses a positional sign string such as `"+-"`. Both ASCII `-` and
    /// U+2212 minus are accepted.
    fn from_str(s: &str) -> Result<Self> {
        let mut signs = Vec::new();
        for ch in s.chars() {
            match ch {
                '+' => signs.push(1),
                '-' | '\u{2212}' => signs.push(-1),
                other => {
                    return Err(CoreError::Parse(format!(
                        "invalid sign character {other:?}"
                    )));
                }
            }
        }
        Self::from_signs(&signs)
    }
}
