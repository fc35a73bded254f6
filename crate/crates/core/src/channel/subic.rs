//! Generalized sub-interference-channels: a set of receivers plus a set of
//! transmitters, where a node's partner need not be included.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::config::MAX_USERS;
use crate::error::{Error, Result};

/// A pair `(S_RX, S_TX)` of user-index sets, stored as bitmasks (bit `k` is
/// user `k`, 0-based).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubIc {
    rx: u32,
    tx: u32,
}

impl SubIc {
    pub const EMPTY: SubIc = SubIc { rx: 0, tx: 0 };

    pub const fn from_masks(rx: u32, tx: u32) -> Self {
        Self { rx, tx }
    }

    /// Builds a sub-IC from 0-based index lists. Duplicates are rejected.
    pub fn from_indices(rx: &[usize], tx: &[usize], users: usize) -> Result<Self> {
        Ok(Self {
            rx: index_mask(rx, users, "receiver")?,
            tx: index_mask(tx, users, "transmitter")?,
        })
    }

    /// Both sets equal to `{0..K}`.
    pub fn full(users: usize) -> Self {
        let all = super::config::full_mask(users);
        Self { rx: all, tx: all }
    }

    pub fn rx_mask(self) -> u32 {
        self.rx
    }

    pub fn tx_mask(self) -> u32 {
        self.tx
    }

    pub fn has_rx(self, i: usize) -> bool {
        i < 32 && self.rx & (1 << i) != 0
    }

    pub fn has_tx(self, j: usize) -> bool {
        j < 32 && self.tx & (1 << j) != 0
    }

    pub fn with_rx(self, i: usize) -> Self {
        Self {
            rx: self.rx | 1 << i,
            ..self
        }
    }

    pub fn with_tx(self, j: usize) -> Self {
        Self {
            tx: self.tx | 1 << j,
            ..self
        }
    }

    pub fn rx_indices(self) -> impl Iterator<Item = usize> {
        bits(self.rx)
    }

    pub fn tx_indices(self) -> impl Iterator<Item = usize> {
        bits(self.tx)
    }

    pub fn rx_len(self) -> usize {
        self.rx.count_ones() as usize
    }

    pub fn tx_len(self) -> usize {
        self.tx.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.rx == 0 && self.tx == 0
    }

    /// True when either side is empty, so the induced CSIT mask is all-zero.
    pub fn is_degenerate(self) -> bool {
        self.rx == 0 || self.tx == 0
    }

    /// Union of two sub-ICs.
    pub fn union(self, other: Self) -> Self {
        Self {
            rx: self.rx | other.rx,
            tx: self.tx | other.tx,
        }
    }

    /// True when the two sub-ICs share no receiver and no transmitter.
    pub fn is_disjoint(self, other: Self) -> bool {
        self.rx & other.rx == 0 && self.tx & other.tx == 0
    }

    /// `S_RX ⊊ other.S_RX` and `S_TX ⊊ other.S_TX`.
    pub fn strictly_within(self, other: Self) -> bool {
        strict_subset(self.rx, other.rx) && strict_subset(self.tx, other.tx)
    }

    /// True if every index is below `users`.
    pub fn fits(self, users: usize) -> bool {
        let all = super::config::full_mask(users);
        self.rx & !all == 0 && self.tx & !all == 0
    }
}

fn strict_subset(a: u32, b: u32) -> bool {
    a & !b == 0 && a != b
}

fn bits(mut mask: u32) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let i = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(i)
    })
}

fn index_mask(indices: &[usize], users: usize, kind: &'static str) -> Result<u32> {
    let mut mask = 0u32;
    for &i in indices {
        if i >= users || i >= MAX_USERS {
            return Err(Error::IndexOutOfRange { kind, index: i, users });
        }
        if mask & (1 << i) != 0 {
            return Err(Error::InvalidArgument(format!("duplicate {kind} index {}", i + 1)));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

impl fmt::Display for SubIc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |mask: u32| bits(mask).map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        write!(f, "({{{}}},{{{}}})", list(self.rx), list(self.tx))
    }
}

/// Wire form: 1-based sorted index lists.
#[derive(Serialize, Deserialize)]
struct SubIcRepr {
    rx_set: Vec<usize>,
    tx_set: Vec<usize>,
}

impl Serialize for SubIc {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SubIcRepr {
            rx_set: self.rx_indices().map(|i| i + 1).collect(),
            tx_set: self.tx_indices().map(|i| i + 1).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SubIc {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SubIcRepr::deserialize(deserializer)?;
        let to_zero = |v: &[usize]| -> Result<Vec<usize>, D::Error> {
            v.iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| D::Error::custom("indices are 1-based")))
                .collect()
        };
        SubIc::from_indices(&to_zero(&repr.rx_set)?, &to_zero(&repr.tx_set)?, MAX_USERS).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_validation() {
        assert!(SubIc::from_indices(&[0, 3], &[], 3).is_err());
        assert!(SubIc::from_indices(&[1, 1], &[], 3).is_err());
        let s = SubIc::from_indices(&[0, 2], &[1], 3).unwrap();
        assert_eq!(s.rx_indices().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.to_string(), "({1,3},{2})");
        assert!(SubIc::EMPTY.is_degenerate());
    }

    #[test]
    fn strict_containment_needs_both_sides() {
        let small = SubIc::from_indices(&[0], &[3, 4], 5).unwrap();
        let big = SubIc::from_indices(&[0, 1], &[0, 3, 4], 5).unwrap();
        assert!(small.strictly_within(big));
        assert!(!big.strictly_within(big));
        let same_rx = SubIc::from_indices(&[0, 1], &[3], 5).unwrap();
        assert!(!same_rx.strictly_within(big));
    }

    #[test]
    fn json_is_one_based() {
        let s = SubIc::from_indices(&[0, 1], &[3, 4], 5).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"rx_set":[1,2],"tx_set":[4,5]}"#);
        let back: SubIc = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<SubIc>(r#"{"rx_set":[0],"tx_set":[]}"#).is_err());
    }
}
