//! Integer partitions used as cycle types of permutations.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Error raised when a list of parts does not form a valid partition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partition must have at least one part")]
    Empty,
    #[error("partition parts must be positive")]
    ZeroPart,
}

/// A cycle type: a weakly decreasing list of positive parts.
///
/// Construction canonicalizes the order, so two partitions with the same
/// multiset of parts always compare equal. The derived ordering is
/// lexicographic on the sorted parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclePartition {
    parts: Vec<u32>,
}

impl CyclePartition {
    /// Builds a partition from parts in any order; they are sorted weakly
    /// decreasing. Fails on an empty list or a zero part.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.is_empty() {
            return Err(PartitionError::Empty);
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(PartitionError::ZeroPart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(CyclePartition { parts })
    }

    /// The parts, weakly decreasing.
    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sum of the parts.
    pub fn total(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// Largest part.
    pub fn max_part(&self) -> u32 {
        self.parts[0]
    }

    /// Smallest part.
    pub fn min_part(&self) -> u32 {
        *self.parts.last().unwrap()
    }

    /// True when every part equals 1.
    pub fn is_all_ones(&self) -> bool {
        self.parts[0] == 1
    }
}

impl fmt::Display for CyclePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for CyclePartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for CyclePartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.parts.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclePartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(deserializer)?;
        CyclePartition::new(parts).map_err(serde::de::Error::custom)
    }
}

/// All partitions of `d`, in descending lexicographic order.
pub fn partitions_of(d: usize) -> Vec<CyclePartition> {
    partitions_bounded(d, d as u32)
}

/// All partitions of `total` whose parts are at most `max_part`, in
/// descending lexicographic order. Empty when `total` is 0 or unreachable.
pub fn partitions_bounded(total: usize, max_part: u32) -> Vec<CyclePartition> {
    let mut out = Vec::new();
    if total == 0 || max_part == 0 {
        return out;
    }
    let mut current = Vec::new();
    descend(total as u32, max_part, &mut current, &mut out);
    out
}

fn descend(remaining: u32, max: u32, current: &mut Vec<u32>, out: &mut Vec<CyclePartition>) {
    if remaining == 0 {
        out.push(CyclePartition {
            parts: current.clone(),
        });
        return;
    }
    let mut part = remaining.min(max);
    while part >= 1 {
        current.push(part);
        descend(remaining - part, part, current, out);
        current.pop();
        part -= 1;
    }
}
