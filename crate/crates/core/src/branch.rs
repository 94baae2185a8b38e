//! Branch data, the realizability decision, and genus bookkeeping.
//!
//! A *special datum* is a degree `d` together with two arbitrary partitions
//! `A`, `B` of `d` and a list `M = (m₁,…,m_ℓ)`; the `i`-th remaining branch
//! point carries the partition `(m_i + 1, 1, …, 1)`. The total branch number
//! is `v = Σ m_i + (d − p) + (d − q)` where `p`, `q` are the lengths of `A`
//! and `B`, and a realizable datum has genus `g = (v + 2 − 2d) / 2`.

use crate::partition::{partitions_bounded, partitions_of, CyclePartition};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Error raised while validating branch data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchDataError {
    #[error("partition {side} sums to {total}, expected the degree {d}")]
    WrongTotal { side: char, total: usize, d: usize },
    #[error("partition {side} is all ones; an unbranched point must be omitted")]
    AllOnes { side: char },
    #[error("M must contain at least one entry")]
    EmptyM,
    #[error("every entry of M must be at least 1")]
    ZeroM,
    #[error("m = {m} requires m + 1 ≤ d = {d}")]
    MTooLarge { m: u32, d: usize },
    #[error("total branch number {v} is odd, so the genus is undefined")]
    OddBranchNumber { v: usize },
    #[error("total branch number {v} is below 2d − 2 = {min}, so the genus is undefined")]
    BranchNumberTooSmall { v: usize, min: usize },
}

/// A branch datum of the special shape `(d; A, B, M)`.
///
/// The order of `M` is preserved as given: the `i`-th entry labels the
/// `i`-th single-cycle branch point, and realizations list their `σ_i` in
/// the same order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SpecialDatum {
    d: usize,
    #[serde(rename = "A")]
    a: CyclePartition,
    #[serde(rename = "B")]
    b: CyclePartition,
    #[serde(rename = "M")]
    m: Vec<u32>,
}

impl SpecialDatum {
    /// Validates and builds a datum: `A` and `B` must be partitions of `d`
    /// that are not all ones, and every `m_i` must satisfy `1 ≤ m_i ≤ d − 1`.
    pub fn try_new(
        d: usize,
        a: CyclePartition,
        b: CyclePartition,
        m: Vec<u32>,
    ) -> Result<Self, BranchDataError> {
        if a.total() != d {
            return Err(BranchDataError::WrongTotal {
                side: 'A',
                total: a.total(),
                d,
            });
        }
        if b.total() != d {
            return Err(BranchDataError::WrongTotal {
                side: 'B',
                total: b.total(),
                d,
            });
        }
        if a.is_all_ones() {
            return Err(BranchDataError::AllOnes { side: 'A' });
        }
        if b.is_all_ones() {
            return Err(BranchDataError::AllOnes { side: 'B' });
        }
        if m.is_empty() {
            return Err(BranchDataError::EmptyM);
        }
        for &mi in &m {
            if mi == 0 {
                return Err(BranchDataError::ZeroM);
            }
            if mi as usize + 1 > d {
                return Err(BranchDataError::MTooLarge { m: mi, d });
            }
        }
        Ok(SpecialDatum { d, a, b, m })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &CyclePartition {
        &self.a
    }

    pub fn b(&self) -> &CyclePartition {
        &self.b
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    /// Number of single-cycle branch points.
    pub fn ell(&self) -> usize {
        self.m.len()
    }

    /// `v = Σ m_i + (d − p) + (d − q)`.
    pub fn total_branch_number(&self) -> usize {
        total_branch_number(self.d, &self.a, &self.b, &self.m)
    }

    /// The genus `(v + 2 − 2d) / 2`; errors when `v` is odd or below `2d − 2`.
    pub fn genus(&self) -> Result<usize, BranchDataError> {
        genus_of(self)
    }

    /// The full list of `ℓ + 2` partitions this datum abbreviates.
    pub fn to_general(&self) -> GeneralDatum {
        let mut partitions = vec![self.a.clone(), self.b.clone()];
        for &mi in &self.m {
            let mut parts = vec![mi + 1];
            parts.extend(std::iter::repeat(1).take(self.d - mi as usize - 1));
            partitions.push(CyclePartition::new(parts).unwrap());
        }
        GeneralDatum {
            d: self.d,
            partitions,
        }
    }
}

impl fmt::Display for SpecialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{d={}, A={}, B={}, M=(", self.d, self.a, self.b)?;
        for (i, mi) in self.m.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{mi}")?;
        }
        write!(f, ")}}")
    }
}

impl fmt::Debug for SpecialDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Deserialize)]
struct RawSpecialDatum {
    d: usize,
    #[serde(rename = "A")]
    a: CyclePartition,
    #[serde(rename = "B")]
    b: CyclePartition,
    #[serde(rename = "M")]
    m: Vec<u32>,
}

impl<'de> Deserialize<'de> for SpecialDatum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSpecialDatum::deserialize(deserializer)?;
        SpecialDatum::try_new(raw.d, raw.a, raw.b, raw.m).map_err(serde::de::Error::custom)
    }
}

/// A branch datum of arbitrary shape: any number of partitions of `d`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GeneralDatum {
    d: usize,
    partitions: Vec<CyclePartition>,
}

impl GeneralDatum {
    pub fn try_new(d: usize, partitions: Vec<CyclePartition>) -> Result<Self, BranchDataError> {
        for (i, p) in partitions.iter().enumerate() {
            if p.total() != d {
                return Err(BranchDataError::WrongTotal {
                    side: (b'0' + (i as u8).min(9)) as char,
                    total: p.total(),
                    d,
                });
            }
        }
        Ok(GeneralDatum { d, partitions })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn partitions(&self) -> &[CyclePartition] {
        &self.partitions
    }
}

impl fmt::Display for GeneralDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{d={}; ", self.d)?;
        for (i, p) in self.partitions.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for GeneralDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Deserialize)]
struct RawGeneralDatum {
    d: usize,
    partitions: Vec<CyclePartition>,
}

impl<'de> Deserialize<'de> for GeneralDatum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawGeneralDatum::deserialize(deserializer)?;
        GeneralDatum::try_new(raw.d, raw.partitions).map_err(serde::de::Error::custom)
    }
}

/// Why a datum is realizable or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    /// Genus 0: the largest `m_i` clears the `d / gcd` bound.
    #[serde(rename = "OK_CASE1")]
    OkCase1,
    /// `v ≥ 2d` and even.
    #[serde(rename = "OK_CASE2")]
    OkCase2,
    /// `v` is odd.
    #[serde(rename = "ODD_TOTAL_BRANCHING")]
    OddTotalBranching,
    /// `v` is even but below `2d − 2`.
    #[serde(rename = "TOO_LITTLE_BRANCHING")]
    TooLittleBranching,
    /// Genus 0 with `max m_i ≥ d / gcd(A ∪ B)`.
    #[serde(rename = "GCD_OBSTRUCTION")]
    GcdObstruction,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Reason::OkCase1 => "OK_CASE1",
            Reason::OkCase2 => "OK_CASE2",
            Reason::OddTotalBranching => "ODD_TOTAL_BRANCHING",
            Reason::TooLittleBranching => "TOO_LITTLE_BRANCHING",
            Reason::GcdObstruction => "GCD_OBSTRUCTION",
        };
        f.write_str(name)
    }
}

/// Outcome of [`decide_realizable`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizabilityVerdict {
    pub realizable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    pub reason: Reason,
}

/// `v = Σ m_i + (d − p) + (d − q)`, defined for raw components so that even
/// data rejected by validation (such as all-ones partitions) can be measured.
pub fn total_branch_number(d: usize, a: &CyclePartition, b: &CyclePartition, m: &[u32]) -> usize {
    let msum: usize = m.iter().map(|&x| x as usize).sum();
    msum + (d - a.len()) + (d - b.len())
}

/// The genus `(v + 2 − 2d) / 2` of a realization of the datum.
pub fn genus_of(datum: &SpecialDatum) -> Result<usize, BranchDataError> {
    let d = datum.degree();
    let v = datum.total_branch_number();
    if v % 2 != 0 {
        return Err(BranchDataError::OddBranchNumber { v });
    }
    if v + 2 < 2 * d {
        return Err(BranchDataError::BranchNumberTooSmall { v, min: 2 * d - 2 });
    }
    Ok((v + 2 - 2 * d) / 2)
}

/// Decides realizability: a datum is realizable exactly when either
/// `v = 2d − 2` and `max m_i < d / gcd(a₁,…,a_p, b₁,…,b_q)`, or `v ≥ 2d`
/// and `v` is even.
pub fn decide_realizable(datum: &SpecialDatum) -> RealizabilityVerdict {
    let d = datum.degree();
    let v = datum.total_branch_number();
    if v % 2 != 0 {
        return RealizabilityVerdict {
            realizable: false,
            genus: None,
            reason: Reason::OddTotalBranching,
        };
    }
    if v + 2 == 2 * d {
        let mut gcd = 0u32;
        for &part in datum.a().parts().iter().chain(datum.b().parts()) {
            gcd = num_integer::gcd(gcd, part);
        }
        let bound = d / gcd as usize;
        let max_m = *datum.m().iter().max().unwrap() as usize;
        if max_m < bound {
            return RealizabilityVerdict {
                realizable: true,
                genus: Some(0),
                reason: Reason::OkCase1,
            };
        }
        return RealizabilityVerdict {
            realizable: false,
            genus: None,
            reason: Reason::GcdObstruction,
        };
    }
    if v >= 2 * d {
        return RealizabilityVerdict {
            realizable: true,
            genus: Some((v + 2 - 2 * d) / 2),
            reason: Reason::OkCase2,
        };
    }
    RealizabilityVerdict {
        realizable: false,
        genus: None,
        reason: Reason::TooLittleBranching,
    }
}

/// The degree-`ℓd` datum `{(ℓa₁,…,ℓa_p), (ℓb₁,…,ℓb_q), (m₁+1,…,m_ℓ+1,1,…,1)}`.
pub fn belyi_datum(datum: &SpecialDatum) -> GeneralDatum {
    let ell = datum.ell();
    let d = datum.degree() * ell;
    let scale = |p: &CyclePartition| {
        CyclePartition::new(p.parts().iter().map(|&x| x * ell as u32).collect()).unwrap()
    };
    let mut third: Vec<u32> = datum.m().iter().map(|&mi| mi + 1).collect();
    let used: usize = third.iter().map(|&x| x as usize).sum();
    third.extend(std::iter::repeat(1).take(d - used));
    GeneralDatum {
        d,
        partitions: vec![
            scale(datum.a()),
            scale(datum.b()),
            CyclePartition::new(third).unwrap(),
        ],
    }
}

/// Every special datum of degree `d` whose genus lies in
/// `genus_min..=genus_max`, once each in canonical form: `A ≥ B`
/// lexicographically and `M` weakly decreasing.
pub fn enumerate_special_data(
    d: usize,
    genus_min: usize,
    genus_max: usize,
) -> Vec<SpecialDatum> {
    let mut out = Vec::new();
    if d < 2 {
        return out;
    }
    let parts = partitions_of(d);
    let usable: Vec<&CyclePartition> = parts.iter().filter(|p| !p.is_all_ones()).collect();
    for (ai, a) in usable.iter().enumerate() {
        for b in &usable[ai..] {
            let pq = a.len() + b.len();
            for genus in genus_min..=genus_max {
                let m_sum = pq + 2 * genus;
                if m_sum < 2 {
                    continue;
                }
                for m in partitions_bounded(m_sum - 2, d as u32 - 1) {
                    let datum = SpecialDatum::try_new(
                        d,
                        (*a).clone(),
                        (*b).clone(),
                        m.parts().to_vec(),
                    )
                    .expect("enumerated datum is valid");
                    debug_assert_eq!(datum.genus().unwrap(), genus);
                    out.push(datum);
                }
            }
        }
    }
    out
}
