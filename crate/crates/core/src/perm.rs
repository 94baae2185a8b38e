//! Exact permutation arithmetic on `{1..d}`.
//!
//! Permutations are stored as dense one-line image tables. All public
//! interfaces speak 1-based points to match standard cycle notation; the
//! internal table is 0-based. Values are immutable after construction, so
//! they can be shared freely across threads.
//!
//! The product convention is fixed once and for all: `p.compose(&q)` is the
//! permutation `x ↦ p(q(x))`, i.e. the *right* factor acts first. Every
//! construction in this crate is written against that convention.

use crate::partition::CyclePartition;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

/// Error raised by permutation constructors and checked operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("image table of degree {degree} is not a bijection of 1..={degree}")]
    NotBijective { degree: usize },
    #[error("point {point} is out of range 1..={degree}")]
    PointOutOfRange { point: u32, degree: usize },
    #[error("point {point} appears in more than one cycle position")]
    DuplicatePoint { point: u32 },
    #[error("cannot parse cycle notation: {0}")]
    Parse(String),
}

/// A bijection of `{1..d}` in one-line form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    /// `images[x] = p(x)` with both sides 0-based.
    images: Vec<u32>,
}

impl Permutation {
    /// The identity on `{1..d}`.
    pub fn identity(d: usize) -> Self {
        assert!(d >= 1, "degree must be at least 1");
        Permutation {
            images: (0..d as u32).collect(),
        }
    }

    /// Builds a permutation from a 1-based image table: `images[i]` is the
    /// image of point `i + 1`.
    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let d = images.len();
        if d == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut seen = vec![false; d];
        for &v in &images {
            if v < 1 || v as usize > d {
                return Err(PermError::NotBijective { degree: d });
            }
            if seen[(v - 1) as usize] {
                return Err(PermError::NotBijective { degree: d });
            }
            seen[(v - 1) as usize] = true;
        }
        Ok(Permutation {
            images: images.into_iter().map(|v| v - 1).collect(),
        })
    }

    /// Builds a permutation of `{1..d}` from disjoint cycles written with
    /// 1-based points. Cycles of length 0 or 1 contribute nothing; points
    /// may not repeat across or within cycles.
    pub fn from_cycles(d: usize, cycles: &[Vec<u32>]) -> Result<Self, PermError> {
        if d == 0 {
            return Err(PermError::ZeroDegree);
        }
        let mut images: Vec<u32> = (0..d as u32).collect();
        let mut used = vec![false; d];
        for cycle in cycles {
            for &pt in cycle {
                if pt < 1 || pt as usize > d {
                    return Err(PermError::PointOutOfRange { point: pt, degree: d });
                }
                if used[(pt - 1) as usize] {
                    return Err(PermError::DuplicatePoint { point: pt });
                }
                used[(pt - 1) as usize] = true;
            }
            if cycle.len() >= 2 {
                for w in 0..cycle.len() {
                    let from = cycle[w] - 1;
                    let to = cycle[(w + 1) % cycle.len()] - 1;
                    images[from as usize] = to;
                }
            }
        }
        Ok(Permutation { images })
    }

    /// Single-cycle convenience wrapper around [`Permutation::from_cycles`].
    pub fn cycle(d: usize, points: &[u32]) -> Result<Self, PermError> {
        Permutation::from_cycles(d, &[points.to_vec()])
    }

    /// The consecutive cycle `(lo, lo+1, …, hi)` on `{1..d}`.
    pub fn range_cycle(d: usize, lo: u32, hi: u32) -> Result<Self, PermError> {
        if lo > hi {
            return Err(PermError::Parse(format!("empty range {lo}..={hi}")));
        }
        let pts: Vec<u32> = (lo..=hi).collect();
        Permutation::cycle(d, &pts)
    }

    /// Number of points.
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// The same permutation viewed in a larger symmetric group; the new
    /// points `degree+1..=d` are fixed.
    pub fn extend(&self, d: usize) -> Permutation {
        assert!(d >= self.degree(), "extend cannot shrink the degree");
        let mut images = self.images.clone();
        images.extend(self.degree() as u32..d as u32);
        Permutation { images }
    }

    /// Image of the 1-based point `x`.
    pub fn apply(&self, x: u32) -> u32 {
        debug_assert!(x >= 1 && x as usize <= self.degree());
        self.images[(x - 1) as usize] + 1
    }

    /// The 1-based image table.
    pub fn images(&self) -> Vec<u32> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// The product `x ↦ self(other(x))`: `other` acts first.
    ///
    /// Panics on degree mismatch; use [`Permutation::checked_compose`] at
    /// trust boundaries.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "compose requires equal degrees"
        );
        let images = other
            .images
            .iter()
            .map(|&v| self.images[v as usize])
            .collect();
        Permutation { images }
    }

    /// Degree-checked variant of [`Permutation::compose`].
    pub fn checked_compose(&self, other: &Permutation) -> Result<Permutation, PermError> {
        if self.degree() != other.degree() {
            return Err(PermError::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.compose(other))
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.degree()];
        for (x, &v) in self.images.iter().enumerate() {
            images[v as usize] = x as u32;
        }
        Permutation { images }
    }

    /// The conjugate `g ∘ self ∘ g⁻¹`, which relabels every point `x` of the
    /// cycle structure as `g(x)`.
    pub fn conjugate(&self, g: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            g.degree(),
            "conjugate requires equal degrees"
        );
        let mut images = vec![0u32; self.degree()];
        for (x, &v) in self.images.iter().enumerate() {
            images[g.images[x] as usize] = g.images[v as usize];
        }
        Permutation { images }
    }

    /// The cycle containing `x`, listed from `x`, including fixed points.
    pub fn cycle_of(&self, x: u32) -> Vec<u32> {
        let mut cycle = vec![x];
        let mut y = self.apply(x);
        while y != x {
            cycle.push(y);
            y = self.apply(y);
        }
        cycle
    }

    /// The 1-based points moved by the permutation, ascending.
    pub fn support(&self) -> Vec<u32> {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i as u32 != v)
            .map(|(i, _)| i as u32 + 1)
            .collect()
    }

    /// True when the permutation moves `x`.
    pub fn moves(&self, x: u32) -> bool {
        self.apply(x) != x
    }

    /// Canonical cycle decomposition: fixed points omitted, each cycle
    /// rotated to start at its smallest element, cycles sorted by smallest
    /// element.
    pub fn to_cycles(&self) -> Vec<Vec<u32>> {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut cycles = Vec::new();
        for start in 0..d as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x as usize] {
                seen[x as usize] = true;
                cycle.push(x + 1);
                x = self.images[x as usize];
            }
            if cycle.len() >= 2 {
                cycles.push(cycle);
            }
        }
        cycles
    }

    /// The multiset of cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> CyclePartition {
        let d = self.degree();
        let mut seen = vec![false; d];
        let mut lengths = Vec::new();
        for start in 0..d as u32 {
            if seen[start as usize] {
                continue;
            }
            let mut len = 0u32;
            let mut x = start;
            while !seen[x as usize] {
                seen[x as usize] = true;
                len += 1;
                x = self.images[x as usize];
            }
            lengths.push(len);
        }
        CyclePartition::new(lengths).expect("cycle lengths form a partition")
    }

    /// Parses whitespace-insensitive cycle notation such as `(1,2,3)(4,5)`
    /// or `id`, over `{1..d}`.
    pub fn parse_cycles(text: &str, d: usize) -> Result<Self, PermError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() || compact == "id" {
            if d == 0 {
                return Err(PermError::ZeroDegree);
            }
            return Ok(Permutation::identity(d));
        }
        let mut cycles = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let Some(stripped) = rest.strip_prefix('(') else {
                return Err(PermError::Parse(format!("expected '(' at {rest:?}")));
            };
            let Some(close) = stripped.find(')') else {
                return Err(PermError::Parse("unclosed cycle".into()));
            };
            let body = &stripped[..close];
            let mut cycle = Vec::new();
            for piece in body.split(',') {
                let pt: u32 = piece
                    .parse()
                    .map_err(|_| PermError::Parse(format!("bad point {piece:?}")))?;
                cycle.push(pt);
            }
            cycles.push(cycle);
            rest = &stripped[close + 1..];
        }
        Permutation::from_cycles(d, &cycles)
    }
}

impl fmt::Display for Permutation {
    /// Canonical cycle text: `(1,2,3)(4,5)`, or `id` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.to_cycles();
        if cycles.is_empty() {
            return write!(f, "id");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, pt) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{pt}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[d={}] {}", self.degree(), self)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.images().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let images = Vec::<u32>::deserialize(deserializer)?;
        Permutation::from_images(images).map_err(serde::de::Error::custom)
    }
}

/// Orbits of `{1..d}` under the subgroup generated by `gens`, each orbit
/// ascending, orbits ordered by smallest element. An empty generator list
/// yields singletons.
pub fn orbits(degree: usize, gens: &[Permutation]) -> Vec<Vec<u32>> {
    for g in gens {
        assert_eq!(g.degree(), degree, "orbit generators must share the degree");
    }
    let mut parent: Vec<u32> = (0..degree as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let grand = parent[parent[x as usize] as usize];
            parent[x as usize] = grand;
            x = grand;
        }
        x
    }
    for g in gens {
        for x in 0..degree as u32 {
            let a = find(&mut parent, x);
            let b = find(&mut parent, g.images[x as usize]);
            if a != b {
                parent[a as usize] = b;
            }
        }
    }
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); degree];
    for x in 0..degree as u32 {
        let root = find(&mut parent, x);
        buckets[root as usize].push(x + 1);
    }
    let mut orbits: Vec<Vec<u32>> = buckets.into_iter().filter(|b| !b.is_empty()).collect();
    orbits.sort_by_key(|orbit| orbit[0]);
    orbits
}

/// True when `gens` generate a transitive subgroup of `S_d`.
pub fn is_transitive(degree: usize, gens: &[Permutation]) -> bool {
    orbits(degree, gens).len() == 1
}
