//! Constructive realization of branch data by permutation tuples.
//!
//! A special datum `{A, B, M}` of degree `d` is realized by a constellation
//! `(τ₁, τ₂, σ₁, …, σ_ℓ)`: permutations of `{1..d}` whose ordered product is
//! the identity, acting transitively, with `τ₁` of cycle type `A`, `τ₂` of
//! cycle type `B`, and each `σᵢ` a single cycle of length `mᵢ + 1`.
//!
//! Positive-genus data are built by explicit surgery: a datum with many
//! sigma factors is reduced to one with a single sigma factor (merging
//! cycles of `τ₁`, or absorbing a pair of transpositions), and the
//! single-sigma case recurses on the degree, growing cycles back one branch
//! point at a time.  Genus-zero data are delegated to the exhaustive
//! backtracking search, whose positive answers are certified by the same
//! verifier.  Every constructed tuple is verified before it is returned.

use std::fmt;

use serde::de::Error as DeError;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::branch::{decide_realizable, BranchDataError, RealizabilityVerdict, SpecialDatum};
use crate::full_cycle;
use crate::partition::CyclePartition;
use crate::perm::{is_transitive, Permutation};
use crate::search::{search_realize, SearchBudget, SearchOutcome};

pub use crate::full_cycle::{full_cycle_fallback_count, split_full_cycle};

/// Precondition violations reported by the realization operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("cycle split parameters s={s}, r={r}, d={d}: {why}")]
    InvalidSplit {
        s: usize,
        r: usize,
        d: usize,
        why: &'static str,
    },
    #[error("partitions must share one total: {left} vs {right}")]
    TotalMismatch { left: usize, right: usize },
    #[error("a two-factor full cycle needs (d-p)+(d-q)+(d-1) even")]
    FullCycleParity,
    #[error("a two-factor full cycle needs p+q <= d+1; got p={p}, q={q}, d={d}")]
    TooManyParts { p: usize, q: usize, d: usize },
    #[error("a single sigma factor needs m = p+q-2+2g with g >= 1; got m={m}")]
    BadSigmaLength { m: u32 },
    #[error("the matched base case needs p = q = m; got p={p}, q={q}, m={m}")]
    BaseShapeMismatch { p: usize, q: usize, m: u32 },
    #[error("merge reduction needs sum(M) = p+q; got sum {sum} with p+q = {pq}")]
    NotBoundary { sum: usize, pq: usize },
    #[error("merge reduction needs at least two sigma factors")]
    NotEnoughSlots,
    #[error("sigma slots {i} and {j} are not adjacent")]
    NotAdjacentSlots { i: usize, j: usize },
    #[error("sigma slot {slot} out of range for {len} slots")]
    SlotOutOfRange { slot: usize, len: usize },
    #[error("factor {slot} has degree {found}, expected {expected}")]
    MixedDegrees {
        slot: usize,
        expected: usize,
        found: usize,
    },
    #[error("datum invalid: {0}")]
    Datum(#[from] BranchDataError),
}

fn factor_name(slot: usize) -> String {
    match slot {
        0 => "tau1".to_string(),
        1 => "tau2".to_string(),
        n => format!("sigma{}", n - 1),
    }
}

/// Ways a candidate tuple can fail to realize a datum.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyFailure {
    #[error("expected {expected} factors, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("factor {} has degree {found}, expected {expected}", factor_name(*slot))]
    DegreeMismatch {
        slot: usize,
        expected: usize,
        found: usize,
    },
    #[error("the ordered product of the factors is not the identity")]
    ProductNotIdentity,
    #[error("factor {} has cycle type {found}, expected {expected}", factor_name(*slot))]
    WrongType {
        slot: usize,
        expected: CyclePartition,
        found: CyclePartition,
    },
    #[error("the factors do not act transitively")]
    NotTransitive,
}

/// Which cycle of `τ₁` (resp. `τ₂`) carries each part of `A` (resp. `B`).
///
/// Entry `i` of the `a` side lists the points of the `τ₁`-cycle realizing
/// the `i`-th part of `A`, in cycle order; likewise for `b` and `τ₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartMap {
    a_parts: Vec<Vec<u32>>,
    b_parts: Vec<Vec<u32>>,
}

impl PartMap {
    pub fn new(a_parts: Vec<Vec<u32>>, b_parts: Vec<Vec<u32>>) -> PartMap {
        PartMap { a_parts, b_parts }
    }

    pub fn a_parts(&self) -> &[Vec<u32>] {
        &self.a_parts
    }

    pub fn b_parts(&self) -> &[Vec<u32>] {
        &self.b_parts
    }
}

/// A tuple of permutations with identity product, stored in datum order:
/// `τ₁`, `τ₂`, then the sigma factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constellation {
    degree: usize,
    perms: Vec<Permutation>,
    part_map: Option<PartMap>,
}

impl Constellation {
    /// Wraps a factor list after checking that all degrees agree.
    pub fn new(degree: usize, perms: Vec<Permutation>) -> Result<Constellation, RealizeError> {
        for (slot, p) in perms.iter().enumerate() {
            if p.degree() != degree {
                return Err(RealizeError::MixedDegrees {
                    slot,
                    expected: degree,
                    found: p.degree(),
                });
            }
        }
        Ok(Constellation {
            degree,
            perms,
            part_map: None,
        })
    }

    pub fn with_part_map(mut self, part_map: PartMap) -> Constellation {
        self.part_map = Some(part_map);
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn tau1(&self) -> &Permutation {
        &self.perms[0]
    }

    pub fn tau2(&self) -> &Permutation {
        &self.perms[1]
    }

    pub fn sigmas(&self) -> &[Permutation] {
        &self.perms[2..]
    }

    pub fn part_map(&self) -> Option<&PartMap> {
        self.part_map.as_ref()
    }

    /// The factors in cycle notation, separated by single spaces.
    pub fn cycles_text(&self) -> String {
        self.perms
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Constellation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycles_text())
    }
}

impl Serialize for Constellation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Constellation", 2)?;
        st.serialize_field("d", &self.degree)?;
        st.serialize_field("perms", &self.perms)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Constellation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            perms: Vec<Permutation>,
        }
        let raw = Raw::deserialize(deserializer)?;
        Constellation::new(raw.d, raw.perms).map_err(DeError::custom)
    }
}

/// Result of an attempt to realize a datum.
#[derive(Debug, Clone, PartialEq)]
pub enum RealizeOutcome {
    /// A verified constellation for the datum.
    Realized(Constellation),
    /// The existence test rejects the datum; the verdict says why.
    NotRealizable(RealizabilityVerdict),
    /// The genus-zero search gave up before settling the question.
    SearchExhausted,
}

/// Checks that `c` realizes `datum`: factor count, degrees, identity
/// product, cycle types (sigma slots in the order `M` was given), and
/// transitivity, reporting the first failure.
pub fn verify_constellation(datum: &SpecialDatum, c: &Constellation) -> Result<(), VerifyFailure> {
    let d = datum.degree();
    let ell = datum.ell();
    if c.perms.len() != ell + 2 {
        return Err(VerifyFailure::WrongLength {
            expected: ell + 2,
            found: c.perms.len(),
        });
    }
    for (slot, p) in c.perms.iter().enumerate() {
        if p.degree() != d {
            return Err(VerifyFailure::DegreeMismatch {
                slot,
                expected: d,
                found: p.degree(),
            });
        }
    }
    let product = c
        .perms
        .iter()
        .fold(Permutation::identity(d), |acc, p| acc.compose(p));
    if !product.is_identity() {
        return Err(VerifyFailure::ProductNotIdentity);
    }
    for (slot, p) in c.perms.iter().enumerate() {
        let expected = match slot {
            0 => datum.a().clone(),
            1 => datum.b().clone(),
            n => single_cycle_type(datum.m()[n - 2] + 1, d),
        };
        let found = p.cycle_type();
        if found != expected {
            return Err(VerifyFailure::WrongType {
                slot,
                expected,
                found,
            });
        }
    }
    if !is_transitive(d, &c.perms) {
        return Err(VerifyFailure::NotTransitive);
    }
    Ok(())
}

/// The partition `(len, 1, 1, …)` of `d`: one cycle of the given length.
pub(crate) fn single_cycle_type(len: u32, d: usize) -> CyclePartition {
    let mut parts = vec![len];
    parts.resize(d - len as usize + 1, 1);
    CyclePartition::new(parts).expect("a single cycle length bounded by the degree")
}

/// Cycle decomposition including fixed points, in canonical order.
pub(crate) fn cycles_with_fixed(p: &Permutation) -> Vec<Vec<u32>> {
    let d = p.degree();
    let mut seen = vec![false; d + 1];
    let mut cycles = Vec::new();
    for start in 1..=d as u32 {
        if seen[start as usize] {
            continue;
        }
        let cycle = p.cycle_of(start);
        for &pt in &cycle {
            seen[pt as usize] = true;
        }
        cycles.push(cycle);
    }
    cycles
}

/// Matches the cycles of `perm` to a list of part lengths, first unused
/// cycle of each length in canonical order.
fn assign_parts(perm: &Permutation, parts: &[u32]) -> Vec<Vec<u32>> {
    let cycles = cycles_with_fixed(perm);
    let mut used = vec![false; cycles.len()];
    parts
        .iter()
        .map(|&len| {
            let idx = (0..cycles.len())
                .find(|&i| !used[i] && cycles[i].len() == len as usize)
                .expect("cycle type matches the part list");
            used[idx] = true;
            cycles[idx].clone()
        })
        .collect()
}

/// Realizes a valid two-factor full-cycle product: `τ₁` of type `a`, `τ₂`
/// of type `b`, with `τ₁ τ₂` a `d`-cycle.
///
/// Requires equal totals, `(d-p)+(d-q)+(d-1)` even, and `p+q <= d+1`;
/// every such pair of partitions admits a solution.
pub fn realize_full_cycle(
    a: &CyclePartition,
    b: &CyclePartition,
) -> Result<(Permutation, Permutation), RealizeError> {
    let d = a.total();
    if b.total() != d {
        return Err(RealizeError::TotalMismatch {
            left: d,
            right: b.total(),
        });
    }
    let p = a.len();
    let q = b.len();
    if ((d - p) + (d - q) + (d - 1)) % 2 != 0 {
        return Err(RealizeError::FullCycleParity);
    }
    if p + q > d + 1 {
        return Err(RealizeError::TooManyParts { p, q, d });
    }
    Ok(full_cycle::construct(a.parts(), b.parts(), d))
}

/// Realizes `{A, B, (m1)}` with one sigma factor and positive genus.
pub fn realize_ell1(
    a: &CyclePartition,
    b: &CyclePartition,
    m1: u32,
) -> Result<Constellation, RealizeError> {
    let d = a.total();
    if b.total() != d {
        return Err(RealizeError::TotalMismatch {
            left: d,
            right: b.total(),
        });
    }
    let datum = SpecialDatum::try_new(d, a.clone(), b.clone(), vec![m1])?;
    let pq = a.len() + b.len();
    let m = m1 as usize;
    if m < pq || (m - pq) % 2 != 0 {
        return Err(RealizeError::BadSigmaLength { m: m1 });
    }
    let e = ell1(a.parts(), b.parts(), m1, d);
    let c = Constellation {
        degree: d,
        perms: vec![e.tau1, e.tau2, e.sigma],
        part_map: Some(PartMap::new(e.a_sets, e.b_sets)),
    };
    if let Err(f) = verify_constellation(&datum, &c) {
        panic!("single-sigma construction failed verification for {datum}: {f}");
    }
    Ok(c)
}

/// Realizes the genus-one base `{A, B, (m, m)}` with `p = q = m`.
pub fn realize_base_ell2(
    a: &CyclePartition,
    b: &CyclePartition,
    m: u32,
) -> Result<Constellation, RealizeError> {
    let d = a.total();
    if b.total() != d {
        return Err(RealizeError::TotalMismatch {
            left: d,
            right: b.total(),
        });
    }
    if a.len() != m as usize || b.len() != m as usize {
        return Err(RealizeError::BaseShapeMismatch {
            p: a.len(),
            q: b.len(),
            m,
        });
    }
    let datum = SpecialDatum::try_new(d, a.clone(), b.clone(), vec![m, m])?;
    let built = base_ell2_built(a.parts(), b.parts(), d);
    let c = Constellation {
        degree: d,
        perms: built.perms,
        part_map: Some(built.pm),
    };
    if let Err(f) = verify_constellation(&datum, &c) {
        panic!("matched base construction failed verification for {datum}: {f}");
    }
    Ok(c)
}

/// Realizes a genus-one datum with `sum(M) = p + q` by merging cycles of
/// `τ₁` until a single sigma factor remains.
pub fn merge_parts_reduce(
    a: &CyclePartition,
    b: &CyclePartition,
    m: &[u32],
) -> Result<Constellation, RealizeError> {
    let d = a.total();
    if b.total() != d {
        return Err(RealizeError::TotalMismatch {
            left: d,
            right: b.total(),
        });
    }
    if m.len() < 2 {
        return Err(RealizeError::NotEnoughSlots);
    }
    let datum = SpecialDatum::try_new(d, a.clone(), b.clone(), m.to_vec())?;
    let sum: usize = m.iter().map(|&x| x as usize).sum();
    let pq = a.len() + b.len();
    if sum != pq {
        return Err(RealizeError::NotBoundary { sum, pq });
    }
    let c = realize_positive_genus(&datum);
    if let Err(f) = verify_constellation(&datum, &c) {
        panic!("merge reduction failed verification for {datum}: {f}");
    }
    Ok(c)
}

/// Inserts a cancelling pair of equal transpositions between adjacent sigma
/// slots `i` and `j = i+1`, growing both cycles by one point.
///
/// The transposition `(x, y)` is chosen from the slot supports so that
/// exactly one endpoint lies in each: with supports `A₁`, `A₂`, take
/// `x = min A₁, y = min ∉ A₂` when `A₁ ⊆ A₂`; `x = min A₂, y = min ∉ A₁`
/// when `A₂ ⊊ A₁`; and `x = min A₁∖A₂, y = min A₂∖A₁` when incomparable.
/// An empty support behaves as a subset of the other; two empty supports
/// take `(1, 2)`.
pub fn absorb_transposition(
    c: &Constellation,
    i: usize,
    j: usize,
) -> Result<Constellation, RealizeError> {
    let ell = c.perms.len().saturating_sub(2);
    if j != i + 1 {
        return Err(RealizeError::NotAdjacentSlots { i, j });
    }
    if j >= ell {
        return Err(RealizeError::SlotOutOfRange { slot: j, len: ell });
    }
    let mut perms = c.perms.clone();
    absorb_in_place(&mut perms, i);
    Ok(Constellation {
        degree: c.degree,
        perms,
        part_map: c.part_map.clone(),
    })
}

/// The elementary braid move on sigma slots `j` and `j+1`:
/// `(σ_j, σ_{j+1}) → (σ_j σ_{j+1} σ_j⁻¹, σ_j)`.  The ordered product,
/// transitivity, and the generated subgroup are unchanged; the two slots
/// exchange cycle types.
pub fn braid_move(c: &Constellation, j: usize) -> Result<Constellation, RealizeError> {
    let ell = c.perms.len().saturating_sub(2);
    if j + 1 >= ell {
        return Err(RealizeError::SlotOutOfRange { slot: j + 1, len: ell });
    }
    let mut perms = c.perms.clone();
    braid_in_place(&mut perms, j);
    Ok(Constellation {
        degree: c.degree,
        perms,
        part_map: c.part_map.clone(),
    })
}

/// The adjoint tuple `(τ₂⁻¹, τ₁⁻¹, σ_ℓ⁻¹, …, σ₁⁻¹)`, which realizes the
/// datum with `A` and `B` exchanged and `M` reversed.
pub fn swap_adjoint(c: &Constellation) -> Constellation {
    assert!(
        c.perms.len() >= 2,
        "the adjoint needs both tau factors present"
    );
    let mut perms = vec![c.perms[1].inverse(), c.perms[0].inverse()];
    perms.extend(c.perms[2..].iter().rev().map(Permutation::inverse));
    let part_map = c
        .part_map
        .clone()
        .map(|pm| PartMap::new(pm.b_parts, pm.a_parts));
    Constellation {
        degree: c.degree,
        perms,
        part_map,
    }
}

/// Decides `datum` and, when it is realizable, produces a verified
/// constellation: positive genus constructively, genus zero through the
/// bounded search (`SearchExhausted` when the budget runs out).
pub fn realize(datum: &SpecialDatum) -> RealizeOutcome {
    realize_with_budget(datum, &SearchBudget::default())
}

/// `realize` with an explicit budget for the genus-zero search.
pub fn realize_with_budget(datum: &SpecialDatum, budget: &SearchBudget) -> RealizeOutcome {
    let verdict = decide_realizable(datum);
    if !verdict.realizable {
        return RealizeOutcome::NotRealizable(verdict);
    }
    let genus = verdict.genus.expect("realizable verdicts carry a genus");
    if genus == 0 {
        return match search_realize(&datum.to_general(), budget) {
            SearchOutcome::Found(c) => {
                if let Err(f) = verify_constellation(datum, &c) {
                    panic!("search result failed verification for {datum}: {f}");
                }
                RealizeOutcome::Realized(c)
            }
            SearchOutcome::NotFound => {
                panic!("exhaustive search refuted a datum the existence test admits: {datum}")
            }
            SearchOutcome::Exhausted => RealizeOutcome::SearchExhausted,
        };
    }
    let c = realize_positive_genus(datum);
    if let Err(f) = verify_constellation(datum, &c) {
        panic!("construction failed verification for {datum}: {f}");
    }
    RealizeOutcome::Realized(c)
}

// ---------------------------------------------------------------------------
// Internal construction machinery.

struct Built {
    perms: Vec<Permutation>,
    pm: PartMap,
}

fn realize_positive_genus(datum: &SpecialDatum) -> Constellation {
    let d = datum.degree();
    let mut msorted = datum.m().to_vec();
    msorted.sort_unstable_by(|x, y| y.cmp(x));
    let mut built = realize_sorted(datum.a().parts(), datum.b().parts(), &msorted, d);
    braid_to_order(&mut built.perms, datum.m());
    Constellation {
        degree: d,
        perms: built.perms,
        part_map: Some(built.pm),
    }
}

/// Core driver: `m` is sorted descending; the sigma slots of the result
/// follow `m`'s order.
fn realize_sorted(av: &[u32], bv: &[u32], m: &[u32], d: usize) -> Built {
    if m.len() == 1 {
        let e = ell1(av, bv, m[0], d);
        return Built {
            perms: vec![e.tau1, e.tau2, e.sigma],
            pm: PartMap::new(e.a_sets, e.b_sets),
        };
    }
    let p = av.len();
    let q = bv.len();
    let sum: usize = m.iter().map(|&x| x as usize).sum();
    let excess = sum - (p + q);
    debug_assert!(excess % 2 == 0, "sigma lengths must match the genus parity");
    if excess == 0 {
        if m.len() == 2 && p == q && m[0] == m[1] && m[0] as usize == p {
            return base_ell2_built(av, bv, d);
        }
        if p >= q {
            merge_step(av, bv, m, d)
        } else {
            let mut built = swap_built(realize_sorted(bv, av, m, d));
            braid_to_order(&mut built.perms, m);
            built
        }
    } else {
        let u = m[0] - 1;
        let v = m[1] - 1;
        if v >= 1 {
            let mut m2: Vec<u32> = vec![u, v];
            m2.extend_from_slice(&m[2..]);
            m2.sort_unstable_by(|x, y| y.cmp(x));
            let mut built = realize_sorted(av, bv, &m2, d);
            let slot_u = m2.iter().position(|&w| w == u).expect("shrunk slot");
            let slot_v = m2
                .iter()
                .enumerate()
                .position(|(i, &w)| i != slot_u && w == v)
                .expect("second shrunk slot");
            debug_assert!(slot_u < slot_v);
            for jj in (slot_u + 1..slot_v).rev() {
                braid_in_place(&mut built.perms, jj);
            }
            absorb_in_place(&mut built.perms, slot_u);
            built
        } else if u >= 1 {
            let mut m2: Vec<u32> = vec![u];
            m2.extend_from_slice(&m[2..]);
            m2.sort_unstable_by(|x, y| y.cmp(x));
            let mut built = realize_sorted(av, bv, &m2, d);
            let slot_u = m2.iter().position(|&w| w == u).expect("shrunk slot");
            built
                .perms
                .insert(2 + slot_u + 1, Permutation::identity(d));
            absorb_in_place(&mut built.perms, slot_u);
            built
        } else {
            // All sigma lengths are 1, so at least four slots remain and two
            // can be replaced by a cancelling pair of transpositions.
            let m2 = m[2..].to_vec();
            debug_assert!(m2.len() >= 2);
            let mut built = realize_sorted(av, bv, &m2, d);
            let t = Permutation::cycle(d, &[1, 2]).expect("degree at least two");
            built.perms.push(t.clone());
            built.perms.push(t);
            built
        }
    }
}

/// Merges the first `m_ℓ + 1` parts of `A` into one, realizes the shorter
/// datum, relabels so the merged cycle is `(1, …, L)`, and splits it back
/// with a cycle `K` on the block starts, appending `K⁻¹` as the last sigma.
fn merge_step(av: &[u32], bv: &[u32], m: &[u32], d: usize) -> Built {
    let mlast = *m.last().expect("at least two sigma slots") as usize;
    debug_assert!(mlast < av.len(), "merge needs m_last + 1 parts on the A side");
    let merged: u32 = av[..mlast + 1].iter().sum();
    let mut av2 = vec![merged];
    av2.extend_from_slice(&av[mlast + 1..]);
    let rec = realize_sorted(&av2, bv, &m[..m.len() - 1], d);

    let zmin = *rec.pm.a_parts[0]
        .iter()
        .min()
        .expect("the merged part is nonempty");
    let zseq = rec.perms[0].cycle_of(zmin);
    debug_assert_eq!(zseq.len(), merged as usize);
    let gamma = relabel_to_front(&zseq, d);
    let mut perms: Vec<Permutation> = rec.perms.iter().map(|p| p.conjugate(&gamma)).collect();
    let map_set = |set: &Vec<u32>| -> Vec<u32> { set.iter().map(|&z| gamma.apply(z)).collect() };

    // Prefix sums of the merged parts; K cycles through the block starts.
    let mut pref = Vec::with_capacity(mlast + 1);
    let mut acc = 0u32;
    for &a in &av[..mlast + 1] {
        acc += a;
        pref.push(acc);
    }
    let mut k_points: Vec<u32> = pref[..mlast].iter().rev().map(|&s| s + 1).collect();
    k_points.push(1);
    let k = Permutation::cycle(d, &k_points).expect("block starts are distinct");

    perms[0] = k.compose(&perms[0]);
    perms.push(k.inverse());

    let mut a_sets: Vec<Vec<u32>> = Vec::with_capacity(av.len());
    let mut lo = 1u32;
    for &s in &pref {
        a_sets.push((lo..=s).collect());
        lo = s + 1;
    }
    for set in &rec.pm.a_parts[1..] {
        a_sets.push(map_set(set));
    }
    let b_sets = rec.pm.b_parts.iter().map(map_set).collect();
    Built {
        perms,
        pm: PartMap::new(a_sets, b_sets),
    }
}

/// The relabelling sending `seq` to `1, 2, …, len` in order and the
/// remaining points, ascending, to the remaining labels.
fn relabel_to_front(seq: &[u32], d: usize) -> Permutation {
    let l = seq.len();
    let mut img = vec![0u32; d + 1];
    for (i, &z) in seq.iter().enumerate() {
        img[z as usize] = i as u32 + 1;
    }
    let mut next = l as u32 + 1;
    for z in 1..=d as u32 {
        if img[z as usize] == 0 {
            img[z as usize] = next;
            next += 1;
        }
    }
    Permutation::from_images(img[1..].to_vec()).expect("a bijective relabelling")
}

/// The genus-one base `{A, B, (m, m)}` with `p = q = m`: consecutive
/// ascending `A`-blocks against descending `B`-blocks, with the two sigma
/// factors built from the block-start cycles joined through `(1, 2)`.
fn base_ell2_built(av: &[u32], bv: &[u32], d: usize) -> Built {
    let m = av.len();
    if m == 1 {
        let c = Permutation::range_cycle(d, 1, d as u32).expect("positive degree");
        let t = Permutation::cycle(d, &[1, 2]).expect("degree at least two");
        let all: Vec<u32> = (1..=d as u32).collect();
        return Built {
            perms: vec![c.clone(), c.inverse(), t.clone(), t],
            pm: PartMap::new(vec![all.clone()], vec![all]),
        };
    }
    let pref = |parts: &[u32]| -> Vec<u32> {
        let mut out = Vec::with_capacity(parts.len());
        let mut acc = 0u32;
        for &x in parts {
            acc += x;
            out.push(acc);
        }
        out
    };
    let sa = pref(av);
    let tb = pref(bv);

    let ascending_blocks = |sums: &[u32]| -> Vec<Vec<u32>> {
        let mut blocks = Vec::new();
        let mut lo = 1u32;
        for &s in sums {
            blocks.push((lo..=s).collect());
            lo = s + 1;
        }
        blocks
    };
    let a_blocks = ascending_blocks(&sa);
    let b_blocks = ascending_blocks(&tb);

    let tau1 = Permutation::from_cycles(d, &a_blocks).expect("disjoint blocks");
    let b_desc: Vec<Vec<u32>> = b_blocks
        .iter()
        .map(|blk| blk.iter().rev().copied().collect())
        .collect();
    let tau2 = Permutation::from_cycles(d, &b_desc).expect("disjoint blocks");

    let mut ka_points: Vec<u32> = sa[..m - 1].iter().rev().map(|&s| s + 1).collect();
    ka_points.push(1);
    let ka = Permutation::cycle(d, &ka_points).expect("distinct block starts");
    let mut kb_points: Vec<u32> = vec![1];
    kb_points.extend(tb[..m - 1].iter().map(|&s| s + 1));
    let kb = Permutation::cycle(d, &kb_points).expect("distinct block starts");

    let t = Permutation::cycle(d, &[1, 2]).expect("degree at least two");
    let sigma1 = kb.inverse().compose(&t);
    let sigma2 = t.compose(&ka.inverse());
    Built {
        perms: vec![tau1, tau2, sigma1, sigma2],
        pm: PartMap::new(a_blocks, b_blocks),
    }
}

fn swap_built(b: Built) -> Built {
    let mut perms = vec![b.perms[1].inverse(), b.perms[0].inverse()];
    perms.extend(b.perms[2..].iter().rev().map(Permutation::inverse));
    Built {
        perms,
        pm: PartMap::new(b.pm.b_parts, b.pm.a_parts),
    }
}

fn braid_in_place(perms: &mut [Permutation], j: usize) {
    let s1 = perms[2 + j].clone();
    let s2 = perms[2 + j + 1].clone();
    perms[2 + j] = s1.compose(&s2).compose(&s1.inverse());
    perms[2 + j + 1] = s1;
}

fn absorb_in_place(perms: &mut [Permutation], i: usize) {
    let d = perms[0].degree();
    let (x, y) = absorb_points(&perms[2 + i], &perms[2 + i + 1], d);
    let t = Permutation::cycle(d, &[x, y]).expect("two distinct points");
    perms[2 + i] = perms[2 + i].compose(&t);
    perms[2 + i + 1] = t.compose(&perms[2 + i + 1]);
}

fn absorb_points(s1: &Permutation, s2: &Permutation, d: usize) -> (u32, u32) {
    let a1 = s1.support();
    let a2 = s2.support();
    let member = |s: &[u32]| -> Vec<bool> {
        let mut m = vec![false; d + 1];
        for &z in s {
            m[z as usize] = true;
        }
        m
    };
    let min_outside = |m: &[bool]| -> u32 {
        (1..=d as u32)
            .find(|&z| !m[z as usize])
            .expect("a sigma support never covers every point here")
    };
    if a1.is_empty() && a2.is_empty() {
        return (1, 2);
    }
    if a1.is_empty() {
        let in2 = member(&a2);
        return (a2[0], min_outside(&in2));
    }
    if a2.is_empty() {
        let in1 = member(&a1);
        return (a1[0], min_outside(&in1));
    }
    let in1 = member(&a1);
    let in2 = member(&a2);
    let sub12 = a1.iter().all(|&z| in2[z as usize]);
    let sub21 = a2.iter().all(|&z| in1[z as usize]);
    if sub12 {
        (a1[0], min_outside(&in2))
    } else if sub21 {
        (a2[0], min_outside(&in1))
    } else {
        let x = a1
            .iter()
            .copied()
            .find(|&z| !in2[z as usize])
            .expect("incomparable supports differ");
        let y = a2
            .iter()
            .copied()
            .find(|&z| !in1[z as usize])
            .expect("incomparable supports differ");
        (x, y)
    }
}

fn braid_to_order(perms: &mut [Permutation], target: &[u32]) {
    let ell = target.len();
    let mut cur: Vec<u32> = perms[2..]
        .iter()
        .map(|s| s.cycle_type().max_part() - 1)
        .collect();
    for k in 0..ell {
        let j = (k..ell)
            .find(|&j| cur[j] == target[k])
            .expect("sigma types are a permutation of M");
        for jj in (k..j).rev() {
            braid_in_place(perms, jj);
            cur.swap(jj, jj + 1);
        }
    }
}

// ---------------------------------------------------------------------------
// Single-sigma construction.

struct Ell1 {
    tau1: Permutation,
    tau2: Permutation,
    sigma: Permutation,
    a_sets: Vec<Vec<u32>>,
    b_sets: Vec<Vec<u32>>,
}

fn min_common(points: &[u32], sigma: &Permutation) -> Option<u32> {
    points.iter().copied().filter(|&z| sigma.moves(z)).min()
}

/// Realizes `{A, B, (m1)}` over `{1..d}`; slot vectors need not be sorted
/// and the part map entries follow the given slot order.
fn ell1(av: &[u32], bv: &[u32], m1: u32, d: usize) -> Ell1 {
    debug_assert_eq!(av.iter().map(|&x| x as usize).sum::<usize>(), d);
    debug_assert_eq!(bv.iter().map(|&x| x as usize).sum::<usize>(), d);
    debug_assert!(m1 as usize >= av.len() + bv.len());
    debug_assert!((m1 as usize - av.len() - bv.len()) % 2 == 0);
    debug_assert!((m1 as usize) < d);

    if d == 3 {
        let c = Permutation::cycle(3, &[1, 2, 3]).expect("degree three");
        return Ell1 {
            tau1: c.clone(),
            tau2: c.clone(),
            sigma: c,
            a_sets: vec![vec![1, 2, 3]],
            b_sets: vec![vec![1, 2, 3]],
        };
    }
    if av == [3, 3] && bv == [3, 3] && m1 == 4 {
        // The one shape the cycle surgeries below cannot reach: pinned to a
        // tuple found by direct search.
        let tau1 = Permutation::from_cycles(6, &[vec![1, 5, 6], vec![2, 3, 4]]).expect("fixture");
        let tau2 = Permutation::from_cycles(6, &[vec![1, 2, 3], vec![4, 6, 5]]).expect("fixture");
        let sigma = Permutation::cycle(6, &[1, 4, 2, 5, 3]).expect("fixture");
        return Ell1 {
            tau1,
            tau2,
            sigma,
            a_sets: vec![vec![1, 5, 6], vec![2, 3, 4]],
            b_sets: vec![vec![1, 2, 3], vec![4, 6, 5]],
        };
    }
    if m1 as usize + 1 == d {
        let (tau1, tau2) = full_cycle::construct(av, bv, d);
        let sigma = tau1.compose(&tau2).inverse();
        let a_sets = assign_parts(&tau1, av);
        let b_sets = assign_parts(&tau2, bv);
        return Ell1 {
            tau1,
            tau2,
            sigma,
            a_sets,
            b_sets,
        };
    }
    if av.len() == 1 && bv.len() == 1 {
        // Both tau factors are d-cycles; split the standard cycle into a
        // sigma of length m1+1 against a second d-cycle.
        debug_assert!(m1 % 2 == 0);
        let (sigma, tau1) =
            split_full_cycle(m1 as usize + 1, d, d).expect("valid split parameters");
        let tau2 = Permutation::range_cycle(d, 1, d as u32)
            .expect("positive degree")
            .inverse();
        let all: Vec<u32> = (1..=d as u32).collect();
        return Ell1 {
            tau1,
            tau2,
            sigma,
            a_sets: vec![all.clone()],
            b_sets: vec![all],
        };
    }
    let k = av[0];
    if av.iter().chain(bv.iter()).all(|&x| x == k) {
        debug_assert_eq!(av.len(), bv.len());
        if m1 as usize - 1 <= d - k as usize {
            case2_split(av, bv, m1, d, k)
        } else {
            sub12(av, bv, m1, d, av.len() - 1, bv.len() - 1)
        }
    } else {
        case1(av, bv, m1, d)
    }
}

fn flip_ell1(e: Ell1) -> Ell1 {
    Ell1 {
        tau1: e.tau2.inverse(),
        tau2: e.tau1.inverse(),
        sigma: e.sigma.inverse(),
        a_sets: e.b_sets,
        b_sets: e.a_sets,
    }
}

/// Mixed part sizes: orient so the side holding the overall smallest part
/// is reduced against a strictly larger part on the other side.
fn case1(av: &[u32], bv: &[u32], m1: u32, d: usize) -> Ell1 {
    let m_star = av
        .iter()
        .chain(bv.iter())
        .copied()
        .min()
        .expect("nonempty partitions");
    let direct = bv.contains(&m_star) && av.iter().any(|&x| x > m_star);
    if direct {
        case1_oriented(av, bv, m1, d, m_star)
    } else {
        flip_ell1(case1_oriented(bv, av, m1, d, m_star))
    }
}

fn case1_oriented(xv: &[u32], yv: &[u32], m1: u32, d: usize, m_star: u32) -> Ell1 {
    let j_star = yv
        .iter()
        .position(|&v| v == m_star)
        .expect("the oriented second side holds the smallest part");
    let a_val = xv
        .iter()
        .copied()
        .filter(|&v| v > m_star)
        .min()
        .expect("the oriented first side exceeds the smallest part");
    let i_star = xv
        .iter()
        .position(|&v| v == a_val)
        .expect("value just scanned");
    let b = m_star as usize;
    if (m1 as usize) - 1 < d - b {
        sub11(xv, yv, m1, d, i_star, j_star, m_star)
    } else {
        sub12(xv, yv, m1, d, i_star, j_star)
    }
}

/// Shrink part `i_star` of the first side by `b`, delete the `b`-part at
/// `j_star` on the second side, and recurse at degree `d - b`.  The fresh
/// points rebuild the deleted cycle, a transposition to the fresh block
/// restores both the shrunk part and the sigma length.
fn sub11(xv: &[u32], yv: &[u32], m1: u32, d: usize, i_star: usize, j_star: usize, b: u32) -> Ell1 {
    let d2 = d - b as usize;
    let mut av2 = xv.to_vec();
    av2[i_star] -= b;
    let mut bv2 = yv.to_vec();
    bv2.remove(j_star);
    let rec = ell1(&av2, &bv2, m1 - 1, d2);

    let u = min_common(&rec.a_sets[i_star], &rec.sigma)
        .expect("a cycle disjoint from the sigma support would block transitivity");
    let n = Permutation::range_cycle(d, d2 as u32 + 1, d as u32).expect("fresh block");
    let t = Permutation::cycle(d, &[u, d as u32]).expect("two distinct points");
    let tau1 = t.compose(&rec.tau1.extend(d)).compose(&n.inverse());
    let tau2 = n.compose(&rec.tau2.extend(d));
    let sigma = rec.sigma.extend(d).compose(&t);

    let mut a_sets = rec.a_sets;
    a_sets[i_star] = tau1.cycle_of(u);
    let mut b_sets = rec.b_sets;
    b_sets.insert(j_star, (d2 as u32 + 1..=d as u32).collect());
    debug_assert_eq!(a_sets[i_star].len(), xv[i_star] as usize);
    Ell1 {
        tau1,
        tau2,
        sigma,
        a_sets,
        b_sets,
    }
}

/// Shrink part `i_star` of the first side and part `j_star` of the second
/// side by two each, recurse at degree `d - 2`, and grow everything back
/// with two 3-cycles through the fresh points.
fn sub12(xv: &[u32], yv: &[u32], m1: u32, d: usize, i_star: usize, j_star: usize) -> Ell1 {
    debug_assert!(yv[j_star] >= 3, "the reduced second-side part stays a cycle");
    debug_assert!(xv[i_star] >= 3);
    let d2 = d - 2;
    let mut av2 = xv.to_vec();
    av2[i_star] -= 2;
    let mut bv2 = yv.to_vec();
    bv2[j_star] -= 2;
    let rec = ell1(&av2, &bv2, m1 - 2, d2);

    let x = min_common(&rec.a_sets[i_star], &rec.sigma)
        .expect("a cycle disjoint from the sigma support would block transitivity");
    let y = min_common(&rec.b_sets[j_star], &rec.sigma)
        .expect("a cycle disjoint from the sigma support would block transitivity");
    let dd = d as u32;
    let ta = Permutation::cycle(d, &[dd, dd - 1, x]).expect("three distinct points");
    let tb = Permutation::cycle(d, &[dd, dd - 1, y]).expect("three distinct points");
    let tau1 = ta.compose(&rec.tau1.extend(d));
    let tau2 = rec.tau2.extend(d).compose(&tb);
    let sigma = tau1.compose(&tau2).inverse();
    debug_assert_eq!(sigma.cycle_type(), single_cycle_type(m1 + 1, d));

    let mut a_sets = rec.a_sets;
    a_sets[i_star] = tau1.cycle_of(x);
    let mut b_sets = rec.b_sets;
    b_sets[j_star] = tau2.cycle_of(y);
    Ell1 {
        tau1,
        tau2,
        sigma,
        a_sets,
        b_sets,
    }
}

/// All parts equal `k` and the sigma fits below degree `d - k`: drop one
/// `k`-part from each side, recurse, and split the first reduced cycle
/// across a fresh `k`-block with two transpositions.
fn case2_split(av: &[u32], bv: &[u32], m1: u32, d: usize, k: u32) -> Ell1 {
    let p = av.len();
    let d2 = d - k as usize;
    let av2 = &av[..p - 1];
    let bv2 = &bv[..bv.len() - 1];
    let rec = ell1(av2, bv2, m1 - 2, d2);

    let x1 = min_common(&rec.a_sets[0], &rec.sigma)
        .expect("a cycle disjoint from the sigma support would block transitivity");
    let cyc = rec.tau1.cycle_of(x1);
    debug_assert_eq!(cyc.len(), k as usize);
    let idx = cyc[1..]
        .iter()
        .position(|&z| rec.sigma.moves(z))
        .map(|i| i + 1)
        .expect("a single shared point would force a long cycle on the second side");

    let n = Permutation::range_cycle(d, d2 as u32 + 1, d as u32).expect("fresh block");
    let t = Permutation::from_cycles(
        d,
        &[
            vec![x1, d2 as u32 + 1],
            vec![cyc[idx], d2 as u32 + idx as u32 + 1],
        ],
    )
    .expect("disjoint transpositions");
    let tau1 = t.compose(&n).compose(&rec.tau1.extend(d));
    let tau2 = rec.tau2.extend(d).compose(&n.inverse());
    let sigma = tau1.compose(&tau2).inverse();
    debug_assert_eq!(sigma.cycle_type(), single_cycle_type(m1 + 1, d));

    let mut a_sets = Vec::with_capacity(p);
    a_sets.push(tau1.cycle_of(x1));
    a_sets.extend(rec.a_sets[1..].iter().cloned());
    a_sets.push(tau1.cycle_of(cyc[idx]));
    let mut b_sets = rec.b_sets;
    b_sets.push((d2 as u32 + 1..=d as u32).collect());
    debug_assert!(a_sets.iter().all(|s| s.len() == k as usize));
    Ell1 {
        tau1,
        tau2,
        sigma,
        a_sets,
        b_sets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::enumerate_special_data;

    fn part(parts: &[u32]) -> CyclePartition {
        CyclePartition::new(parts.to_vec()).unwrap()
    }

    fn p(d: usize, text: &str) -> Permutation {
        Permutation::parse_cycles(text, d).unwrap()
    }

    fn datum(d: usize, a: &[u32], b: &[u32], m: &[u32]) -> SpecialDatum {
        SpecialDatum::try_new(d, part(a), part(b), m.to_vec()).unwrap()
    }

    #[test]
    fn split_three_three_five() {
        let (s1, s2) = split_full_cycle(3, 3, 5).unwrap();
        assert_eq!(s1, p(5, "(1,4,5)"));
        assert_eq!(s2, p(5, "(1,2,3)"));
    }

    #[test]
    fn split_three_three_three() {
        let (s1, s2) = split_full_cycle(3, 3, 3).unwrap();
        assert_eq!(s1, p(3, "(1,3,2)"));
        assert_eq!(s2, p(3, "(1,3,2)"));
    }

    #[test]
    fn split_degenerate_lengths() {
        let (s1, s2) = split_full_cycle(1, 5, 5).unwrap();
        assert!(s1.is_identity());
        assert_eq!(s2, p(5, "(1,2,3,4,5)"));
        let (s1, s2) = split_full_cycle(5, 1, 5).unwrap();
        assert_eq!(s1, p(5, "(1,2,3,4,5)"));
        assert!(s2.is_identity());
    }

    #[test]
    fn split_rejects_bad_parameters() {
        assert!(matches!(
            split_full_cycle(1, 1, 3),
            Err(RealizeError::InvalidSplit { .. })
        ));
        assert!(matches!(
            split_full_cycle(3, 3, 4),
            Err(RealizeError::InvalidSplit { .. })
        ));
        assert!(matches!(
            split_full_cycle(6, 3, 5),
            Err(RealizeError::InvalidSplit { .. })
        ));
    }

    #[test]
    fn split_exhaustive_small_degrees() {
        let c12 = |d: usize| Permutation::range_cycle(d, 1, d as u32).unwrap();
        for d in 1..=12usize {
            for s in 1..=d {
                for r in 1..=d {
                    if s + r < d + 1 || (s + r - d - 1) % 2 != 0 {
                        assert!(split_full_cycle(s, r, d).is_err());
                        continue;
                    }
                    let (s1, s2) = split_full_cycle(s, r, d).unwrap();
                    assert_eq!(s1.cycle_type(), single_cycle_type(s as u32, d));
                    assert_eq!(s2.cycle_type(), single_cycle_type(r as u32, d));
                    assert_eq!(s1.compose(&s2), c12(d));
                }
            }
        }
    }

    #[test]
    fn verify_accepts_and_rejects() {
        let dm = datum(3, &[3], &[3], &[2]);
        let c = Constellation::new(3, vec![p(3, "(1,2,3)"); 3]).unwrap();
        assert_eq!(verify_constellation(&dm, &c), Ok(()));

        let short = Constellation::new(3, vec![p(3, "(1,2,3)"); 2]).unwrap();
        assert!(matches!(
            verify_constellation(&dm, &short),
            Err(VerifyFailure::WrongLength { .. })
        ));

        let bad_product =
            Constellation::new(3, vec![p(3, "(1,2,3)"), p(3, "(1,2,3)"), p(3, "(1,3,2)")])
                .unwrap();
        assert_eq!(
            verify_constellation(&dm, &bad_product),
            Err(VerifyFailure::ProductNotIdentity)
        );

        let dm2 = datum(4, &[2, 2], &[2, 2], &[1, 1]);
        let wrong_type = Constellation::new(
            4,
            vec![
                p(4, "(1,2,3,4)"),
                p(4, "(1,4,3,2)"),
                Permutation::identity(4),
                Permutation::identity(4),
            ],
        )
        .unwrap();
        assert!(matches!(
            verify_constellation(&dm2, &wrong_type),
            Err(VerifyFailure::WrongType { slot: 0, .. })
        ));

        let dm3 = datum(4, &[2, 2], &[2, 2], &[1, 1]);
        let split = Constellation::new(
            4,
            vec![
                p(4, "(1,2)(3,4)"),
                p(4, "(1,2)(3,4)"),
                p(4, "(1,2)"),
                p(4, "(1,2)"),
            ],
        )
        .unwrap();
        assert_eq!(
            verify_constellation(&dm3, &split),
            Err(VerifyFailure::NotTransitive)
        );
    }

    #[test]
    fn smallest_triple_is_pinned() {
        let c = realize_ell1(&part(&[3]), &part(&[3]), 2).unwrap();
        assert_eq!(c.cycles_text(), "(1,2,3) (1,2,3) (1,2,3)");
    }

    #[test]
    fn fixture_shape_is_pinned() {
        let c = realize_ell1(&part(&[3, 3]), &part(&[3, 3]), 4).unwrap();
        assert_eq!(
            c.perms(),
            &[
                p(6, "(1,5,6)(2,3,4)"),
                p(6, "(1,2,3)(4,6,5)"),
                p(6, "(1,4,2,5,3)"),
            ]
        );
    }

    #[test]
    fn ell1_rejects_bad_shapes() {
        assert!(matches!(
            realize_ell1(&part(&[3]), &part(&[2, 2]), 2),
            Err(RealizeError::TotalMismatch { .. })
        ));
        // Genus zero: m = p + q - 2.
        assert!(matches!(
            realize_ell1(&part(&[2, 1]), &part(&[3]), 1),
            Err(RealizeError::BadSigmaLength { .. })
        ));
        // Parity off.
        assert!(matches!(
            realize_ell1(&part(&[4]), &part(&[4]), 3),
            Err(RealizeError::BadSigmaLength { .. })
        ));
        // Sigma too long for the degree.
        assert!(matches!(
            realize_ell1(&part(&[2, 2]), &part(&[4]), 4),
            Err(RealizeError::Datum(_))
        ));
    }

    #[test]
    fn ell1_exhaustive_small_degrees() {
        for d in 3..=8usize {
            for dm in enumerate_special_data(d, 1, 3) {
                if dm.ell() != 1 {
                    continue;
                }
                let c = realize_ell1(dm.a(), dm.b(), dm.m()[0]).unwrap();
                assert_eq!(verify_constellation(&dm, &c), Ok(()));
                let pm = c.part_map().unwrap();
                for (i, set) in pm.a_parts().iter().enumerate() {
                    assert_eq!(set.len(), dm.a().parts()[i] as usize);
                }
                for (j, set) in pm.b_parts().iter().enumerate() {
                    assert_eq!(set.len(), dm.b().parts()[j] as usize);
                }
            }
        }
    }

    #[test]
    fn ell1_moderate_degrees() {
        for (a, b, m) in [
            (vec![5, 4, 3], vec![6, 6], vec![9u32]),
            (vec![7, 5], vec![4, 4, 4], vec![7]),
            (vec![6, 6], vec![6, 6], vec![8]),
            (vec![12], vec![12], vec![10]),
            (vec![11, 1], vec![6, 6], vec![6]),
            (vec![4, 4, 4], vec![4, 4, 4], vec![8]),
            (vec![3, 3, 3, 3], vec![3, 3, 3, 3], vec![10]),
            (vec![9, 3], vec![10, 2], vec![4]),
        ] {
            let d = a.iter().sum::<u32>() as usize;
            let dm = SpecialDatum::try_new(d, part(&a), part(&b), m.clone()).unwrap();
            let c = realize_ell1(dm.a(), dm.b(), m[0]).unwrap();
            assert_eq!(verify_constellation(&dm, &c), Ok(()));
        }
    }

    #[test]
    fn base_ell2_matches_pinned_tuple() {
        let c = realize_base_ell2(&part(&[2, 2]), &part(&[2, 2]), 2).unwrap();
        assert_eq!(
            c.perms(),
            &[
                p(4, "(1,2)(3,4)"),
                p(4, "(1,2)(3,4)"),
                p(4, "(1,2,3)"),
                p(4, "(1,3,2)"),
            ]
        );
    }

    #[test]
    fn base_ell2_small_shapes() {
        for d in 2..=8usize {
            for a in crate::partition::partitions_of(d) {
                if a.is_all_ones() {
                    continue;
                }
                for b in crate::partition::partitions_of(d) {
                    if b.is_all_ones() || a.len() != b.len() {
                        continue;
                    }
                    let m = a.len() as u32;
                    let dm =
                        SpecialDatum::try_new(d, a.clone(), b.clone(), vec![m, m]);
                    let Ok(dm) = dm else { continue };
                    let c = realize_base_ell2(&a, &b, m).unwrap();
                    assert_eq!(verify_constellation(&dm, &c), Ok(()));
                }
            }
        }
    }

    #[test]
    fn base_ell2_rejects_shape_mismatch() {
        assert!(matches!(
            realize_base_ell2(&part(&[3, 1]), &part(&[2, 2]), 3),
            Err(RealizeError::BaseShapeMismatch { .. })
        ));
    }

    #[test]
    fn absorb_matches_worked_example() {
        let c = Constellation::new(
            3,
            vec![p(3, "(1,2,3)"), p(3, "(1,3,2)"), p(3, "(1,2)"), p(3, "(1,2)")],
        )
        .unwrap();
        let grown = absorb_transposition(&c, 0, 1).unwrap();
        assert_eq!(
            grown.perms(),
            &[
                p(3, "(1,2,3)"),
                p(3, "(1,3,2)"),
                p(3, "(1,3,2)"),
                p(3, "(1,2,3)"),
            ]
        );
        let dm = datum(3, &[3], &[3], &[2, 2]);
        assert_eq!(verify_constellation(&dm, &grown), Ok(()));
    }

    #[test]
    fn absorb_rejects_bad_slots() {
        let c = Constellation::new(3, vec![p(3, "(1,2,3)"); 3]).unwrap();
        assert!(matches!(
            absorb_transposition(&c, 0, 2),
            Err(RealizeError::NotAdjacentSlots { .. })
        ));
        assert!(matches!(
            absorb_transposition(&c, 0, 1),
            Err(RealizeError::SlotOutOfRange { .. })
        ));
    }

    #[test]
    fn braid_swaps_types_and_keeps_product() {
        let dm = datum(4, &[3, 1], &[2, 2], &[2, 1, 1]);
        let RealizeOutcome::Realized(c) = realize(&dm) else {
            panic!("realizable datum");
        };
        let braided = braid_move(&c, 0).unwrap();
        let product = braided
            .perms()
            .iter()
            .fold(Permutation::identity(4), |acc, q| acc.compose(q));
        assert!(product.is_identity());
        assert!(is_transitive(4, braided.perms()));
        let types: Vec<u32> = braided
            .sigmas()
            .iter()
            .map(|s| s.cycle_type().max_part())
            .collect();
        assert_eq!(types, vec![2, 3, 2]);
    }

    #[test]
    fn swap_adjoint_realizes_swapped_datum() {
        let dm = datum(4, &[3, 1], &[2, 2], &[2, 1, 1]);
        let RealizeOutcome::Realized(c) = realize(&dm) else {
            panic!("realizable datum");
        };
        let swapped = swap_adjoint(&c);
        let dm_swapped = datum(4, &[2, 2], &[3, 1], &[1, 1, 2]);
        assert_eq!(verify_constellation(&dm_swapped, &swapped), Ok(()));
    }

    #[test]
    fn merge_reduce_verifies() {
        let dm = datum(8, &[3, 2, 2, 1], &[4, 4], &[4, 2]);
        let c = merge_parts_reduce(dm.a(), dm.b(), dm.m()).unwrap();
        assert_eq!(verify_constellation(&dm, &c), Ok(()));
        let pm = c.part_map().unwrap();
        assert_eq!(pm.a_parts().len(), 4);
        assert_eq!(pm.b_parts().len(), 2);
    }

    #[test]
    fn merge_reduce_rejects_off_boundary() {
        assert!(matches!(
            merge_parts_reduce(&part(&[3, 1]), &part(&[2, 2]), &[3, 3]),
            Err(RealizeError::NotBoundary { .. })
        ));
        assert!(matches!(
            merge_parts_reduce(&part(&[3, 1]), &part(&[2, 2]), &[4]),
            Err(RealizeError::NotEnoughSlots)
        ));
    }

    #[test]
    fn realize_handles_each_verdict() {
        // Positive genus, constructive.
        let dm = datum(3, &[3], &[3], &[1, 1]);
        assert!(matches!(realize(&dm), RealizeOutcome::Realized(_)));
        // Genus zero, via search.
        let dm = datum(4, &[2, 2], &[3, 1], &[2]);
        assert!(matches!(realize(&dm), RealizeOutcome::Realized(_)));
        // Too little branching for any genus.
        let dm = datum(4, &[2, 2], &[2, 1, 1], &[1]);
        let RealizeOutcome::NotRealizable(v) = realize(&dm) else {
            panic!("insufficient branching expected");
        };
        assert_eq!(v.reason, crate::branch::Reason::TooLittleBranching);
        // Divisibility obstruction.
        let dm = datum(4, &[2, 2], &[2, 2], &[2]);
        let RealizeOutcome::NotRealizable(v) = realize(&dm) else {
            panic!("obstruction expected");
        };
        assert_eq!(v.reason, crate::branch::Reason::GcdObstruction);
        // Odd branching.
        let dm = datum(4, &[2, 2], &[2, 2], &[1]);
        assert!(matches!(realize(&dm), RealizeOutcome::NotRealizable(_)));
    }

    #[test]
    fn realize_exhaustive_small_degrees() {
        for d in 2..=6usize {
            for dm in enumerate_special_data(d, 1, 2) {
                match realize(&dm) {
                    RealizeOutcome::Realized(c) => {
                        assert_eq!(verify_constellation(&dm, &c), Ok(()), "datum {dm}");
                    }
                    other => panic!("positive-genus datum {dm} gave {other:?}"),
                }
            }
        }
    }

    #[test]
    fn realize_respects_given_sigma_order() {
        let dm = datum(5, &[3, 2], &[4, 1], &[1, 3, 1, 1]);
        let RealizeOutcome::Realized(c) = realize(&dm) else {
            panic!("realizable datum");
        };
        assert_eq!(verify_constellation(&dm, &c), Ok(()));
        let types: Vec<u32> = c
            .sigmas()
            .iter()
            .map(|s| s.cycle_type().max_part() - 1)
            .collect();
        assert_eq!(types, vec![1, 3, 1, 1]);
    }

    #[test]
    fn constellation_serde_round_trip() {
        let c = Constellation::new(3, vec![p(3, "(1,2,3)"); 3]).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(text, r#"{"d":3,"perms":[[2,3,1],[2,3,1],[2,3,1]]}"#);
        let back: Constellation = serde_json::from_str(&text).unwrap();
        assert_eq!(back.degree(), 3);
        assert_eq!(back.perms(), c.perms());
        assert!(back.part_map().is_none());
        let bad = r#"{"d":3,"perms":[[2,3,1],[2,2,1]]}"#;
        assert!(serde_json::from_str::<Constellation>(bad).is_err());
    }

    #[test]
    fn part_map_tracks_cycles() {
        let dm = datum(7, &[4, 2, 1], &[5, 2], &[5]);
        let c = realize_ell1(dm.a(), dm.b(), 5).unwrap();
        let pm = c.part_map().unwrap().clone();
        for (i, set) in pm.a_parts().iter().enumerate() {
            assert_eq!(set.len(), dm.a().parts()[i] as usize);
            let cyc = c.tau1().cycle_of(set[0]);
            let mut sorted_cycle = cyc.clone();
            sorted_cycle.sort_unstable();
            let mut sorted_set = set.clone();
            sorted_set.sort_unstable();
            assert_eq!(sorted_cycle, sorted_set);
        }
    }
}
