//! Exact enumeration of constellations sharing a prescribed list of cycle
//! types.
//!
//! The first factor is pinned to the canonical representative of its
//! conjugacy class; every count obtained that way is scaled back up by the
//! class size.  Orbits under simultaneous conjugation are recovered without
//! ever materializing them: a tuple whose centralizer has order `a` is hit
//! `z₁ / a` times by the pinned enumeration, where `z₁` is the centralizer
//! order of the first factor's class, so the multiset of centralizer orders
//! determines the orbit census exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::branch::GeneralDatum;
use crate::perm::{is_transitive, Permutation};
use crate::search::{canonical_of_type, for_each_of_type, SearchBudget};

/// Why a count could not be produced.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    /// The degree lies beyond the configured enumeration cap.
    #[error("degree {d} exceeds the enumeration cap {max}")]
    DegreeExceeded { d: usize, max: usize },
    /// The node budget ran out before the scan finished.
    #[error("node budget exhausted after {nodes} placements")]
    BudgetExhausted { nodes: u64 },
}

/// Exact census of the tuples realizing one datum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    /// Tuples with identity product, transitive or not.
    pub tuple_count: u128,
    /// Tuples that additionally generate a transitive group.
    pub transitive_count: u128,
    /// Orbits of transitive tuples under simultaneous conjugation.
    pub class_count: u64,
    /// `transitive_count / d!`, the automorphism-weighted orbit total.
    #[serde(serialize_with = "rational_as_fraction")]
    pub weighted_count: BigRational,
    /// Centralizer order of each orbit, ascending.
    pub per_class_aut: Vec<u64>,
}

fn rational_as_fraction<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
}

/// Counts every tuple of permutations of `1..=d` whose cycle types match
/// the datum's partitions in order and whose product is the identity,
/// tallying transitive tuples and their conjugation orbits along the way.
pub fn count_tuples(datum: &GeneralDatum, budget: &SearchBudget) -> Result<CountReport, CountError> {
    let d = datum.degree();
    if d > budget.max_degree {
        return Err(CountError::DegreeExceeded {
            d,
            max: budget.max_degree,
        });
    }
    let types: Vec<Vec<u32>> = datum
        .partitions()
        .iter()
        .map(|p| p.parts().to_vec())
        .collect();
    let k = types.len();
    if k == 0 {
        return Ok(singleton_report(d, true));
    }
    if k == 1 {
        let hit = types[0].iter().all(|&x| x == 1);
        return Ok(singleton_report(d, hit));
    }
    let mut rem = vec![0usize; k + 1];
    for i in (0..k).rev() {
        rem[i] = rem[i + 1] + (d - types[i].len());
    }
    let first = canonical_of_type(&types[0], d);
    let mut counter = Counter {
        d,
        types: &types,
        rem: &rem,
        max_nodes: budget.max_nodes,
        nodes: 0,
        over: false,
        n_fixed: 0,
        n_transitive: 0,
        aut_tally: BTreeMap::new(),
        factors: vec![first.clone()],
    };
    if counter.feasible(&first, 1) {
        counter.run(1, &first);
    }
    if counter.over {
        return Err(CountError::BudgetExhausted {
            nodes: counter.nodes,
        });
    }
    let z1 = type_centralizer_order(&types[0]);
    let class1 = factorial(d) / z1;
    let mut per_class_aut = Vec::new();
    for (&aut, &hits) in &counter.aut_tally {
        let orbits = hits * aut / z1;
        debug_assert_eq!(orbits * z1, hits * aut, "orbit census must be integral");
        for _ in 0..orbits {
            per_class_aut.push(aut as u64);
        }
    }
    let transitive_count = counter.n_transitive * class1;
    Ok(CountReport {
        tuple_count: counter.n_fixed * class1,
        transitive_count,
        class_count: per_class_aut.len() as u64,
        weighted_count: BigRational::new(
            BigInt::from(transitive_count),
            big_factorial(d),
        ),
        per_class_aut,
    })
}

/// The census when exactly one tuple is in play: the empty tuple, or the
/// lone identity tuple of an all-ones type.
fn singleton_report(d: usize, hit: bool) -> CountReport {
    let transitive = hit && d == 1;
    CountReport {
        tuple_count: hit as u128,
        transitive_count: transitive as u128,
        class_count: transitive as u64,
        weighted_count: BigRational::new(BigInt::from(transitive as u32), BigInt::from(1)),
        per_class_aut: if transitive { vec![1] } else { Vec::new() },
    }
}

struct Counter<'a> {
    d: usize,
    types: &'a [Vec<u32>],
    rem: &'a [usize],
    max_nodes: u64,
    nodes: u64,
    over: bool,
    n_fixed: u128,
    n_transitive: u128,
    aut_tally: BTreeMap<u128, u128>,
    factors: Vec<Permutation>,
}

impl Counter<'_> {
    /// Sound pruning for identity-product counting: the prefix's distance
    /// from the identity must be coverable by the remaining factor lengths
    /// and agree with them in parity.  No transitivity-based cut is allowed
    /// here, since intransitive tuples still count.
    fn feasible(&self, prefix: &Permutation, next: usize) -> bool {
        let r = self.rem[next];
        let lp = self.d - prefix.cycle_type().len();
        lp % 2 == r % 2 && lp <= r
    }

    fn run(&mut self, i: usize, prefix: &Permutation) {
        let k = self.types.len();
        if i == k - 1 {
            let last = prefix.inverse();
            if last.cycle_type().parts() == &self.types[i][..] {
                self.factors.push(last);
                self.n_fixed += 1;
                if is_transitive(self.d, &self.factors) {
                    self.n_transitive += 1;
                    let aut = centralizer_order(self.d, &self.factors);
                    *self.aut_tally.entry(aut).or_insert(0) += 1;
                }
                self.factors.pop();
            }
            return;
        }
        let parts = self.types[i].clone();
        let d = self.d;
        let mut visit = |cand: &Permutation| -> bool {
            if self.over {
                return true;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.over = true;
                return true;
            }
            let prefix2 = prefix.compose(cand);
            if self.feasible(&prefix2, i + 1) {
                self.factors.push(cand.clone());
                self.run(i + 1, &prefix2);
                self.factors.pop();
            }
            self.over
        };
        for_each_of_type(d, &parts, &mut visit);
    }
}

/// Order of the centralizer, inside the full symmetric group on
/// `1..=degree`, of the subgroup generated by `gens`.  Backtracks over
/// commuting bijections, propagating `z(g(x)) = g(z(x))` eagerly, so
/// transitive generator sets cost one propagation sweep per candidate
/// image of the point `1`.
pub fn centralizer_order(degree: usize, gens: &[Permutation]) -> u128 {
    for g in gens {
        assert_eq!(g.degree(), degree, "generators must share the degree");
    }
    let mut images = vec![0u32; degree + 1];
    let mut used = vec![false; degree + 1];
    extend_commuting(degree, gens, &mut images, &mut used)
}

fn extend_commuting(
    degree: usize,
    gens: &[Permutation],
    images: &mut [u32],
    used: &mut [bool],
) -> u128 {
    let Some(x) = (1..=degree as u32).find(|&x| images[x as usize] == 0) else {
        return 1;
    };
    let mut total = 0u128;
    for y in 1..=degree as u32 {
        if used[y as usize] {
            continue;
        }
        let mut assigned: Vec<u32> = Vec::new();
        if propagate(gens, images, used, &mut assigned, x, y) {
            total += extend_commuting(degree, gens, images, used);
        }
        for &z in &assigned {
            used[images[z as usize] as usize] = false;
            images[z as usize] = 0;
        }
    }
    total
}

/// Records `z(x) = y` and closes the assignment under every generator;
/// returns whether the closure stayed consistent and injective.
fn propagate(
    gens: &[Permutation],
    images: &mut [u32],
    used: &mut [bool],
    assigned: &mut Vec<u32>,
    x: u32,
    y: u32,
) -> bool {
    let mut queue = vec![(x, y)];
    while let Some((a, b)) = queue.pop() {
        let slot = images[a as usize];
        if slot != 0 {
            if slot != b {
                return false;
            }
            continue;
        }
        if used[b as usize] {
            return false;
        }
        images[a as usize] = b;
        used[b as usize] = true;
        assigned.push(a);
        for g in gens {
            queue.push((g.apply(a), g.apply(b)));
        }
    }
    true
}

/// Centralizer order of one conjugacy class of the symmetric group, read
/// off its cycle type: the product over distinct part sizes of
/// `size^count · count!`.
pub(crate) fn type_centralizer_order(parts: &[u32]) -> u128 {
    let mut sorted = parts.to_vec();
    sorted.sort_unstable();
    let mut total = 1u128;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().filter(|&&x| x == sorted[i]).count();
        for c in 1..=j as u128 {
            total *= sorted[i] as u128 * c;
        }
        i += j;
    }
    total
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub(crate) fn big_factorial(n: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 2..=n {
        acc *= i;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::CyclePartition;

    fn general(d: usize, types: &[&[u32]]) -> GeneralDatum {
        let parts = types
            .iter()
            .map(|t| CyclePartition::new(t.to_vec()).expect("valid parts"))
            .collect();
        GeneralDatum::try_new(d, parts).expect("consistent datum")
    }

    fn rational(n: i64, m: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(m))
    }

    #[test]
    fn three_cycles_census() {
        let datum = general(3, &[&[3], &[3], &[3]]);
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        assert_eq!(report.tuple_count, 2);
        assert_eq!(report.transitive_count, 2);
        assert_eq!(report.class_count, 1);
        assert_eq!(report.weighted_count, rational(1, 3));
        assert_eq!(report.per_class_aut, vec![3]);
    }

    #[test]
    fn four_transpositions_census() {
        let datum = general(2, &[&[2], &[2], &[2], &[2]]);
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        assert_eq!(report.tuple_count, 1);
        assert_eq!(report.transitive_count, 1);
        assert_eq!(report.class_count, 1);
        assert_eq!(report.weighted_count, rational(1, 2));
        assert_eq!(report.per_class_aut, vec![2]);
    }

    #[test]
    fn odd_branching_counts_to_zero() {
        let datum = general(2, &[&[2], &[2], &[2]]);
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        assert_eq!(report.tuple_count, 0);
        assert_eq!(report.transitive_count, 0);
        assert_eq!(report.class_count, 0);
        assert_eq!(report.weighted_count, rational(0, 1));
        assert!(report.per_class_aut.is_empty());
    }

    #[test]
    fn degenerate_factor_lists() {
        let datum = GeneralDatum::try_new(1, vec![]).unwrap();
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        assert_eq!(report.tuple_count, 1);
        assert_eq!(report.transitive_count, 1);
        assert_eq!(report.per_class_aut, vec![1]);
        let datum = GeneralDatum::try_new(3, vec![]).unwrap();
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        assert_eq!(report.tuple_count, 1);
        assert_eq!(report.transitive_count, 0);
        let datum = general(3, &[&[1, 1, 1]]);
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        assert_eq!(report.tuple_count, 1);
        assert_eq!(report.transitive_count, 0);
        let datum = general(3, &[&[3]]);
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        assert_eq!(report.tuple_count, 0);
    }

    #[test]
    fn budget_violations_are_reported() {
        let datum = general(3, &[&[3], &[3], &[3]]);
        let tiny = SearchBudget {
            max_degree: 2,
            max_nodes: 1000,
        };
        assert_eq!(
            count_tuples(&datum, &tiny),
            Err(CountError::DegreeExceeded { d: 3, max: 2 })
        );
        let datum = general(4, &[&[2, 2], &[2, 2], &[2, 2], &[2, 2]]);
        let starved = SearchBudget {
            max_degree: 8,
            max_nodes: 4,
        };
        assert!(matches!(
            count_tuples(&datum, &starved),
            Err(CountError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn reordering_partitions_keeps_all_counts() {
        let data = [
            general(4, &[&[2, 2], &[3, 1], &[3, 1]]),
            general(4, &[&[3, 1], &[2, 2], &[3, 1]]),
            general(4, &[&[3, 1], &[3, 1], &[2, 2]]),
        ];
        let reports: Vec<CountReport> = data
            .iter()
            .map(|dm| count_tuples(dm, &SearchBudget::default()).unwrap())
            .collect();
        assert_eq!(reports[0], reports[1]);
        assert_eq!(reports[1], reports[2]);
        assert!(reports[0].transitive_count > 0);
    }

    #[test]
    fn weighted_count_sums_reciprocal_automorphisms() {
        let data = [
            general(4, &[&[4], &[4], &[2, 2]]),
            general(4, &[&[2, 2], &[2, 2], &[2, 2]]),
            general(5, &[&[5], &[5], &[5]]),
            general(4, &[&[2, 1, 1], &[4], &[4]]),
        ];
        for dm in &data {
            let report = count_tuples(dm, &SearchBudget::default()).unwrap();
            let mut total = rational(0, 1);
            for &aut in &report.per_class_aut {
                total += BigRational::new(BigInt::from(1), BigInt::from(aut));
            }
            assert_eq!(total, report.weighted_count, "datum {dm:?}");
            assert_eq!(report.class_count as usize, report.per_class_aut.len());
            assert!(report.transitive_count <= report.tuple_count);
        }
    }

    /// Independent oracle: materialize whole symmetric groups, filter by
    /// type, scan all tuples, and partition the transitive ones into
    /// conjugation orbits explicitly.
    #[test]
    fn census_matches_naive_enumeration() {
        for (d, types) in [
            (3, vec![vec![3u32], vec![3], vec![3]]),
            (3, vec![vec![2, 1], vec![2, 1], vec![3]]),
            (4, vec![vec![2, 2], vec![2, 2], vec![2, 2]]),
            (4, vec![vec![4], vec![4], vec![2, 1, 1]]),
            (4, vec![vec![3, 1], vec![3, 1], vec![3, 1]]),
        ] {
            let all = symmetric_group(d);
            let pools: Vec<Vec<&Permutation>> = types
                .iter()
                .map(|t| {
                    all.iter()
                        .filter(|g| g.cycle_type().parts() == &t[..])
                        .collect()
                })
                .collect();
            let mut tuples = 0u128;
            let mut transitive_tuples: Vec<Vec<Permutation>> = Vec::new();
            walk_pools(&pools, &mut Vec::new(), &mut |tuple| {
                let mut acc = Permutation::identity(d);
                for g in tuple {
                    acc = acc.compose(g);
                }
                if acc.is_identity() {
                    tuples += 1;
                    let owned: Vec<Permutation> = tuple.iter().map(|&g| g.clone()).collect();
                    if is_transitive(d, &owned) {
                        transitive_tuples.push(owned);
                    }
                }
            });
            let mut classes: Vec<Vec<Vec<Permutation>>> = Vec::new();
            for tuple in &transitive_tuples {
                let hit = classes.iter().position(|cls| {
                    all.iter().any(|g| {
                        cls[0]
                            .iter()
                            .zip(tuple)
                            .all(|(a, b)| a.conjugate(g) == *b)
                    })
                });
                match hit {
                    Some(i) => classes[i].push(tuple.clone()),
                    None => classes.push(vec![tuple.clone()]),
                }
            }
            let parts = types
                .iter()
                .map(|t| CyclePartition::new(t.clone()).unwrap())
                .collect();
            let datum = GeneralDatum::try_new(d, parts).unwrap();
            let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
            assert_eq!(report.tuple_count, tuples, "datum {datum:?}");
            assert_eq!(
                report.transitive_count,
                transitive_tuples.len() as u128,
                "datum {datum:?}"
            );
            assert_eq!(report.class_count as usize, classes.len(), "datum {datum:?}");
            let mut auts: Vec<u64> = classes
                .iter()
                .map(|cls| (factorial(d) / cls.len() as u128) as u64)
                .collect();
            auts.sort_unstable();
            assert_eq!(report.per_class_aut, auts, "datum {datum:?}");
        }
    }

    fn symmetric_group(d: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut images = Vec::with_capacity(d);
        build_images(d, &mut images, &mut out);
        out
    }

    fn build_images(d: usize, images: &mut Vec<u32>, out: &mut Vec<Permutation>) {
        if images.len() == d {
            out.push(Permutation::from_images(images.clone()).unwrap());
            return;
        }
        for y in 1..=d as u32 {
            if !images.contains(&y) {
                images.push(y);
                build_images(d, images, out);
                images.pop();
            }
        }
    }

    fn walk_pools<'a>(
        pools: &'a [Vec<&'a Permutation>],
        chosen: &mut Vec<&'a Permutation>,
        f: &mut impl FnMut(&[&Permutation]),
    ) {
        if chosen.len() == pools.len() {
            f(chosen);
            return;
        }
        for &g in &pools[chosen.len()] {
            chosen.push(g);
            walk_pools(pools, chosen, f);
            chosen.pop();
        }
    }

    #[test]
    fn centralizers_of_simple_generators() {
        let c3 = Permutation::cycle(3, &[1, 2, 3]).unwrap();
        assert_eq!(centralizer_order(3, &[c3]), 3);
        let t = Permutation::cycle(4, &[1, 2]).unwrap();
        assert_eq!(centralizer_order(4, &[t.clone()]), 4);
        assert_eq!(centralizer_order(4, &[]), 24);
        let c4 = Permutation::cycle(4, &[1, 2, 3, 4]).unwrap();
        assert_eq!(centralizer_order(4, &[c4.clone()]), 4);
        // The two generators span the whole group, whose center is trivial.
        assert_eq!(centralizer_order(4, &[c4, t]), 1);
    }

    #[test]
    fn centralizer_matches_type_formula_for_single_generators() {
        for d in 1..=5 {
            for g in symmetric_group(d) {
                let by_search = centralizer_order(d, &[g.clone()]);
                let by_type = type_centralizer_order(g.cycle_type().parts());
                assert_eq!(by_search, by_type, "generator {g}");
            }
        }
    }

    #[test]
    fn report_serializes_with_fraction_string() {
        let datum = general(3, &[&[3], &[3], &[3]]);
        let report = count_tuples(&datum, &SearchBudget::default()).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["weighted_count"], "1/3");
        assert_eq!(json["tuple_count"], 2);
    }
}
