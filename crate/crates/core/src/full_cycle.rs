//! Two permutations of prescribed cycle types whose product is a full cycle.
//!
//! `construct(A, B, d)` returns `(τ₁, τ₂)` with `τ₁` of type `A`, `τ₂` of
//! type `B`, and `τ₁ τ₂` a `d`-cycle, for any pair of partitions of `d`
//! satisfying the parity condition `(d-p)+(d-q)+(d-1) ≡ 0 (mod 2)` and the
//! length bound `p + q ≤ d + 1`.  The solver peels parts off one side and
//! recurses at a smaller degree; a handful of closed-form bases end the
//! recursion.  Each step restores the peeled parts with an explicit cycle
//! through the fresh points and checks the resulting types and product.

use std::sync::atomic::{AtomicU64, Ordering};

use num_integer::gcd;

use crate::partition::CyclePartition;
use crate::perm::Permutation;
use crate::realize::{cycles_with_fixed, single_cycle_type, RealizeError};
use crate::search;

static FALLBACK_USES: AtomicU64 = AtomicU64::new(0);

/// How many times the bounded enumeration fallback has run in this process.
///
/// The move system is expected to cover every admissible input, so this
/// counter should stay at zero; a nonzero value flags a coverage gap.
pub fn full_cycle_fallback_count() -> u64 {
    FALLBACK_USES.load(Ordering::Relaxed)
}

/// Splits the standard cycle `(1, …, d)` into a product `σ₁ σ₂` of single
/// cycles of lengths `s` and `r`.
///
/// Requires `1 ≤ s, r ≤ d`, `s + r ≥ d + 1`, and `s + r ≡ d + 1 (mod 2)`;
/// these conditions are exactly the ones under which such a split exists.
pub fn split_full_cycle(
    s: usize,
    r: usize,
    d: usize,
) -> Result<(Permutation, Permutation), RealizeError> {
    let fail = |why: &'static str| RealizeError::InvalidSplit { s, r, d, why };
    if d == 0 {
        return Err(fail("the degree must be positive"));
    }
    if s < 1 || s > d {
        return Err(fail("the first length is out of range"));
    }
    if r < 1 || r > d {
        return Err(fail("the second length is out of range"));
    }
    if s + r < d + 1 {
        return Err(fail("the lengths are too short to cover the cycle"));
    }
    if (s + r - d - 1) % 2 != 0 {
        return Err(fail("the lengths have the wrong parity"));
    }
    let k = (s + r - d - 1) / 2;
    let c = Permutation::range_cycle(d, 1, d as u32).expect("positive degree");
    let descending = |hi: usize| -> Vec<u32> { (1..=hi as u32).rev().collect() };
    let mut sigma2_inv = Permutation::cycle(d, &descending(r)).expect("points in range");
    if k > 0 {
        sigma2_inv = sigma2_inv.compose(
            &Permutation::cycle(d, &descending(2 * k + 1)).expect("points in range"),
        );
    }
    let sigma2 = sigma2_inv.inverse();
    let sigma1 = c.compose(&sigma2_inv);
    debug_assert_eq!(sigma1.cycle_type(), single_cycle_type(s as u32, d));
    debug_assert_eq!(sigma2.cycle_type(), single_cycle_type(r as u32, d));
    Ok((sigma1, sigma2))
}

/// Entry point used by the realizer; inputs need not be sorted but must
/// satisfy the admissibility conditions.
pub(crate) fn construct(av_in: &[u32], bv_in: &[u32], d: usize) -> (Permutation, Permutation) {
    let mut av = av_in.to_vec();
    av.sort_unstable_by(|x, y| y.cmp(x));
    let mut bv = bv_in.to_vec();
    bv.sort_unstable_by(|x, y| y.cmp(x));
    debug_assert_eq!(av.iter().map(|&x| x as usize).sum::<usize>(), d);
    debug_assert_eq!(bv.iter().map(|&x| x as usize).sum::<usize>(), d);
    debug_assert!((d + 1 + av.len() + bv.len()) % 2 == 0);
    debug_assert!(av.len() + bv.len() <= d + 1);
    solve(&av, &bv, d)
}

/// Asserts the contract on a finished pair before handing it up.
fn checked(
    tau1: Permutation,
    tau2: Permutation,
    av: &[u32],
    bv: &[u32],
    d: usize,
) -> (Permutation, Permutation) {
    assert_eq!(
        tau1.cycle_type(),
        CyclePartition::new(av.to_vec()).expect("valid parts"),
        "first factor has the wrong cycle type"
    );
    assert_eq!(
        tau2.cycle_type(),
        CyclePartition::new(bv.to_vec()).expect("valid parts"),
        "second factor has the wrong cycle type"
    );
    assert_eq!(
        tau1.compose(&tau2).cycle_type().max_part() as usize,
        d,
        "the product is not a full cycle"
    );
    (tau1, tau2)
}

fn flip(pair: (Permutation, Permutation)) -> (Permutation, Permutation) {
    (pair.1.inverse(), pair.0.inverse())
}

fn solve(av: &[u32], bv: &[u32], d: usize) -> (Permutation, Permutation) {
    let p = av.len();
    let q = bv.len();
    if d == 1 {
        return (Permutation::identity(1), Permutation::identity(1));
    }
    let full = || Permutation::range_cycle(d, 1, d as u32).expect("positive degree");
    if p == 1 && q == 1 {
        // d is odd here, so the square of the standard cycle is a d-cycle.
        return checked(full(), full(), av, bv, d);
    }
    if av[0] == 1 {
        return checked(Permutation::identity(d), full(), av, bv, d);
    }
    if bv[0] == 1 {
        return checked(full(), Permutation::identity(d), av, bv, d);
    }
    if p == q && av == bv && av.iter().all(|&x| x == av[0]) {
        return equal_blocks(av[0], p, d);
    }
    if p == 1 && q == 2 && bv[0] % 2 == 0 && bv[1] % 2 == 0 {
        return interleave(bv[0], bv[1], d);
    }
    if q == 1 && p == 2 && av[0] % 2 == 0 && av[1] % 2 == 0 {
        let pair = flip(interleave(av[0], av[1], d));
        return checked(pair.0, pair.1, av, bv, d);
    }
    if let Some(pair) = try_strip_odd(av, bv, d) {
        return pair;
    }
    if let Some(pair) = try_strip_odd(bv, av, d).map(flip) {
        return checked(pair.0, pair.1, av, bv, d);
    }
    if let Some(pair) = try_strip_even(av, bv, d) {
        return pair;
    }
    if let Some(pair) = try_strip_even(bv, av, d).map(flip) {
        return checked(pair.0, pair.1, av, bv, d);
    }
    if let Some(pair) = try_strip_pair(av, bv, d) {
        return pair;
    }
    if let Some(pair) = try_strip_pair(bv, av, d).map(flip) {
        return checked(pair.0, pair.1, av, bv, d);
    }
    fallback(av, bv, d)
}

/// Both sides a single `d`-cycle against two even blocks: the standard
/// cycle times two interleaved block cycles.
fn interleave(b1: u32, b2: u32, d: usize) -> (Permutation, Permutation) {
    let mut first: Vec<u32> = vec![1];
    first.extend(3..=b1 + 1);
    let mut second: Vec<u32> = vec![2];
    second.extend(b1 + 2..=d as u32);
    let tau2 = Permutation::from_cycles(d, &[first, second]).expect("disjoint cycles");
    let tau1 = Permutation::range_cycle(d, 1, d as u32).expect("positive degree");
    checked(tau1, tau2, &[d as u32], &[b1, b2], d)
}

/// Both types equal `(k, …, k)` with `k` and `p` odd.
fn equal_blocks(k: u32, p: usize, d: usize) -> (Permutation, Permutation) {
    debug_assert!(k % 2 == 1 && p % 2 == 1 && k >= 3);
    if p == 1 {
        let c = Permutation::range_cycle(d, 1, d as u32).expect("positive degree");
        return (c.clone(), c);
    }
    if let Some(pair) = transversal(k, p, d) {
        return pair;
    }
    two_block_extend(k, p, d)
}

/// Fast path for equal blocks: block cycles against arithmetic transversals
/// of common difference `σ p` for a unit `σ` mod `k`.  Not every shape has a
/// working unit, so failure falls through to the recursive construction.
fn transversal(k: u32, p: usize, d: usize) -> Option<(Permutation, Permutation)> {
    let ku = k as usize;
    let mut blocks: Vec<Vec<u32>> = vec![(1..=k).rev().collect()];
    for j in 1..p {
        let lo = (j * ku) as u32 + 1;
        blocks.push((lo..lo + k).collect());
    }
    let tau2 = Permutation::from_cycles(d, &blocks).expect("disjoint blocks");
    let av = vec![k; p];
    for unit in 1..ku {
        if gcd(unit, ku) != 1 {
            continue;
        }
        let step = unit * p;
        let cycles: Vec<Vec<u32>> = (1..=p)
            .map(|i| {
                (0..ku)
                    .map(|j| ((i - 1 + j * step) % d) as u32 + 1)
                    .collect()
            })
            .collect();
        let Ok(tau1) = Permutation::from_cycles(d, &cycles) else {
            continue;
        };
        if tau1.compose(&tau2).cycle_type().max_part() as usize == d {
            return Some(checked(tau1, tau2, &av, &av, d));
        }
    }
    None
}

/// Grows an equal-blocks pair by one fresh `k`-block per factor: each factor
/// gains one block acting as a plain cycle on fresh points and one block
/// spliced into an existing cycle by a pair of transpositions.  Splice
/// offsets and the plain cycles' powers are scanned until both cycle types
/// survive and the product closes into a single cycle.
fn two_block_extend(k: u32, p: usize, d: usize) -> (Permutation, Permutation) {
    let ku = k as usize;
    let d2 = d - 2 * ku;
    let (t1s, t2s) = equal_blocks(k, p - 2, d2);
    let t1e = t1s.extend(d);
    let t2e = t2s.extend(d);
    let ca = t1s.cycle_of(1);
    let cb = t2s.cycle_of(1);
    let e: Vec<u32> = (d2 as u32 + 1..=(d2 + ku) as u32).collect();
    let g: Vec<u32> = ((d2 + ku) as u32 + 1..=d as u32).collect();
    let n1 = Permutation::cycle(d, &e).expect("fresh block");
    let n2 = Permutation::cycle(d, &g).expect("fresh block");
    let av = vec![k; p];
    let target = CyclePartition::new(av.clone()).expect("valid parts");
    for s1 in 1..ku {
        if gcd(s1, ku) != 1 {
            continue;
        }
        let v1 = power(&n1, s1);
        for s2 in 1..ku {
            if gcd(s2, ku) != 1 {
                continue;
            }
            let m = power(&n2, s2);
            let left_base = n1.compose(&m).compose(&t1e);
            let right_base = t2e.compose(&v1).compose(&n2);
            for t in 1..ku {
                let tt1 = Permutation::from_cycles(d, &[vec![ca[0], e[0]], vec![ca[t], e[t]]])
                    .expect("disjoint transpositions");
                let tau1 = tt1.compose(&left_base);
                if tau1.cycle_type() != target {
                    continue;
                }
                for r in 1..ku {
                    let tt2 = Permutation::from_cycles(d, &[vec![cb[0], g[0]], vec![cb[r], g[r]]])
                        .expect("disjoint transpositions");
                    let tau2 = right_base.compose(&tt2);
                    if tau2.cycle_type() != target {
                        continue;
                    }
                    if tau1.compose(&tau2).cycle_type().max_part() as usize == d {
                        return checked(tau1, tau2, &av, &av, d);
                    }
                }
            }
        }
    }
    fallback(&av, &av, d)
}

fn power(base: &Permutation, n: usize) -> Permutation {
    let mut acc = base.clone();
    for _ in 1..n {
        acc = acc.compose(base);
    }
    acc
}

/// Removes one odd part `b` from the second side, shrinking the largest
/// first-side part by `b`; a `(b+1)`-cycle through the fresh points grows
/// it back and extends the product to a full cycle.
fn try_strip_odd(xv: &[u32], yv: &[u32], d: usize) -> Option<(Permutation, Permutation)> {
    let p = xv.len();
    let q = yv.len();
    if q < 2 {
        return None;
    }
    let budget = d + 2 - p - q;
    for i in 0..q {
        if i > 0 && yv[i] == yv[i - 1] {
            continue;
        }
        let b = yv[i];
        if b % 2 == 1 && (b as usize) <= budget && xv[0] > b {
            return Some(commit_strip_odd(xv, yv, d, i, b));
        }
    }
    None
}

fn commit_strip_odd(
    xv: &[u32],
    yv: &[u32],
    d: usize,
    drop_idx: usize,
    b: u32,
) -> (Permutation, Permutation) {
    let d2 = d - b as usize;
    let mut av2 = xv.to_vec();
    av2[0] -= b;
    av2.sort_unstable_by(|x, y| y.cmp(x));
    let mut bv2 = yv.to_vec();
    bv2.remove(drop_idx);
    let (t1, t2) = solve(&av2, &bv2, d2);

    let grown = first_cycle_of_len(&t1, (xv[0] - b) as usize);
    let u = grown[0];
    let mut w_points: Vec<u32> = vec![u];
    w_points.extend(d2 as u32 + 1..=d as u32);
    let w = Permutation::cycle(d, &w_points).expect("fresh run");
    let n = Permutation::range_cycle(d, d2 as u32 + 1, d as u32).expect("fresh block");
    let tau1 = w.compose(&t1.extend(d));
    let tau2 = t2.extend(d).compose(&n);
    checked(tau1, tau2, xv, yv, d)
}

/// Removes one even part `b` from the second side, merging two first-side
/// parts `a_i, a_j` into one of length `a_i + a_j - b`; a `(b+2)`-cycle
/// visiting both merge points splits it back.
fn try_strip_even(xv: &[u32], yv: &[u32], d: usize) -> Option<(Permutation, Permutation)> {
    let p = xv.len();
    let q = yv.len();
    if p < 2 || q < 2 {
        return None;
    }
    let budget = d + 3 - p - q;
    for bi in 0..q {
        if bi > 0 && yv[bi] == yv[bi - 1] {
            continue;
        }
        let b = yv[bi];
        if b % 2 != 0 || (b as usize) > budget {
            continue;
        }
        for i in 0..p {
            for j in i + 1..p {
                for (first, other) in [(xv[i], xv[j]), (xv[j], xv[i])] {
                    if xv[i] == xv[j] && first != xv[i] {
                        continue;
                    }
                    let sum = first + other;
                    if sum < b + 2 {
                        continue;
                    }
                    let lo = if b >= first { b - first + 1 } else { 1 };
                    let hi = (b - 1).min(other - 1);
                    if lo > hi {
                        continue;
                    }
                    let s = if lo % 2 == 1 { lo } else { lo + 1 };
                    if s > hi {
                        continue;
                    }
                    return Some(commit_strip_even(xv, yv, d, bi, i, j, first, other, s));
                }
            }
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn commit_strip_even(
    xv: &[u32],
    yv: &[u32],
    d: usize,
    drop_idx: usize,
    i: usize,
    j: usize,
    first: u32,
    other: u32,
    s: u32,
) -> (Permutation, Permutation) {
    let b = yv[drop_idx];
    let d2 = d - b as usize;
    let merged = first + other - b;
    let mut av2: Vec<u32> = vec![merged];
    for (idx, &x) in xv.iter().enumerate() {
        if idx != i && idx != j {
            av2.push(x);
        }
    }
    av2.sort_unstable_by(|x, y| y.cmp(x));
    let mut bv2 = yv.to_vec();
    bv2.remove(drop_idx);
    let (t1, t2) = solve(&av2, &bv2, d2);

    let merged_cycle = first_cycle_of_len(&t1, merged as usize);
    let t_pow = (s + first - b) as usize;
    let u1 = merged_cycle[0];
    let u2 = merged_cycle[t_pow];
    let mut t_points: Vec<u32> = vec![u1];
    t_points.extend(d2 as u32 + 1..=d2 as u32 + s);
    t_points.push(u2);
    t_points.extend(d2 as u32 + s + 1..=d as u32);
    let t = Permutation::cycle(d, &t_points).expect("distinct points");
    let n = Permutation::range_cycle(d, d2 as u32 + 1, d as u32).expect("fresh block");
    let tau1 = t.compose(&t1.extend(d));
    let tau2 = t2.extend(d).compose(&n);
    checked(tau1, tau2, xv, yv, d)
}

/// Removes two same-parity parts `b, b'` from the second side at once,
/// shrinking the largest first-side part by `b + b'`; a single cycle
/// weaving through both fresh blocks grows it back.
fn try_strip_pair(xv: &[u32], yv: &[u32], d: usize) -> Option<(Permutation, Permutation)> {
    let p = xv.len();
    let q = yv.len();
    if q < 3 {
        return None;
    }
    let budget = d + 3 - p - q;
    for j1 in 0..q {
        for j2 in j1 + 1..q {
            let sum = yv[j1] + yv[j2];
            if (yv[j1] + yv[j2]) % 2 != 0 {
                continue;
            }
            if (sum as usize) > budget || xv[0] <= sum {
                continue;
            }
            return Some(commit_strip_pair(xv, yv, d, j1, j2));
        }
    }
    None
}

fn commit_strip_pair(
    xv: &[u32],
    yv: &[u32],
    d: usize,
    j1: usize,
    j2: usize,
) -> (Permutation, Permutation) {
    let b1 = yv[j1];
    let b2 = yv[j2];
    let sum = b1 + b2;
    let d2 = d - sum as usize;
    let mut av2 = xv.to_vec();
    av2[0] -= sum;
    av2.sort_unstable_by(|x, y| y.cmp(x));
    let mut bv2 = yv.to_vec();
    bv2.remove(j2);
    bv2.remove(j1);
    let (t1, t2) = solve(&av2, &bv2, d2);

    let grown = first_cycle_of_len(&t1, (xv[0] - sum) as usize);
    let u = grown[0];
    let f0 = d2 as u32;
    let mut w_points: Vec<u32> = vec![u];
    w_points.extend(f0 + 1..=f0 + b1 - 1);
    w_points.extend(f0 + b1 + 1..=f0 + b1 + b2 - 1);
    w_points.push(f0 + b1);
    w_points.push(f0 + b1 + b2);
    let w = Permutation::cycle(d, &w_points).expect("distinct points");
    let n1 = Permutation::range_cycle(d, f0 + 1, f0 + b1).expect("first fresh block");
    let n2 = Permutation::range_cycle(d, f0 + b1 + 1, d as u32).expect("second fresh block");
    let tau1 = w.compose(&t1.extend(d));
    let tau2 = t2.extend(d).compose(&n1).compose(&n2);
    checked(tau1, tau2, xv, yv, d)
}

fn first_cycle_of_len(p: &Permutation, len: usize) -> Vec<u32> {
    cycles_with_fixed(p)
        .into_iter()
        .find(|c| c.len() == len)
        .expect("the recursive solution carries a cycle of the needed length")
}

/// Last resort: fix a canonical first factor and enumerate second factors.
/// Kept only as a safety net for degrees small enough to scan.
fn fallback(av: &[u32], bv: &[u32], d: usize) -> (Permutation, Permutation) {
    FALLBACK_USES.fetch_add(1, Ordering::Relaxed);
    assert!(
        d <= 10,
        "no reduction applies to A = {av:?}, B = {bv:?} at degree {d}; this is a defect"
    );
    let t1 = search::canonical_of_type(av, d);
    let mut found: Option<Permutation> = None;
    search::for_each_of_type(d, bv, &mut |cand| {
        if t1.compose(cand).cycle_type().max_part() as usize == d {
            found = Some(cand.clone());
            true
        } else {
            false
        }
    });
    let t2 = found.expect("an admissible pair always has a full-cycle product");
    checked(t1, t2, av, bv, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partitions_of;
    use crate::realize::realize_full_cycle;

    fn admissible(a: &CyclePartition, b: &CyclePartition, d: usize) -> bool {
        (d + 1 + a.len() + b.len()) % 2 == 0 && a.len() + b.len() <= d + 1
    }

    #[test]
    fn all_admissible_pairs_up_to_degree_twelve() {
        for d in 1..=12usize {
            let parts = partitions_of(d);
            for a in &parts {
                for b in &parts {
                    if !admissible(a, b, d) {
                        continue;
                    }
                    // `checked` inside the solver validates types and product.
                    let (t1, t2) = construct(a.parts(), b.parts(), d);
                    assert_eq!(t1.cycle_type(), *a);
                    assert_eq!(t2.cycle_type(), *b);
                }
            }
        }
        assert_eq!(full_cycle_fallback_count(), 0);
    }

    #[test]
    fn equal_odd_blocks_solve_without_fallback() {
        for (k, p) in [
            (3u32, 3usize),
            (3, 5),
            (5, 3),
            (3, 7),
            (7, 3),
            (5, 5),
            (3, 9),
            (9, 3),
            (5, 7),
            (7, 5),
        ] {
            let d = k as usize * p;
            let av = vec![k; p];
            let (t1, t2) = construct(&av, &av, d);
            assert_eq!(t1.cycle_type(), CyclePartition::new(av.clone()).unwrap());
            assert_eq!(t2.cycle_type(), CyclePartition::new(av.clone()).unwrap());
        }
        assert_eq!(full_cycle_fallback_count(), 0);
    }

    #[test]
    fn public_wrapper_validates() {
        let part = |v: &[u32]| CyclePartition::new(v.to_vec()).unwrap();
        assert!(matches!(
            realize_full_cycle(&part(&[2, 2]), &part(&[3])),
            Err(RealizeError::TotalMismatch { .. })
        ));
        assert!(matches!(
            realize_full_cycle(&part(&[2, 2]), &part(&[2, 2])),
            Err(RealizeError::FullCycleParity)
        ));
        assert!(matches!(
            realize_full_cycle(&part(&[1, 1, 1]), &part(&[1, 1, 1])),
            Err(RealizeError::TooManyParts { .. })
        ));
        let (t1, t2) = realize_full_cycle(&part(&[2, 2]), &part(&[4])).unwrap();
        assert_eq!(t1.cycle_type(), part(&[2, 2]));
        assert_eq!(t2.cycle_type(), part(&[4]));
        assert_eq!(t1.compose(&t2).cycle_type().max_part(), 4);
    }

    #[test]
    fn larger_mixed_shapes() {
        for (a, b) in [
            (vec![6u32, 5, 4, 3, 2], vec![10u32, 10]),
            (vec![20], vec![7, 7, 3, 1, 1, 1]),
            (vec![8, 8, 8], vec![12, 12]),
            (vec![9, 9], vec![6, 6, 6]),
            (vec![13, 5], vec![4, 4, 4, 4, 2]),
            (vec![2, 2, 2, 2, 2, 2], vec![12]),
        ] {
            let d = a.iter().sum::<u32>() as usize;
            assert_eq!(b.iter().sum::<u32>() as usize, d);
            assert!((d + 1 + a.len() + b.len()) % 2 == 0, "test data parity");
            let (t1, t2) = construct(&a, &b, d);
            assert_eq!(t1.compose(&t2).cycle_type().max_part() as usize, d);
        }
        assert_eq!(full_cycle_fallback_count(), 0);
    }
}
