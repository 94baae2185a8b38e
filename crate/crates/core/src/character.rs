//! Exact irreducible characters of symmetric groups and the class-sum
//! count of identity-product tuples.
//!
//! Characters are evaluated by repeatedly stripping border strips, with
//! partitions held as beta-sets packed into a bitmask: row `i` of a
//! partition with `d` rows (short partitions are padded with empty rows)
//! contributes the bit `λᵢ + d − i`.  Removing a strip of length `m` moves
//! one set bit down by `m` positions, and the sign is the parity of the
//! set bits jumped over.  Evaluations are memoized on the pair (bitmask,
//! position in the class partition), which lets one table serve every
//! shape encountered while a fixed class is consumed.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::branch::GeneralDatum;
use crate::count::{big_factorial, type_centralizer_order};
use crate::partition::{partitions_of, CyclePartition};

/// Value of the irreducible character indexed by `lambda` on the class of
/// cycle type `mu`; both must be partitions of the same number.
pub fn character_value(lambda: &CyclePartition, mu: &CyclePartition) -> i128 {
    assert_eq!(
        lambda.total(),
        mu.total(),
        "character row and class must partition the same number"
    );
    let d = lambda.total();
    let mut memo = HashMap::new();
    strip_sum(beta_mask(lambda, d), mu.parts(), 0, &mut memo)
}

/// Degree of the irreducible character indexed by `lambda`: its value on
/// the identity class.
pub fn dimension(lambda: &CyclePartition) -> i128 {
    let d = lambda.total();
    let ones = vec![1u32; d];
    let mut memo = HashMap::new();
    strip_sum(beta_mask(lambda, d), &ones, 0, &mut memo)
}

fn beta_mask(lambda: &CyclePartition, rows: usize) -> u64 {
    assert!(
        lambda.total() + rows <= 64,
        "beta-set packing holds partitions of at most around thirty"
    );
    let parts = lambda.parts();
    let mut mask = 0u64;
    for i in 0..rows {
        let part = parts.get(i).copied().unwrap_or(0) as u64;
        mask |= 1 << (part + (rows - 1 - i) as u64);
    }
    mask
}

fn strip_sum(mask: u64, mu: &[u32], idx: usize, memo: &mut HashMap<(u64, usize), i128>) -> i128 {
    if idx == mu.len() {
        return 1;
    }
    if let Some(&v) = memo.get(&(mask, idx)) {
        return v;
    }
    let m = mu[idx] as u64;
    let mut total = 0i128;
    let mut rest = mask;
    while rest != 0 {
        let b = rest.trailing_zeros() as u64;
        rest &= rest - 1;
        if b < m || mask & (1 << (b - m)) != 0 {
            continue;
        }
        let jumped = (mask >> (b - m + 1)) & ((1 << (m - 1)) - 1);
        let term = strip_sum(mask ^ (1 << b) ^ (1 << (b - m)), mu, idx + 1, memo);
        if jumped.count_ones() % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    memo.insert((mask, idx), total);
    total
}

/// Average number of tuples with one factor in each of the datum's classes
/// and identity product, taken over the whole symmetric group: the
/// class-sum formula evaluated over every character row, divided by `d!`.
/// Multiplying by `d!` recovers the plain tuple count, with no
/// transitivity requirement.
pub fn frobenius_disconnected(datum: &GeneralDatum) -> BigRational {
    let d = datum.degree();
    let k = datum.partitions().len();
    let dfact = big_factorial(d);
    let mut class_product = BigInt::from(1);
    for p in datum.partitions() {
        class_product *= dfact.clone() / BigInt::from(type_centralizer_order(p.parts()));
    }
    let ones = vec![1u32; d];
    let mut ones_memo = HashMap::new();
    let mut class_memos: Vec<HashMap<(u64, usize), i128>> =
        vec![HashMap::new(); k];
    let mut sum = BigRational::new(BigInt::from(0), BigInt::from(1));
    for lambda in partitions_of(d) {
        let mask = beta_mask(&lambda, d);
        let mut chi_product = BigInt::from(1);
        for (i, p) in datum.partitions().iter().enumerate() {
            let chi = strip_sum(mask, p.parts(), 0, &mut class_memos[i]);
            if chi == 0 {
                chi_product = BigInt::from(0);
                break;
            }
            chi_product *= BigInt::from(chi);
        }
        if chi_product == BigInt::from(0) {
            continue;
        }
        let dim = BigInt::from(strip_sum(mask, &ones, 0, &mut ones_memo));
        if k >= 2 {
            sum += BigRational::new(chi_product, int_pow(&dim, k - 2));
        } else {
            sum += BigRational::new(chi_product * int_pow(&dim, 2 - k), BigInt::from(1));
        }
    }
    sum * BigRational::new(class_product, dfact.clone() * dfact)
}

fn int_pow(base: &BigInt, exp: usize) -> BigInt {
    let mut acc = BigInt::from(1);
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::enumerate_special_data;
    use crate::count::count_tuples;
    use crate::search::SearchBudget;

    fn partition(parts: &[u32]) -> CyclePartition {
        CyclePartition::new(parts.to_vec()).expect("valid parts")
    }

    fn general(d: usize, types: &[&[u32]]) -> GeneralDatum {
        let parts = types.iter().map(|t| partition(t)).collect();
        GeneralDatum::try_new(d, parts).expect("consistent datum")
    }

    fn rational(n: i64, m: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(m))
    }

    #[test]
    fn one_row_character_is_constant() {
        for d in 1..=8u32 {
            let top = partition(&[d]);
            for mu in partitions_of(d as usize) {
                assert_eq!(character_value(&top, &mu), 1, "class {mu}");
            }
        }
    }

    #[test]
    fn one_column_character_is_the_sign() {
        for d in 1..=8u32 {
            let column = partition(&vec![1; d as usize]);
            for mu in partitions_of(d as usize) {
                let sign = if (d as usize - mu.len()) % 2 == 0 { 1 } else { -1 };
                assert_eq!(character_value(&column, &mu), sign, "class {mu}");
            }
        }
        assert_eq!(character_value(&partition(&[1, 1]), &partition(&[2])), -1);
    }

    #[test]
    fn two_dimensional_row_values() {
        let lambda = partition(&[2, 1]);
        assert_eq!(dimension(&lambda), 2);
        assert_eq!(character_value(&lambda, &partition(&[3])), -1);
        assert_eq!(character_value(&lambda, &partition(&[2, 1])), 0);
        assert_eq!(character_value(&lambda, &partition(&[1, 1, 1])), 2);
    }

    /// Independent route to the degrees: the product-of-hooks formula.
    fn hook_dimension(lambda: &CyclePartition) -> i128 {
        let parts = lambda.parts();
        let d = lambda.total();
        let col_height = |j: u32| -> u128 {
            parts.iter().filter(|&&p| p > j).count() as u128
        };
        let mut hooks = 1u128;
        for (i, &p) in parts.iter().enumerate() {
            for j in 0..p {
                let arm = (p - 1 - j) as u128;
                let leg = col_height(j) - 1 - i as u128;
                hooks *= arm + leg + 1;
            }
        }
        let fact: u128 = (1..=d as u128).product();
        (fact / hooks) as i128
    }

    #[test]
    fn dimensions_match_hook_lengths() {
        for d in 1..=8u32 {
            for lambda in partitions_of(d as usize) {
                assert_eq!(dimension(&lambda), hook_dimension(&lambda), "row {lambda}");
            }
        }
    }

    #[test]
    fn columns_are_orthogonal() {
        for d in 1..=8u32 {
            for mu in partitions_of(d as usize) {
                let mut square_sum = 0i128;
                for lambda in partitions_of(d as usize) {
                    let chi = character_value(&lambda, &mu);
                    square_sum += chi * chi;
                }
                assert_eq!(
                    square_sum,
                    type_centralizer_order(mu.parts()) as i128,
                    "class {mu}"
                );
            }
        }
    }

    #[test]
    fn frobenius_pinned_values() {
        assert_eq!(
            frobenius_disconnected(&general(2, &[&[2], &[2]])),
            rational(1, 2)
        );
        assert_eq!(
            frobenius_disconnected(&general(3, &[&[3], &[3], &[3]])),
            rational(1, 3)
        );
    }

    #[test]
    fn frobenius_times_factorial_is_the_tuple_count() {
        let budget = SearchBudget::default();
        let mut data: Vec<GeneralDatum> = Vec::new();
        for d in 2..=4 {
            for dm in enumerate_special_data(d, 0, 2) {
                data.push(dm.to_general());
            }
        }
        data.push(general(5, &[&[5], &[5], &[3, 1, 1]]));
        data.push(general(5, &[&[2, 2, 1], &[4, 1], &[5]]));
        data.push(general(4, &[&[2, 2], &[2, 2], &[3, 1]]));
        data.push(general(4, &[&[2, 1, 1], &[2, 1, 1], &[2, 1, 1], &[2, 1, 1]]));
        for dm in &data {
            let d = dm.degree();
            let report = count_tuples(dm, &budget).unwrap();
            let predicted = frobenius_disconnected(dm)
                * BigRational::new(big_factorial(d), BigInt::from(1));
            let counted = BigRational::new(
                BigInt::from(report.tuple_count),
                BigInt::from(1),
            );
            assert_eq!(predicted, counted, "datum {dm:?}");
        }
    }
}
