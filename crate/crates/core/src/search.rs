//! Exhaustive backtracking search for constellations of prescribed types.
//!
//! The first factor is pinned to a canonical representative of its
//! conjugacy class (every solution class contains one such tuple, since
//! simultaneous conjugation preserves types, the product, and
//! transitivity).  Middle factors are enumerated class by class; the last
//! factor is forced by the identity-product condition and only checked.
//! Two sound prunes cut the tree: the partial product must have the same
//! sign as the remaining factors can supply, and its distance from the
//! identity, corrected by the number of orbits still to be merged, must be
//! coverable by the remaining factor lengths.

use crate::branch::GeneralDatum;
use crate::perm::{is_transitive, orbits, Permutation};
use crate::realize::Constellation;

/// Caps on the exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    /// Degrees above this return `Exhausted` immediately.
    pub max_degree: usize,
    /// Maximum number of factor placements explored.
    pub max_nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_degree: 12,
            max_nodes: 10_000_000,
        }
    }
}

/// Outcome of the bounded search.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// A transitive tuple of the prescribed types with identity product.
    Found(Constellation),
    /// The whole space was scanned and holds no such tuple.
    NotFound,
    /// The budget ran out first; the question is unsettled.
    Exhausted,
}

/// Searches for a constellation realizing `datum` within `budget`.
/// Deterministic: equal inputs always return the same tuple.
pub fn search_realize(datum: &GeneralDatum, budget: &SearchBudget) -> SearchOutcome {
    let d = datum.degree();
    if d > budget.max_degree {
        return SearchOutcome::Exhausted;
    }
    let types: Vec<Vec<u32>> = datum
        .partitions()
        .iter()
        .map(|p| p.parts().to_vec())
        .collect();
    let k = types.len();
    if k == 0 {
        return if d == 1 {
            SearchOutcome::Found(Constellation::new(1, Vec::new()).expect("degree one"))
        } else {
            SearchOutcome::NotFound
        };
    }
    if k == 1 {
        // A single factor must itself be the identity and act transitively.
        return if d == 1 {
            SearchOutcome::Found(
                Constellation::new(1, vec![Permutation::identity(1)]).expect("degree one"),
            )
        } else {
            SearchOutcome::NotFound
        };
    }
    let mut rem = vec![0usize; k + 1];
    for i in (0..k).rev() {
        rem[i] = rem[i + 1] + (d - types[i].len());
    }
    let first = canonical_of_type(&types[0], d);
    let mut dfs = Dfs {
        d,
        types: &types,
        rem: &rem,
        max_nodes: budget.max_nodes,
        nodes: 0,
        exhausted: false,
        found: None,
        factors: vec![first.clone()],
    };
    if dfs.admissible(&first, 1) {
        dfs.run(1, &first);
    }
    match (dfs.found, dfs.exhausted) {
        (Some(factors), _) => {
            SearchOutcome::Found(Constellation::new(d, factors).expect("consistent degrees"))
        }
        (None, true) => SearchOutcome::Exhausted,
        (None, false) => SearchOutcome::NotFound,
    }
}

struct Dfs<'a> {
    d: usize,
    types: &'a [Vec<u32>],
    rem: &'a [usize],
    max_nodes: u64,
    nodes: u64,
    exhausted: bool,
    found: Option<Vec<Permutation>>,
    factors: Vec<Permutation>,
}

impl Dfs<'_> {
    /// Can the factors beyond position `next` still cancel the prefix?
    /// Their total length `rem[next]` must match the prefix's distance from
    /// the identity in sign, and cover both that distance and the
    /// transpositions needed to merge the remaining generator orbits.
    fn admissible(&self, prefix: &Permutation, next: usize) -> bool {
        let r = self.rem[next];
        let lp = self.d - prefix.cycle_type().len();
        if lp % 2 != r % 2 {
            return false;
        }
        let c = orbits(self.d, &self.factors).len();
        lp + 2 * (c - 1) <= r
    }

    fn run(&mut self, i: usize, prefix: &Permutation) {
        let k = self.types.len();
        if i == k - 1 {
            let last = prefix.inverse();
            if last.cycle_type().parts() == &self.types[i][..] {
                self.factors.push(last);
                if is_transitive(self.d, &self.factors) {
                    self.found = Some(self.factors.clone());
                }
                self.factors.pop();
            }
            return;
        }
        let parts = self.types[i].clone();
        let d = self.d;
        let mut enumerate = |cand: &Permutation| -> bool {
            if self.found.is_some() || self.exhausted {
                return true;
            }
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.exhausted = true;
                return true;
            }
            let prefix2 = prefix.compose(cand);
            self.factors.push(cand.clone());
            if self.admissible(&prefix2, i + 1) {
                self.run(i + 1, &prefix2);
            }
            self.factors.pop();
            self.found.is_some() || self.exhausted
        };
        for_each_of_type(d, &parts, &mut enumerate);
    }
}

/// The canonical permutation of a given cycle type: parts in ascending
/// order, laid out on consecutive blocks, each cycling upward.
pub(crate) fn canonical_of_type(parts: &[u32], d: usize) -> Permutation {
    let mut asc = parts.to_vec();
    asc.sort_unstable();
    let mut cycles = Vec::with_capacity(asc.len());
    let mut lo = 1u32;
    for &len in &asc {
        cycles.push((lo..lo + len).collect::<Vec<u32>>());
        lo += len;
    }
    Permutation::from_cycles(d, &cycles).expect("consecutive blocks")
}

/// Visits every permutation of `{1..d}` whose cycle type is `parts_desc`,
/// in a fixed deterministic order; `visit` returns `true` to stop early.
/// Returns whether the walk was stopped.
pub(crate) fn for_each_of_type(
    d: usize,
    parts_desc: &[u32],
    visit: &mut dyn FnMut(&Permutation) -> bool,
) -> bool {
    debug_assert_eq!(parts_desc.iter().map(|&x| x as usize).sum::<usize>(), d);
    debug_assert!(parts_desc.windows(2).all(|w| w[0] >= w[1]));
    let mut lens: Vec<(usize, u32)> = Vec::new();
    for &x in parts_desc {
        match lens.last_mut() {
            Some(entry) if entry.0 == x as usize => entry.1 += 1,
            _ => lens.push((x as usize, 1)),
        }
    }
    let mut walker = TypeWalk {
        d,
        images: vec![0u32; d + 1],
        used: vec![false; d + 1],
        lens,
        visit,
    };
    walker.next_start()
}

struct TypeWalk<'a> {
    d: usize,
    /// `images[x]` is the image of `x` (1-based); 0 marks unassigned.
    images: Vec<u32>,
    used: Vec<bool>,
    lens: Vec<(usize, u32)>,
    visit: &'a mut dyn FnMut(&Permutation) -> bool,
}

impl TypeWalk<'_> {
    /// Opens the next cycle at the smallest unplaced point, so every cycle
    /// is produced exactly once, led by its minimum.
    fn next_start(&mut self) -> bool {
        let Some(start) = (1..=self.d as u32).find(|&z| !self.used[z as usize]) else {
            let perm = Permutation::from_images(self.images[1..].to_vec())
                .expect("a complete assignment is a permutation");
            return (self.visit)(&perm);
        };
        for li in 0..self.lens.len() {
            if self.lens[li].1 == 0 {
                continue;
            }
            let len = self.lens[li].0;
            self.lens[li].1 -= 1;
            self.used[start as usize] = true;
            let stopped = self.place(start, start, len - 1);
            self.used[start as usize] = false;
            self.lens[li].1 += 1;
            if stopped {
                return true;
            }
        }
        false
    }

    fn place(&mut self, first: u32, prev: u32, left: usize) -> bool {
        if left == 0 {
            self.images[prev as usize] = first;
            let stopped = self.next_start();
            self.images[prev as usize] = 0;
            return stopped;
        }
        for cand in first + 1..=self.d as u32 {
            if self.used[cand as usize] {
                continue;
            }
            self.used[cand as usize] = true;
            self.images[prev as usize] = cand;
            let stopped = self.place(first, cand, left - 1);
            self.images[prev as usize] = 0;
            self.used[cand as usize] = false;
            if stopped {
                return true;
            }
        }
        false
    }
}
