//! Branched covers of the sphere: realizability decisions, explicit monodromy
//! constructions, and enumerative counts.

pub mod branch;
pub mod character;
pub mod count;
mod full_cycle;
pub mod partition;
pub mod perm;
pub mod realize;
pub mod search;

pub use branch::{
    belyi_datum, decide_realizable, enumerate_special_data, genus_of, total_branch_number,
    BranchDataError, GeneralDatum, Reason, RealizabilityVerdict, SpecialDatum,
};
pub use character::{character_value, dimension, frobenius_disconnected};
pub use count::{centralizer_order, count_tuples, CountError, CountReport};
pub use full_cycle::{full_cycle_fallback_count, split_full_cycle};
pub use partition::{partitions_bounded, partitions_of, CyclePartition, PartitionError};
pub use perm::{is_transitive, orbits, PermError, Permutation};
pub use realize::{
    absorb_transposition, braid_move, merge_parts_reduce, realize, realize_base_ell2,
    realize_ell1, realize_full_cycle, realize_with_budget, swap_adjoint, verify_constellation,
    Constellation, PartMap, RealizeError, RealizeOutcome, VerifyFailure,
};
pub use search::{search_realize, SearchBudget, SearchOutcome};
