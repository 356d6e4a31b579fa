//! Exhaustive solvers used as ground truth: cores, pairwise stability, the
//! pairwise bargaining set, and NTU-game balancedness and ordinal convexity.

mod bargaining;
mod core;
mod ntu;

pub use self::core::{
    allocation_count, enumerate_allocations, find_block, find_weak_core_allocation, for_each_allocation,
    pairwise_stable_set, strong_core, unblocked_up_to, weak_core, Block,
};
pub use bargaining::{pairwise_bargaining_set, BargainingVerdict, PairTrade};
pub use ntu::{
    build_ntu_game, check_balanced, check_ordinal_convexity, intersection_maxima,
    minimal_balanced_collections, ntu_weak_core, BalanceViolation, BalancedCollection, Cap, ConvexityViolation,
    NtuGame, NTU_MAX_AGENTS,
};
