//! Permutation-group kernel.
//!
//! Permutations act on `{0, …, degree-1}` internally; all text formats are
//! 1-based to match standard cycle notation. Groups carry a deterministic
//! stabilizer chain for exact order and membership, built lazily and cached.

mod cosets;
mod embed;
mod group;
mod lattice;
mod ops;
#[allow(clippy::module_inception)]
mod perm;

pub use cosets::CosetAction;
pub use embed::{
    block_lift, direct_product, embed_direct_product, embed_wreath, fold_wreath, wreath_product,
};
pub use group::PermGroup;
pub use lattice::{
    all_subgroup_classes, maximal_subgroups, subgroups_of_index, sylow_subgroup,
    transitive_subgroup_classes, LATTICE_ORDER_CAP, SUBGROUP_INDEX_CAP,
};
pub use ops::{
    conjugate_contained_in, double_coset_reps, is_conjugate, minimal_block_partition, normalizer,
    partition_stabilizer,
    set_stabilizer, system_stabilizer, uniform_partitions, PointPartition,
};
pub use perm::Perm;
