//! Hash-backed sets and multisets over numbers and nested sets.
//!
//! Elements (finite numbers, or sets of elements) are stored under an
//! injective textual key, so lookups, relations and operations all run
//! on a plain hash table. The container is a handle to a shared store:
//! [`HSet::refer_to`] aliases, [`HSet::clone_of`] copies, and the
//! operation engine exploits that to update accumulators in place in
//! time proportional to the *other* operands ([`operations`]).
//!
//! [`relations`] covers membership with multiplicity and the four
//! inclusion flavours; [`mcmc`] uses the whole stack to run a
//! Metropolis sampler for the beta random-graph model.

pub mod element;
pub mod hset;
pub mod mcmc;
pub mod operations;
pub mod relations;

pub use element::{
    decode, encode, validate_member, Element, ElementError, Key, MemberValue, ValidatedMember,
};
pub use hset::{HSet, HsetError, Multiplicity};
pub use operations::{
    difference, hset_operation, intersection, setsum, symmdiff, union, OpName, OpSpec, Semantic,
};
pub use relations::{equal, included, inclusion_batch, inclusion_member, RelationKind};
