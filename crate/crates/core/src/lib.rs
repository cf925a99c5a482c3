//! Executable order theory for trim partitions of Stone spaces.
//!
//! The crate analyses posets, builds finite truncations of the countable
//! Boolean rings that carry trim `P`-partitions, checks the type-function
//! axioms on them, constructs type-preserving isomorphisms by back and
//! forth, and computes the closure algebras generated by one open set.

pub mod backforth;
pub mod closure;
pub mod completion;
pub mod points;
pub mod poset;
pub mod ring;
pub mod skeleton;
pub mod typeset;

pub use poset::{Elem, Family, Poset, PosetError, SubsetSpec, Verdict};
pub use skeleton::{build_levels, validate_config, Atom, BuildConfig, Part, SkeletonTree, Split};
pub use typeset::TypeSet;
