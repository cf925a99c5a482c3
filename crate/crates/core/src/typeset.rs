//! Upper subsets of a poset, stored as the finite antichain of their
//! minimal elements. These are the values of the type function.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::poset::{Elem, Poset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeSetError {
    #[error("type sets belong to different posets")]
    PosetMismatch,
}

/// `{q | q >= a for some a in antichain}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TypeSet {
    #[serde(skip)]
    poset_id: u64,
    antichain: Vec<Elem>,
}

impl TypeSet {
    pub fn empty(poset: &Poset) -> TypeSet {
        TypeSet {
            poset_id: poset.fingerprint(),
            antichain: Vec::new(),
        }
    }

    /// `↑p`.
    pub fn principal(poset: &Poset, p: Elem) -> TypeSet {
        TypeSet {
            poset_id: poset.fingerprint(),
            antichain: vec![p],
        }
    }

    /// The type set generated by an arbitrary finite set of elements.
    pub fn normalize(poset: &Poset, set: impl IntoIterator<Item = Elem>) -> TypeSet {
        let set: BTreeSet<Elem> = set.into_iter().collect();
        TypeSet {
            poset_id: poset.fingerprint(),
            antichain: poset.minimal_of(&set).into_iter().collect(),
        }
    }

    pub fn minimal(&self) -> &[Elem] {
        &self.antichain
    }

    pub fn is_empty(&self) -> bool {
        self.antichain.is_empty()
    }

    pub fn union(&self, poset: &Poset, other: &TypeSet) -> Result<TypeSet, TypeSetError> {
        if self.poset_id != other.poset_id || self.poset_id != poset.fingerprint() {
            return Err(TypeSetError::PosetMismatch);
        }
        Ok(TypeSet::normalize(
            poset,
            self.antichain.iter().chain(&other.antichain).copied(),
        ))
    }

    pub fn contains(&self, poset: &Poset, p: Elem) -> bool {
        self.antichain.iter().any(|&a| poset.leq(a, p))
    }

    /// The generator `p` when this is `↑p`.
    pub fn is_trim(&self) -> Option<Elem> {
        match self.antichain.as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }

    /// Members within `P_horizon`.
    pub fn members(&self, poset: &Poset, horizon: usize) -> BTreeSet<Elem> {
        poset
            .prefix(horizon)
            .filter(|&p| self.contains(poset, p))
            .collect()
    }

    /// Antichain and upward-closure check on `P_horizon`.
    pub fn is_upper_set_on_prefix(&self, poset: &Poset, horizon: usize) -> bool {
        let antichain_ok = self
            .antichain
            .iter()
            .all(|&a| self.antichain.iter().all(|&b| a == b || !poset.leq(a, b)));
        let members = self.members(poset, horizon);
        let closed = members.iter().all(|&m| {
            poset
                .prefix(horizon)
                .filter(|&r| poset.leq(m, r))
                .all(|r| members.contains(&r))
        });
        antichain_ok && closed
    }

    /// Sorted element names.
    pub fn to_names(&self, poset: &Poset) -> Vec<String> {
        poset.display_set(&self.antichain)
    }
}
