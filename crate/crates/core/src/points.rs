//! Points of the Stone space seen through finite prefixes of descending atom
//! paths, and their labels in the chain completion.

use serde::Serialize;
use thiserror::Error;

use crate::completion::{CompletedPoset, CompletionElement};
use crate::poset::Elem;
use crate::skeleton::{Atom, SkeletonTree};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointsError {
    #[error("type chain is empty")]
    Empty,
    #[error("type chain is not ascending at position {0}")]
    NotAscending(usize),
    #[error("type {0} is not an element of the poset")]
    UnknownType(String),
    #[error("chain needs depth {needed}, tree has {built}")]
    NotRealizable { needed: usize, built: usize },
    #[error("consecutive path nodes {0:?} and {1:?} are not parent and child")]
    Broken(Atom, Atom),
}

/// `B_1 ⊇ B_2 ⊇ ... ⊇ B_d`: consecutive atoms are parent and child.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PathPrefix {
    nodes: Vec<(u32, u32)>,
}

impl PathPrefix {
    pub fn new(tree: &SkeletonTree, nodes: Vec<Atom>) -> Result<PathPrefix, PointsError> {
        if nodes.is_empty() {
            return Err(PointsError::Empty);
        }
        for w in nodes.windows(2) {
            let ok = w[1].level == w[0].level + 1
                && tree.get(w[1]).ok().and_then(|n| n.parent) == Some(w[0].index);
            if !ok {
                return Err(PointsError::Broken(w[0], w[1]));
            }
        }
        Ok(PathPrefix {
            nodes: nodes.iter().map(|a| (a.level, a.index)).collect(),
        })
    }

    pub fn nodes(&self) -> impl Iterator<Item = Atom> + '_ {
        self.nodes.iter().map(|&(level, index)| Atom { level, index })
    }

    pub fn depth(&self) -> usize {
        self.nodes.len()
    }

    pub fn types(&self, tree: &SkeletonTree) -> Vec<Elem> {
        self.nodes().map(|a| tree.ty(a)).collect()
    }
}

/// A path whose node types are exactly `chain`.
///
/// A node of type `t` at level `n` has a child of type `q` whenever
/// `q >= t` and `q ∈ P_{n+1}`, and every `p ∈ P_n` occurs in `Z(n)`, so the
/// path can start at the lowest level `L` with `rank(chain[i]) <= L + i` for
/// all `i`. Among the candidates the first one in canonical order is taken.
pub fn realize_chain(tree: &SkeletonTree, chain: &[Elem]) -> Result<PathPrefix, PointsError> {
    let poset = tree.poset();
    if chain.is_empty() {
        return Err(PointsError::Empty);
    }
    for &p in chain {
        if !poset.contains(p) {
            return Err(PointsError::UnknownType(format!("{}", p.0)));
        }
    }
    if let Some(i) = chain.windows(2).position(|w| !poset.leq(w[0], w[1])) {
        return Err(PointsError::NotAscending(i + 1));
    }
    let start = chain
        .iter()
        .enumerate()
        .map(|(i, p)| p.rank().saturating_sub(i))
        .max()
        .unwrap_or(1)
        .max(1);
    let needed = start + chain.len() - 1;
    if needed > tree.depth() {
        return Err(PointsError::NotRealizable {
            needed,
            built: tree.depth(),
        });
    }
    let first = tree
        .level(start)
        .iter()
        .position(|n| n.ty == chain[0])
        .expect("every enumerated type occurs at its level");
    let mut path = vec![Atom::new(start, first)];
    for &q in &chain[1..] {
        let cur = *path.last().expect("non-empty");
        let next = tree
            .children(cur)
            .expect("depth checked")
            .into_iter()
            .find(|&c| tree.ty(c) == q)
            .expect("rule (a) supplies the child");
        path.push(next);
    }
    PathPrefix::new(tree, path)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Clean,
    Limit,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointLabel {
    pub label: Option<String>,
    pub element: Option<CompletionElement>,
    pub classification: Classification,
    /// Number of trailing constant transitions required for `Clean`.
    pub threshold: usize,
}

/// Labels the point a path prefix approximates.
///
/// A type chain whose last `⌈d/2⌉` transitions are constant at `p` is
/// `Clean` with label `p`. A strictly increasing chain that follows the
/// generating sequence of a limit token is `Limit` with that token.
/// Anything else is `Undetermined`.
pub fn label_prefix(
    tree: &SkeletonTree,
    path: &PathPrefix,
    completed: &CompletedPoset,
) -> PointLabel {
    let poset = tree.poset();
    let types = path.types(tree);
    let d = types.len();
    let threshold = d.div_ceil(2);
    let transitions = d - 1;
    if threshold <= transitions
        && types[d - 1 - threshold..].windows(2).all(|w| w[0] == w[1])
    {
        let p = types[d - 1];
        return PointLabel {
            label: Some(poset.display(p)),
            element: Some(CompletionElement::Base { element: p }),
            classification: Classification::Clean,
            threshold,
        };
    }
    let strictly = types.windows(2).all(|w| poset.lt(w[0], w[1]));
    if strictly {
        if let Some(tok) = completed.token_for_chain(poset, &types) {
            return PointLabel {
                label: Some(tok.label.clone()),
                element: Some(CompletionElement::Limit { token: tok.clone() }),
                classification: Classification::Limit,
                threshold,
            };
        }
    }
    PointLabel {
        label: None,
        element: None,
        classification: Classification::Undetermined,
        threshold,
    }
}

/// For a `Clean` path labelled `p`: the first path atom of type `p`, which
/// is a `p`-trim neighbourhood of the point.
pub fn trim_neighbourhood(tree: &SkeletonTree, path: &PathPrefix, p: Elem) -> Option<Atom> {
    path.nodes().find(|&a| tree.ty(a) == p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{complete, complete_finite};
    use crate::poset::{Family, Poset};
    use crate::skeleton::{build_levels, BuildConfig};
    use std::sync::Arc;

    fn chain_tree(depth: usize) -> SkeletonTree {
        build_levels(&BuildConfig::bounded(Arc::new(Poset::chain(&["a", "b"]))), depth).unwrap()
    }

    #[test]
    fn realize_examples() {
        let tree = chain_tree(4);
        let path = realize_chain(&tree, &[Elem(0); 4]).unwrap();
        assert!(path.nodes().all(|a| a.index == 0));

        let path = realize_chain(&tree, &[Elem(0), Elem(1)]).unwrap();
        let nodes: Vec<Atom> = path.nodes().collect();
        assert_eq!(nodes, [Atom::new(1, 0), Atom::new(2, 2)]);

        assert_eq!(
            realize_chain(&tree, &[Elem(1), Elem(0)]),
            Err(PointsError::NotAscending(1))
        );
        assert!(matches!(
            realize_chain(&tree, &[Elem(0); 5]),
            Err(PointsError::NotRealizable { .. })
        ));
    }

    #[test]
    fn dyadic_paths() {
        let tree = build_levels(
            &BuildConfig::bounded(Arc::new(Poset::generated(Family::Dyadic))),
            6,
        )
        .unwrap();
        let chain = [Elem(0), Elem(2), Elem(3)];
        let path = realize_chain(&tree, &chain).unwrap();
        assert_eq!(path.types(&tree), chain);

        let chain = [Elem(2), Elem(3), Elem(5)];
        let path = realize_chain(&tree, &chain).unwrap();
        assert_eq!(path.nodes().next().unwrap().level, 4);
        let c = complete(tree.poset(), 12);
        let l = label_prefix(&tree, &path, &c);
        assert_eq!(l.classification, Classification::Limit);
        assert_eq!(l.label.as_deref(), Some("lim→1⁻"));
    }

    #[test]
    fn labels_on_finite_trees() {
        let tree = chain_tree(5);
        let c = complete_finite(tree.poset()).unwrap();
        let path = realize_chain(&tree, &[Elem(0), Elem(1), Elem(1), Elem(1), Elem(1)]).unwrap();
        let l = label_prefix(&tree, &path, &c);
        assert_eq!(l.classification, Classification::Clean);
        assert_eq!(l.label.as_deref(), Some("b"));
        assert_eq!(trim_neighbourhood(&tree, &path, Elem(1)), Some(Atom::new(2, 2)));

        let short = realize_chain(&tree, &[Elem(0), Elem(1)]).unwrap();
        assert_eq!(label_prefix(&tree, &short, &c).classification, Classification::Undetermined);
    }

    #[test]
    fn broken_paths_are_rejected() {
        let tree = chain_tree(3);
        assert!(PathPrefix::new(&tree, vec![Atom::new(1, 0), Atom::new(3, 0)]).is_err());
        assert!(PathPrefix::new(&tree, vec![Atom::new(2, 2), Atom::new(3, 0)]).is_err());
    }
}
