//! Leveled atom sets `Z(1), Z(2), ...` of the skeleton tree.
//!
//! Every node has a type in `P`. Level `n + 1` is produced from level `n`
//! by three rules:
//!
//! * (a) a node `A` gets one child of each type `q ∈ P_{n+1}` with
//!   `q >= t(A)`, except that it gets two children of type `t(A)` when
//!   `t(A) ∉ I`;
//! * (b) a parentless node of type `p_{n+1}` is added when `p_{n+1} ∈ P^u`
//!   or no node of level `n` lies below `p_{n+1}`;
//! * (c) a parentless node is added for each type in `P_n ∩ P^∞`.
//!
//! Children of consecutive parents are stored consecutively and the
//! parentless (`U_n`) nodes come last, so the descendants of any node at a
//! deeper level form a contiguous index range.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::ops::Range;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::poset::{Elem, Poset};

/// Default cap on the number of nodes in a single level.
pub const DEFAULT_MAX_LEVEL_NODES: usize = 1 << 16;

/// Which block of the `{P^b, P^u, P^∞}` partition an element belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Bounded,
    Unbounded,
    Infinite,
}

/// The partition `{P^b, P^u, P^∞}`: explicit assignments plus a default
/// for every other element (needed for countable posets).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Split {
    pub default: Part,
    pub overrides: BTreeMap<Elem, Part>,
}

impl Split {
    pub fn all(part: Part) -> Split {
        Split {
            default: part,
            overrides: BTreeMap::new(),
        }
    }

    pub fn with(mut self, elems: impl IntoIterator<Item = Elem>, part: Part) -> Split {
        for e in elems {
            self.overrides.insert(e, part);
        }
        self
    }

    pub fn part(&self, e: Elem) -> Part {
        self.overrides.get(&e).copied().unwrap_or(self.default)
    }
}

/// Input of the construction: the poset, the isolated set `I` and the split.
#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub poset: Arc<Poset>,
    pub isolated: BTreeSet<Elem>,
    pub split: Split,
}

impl BuildConfig {
    /// `I = ∅` and everything in `P^b`.
    pub fn bounded(poset: Arc<Poset>) -> BuildConfig {
        BuildConfig {
            poset,
            isolated: BTreeSet::new(),
            split: Split::all(Part::Bounded),
        }
    }

    pub fn with_isolated(mut self, isolated: impl IntoIterator<Item = Elem>) -> BuildConfig {
        self.isolated = isolated.into_iter().collect();
        self
    }

    pub fn with_split(mut self, split: Split) -> BuildConfig {
        self.split = split;
        self
    }

    /// The configuration used for uniqueness: `P^b = q`, `P^∞ = P - q`.
    pub fn for_lower_set(
        poset: Arc<Poset>,
        q: impl IntoIterator<Item = Elem>,
        isolated: impl IntoIterator<Item = Elem>,
    ) -> BuildConfig {
        BuildConfig {
            poset,
            isolated: isolated.into_iter().collect(),
            split: Split::all(Part::Infinite).with(q, Part::Bounded),
        }
    }

    pub fn is_isolated(&self, p: Elem) -> bool {
        self.isolated.contains(&p)
    }

    pub fn part(&self, p: Elem) -> Part {
        self.split.part(p)
    }

    fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.poset.fingerprint().hash(&mut h);
        self.isolated.hash(&mut h);
        self.split.hash(&mut h);
        h.finish()
    }
}

/// The hypothesis clause a configuration breaks.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Clause {
    #[serde(rename = "I ∩ P_min ∩ P^∞ = ∅")]
    IsolatedMinimalInfinite,
    #[serde(rename = "P^b is a lower subset of P_Δ")]
    BoundedLowerInDelta,
    #[serde(rename = "P^b ∪ P^u is a lower subset of P_Δ")]
    BoundedUnboundedLowerInDelta,
    #[serde(rename = "{q ∈ P^u | q ≤ p} is finite for p ∈ P^u")]
    UnboundedFinitelyBelow,
}

impl Clause {
    pub fn describe(self) -> &'static str {
        match self {
            Clause::IsolatedMinimalInfinite => "I ∩ P_min ∩ P^∞ = ∅",
            Clause::BoundedLowerInDelta => "P^b is a lower subset of P_Δ",
            Clause::BoundedUnboundedLowerInDelta => "P^b ∪ P^u is a lower subset of P_Δ",
            Clause::UnboundedFinitelyBelow => "{q ∈ P^u | q ≤ p} is finite for p ∈ P^u",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub clause: Clause,
    pub witness: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SkeletonError {
    #[error("configuration violates: {}", .0.iter().map(|v| v.clause.describe()).collect::<Vec<_>>().join("; "))]
    InvalidConfig(Vec<Violation>),
    #[error("level {level} would hold {nodes} nodes, above the limit of {limit}")]
    LevelTooLarge {
        level: usize,
        nodes: usize,
        limit: usize,
    },
    #[error("level {requested} is beyond the built depth {built}")]
    DepthExceeded { requested: usize, built: usize },
    #[error("expected atoms of level {expected}, got level {got}")]
    LevelMismatch { expected: usize, got: usize },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("atom {0:?} does not exist")]
    NoSuchAtom(Atom),
}

/// A node of the tree, addressed by level (1-based) and index in `Z(level)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Atom {
    pub level: u32,
    pub index: u32,
}

impl Atom {
    pub fn new(level: usize, index: usize) -> Atom {
        Atom {
            level: level as u32,
            index: index as u32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Node {
    #[serde(rename = "type")]
    pub ty: Elem,
    pub parent: Option<u32>,
    /// Member of `U_n` (added by rule (b) or (c), so without a parent).
    pub u_flag: bool,
    child_start: u32,
    child_len: u32,
}

impl Node {
    pub fn children(&self) -> Range<u32> {
        self.child_start..self.child_start + self.child_len
    }
}

/// The levels `Z(1..=depth)` built from one configuration.
#[derive(Clone, Debug)]
pub struct SkeletonTree {
    config: BuildConfig,
    levels: Vec<Vec<Node>>,
    id: u64,
}

/// Checks the three hypotheses of the construction on `P_horizon`.
pub fn validate_config(config: &BuildConfig, horizon: usize) -> Vec<Violation> {
    let poset = &config.poset;
    let mut out = Vec::new();
    let prefix: Vec<Elem> = poset.prefix(horizon).collect();
    let (delta, _) = poset.p_delta(horizon);
    let delta: BTreeSet<Elem> = delta.into_iter().collect();

    for &p in &prefix {
        if config.is_isolated(p) && poset.is_minimal(p) && config.part(p) == Part::Infinite {
            out.push(Violation {
                clause: Clause::IsolatedMinimalInfinite,
                witness: vec![poset.display(p)],
                detail: format!("{} is minimal, isolated and in P^∞", poset.display(p)),
            });
        }
    }

    let lower_in_delta = |in_set: &dyn Fn(Part) -> bool, clause: Clause, out: &mut Vec<Violation>| {
        for &p in &prefix {
            if !in_set(config.part(p)) {
                continue;
            }
            if !delta.contains(&p) {
                out.push(Violation {
                    clause,
                    witness: vec![poset.display(p)],
                    detail: format!("{} has no finite foundation", poset.display(p)),
                });
                continue;
            }
            if let Some(r) = prefix
                .iter()
                .find(|&&r| poset.leq(r, p) && !in_set(config.part(r)))
            {
                out.push(Violation {
                    clause,
                    witness: vec![poset.display(*r), poset.display(p)],
                    detail: format!(
                        "{} <= {} but {} is outside the set",
                        poset.display(*r),
                        poset.display(p),
                        poset.display(*r)
                    ),
                });
            }
        }
    };
    lower_in_delta(&|part| part == Part::Bounded, Clause::BoundedLowerInDelta, &mut out);
    lower_in_delta(
        &|part| part != Part::Infinite,
        Clause::BoundedUnboundedLowerInDelta,
        &mut out,
    );

    if let Some(fam) = poset.family() {
        for &p in &prefix {
            if config.part(p) != Part::Unbounded || fam.down_set_finite(p.0) {
                continue;
            }
            // Infinitely many elements lie below p; only finitely many are
            // assigned explicitly, so the default decides.
            if config.split.default == Part::Unbounded {
                out.push(Violation {
                    clause: Clause::UnboundedFinitelyBelow,
                    witness: vec![poset.display(p)],
                    detail: format!(
                        "infinitely many elements of P^u lie below {}",
                        poset.display(p)
                    ),
                });
            }
        }
    }
    out
}

pub fn build_levels(config: &BuildConfig, depth: usize) -> Result<SkeletonTree, SkeletonError> {
    build_levels_with_limit(config, depth, DEFAULT_MAX_LEVEL_NODES)
}

pub fn build_levels_with_limit(
    config: &BuildConfig,
    depth: usize,
    max_level_nodes: usize,
) -> Result<SkeletonTree, SkeletonError> {
    if depth == 0 {
        return Err(SkeletonError::ZeroDepth);
    }
    let violations = validate_config(config, depth);
    if !violations.is_empty() {
        return Err(SkeletonError::InvalidConfig(violations));
    }
    let poset = &config.poset;
    let mut levels: Vec<Vec<Node>> = vec![vec![Node {
        ty: Elem(0),
        parent: None,
        u_flag: false,
        child_start: 0,
        child_len: 0,
    }]];

    for n in 2..=depth {
        let prev = levels.last_mut().expect("level 1 exists");
        let p_n: Vec<Elem> = poset.prefix(n).collect();
        let mut above: HashMap<Elem, Vec<Elem>> = HashMap::new();
        let mut next: Vec<Node> = Vec::new();
        let mut prev_types = BTreeSet::new();

        for (i, parent) in prev.iter_mut().enumerate() {
            let t = parent.ty;
            prev_types.insert(t);
            let copies = if config.is_isolated(t) { 1 } else { 2 };
            let strictly_above = above.entry(t).or_insert_with(|| {
                p_n.iter().copied().filter(|&q| poset.lt(t, q)).collect()
            });
            parent.child_start = next.len() as u32;
            let kinds = std::iter::repeat_n(t, copies)
                .chain(strictly_above.iter().copied());
            for ty in kinds {
                next.push(Node {
                    ty,
                    parent: Some(i as u32),
                    u_flag: false,
                    child_start: 0,
                    child_len: 0,
                });
            }
            parent.child_len = next.len() as u32 - parent.child_start;
            if next.len() > max_level_nodes {
                return Err(SkeletonError::LevelTooLarge {
                    level: n,
                    nodes: next.len(),
                    limit: max_level_nodes,
                });
            }
        }

        let mut unparented = Vec::new();
        // Rule (b): p_n is defined only while n <= |P|.
        if poset.contains(Elem(n - 1)) {
            let pn = Elem(n - 1);
            let nothing_below = !prev_types.iter().any(|&t| poset.leq(t, pn));
            if config.part(pn) == Part::Unbounded || nothing_below {
                unparented.push(pn);
            }
        }
        // Rule (c).
        unparented.extend(
            poset
                .prefix(n - 1)
                .filter(|&p| config.part(p) == Part::Infinite),
        );
        for ty in unparented {
            next.push(Node {
                ty,
                parent: None,
                u_flag: true,
                child_start: 0,
                child_len: 0,
            });
        }
        if next.len() > max_level_nodes {
            return Err(SkeletonError::LevelTooLarge {
                level: n,
                nodes: next.len(),
                limit: max_level_nodes,
            });
        }
        levels.push(next);
    }

    let mut h = std::collections::hash_map::DefaultHasher::new();
    config.fingerprint().hash(&mut h);
    depth.hash(&mut h);
    Ok(SkeletonTree {
        config: config.clone(),
        levels,
        id: h.finish(),
    })
}

#[derive(Serialize)]
struct LevelDump<'a> {
    level: usize,
    nodes: Vec<NodeDump<'a>>,
}

#[derive(Serialize)]
struct NodeDump<'a> {
    index: usize,
    #[serde(rename = "type")]
    ty: String,
    parent: Option<u32>,
    u: bool,
    #[serde(skip)]
    _node: &'a Node,
}

impl SkeletonTree {
    pub fn config(&self) -> &BuildConfig {
        &self.config
    }

    pub fn poset(&self) -> &Poset {
        &self.config.poset
    }

    /// Identity used to reject ring elements from another tree.
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, n: usize) -> &[Node] {
        &self.levels[n - 1]
    }

    pub fn level_len(&self, n: usize) -> usize {
        self.levels[n - 1].len()
    }

    pub fn node(&self, atom: Atom) -> &Node {
        &self.levels[atom.level as usize - 1][atom.index as usize]
    }

    pub fn get(&self, atom: Atom) -> Result<&Node, SkeletonError> {
        self.levels
            .get((atom.level as usize).wrapping_sub(1))
            .and_then(|l| l.get(atom.index as usize))
            .ok_or(SkeletonError::NoSuchAtom(atom))
    }

    pub fn ty(&self, atom: Atom) -> Elem {
        self.node(atom).ty
    }

    /// Types occurring in `Z(n)`.
    pub fn types_at(&self, n: usize) -> BTreeSet<Elem> {
        self.level(n).iter().map(|node| node.ty).collect()
    }

    pub fn u_nodes(&self, n: usize) -> impl Iterator<Item = (usize, &Node)> {
        self.level(n).iter().enumerate().filter(|(_, node)| node.u_flag)
    }

    /// `Z(n+1, A)` in canonical order.
    pub fn children(&self, atom: Atom) -> Result<Vec<Atom>, SkeletonError> {
        let node = self.get(atom)?;
        let next = atom.level as usize + 1;
        if next > self.depth() {
            return Err(SkeletonError::DepthExceeded {
                requested: next,
                built: self.depth(),
            });
        }
        Ok(node.children().map(|i| Atom::new(next, i as usize)).collect())
    }

    /// Indices at level `to` of the descendants of the index range `range`
    /// at level `from`. Always contiguous.
    pub fn descendant_range(&self, from: usize, range: Range<u32>, to: usize) -> Range<u32> {
        let mut r = range;
        for n in from..to {
            if r.is_empty() {
                return 0..0;
            }
            let level = self.level(n);
            let start = level[r.start as usize].child_start;
            let last = &level[r.end as usize - 1];
            r = start..last.child_start + last.child_len;
        }
        r
    }

    /// Ancestor of `atom` at `level`, or `None` when the lineage starts in
    /// some `U_m` below that level.
    pub fn ancestor(&self, atom: Atom, level: usize) -> Option<Atom> {
        let mut cur = atom;
        while cur.level as usize > level {
            let parent = self.node(cur).parent?;
            cur = Atom {
                level: cur.level - 1,
                index: parent,
            };
        }
        Some(cur)
    }

    /// θ: maps an atom set of level `n - 1` to the union of its children at
    /// level `n`.
    pub fn embed_theta(
        &self,
        from_level: usize,
        atoms: &[u32],
    ) -> Result<Vec<u32>, SkeletonError> {
        let to = from_level + 1;
        if to > self.depth() {
            return Err(SkeletonError::DepthExceeded {
                requested: to,
                built: self.depth(),
            });
        }
        let level = self.level(from_level);
        let mut out = Vec::new();
        for &a in atoms {
            let node = level
                .get(a as usize)
                .ok_or(SkeletonError::NoSuchAtom(Atom::new(from_level, a as usize)))?;
            out.extend(node.children());
        }
        Ok(out)
    }

    /// A copy of the tree with `atom` and its whole subtree removed, the
    /// remaining nodes renumbered. Used to check that verification notices
    /// a damaged tree.
    pub fn without_subtree(&self, atom: Atom) -> SkeletonTree {
        let mut removed: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); self.depth()];
        removed[atom.level as usize - 1].insert(atom.index);
        for n in atom.level as usize..self.depth() {
            let gone: Vec<u32> = removed[n - 1].iter().copied().collect();
            for i in gone {
                removed[n].extend(self.level(n)[i as usize].children());
            }
        }
        let mut remap: Vec<Vec<Option<u32>>> = Vec::new();
        for (n, level) in self.levels.iter().enumerate() {
            let mut k = 0;
            remap.push(
                (0..level.len() as u32)
                    .map(|i| {
                        if removed[n].contains(&i) {
                            None
                        } else {
                            k += 1;
                            Some(k - 1)
                        }
                    })
                    .collect(),
            );
        }
        let mut levels = Vec::new();
        for (n, level) in self.levels.iter().enumerate() {
            let mut out = Vec::new();
            for (i, node) in level.iter().enumerate() {
                if removed[n].contains(&(i as u32)) {
                    continue;
                }
                let mut node = node.clone();
                node.parent = node.parent.map(|p| remap[n - 1][p as usize].expect("kept parent"));
                if n + 1 < self.levels.len() {
                    let kept: Vec<u32> = node
                        .children()
                        .filter_map(|c| remap[n + 1][c as usize])
                        .collect();
                    node.child_start = kept.first().copied().unwrap_or_else(|| {
                        // keep the range empty but positioned
                        (node.child_start..self.levels[n + 1].len() as u32)
                            .find_map(|c| remap[n + 1][c as usize])
                            .unwrap_or(0)
                    });
                    node.child_len = kept.len() as u32;
                }
                out.push(node);
            }
            levels.push(out);
        }
        SkeletonTree {
            config: self.config.clone(),
            levels,
            id: self.id ^ 0x005e_ed0f_dead,
        }
    }

    /// The same tree with every type `t` replaced by `theta(t)` and the
    /// configuration replaced by `config`.
    pub fn relabeled(&self, theta: impl Fn(Elem) -> Elem, config: BuildConfig) -> SkeletonTree {
        let levels = self
            .levels
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|node| Node {
                        ty: theta(node.ty),
                        ..node.clone()
                    })
                    .collect()
            })
            .collect();
        SkeletonTree {
            config,
            levels,
            id: self.id.rotate_left(17) ^ 0x7e1a_be11,
        }
    }

    /// Graphviz rendering; nodes are labelled `level.index:type` and `U_n`
    /// members are dashed.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph skeleton {\n  rankdir=TB;\n");
        for (n, level) in self.levels.iter().enumerate() {
            let lvl = n + 1;
            for (i, node) in level.iter().enumerate() {
                let style = if node.u_flag { ", style=dashed" } else { "" };
                let _ = writeln!(
                    s,
                    "  n{lvl}_{i} [label=\"{lvl}.{i}:{}\"{style}];",
                    self.poset().display(node.ty)
                );
                if let Some(p) = node.parent {
                    let _ = writeln!(s, "  n{}_{p} -> n{lvl}_{i};", lvl - 1);
                }
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dump: Vec<LevelDump> = self
            .levels
            .iter()
            .enumerate()
            .map(|(n, level)| LevelDump {
                level: n + 1,
                nodes: level
                    .iter()
                    .enumerate()
                    .map(|(i, node)| NodeDump {
                        index: i,
                        ty: self.poset().display(node.ty),
                        parent: node.parent,
                        u: node.u_flag,
                        _node: node,
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_value(dump).expect("serialisable")
    }
}
