//! Elements of the direct-limit Boolean ring of a skeleton tree, the type
//! function, trim and supertrim splits, and the checks run against a built
//! tree.
//!
//! An element is a set of atoms of one level `Z(n)`; the same element at a
//! deeper level is the set of all descendants. Elements are stored at the
//! lowest level where they can be written.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::poset::{Elem, Poset, SubsetSpec};
use crate::skeleton::{Atom, Part, SkeletonError, SkeletonTree};
use crate::typeset::TypeSet;

/// Levels with at most this many atoms are checked over every subset.
pub const EXHAUSTIVE_ATOMS: usize = 12;
/// Levels with at most this many atoms are checked over every pair of subsets.
pub const EXHAUSTIVE_PAIR_ATOMS: usize = 6;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 0x7121_a5ed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring elements come from different trees")]
    TreeMismatch,
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
    #[error("atom index {index} out of range for level {level}")]
    BadAtom { level: usize, index: u32 },
    #[error("operation needs a non-empty element")]
    Empty,
    #[error("level {0} is not built")]
    BadLevel(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RingElement {
    #[serde(skip)]
    tree_id: u64,
    level: u32,
    atoms: Vec<u32>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersect,
    Difference,
}

impl RingElement {
    /// The element given by `atoms` of `Z(level)`, canonicalised.
    pub fn new(
        tree: &SkeletonTree,
        level: usize,
        atoms: impl IntoIterator<Item = u32>,
    ) -> Result<RingElement, RingError> {
        if level == 0 || level > tree.depth() {
            return Err(RingError::BadLevel(level));
        }
        let mut atoms: Vec<u32> = atoms.into_iter().collect();
        atoms.sort_unstable();
        atoms.dedup();
        if let Some(&bad) = atoms.iter().find(|&&a| a as usize >= tree.level_len(level)) {
            return Err(RingError::BadAtom { level, index: bad });
        }
        Ok(canonical(tree, level, atoms))
    }

    pub fn zero(tree: &SkeletonTree) -> RingElement {
        RingElement {
            tree_id: tree.id(),
            level: 1,
            atoms: Vec::new(),
        }
    }

    pub fn atom(tree: &SkeletonTree, atom: Atom) -> Result<RingElement, RingError> {
        RingElement::new(tree, atom.level as usize, [atom.index])
    }

    /// All of `Z(n)`.
    pub fn whole_level(tree: &SkeletonTree, n: usize) -> Result<RingElement, RingError> {
        if n == 0 || n > tree.depth() {
            return Err(RingError::BadLevel(n));
        }
        RingElement::new(tree, n, 0..tree.level_len(n) as u32)
    }

    pub fn level(&self) -> usize {
        self.level as usize
    }

    pub fn atoms(&self) -> &[u32] {
        &self.atoms
    }

    pub fn atom_refs(&self) -> impl Iterator<Item = Atom> + '_ {
        self.atoms.iter().map(|&i| Atom {
            level: self.level,
            index: i,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn tree_id(&self) -> u64 {
        self.tree_id
    }

    fn check_tree(&self, tree: &SkeletonTree) -> Result<(), RingError> {
        if self.tree_id != tree.id() {
            Err(RingError::TreeMismatch)
        } else {
            Ok(())
        }
    }
}

fn canonical(tree: &SkeletonTree, mut level: usize, mut atoms: Vec<u32>) -> RingElement {
    if atoms.is_empty() {
        level = 1;
    }
    while level > 1 {
        let nodes = tree.level(level);
        let mut parents: Vec<u32> = Vec::with_capacity(atoms.len());
        let mut full = true;
        for &a in &atoms {
            match nodes[a as usize].parent {
                Some(p) => {
                    if parents.last() != Some(&p) {
                        parents.push(p);
                    }
                }
                None => {
                    full = false;
                    break;
                }
            }
        }
        if !full {
            break;
        }
        let prev = tree.level(level - 1);
        let covered: usize = parents.iter().map(|&p| prev[p as usize].children().len()).sum();
        if covered != atoms.len() {
            break;
        }
        atoms = parents;
        level -= 1;
    }
    RingElement {
        tree_id: tree.id(),
        level: level as u32,
        atoms,
    }
}

/// The atoms of `x` at level `to` (not canonicalised).
pub fn atoms_at(tree: &SkeletonTree, x: &RingElement, to: usize) -> Result<Vec<u32>, RingError> {
    x.check_tree(tree)?;
    if to < x.level() {
        return Err(RingError::BadLevel(to));
    }
    if to > tree.depth() {
        return Err(SkeletonError::DepthExceeded {
            requested: to,
            built: tree.depth(),
        }
        .into());
    }
    let mut atoms = x.atoms.clone();
    for n in x.level()..to {
        atoms = tree.embed_theta(n, &atoms)?;
    }
    Ok(atoms)
}

/// `x` written at level `to`. The result is deliberately not lowered again.
pub fn lift(tree: &SkeletonTree, x: &RingElement, to: usize) -> Result<RingElement, RingError> {
    let atoms = atoms_at(tree, x, to)?;
    Ok(RingElement {
        tree_id: tree.id(),
        level: if atoms.is_empty() { x.level } else { to as u32 },
        atoms,
    })
}

pub fn combine(
    tree: &SkeletonTree,
    x: &RingElement,
    op: SetOp,
    y: &RingElement,
) -> Result<RingElement, RingError> {
    x.check_tree(tree)?;
    y.check_tree(tree)?;
    let level = x.level().max(y.level());
    let a: BTreeSet<u32> = atoms_at(tree, x, level)?.into_iter().collect();
    let b: BTreeSet<u32> = atoms_at(tree, y, level)?.into_iter().collect();
    let out: Vec<u32> = match op {
        SetOp::Union => a.union(&b).copied().collect(),
        SetOp::Intersect => a.intersection(&b).copied().collect(),
        SetOp::Difference => a.difference(&b).copied().collect(),
    };
    Ok(canonical(tree, level, out))
}

pub fn union(tree: &SkeletonTree, x: &RingElement, y: &RingElement) -> Result<RingElement, RingError> {
    combine(tree, x, SetOp::Union, y)
}

pub fn is_subset(tree: &SkeletonTree, x: &RingElement, y: &RingElement) -> Result<bool, RingError> {
    Ok(combine(tree, x, SetOp::Difference, y)?.is_zero())
}

pub fn is_disjoint(tree: &SkeletonTree, x: &RingElement, y: &RingElement) -> Result<bool, RingError> {
    Ok(combine(tree, x, SetOp::Intersect, y)?.is_zero())
}

/// The type `T(x)`: the up-closure of the atom types.
pub fn type_of(tree: &SkeletonTree, x: &RingElement) -> TypeSet {
    let types: BTreeSet<Elem> = x.atom_refs().map(|a| tree.ty(a)).collect();
    TypeSet::normalize(tree.poset(), types)
}

/// `Some(p)` when `x` is `p`-trim, i.e. `T(x) = ↑p`.
pub fn trim_type(tree: &SkeletonTree, x: &RingElement) -> Option<Elem> {
    type_of(tree, x).is_trim()
}

/// Number of `p`-typed atoms of `x` at its own level.
pub fn count_of_type(tree: &SkeletonTree, x: &RingElement, p: Elem) -> usize {
    x.atom_refs().filter(|&a| tree.ty(a) == p).count()
}

/// `Some(p)` when `x` is `p`-supertrim: `p`-trim, and when `p` is isolated,
/// holding exactly one `p`-typed atom. For `p ∉ I` every `p`-node has two
/// `p`-children, so the trace never has isolated points.
pub fn supertrim_type(tree: &SkeletonTree, x: &RingElement) -> Option<Elem> {
    let p = trim_type(tree, x)?;
    if tree.config().is_isolated(p) && count_of_type(tree, x, p) != 1 {
        return None;
    }
    Some(p)
}

/// One `p`-trim part for each minimal type `p` of `x`; each atom goes to
/// the first minimal type below it.
pub fn trim_split(tree: &SkeletonTree, x: &RingElement) -> Result<Vec<(Elem, RingElement)>, RingError> {
    x.check_tree(tree)?;
    if x.is_zero() {
        return Err(RingError::Empty);
    }
    let t = type_of(tree, x);
    let poset = tree.poset();
    let mins = t.minimal();
    let mut parts: Vec<Vec<u32>> = vec![Vec::new(); mins.len()];
    for a in x.atom_refs() {
        let ty = tree.ty(a);
        let k = mins
            .iter()
            .position(|&m| poset.leq(m, ty))
            .expect("every atom lies above a minimal type");
        parts[k].push(a.index);
    }
    Ok(mins
        .iter()
        .zip(parts)
        .map(|(&p, atoms)| (p, canonical(tree, x.level(), atoms)))
        .collect())
}

/// Refines [`trim_split`] so every isolated-type part holds exactly one
/// atom of its type; the part's other atoms join its first piece.
pub fn supertrim_split(
    tree: &SkeletonTree,
    x: &RingElement,
) -> Result<Vec<(Elem, RingElement)>, RingError> {
    let mut out = Vec::new();
    for (p, part) in trim_split(tree, x)? {
        if !tree.config().is_isolated(p) {
            out.push((p, part));
            continue;
        }
        let (own, rest): (Vec<Atom>, Vec<Atom>) = part.atom_refs().partition(|&a| tree.ty(a) == p);
        for (i, a) in own.iter().enumerate() {
            let mut atoms = vec![a.index];
            if i == 0 {
                atoms.extend(rest.iter().map(|r| r.index));
            }
            atoms.sort_unstable();
            out.push((p, canonical(tree, part.level(), atoms)));
        }
    }
    Ok(out)
}

/// Outcome of one family of checks.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    /// Number of instances examined.
    pub checked: usize,
    /// `exhaustive`, `sampled` or `mixed`.
    pub mode: String,
    pub counterexample: Option<String>,
}

impl AxiomCheck {
    fn new(name: &str) -> AxiomCheck {
        AxiomCheck {
            name: name.to_string(),
            passed: true,
            checked: 0,
            mode: "exhaustive".into(),
            counterexample: None,
        }
    }

    fn fail(&mut self, witness: String) {
        if self.passed {
            self.passed = false;
            self.counterexample = Some(witness);
        }
    }

    fn sampled(&mut self, sampled: bool) {
        if sampled {
            self.mode = if self.checked == 0 { "sampled" } else { "mixed" }.into();
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub poset: String,
    pub depth: usize,
    pub level_bound: usize,
    pub samples_per_level: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
    pub passed: bool,
}

impl AxiomReport {
    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serialisable")
    }
}

pub const CHECK_NONZERO: &str = "T(A)=0 iff A=0";
pub const CHECK_COVERAGE: &str = "every p lies in some T(A)";
pub const CHECK_UNION: &str = "T(A∪B)=T(A)∪T(B)";
pub const CHECK_WITNESS: &str = "p-pseudotrim B ⊆ A for p ∈ T(A)";
pub const CHECK_DECOMPOSITION: &str = "finite union of pseudotrim sets";
pub const CHECK_UPPER_SET: &str = "T(A) is an upper set";
pub const CHECK_THETA: &str = "T respects θ";
pub const CHECK_SUPERTRIM: &str = "supertrim split";

fn describe(tree: &SkeletonTree, x: &RingElement) -> String {
    let poset = tree.poset();
    let atoms: Vec<String> = x
        .atom_refs()
        .map(|a| format!("{}:{}", a.index, poset.display(tree.ty(a))))
        .collect();
    format!("level {} {{{}}}", x.level, atoms.join(", "))
}

/// Types `p ∈ P_depth` with `p >= t(A)` that have a `p`-typed descendant
/// of atom `A` (itself included) within the built tree.
fn witnessed_types(tree: &SkeletonTree, atom: Atom, wanted: &[Elem]) -> BTreeSet<Elem> {
    let poset = tree.poset();
    let t = tree.ty(atom);
    let mut missing: BTreeSet<Elem> = wanted.iter().copied().filter(|&p| poset.leq(t, p)).collect();
    let mut found = BTreeSet::new();
    let mut stack = vec![atom];
    while let Some(a) = stack.pop() {
        if missing.is_empty() {
            break;
        }
        let ty = tree.ty(a);
        if missing.remove(&ty) {
            found.insert(ty);
        }
        // Types only grow along a path, so a branch whose type is above no
        // missing type cannot help.
        if (a.level as usize) < tree.depth() && missing.iter().any(|&p| poset.leq(ty, p)) {
            let node = tree.node(a);
            stack.extend(node.children().map(|c| Atom {
                level: a.level + 1,
                index: c,
            }));
        }
    }
    found
}

struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn subset(&mut self, n: usize) -> Vec<u32> {
        let k = self.rng.gen_range(1..=n);
        let mut v: Vec<u32> = sample(&mut self.rng, n, k).into_iter().map(|i| i as u32).collect();
        v.sort_unstable();
        v
    }
}

/// Checks the five type-function properties, the upper-set law, θ-invariance
/// and the supertrim split on elements of levels `1..=level_bound`.
///
/// Levels with at most [`EXHAUSTIVE_ATOMS`] atoms are enumerated fully
/// (pairs up to [`EXHAUSTIVE_PAIR_ATOMS`]); larger levels draw `samples`
/// subsets from a seeded generator.
pub fn verify_type_axioms(
    tree: &SkeletonTree,
    level_bound: usize,
    samples: usize,
    seed: u64,
) -> AxiomReport {
    let poset = tree.poset();
    let level_bound = level_bound.min(tree.depth().saturating_sub(1)).max(1);
    let depth = tree.depth();
    let wanted: Vec<Elem> = poset.prefix(depth).collect();
    let horizon = depth;
    let mut sampler = Sampler {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };

    let mut nonzero = AxiomCheck::new(CHECK_NONZERO);
    let mut coverage = AxiomCheck::new(CHECK_COVERAGE);
    let mut union_c = AxiomCheck::new(CHECK_UNION);
    let mut witness = AxiomCheck::new(CHECK_WITNESS);
    let mut decomposition = AxiomCheck::new(CHECK_DECOMPOSITION);
    let mut upper = AxiomCheck::new(CHECK_UPPER_SET);
    let mut theta = AxiomCheck::new(CHECK_THETA);
    let mut supertrim = AxiomCheck::new(CHECK_SUPERTRIM);

    let zero = RingElement::zero(tree);
    nonzero.checked += 1;
    if !type_of(tree, &zero).is_empty() {
        nonzero.fail("T(0) is non-empty".into());
    }

    // Every p ∈ P_level_bound is the type of an atom there.
    for p in poset.prefix(level_bound) {
        coverage.checked += 1;
        if !tree.level(level_bound).iter().any(|n| n.ty == p) {
            coverage.fail(format!("no atom of type {} at level {level_bound}", poset.display(p)));
        }
    }

    for n in 1..=level_bound {
        let z = tree.level_len(n);
        let found: Vec<BTreeSet<Elem>> = (0..z as u32)
            .map(|i| witnessed_types(tree, Atom { level: n as u32, index: i }, &wanted))
            .collect();

        let exhaustive = z <= EXHAUSTIVE_ATOMS;
        let subsets: Vec<Vec<u32>> = if exhaustive {
            (1u32..1 << z)
                .map(|mask| (0..z as u32).filter(|i| mask >> i & 1 == 1).collect())
                .collect()
        } else {
            let mut v: Vec<Vec<u32>> = (0..z as u32).map(|i| vec![i]).collect();
            v.extend((0..samples).map(|_| sampler.subset(z)));
            v
        };
        for c in [
            &mut nonzero,
            &mut witness,
            &mut decomposition,
            &mut upper,
            &mut theta,
            &mut supertrim,
        ] {
            c.sampled(!exhaustive);
        }

        for atoms in &subsets {
            let x = canonical(tree, n, atoms.clone());
            let t = type_of(tree, &x);

            nonzero.checked += 1;
            if t.is_empty() {
                nonzero.fail(describe(tree, &x));
            }

            upper.checked += 1;
            if !t.is_upper_set_on_prefix(poset, horizon) {
                upper.fail(describe(tree, &x));
            }

            witness.checked += 1;
            for p in t.members(poset, horizon) {
                let ok = atoms.iter().any(|&a| found[a as usize].contains(&p));
                if !ok {
                    witness.fail(format!(
                        "no {}-pseudotrim subset of {}",
                        poset.display(p),
                        describe(tree, &x)
                    ));
                    break;
                }
            }

            theta.checked += 1;
            if n < depth {
                let up = lift(tree, &x, n + 1).expect("level exists");
                if type_of(tree, &up) != t {
                    theta.fail(describe(tree, &x));
                }
            }

            decomposition.checked += 1;
            match check_decomposition(tree, &x, poset) {
                Ok(()) => {}
                Err(msg) => decomposition.fail(msg),
            }

            supertrim.checked += 1;
            if let Err(msg) = check_supertrim_split(tree, &x) {
                supertrim.fail(msg);
            }
        }

        let pair_exhaustive = z <= EXHAUSTIVE_PAIR_ATOMS;
        union_c.sampled(!pair_exhaustive);
        let check_pair = |a: Vec<u32>, b: Vec<u32>, c: &mut AxiomCheck| {
            let x = canonical(tree, n, a);
            let y = canonical(tree, n, b);
            let u = union(tree, &x, &y).expect("same tree");
            let expected = type_of(tree, &x)
                .union(poset, &type_of(tree, &y))
                .expect("same poset");
            c.checked += 1;
            if type_of(tree, &u) != expected {
                c.fail(format!("{} ∪ {}", describe(tree, &x), describe(tree, &y)));
            }
        };
        if pair_exhaustive {
            for a in 0u32..1 << z {
                for b in 0u32..1 << z {
                    let pick = |m: u32| (0..z as u32).filter(|i| m >> i & 1 == 1).collect();
                    check_pair(pick(a), pick(b), &mut union_c);
                }
            }
        } else {
            for _ in 0..samples {
                let a = sampler.subset(z);
                let b = sampler.subset(z);
                check_pair(a, b, &mut union_c);
            }
        }
    }

    let checks = vec![
        nonzero,
        coverage,
        union_c,
        witness,
        decomposition,
        upper,
        theta,
        supertrim,
    ];
    let passed = checks.iter().all(|c| c.passed);
    AxiomReport {
        poset: poset.name().to_string(),
        depth,
        level_bound,
        samples_per_level: samples,
        seed,
        checks,
        passed,
    }
}

fn check_partition(
    tree: &SkeletonTree,
    x: &RingElement,
    parts: &[(Elem, RingElement)],
) -> Result<(), String> {
    let mut acc = RingElement::zero(tree);
    for (_, part) in parts {
        if !is_disjoint(tree, &acc, part).expect("same tree") {
            return Err(format!("overlapping parts in {}", describe(tree, x)));
        }
        acc = union(tree, &acc, part).expect("same tree");
    }
    if &acc != x {
        return Err(format!("parts do not cover {}", describe(tree, x)));
    }
    Ok(())
}

fn check_decomposition(tree: &SkeletonTree, x: &RingElement, poset: &Poset) -> Result<(), String> {
    let parts = trim_split(tree, x).map_err(|e| e.to_string())?;
    check_partition(tree, x, &parts)?;
    if parts.len() != type_of(tree, x).minimal().len() {
        return Err(format!("wrong part count for {}", describe(tree, x)));
    }
    for (p, part) in &parts {
        if trim_type(tree, part) != Some(*p) {
            return Err(format!(
                "part of {} is not {}-pseudotrim",
                describe(tree, x),
                poset.display(*p)
            ));
        }
    }
    Ok(())
}

fn check_supertrim_split(tree: &SkeletonTree, x: &RingElement) -> Result<(), String> {
    let parts = supertrim_split(tree, x).map_err(|e| e.to_string())?;
    check_partition(tree, x, &parts)?;
    for (p, part) in &parts {
        if supertrim_type(tree, part) != Some(*p) {
            return Err(format!("piece {} is not supertrim", describe(tree, part)));
        }
    }
    Ok(())
}

/// `n₀` and the element `A ∈ R_{n₀}` made of the level-`n₀` atoms whose type
/// lies in the lower set `q`, where `n₀` is the largest enumeration index of
/// the finite foundation of `q`. Every `q`-typed atom of a deeper level
/// descends from `A`.
pub fn xq_cover(tree: &SkeletonTree, q: &BTreeSet<Elem>) -> Result<(usize, RingElement), String> {
    let poset = tree.poset();
    let found = poset
        .finite_foundation(&SubsetSpec::lower(q.iter().copied()), tree.depth())
        .map_err(|e| e.to_string())?
        .ok_or_else(|| "Q has no finite foundation".to_string())?;
    let n0 = found.iter().map(|f| f.rank()).max().unwrap_or(1).max(1);
    if n0 > tree.depth() {
        return Err(format!("foundation needs level {n0}, tree has {}", tree.depth()));
    }
    let atoms = tree
        .level(n0)
        .iter()
        .enumerate()
        .filter(|(_, node)| q.contains(&node.ty))
        .map(|(i, _)| i as u32);
    let cover = RingElement::new(tree, n0, atoms).map_err(|e| e.to_string())?;
    Ok((n0, cover))
}

fn is_maximal(poset: &Poset, p: Elem) -> bool {
    match poset.family() {
        Some(fam) => fam.is_maximal(p.0),
        None => !poset.prefix(usize::MAX).any(|q| poset.lt(p, q)),
    }
}

/// Structural consequences of the construction: isolation counts, the
/// isolated-trace law at maximal types, the `P^∞`/`P^u` encodings and the
/// compact shadow of each requested lower set.
pub fn verify_structure(tree: &SkeletonTree, lower_sets: &[BTreeSet<Elem>]) -> Vec<AxiomCheck> {
    let poset = tree.poset();
    let cfg = tree.config();
    let depth = tree.depth();
    let mut out = Vec::new();

    let mut iso = AxiomCheck::new("isolation counts");
    for p in poset.prefix(depth) {
        let isolated = cfg.is_isolated(p);
        if isolated && poset.is_minimal(p) {
            for n in p.rank()..=depth {
                iso.checked += 1;
                let count = tree.level(n).iter().filter(|x| x.ty == p).count();
                if count != 1 {
                    iso.fail(format!("{count} nodes of type {} at level {n}", poset.display(p)));
                }
            }
        }
        let want = if isolated { 1 } else { 2 };
        for n in 1..depth {
            for node in tree.level(n).iter().filter(|x| x.ty == p) {
                iso.checked += 1;
                let kids = node
                    .children()
                    .filter(|&c| tree.level(n + 1)[c as usize].ty == p)
                    .count();
                if kids != want {
                    iso.fail(format!(
                        "a {}-node at level {n} has {kids} {}-children",
                        poset.display(p),
                        poset.display(p)
                    ));
                }
            }
        }
    }
    out.push(iso);

    let mut trace = AxiomCheck::new("isolated trace at maximal types");
    for n in 1..depth {
        for node in tree.level(n) {
            if !is_maximal(poset, node.ty) {
                continue;
            }
            trace.checked += 1;
            let kids: Vec<Elem> = node.children().map(|c| tree.level(n + 1)[c as usize].ty).collect();
            let single = kids.len() == 1;
            if kids.iter().any(|&k| k != node.ty) || single != cfg.is_isolated(node.ty) {
                trace.fail(format!("{}-node at level {n}", poset.display(node.ty)));
            }
        }
    }
    out.push(trace);

    let mut inf = AxiomCheck::new("P^∞ supplies U-nodes");
    for p in poset.prefix(depth.saturating_sub(1)) {
        let in_inf = cfg.part(p) == Part::Infinite;
        if in_inf {
            for n in p.rank() + 1..=depth {
                inf.checked += 1;
                if !tree.u_nodes(n).any(|(_, x)| x.ty == p) {
                    inf.fail(format!("U_{n} lacks type {}", poset.display(p)));
                }
            }
        } else {
            inf.checked += 1;
            if tree.u_nodes(depth).any(|(_, x)| x.ty == p) {
                inf.fail(format!("U_{depth} has type {} outside P^∞", poset.display(p)));
            }
        }
    }
    out.push(inf);

    let mut unb = AxiomCheck::new("P^u encodings");
    for p in poset.prefix(depth) {
        if cfg.part(p) != Part::Unbounded {
            continue;
        }
        unb.checked += 1;
        if !tree.u_nodes(p.rank()).any(|(_, x)| x.ty == p) && p.rank() > 1 {
            unb.fail(format!("U_{} lacks type {}", p.rank(), poset.display(p)));
        }
        // No element of a level below p's index holds every p-typed node.
        for n in 1..p.rank() {
            unb.checked += 1;
            let outside = tree
                .level(depth)
                .iter()
                .enumerate()
                .any(|(i, x)| x.ty == p && tree.ancestor(Atom::new(depth, i), n).is_none());
            if !outside {
                unb.fail(format!(
                    "all {}-nodes lie under Z({n})",
                    poset.display(p)
                ));
            }
        }
    }
    out.push(unb);

    let mut xq = AxiomCheck::new("compact shadow of lower sets");
    for q in lower_sets {
        match xq_cover(tree, q) {
            Err(e) => xq.fail(e),
            Ok((n0, cover)) => {
                let cover_atoms: BTreeSet<u32> = cover.atoms().iter().copied().collect();
                let cover_level = cover.level();
                for n in n0..=depth {
                    for (i, node) in tree.level(n).iter().enumerate() {
                        if !q.contains(&node.ty) {
                            continue;
                        }
                        xq.checked += 1;
                        let under = tree
                            .ancestor(Atom::new(n, i), cover_level)
                            .is_some_and(|a| cover_atoms.contains(&a.index));
                        if !under {
                            xq.fail(format!(
                                "{}-node {n}.{i} outside the level-{n0} cover",
                                poset.display(node.ty)
                            ));
                        }
                    }
                }
            }
        }
    }
    out.push(xq);
    out
}
