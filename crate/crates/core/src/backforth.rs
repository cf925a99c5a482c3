//! Type-preserving isomorphisms between two skeleton rings, built by back
//! and forth.
//!
//! A [`PartialIso`] pairs the atoms of a finite subring `K` of the left ring
//! with the atoms of a finite subring `L` of the right ring. Every pair is
//! made of two `p`-supertrim elements for the same `p`. Extending by an
//! element `E` splits the pairs `E` cuts through (case 1) and pairs the part
//! of `E` outside `⋃K` with fresh elements outside `⋃L` (case 2).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::poset::Elem;
use crate::ring::{
    atoms_at, combine, count_of_type, is_disjoint, supertrim_split, supertrim_type, type_of,
    union, xq_cover, RingElement, RingError, SetOp,
};
use crate::skeleton::{Atom, BuildConfig, SkeletonTree};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackForthError {
    #[error("the two trees are built over different posets")]
    PosetMismatch,
    #[error("cannot found Q: {0}")]
    Foundation(String),
    #[error("depth exhausted at step {step} after {pairs} pairs: {detail}")]
    DepthExhausted {
        step: usize,
        pairs: usize,
        detail: String,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pair {
    pub left: RingElement,
    pub right: RingElement,
    /// The common trim type.
    #[serde(rename = "type")]
    pub ty: Elem,
}

impl Pair {
    fn get(&self, side: Side) -> &RingElement {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn oriented(side: Side, source: RingElement, target: RingElement, ty: Elem) -> Pair {
        match side {
            Side::Left => Pair {
                left: source,
                right: target,
                ty,
            },
            Side::Right => Pair {
                left: target,
                right: source,
                ty,
            },
        }
    }
}

/// An isomorphism between finite subrings, given by its atom pairs.
#[derive(Clone, Debug)]
pub struct PartialIso {
    left: Arc<SkeletonTree>,
    right: Arc<SkeletonTree>,
    pairs: Vec<Pair>,
    stage: usize,
}

/// Evidence that no pairing can absorb an element: the counterpart of a
/// pair is `p`-supertrim with `p` isolated on its side, so it holds a single
/// `p`-point, while the source side needs `demanded >= 2` disjoint
/// `p`-supertrim pieces inside the pair.
#[derive(Clone, Debug, Serialize)]
pub struct MismatchWitness {
    pub step: usize,
    /// Side of the scheduled element.
    pub side: Side,
    pub element: RingElement,
    /// The pair member on `side` that the element splits.
    pub source: RingElement,
    /// Its partner on the other side.
    pub counterpart: RingElement,
    #[serde(rename = "type")]
    pub ty: Elem,
    pub type_name: String,
    pub demanded: usize,
    /// Number of `ty`-typed atoms of the counterpart at every built level.
    pub available: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranscriptStep {
    pub step: usize,
    pub side: Side,
    pub element: RingElement,
    /// `none`, `case1`, `case2` or `case1+case2`.
    pub case: String,
    pub pairs_split: usize,
    pub pairs_added: usize,
    pub pairs_after: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub pairs: usize,
    pub bijective: bool,
    pub type_matched: bool,
    pub supertrim: bool,
    pub disjoint_left: bool,
    pub disjoint_right: bool,
    pub monotone: bool,
    pub covers_schedule: bool,
    pub passed: bool,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Outcome {
    Iso,
    Mismatch { witness: MismatchWitness },
}

#[derive(Clone, Debug, Serialize)]
pub struct Transcript {
    pub poset: String,
    pub q: Vec<String>,
    pub n0: usize,
    pub steps: Vec<TranscriptStep>,
    pub pair_table: Vec<Pair>,
    pub outcome: Outcome,
    pub report: Option<IsoReport>,
}

pub struct BackForthRun {
    pub outcome: Outcome,
    pub iso: PartialIso,
    pub transcript: Transcript,
}

enum Extend {
    Done(PartialIso, TranscriptStep),
    Mismatch(MismatchWitness),
}

/// Whether `atom` and `x` share a point.
fn overlaps(tree: &SkeletonTree, atom: Atom, x: &RingElement) -> bool {
    let lx = x.level();
    if atom.level as usize >= lx {
        tree.ancestor(atom, lx)
            .is_some_and(|a| x.atoms().binary_search(&a.index).is_ok())
    } else {
        x.atom_refs()
            .any(|a| tree.ancestor(a, atom.level as usize) == Some(atom))
    }
}

fn nested(tree: &SkeletonTree, a: Atom, b: Atom) -> bool {
    let (lo, hi) = if a.level <= b.level { (a, b) } else { (b, a) };
    tree.ancestor(hi, lo.level as usize) == Some(lo)
}

impl PartialIso {
    pub fn left(&self) -> &SkeletonTree {
        &self.left
    }

    pub fn right(&self) -> &SkeletonTree {
        &self.right
    }

    pub fn tree(&self, side: Side) -> &SkeletonTree {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// `⋃K` or `⋃L`.
    pub fn support(&self, side: Side) -> Result<RingElement, RingError> {
        let tree = self.tree(side);
        let mut acc = RingElement::zero(tree);
        for p in &self.pairs {
            acc = union(tree, &acc, p.get(side))?;
        }
        Ok(acc)
    }

    /// Machine check of the pairing: bijective, disjoint on each side,
    /// type-matched and supertrim.
    pub fn verify(&self) -> IsoReport {
        let mut failures = Vec::new();
        let mut disjoint = [true, true];
        for (k, side) in [Side::Left, Side::Right].into_iter().enumerate() {
            let tree = self.tree(side);
            for i in 0..self.pairs.len() {
                for j in i + 1..self.pairs.len() {
                    let ok = is_disjoint(tree, self.pairs[i].get(side), self.pairs[j].get(side))
                        .unwrap_or(false);
                    if !ok && disjoint[k] {
                        disjoint[k] = false;
                        failures.push(format!("{side:?} pairs {i} and {j} overlap"));
                    }
                }
            }
        }
        let mut type_matched = true;
        let mut supertrim = true;
        let mut nonzero = true;
        for (i, p) in self.pairs.iter().enumerate() {
            if p.left.is_zero() || p.right.is_zero() {
                nonzero = false;
                failures.push(format!("pair {i} has an empty member"));
            }
            if type_of(&self.left, &p.left) != type_of(&self.right, &p.right) {
                type_matched = false;
                failures.push(format!("pair {i} is not type-matched"));
            }
            if supertrim_type(&self.left, &p.left) != Some(p.ty)
                || supertrim_type(&self.right, &p.right) != Some(p.ty)
            {
                supertrim = false;
                failures.push(format!("pair {i} is not supertrim"));
            }
        }
        let bijective = nonzero && disjoint[0] && disjoint[1];
        IsoReport {
            pairs: self.pairs.len(),
            bijective,
            type_matched,
            supertrim,
            disjoint_left: disjoint[0],
            disjoint_right: disjoint[1],
            monotone: true,
            covers_schedule: true,
            passed: bijective && type_matched && supertrim,
            failures,
        }
    }

    /// Whether every pair of `earlier` is the union of the pairs of `self`
    /// it contains, on both sides.
    pub fn extends(&self, earlier: &PartialIso) -> bool {
        earlier.pairs.iter().all(|old| {
            let mut acc = [RingElement::zero(&self.left), RingElement::zero(&self.right)];
            for new in &self.pairs {
                let inside = combine(&self.left, &new.left, SetOp::Difference, &old.left)
                    .map(|d| d.is_zero())
                    .unwrap_or(false);
                if inside {
                    acc[0] = union(&self.left, &acc[0], &new.left).expect("same tree");
                    acc[1] = union(&self.right, &acc[1], &new.right).expect("same tree");
                }
            }
            acc[0] == old.left && acc[1] == old.right
        })
    }

    /// Whether `e` (on `side`) is a union of pair members.
    pub fn contains_element(&self, side: Side, e: &RingElement) -> bool {
        let tree = self.tree(side);
        let mut acc = RingElement::zero(tree);
        for p in &self.pairs {
            let m = p.get(side);
            let inside = combine(tree, m, SetOp::Difference, e).is_ok_and(|d| d.is_zero());
            let apart = is_disjoint(tree, m, e).unwrap_or(false);
            if !inside && !apart {
                return false;
            }
            if inside {
                acc = union(tree, &acc, m).expect("same tree");
            }
        }
        acc == *e
    }
}

/// The first pairing: one `p`-trim pair per `p` in the foundation
/// `F = Q ∩ P_min`, each side covering its `Q`-typed atoms from level `n₀`.
pub fn init_iso(
    left: Arc<SkeletonTree>,
    right: Arc<SkeletonTree>,
    q: &BTreeSet<Elem>,
) -> Result<(PartialIso, usize), BackForthError> {
    if left.poset().fingerprint() != right.poset().fingerprint() {
        return Err(BackForthError::PosetMismatch);
    }
    let mut iso = PartialIso {
        left,
        right,
        pairs: Vec::new(),
        stage: 0,
    };
    if q.is_empty() {
        return Ok((iso, 0));
    }
    let (n0, cover_l) = xq_cover(&iso.left, q).map_err(BackForthError::Foundation)?;
    let (_, cover_r) = xq_cover(&iso.right, q).map_err(BackForthError::Foundation)?;
    let split_l = crate::ring::trim_split(&iso.left, &cover_l)?;
    let split_r = crate::ring::trim_split(&iso.right, &cover_r)?;
    let by_type: BTreeMap<Elem, RingElement> = split_r.into_iter().collect();
    for (p, b) in split_l {
        let d = by_type.get(&p).ok_or_else(|| {
            BackForthError::Foundation(format!(
                "no {}-trim part on the right",
                iso.left.poset().display(p)
            ))
        })?;
        iso.pairs.push(Pair {
            left: b,
            right: d.clone(),
            ty: p,
        });
    }
    Ok((iso, n0))
}

/// Splits `x` (on `tree`) by `e` into supertrim pieces grouped by type.
fn split_by(
    tree: &SkeletonTree,
    x: &RingElement,
    e: &RingElement,
) -> Result<BTreeMap<Elem, Vec<RingElement>>, RingError> {
    let mut out: BTreeMap<Elem, Vec<RingElement>> = BTreeMap::new();
    for part in [
        combine(tree, x, SetOp::Intersect, e)?,
        combine(tree, x, SetOp::Difference, e)?,
    ] {
        if part.is_zero() {
            continue;
        }
        for (p, piece) in supertrim_split(tree, &part)? {
            out.entry(p).or_default().push(piece);
        }
    }
    Ok(out)
}

/// Number of `p`-typed atoms of `c` at each level from its own to the
/// tree's depth.
fn counts_by_level(tree: &SkeletonTree, c: &RingElement, p: Elem) -> Vec<usize> {
    (c.level()..=tree.depth())
        .map(|d| {
            atoms_at(tree, c, d)
                .map(|atoms| atoms.iter().filter(|&&a| tree.level(d)[a as usize].ty == p).count())
                .unwrap_or(0)
        })
        .collect()
}

/// Extends `iso` so that `e` (an element of the `side` ring) lies in the
/// subring on that side.
pub fn extend_iso(
    iso: &PartialIso,
    e: &RingElement,
    side: Side,
    step: usize,
) -> Result<Result<(PartialIso, TranscriptStep), MismatchWitness>, BackForthError> {
    match extend(iso, e, side, step)? {
        Extend::Done(next, t) => Ok(Ok((next, t))),
        Extend::Mismatch(w) => Ok(Err(w)),
    }
}

fn exhausted(step: usize, iso: &PartialIso, detail: String) -> BackForthError {
    BackForthError::DepthExhausted {
        step,
        pairs: iso.pairs.len(),
        detail,
    }
}

fn extend(iso: &PartialIso, e: &RingElement, side: Side, step: usize) -> Result<Extend, BackForthError> {
    let src = iso.tree(side);
    let dst = iso.tree(side.other());
    let poset = src.poset();
    let dst_cfg = dst.config();
    let mut next: Vec<Pair> = Vec::new();
    let mut split = 0;

    // Case 1: refine every pair that e cuts.
    for pair in &iso.pairs {
        let b = pair.get(side);
        let c = pair.get(side.other());
        let inside = combine(src, b, SetOp::Intersect, e)?;
        if inside.is_zero() || inside == *b {
            next.push(pair.clone());
            continue;
        }
        split += 1;
        let pieces = split_by(src, b, e)?;
        let p0 = pair.ty;
        let m0 = pieces.get(&p0).map_or(0, Vec::len);
        if dst_cfg.is_isolated(p0) && m0 >= 2 {
            let counts = counts_by_level(dst, c, p0);
            return Ok(Extend::Mismatch(MismatchWitness {
                step,
                side,
                element: e.clone(),
                source: b.clone(),
                counterpart: c.clone(),
                ty: p0,
                type_name: poset.display(p0),
                demanded: m0,
                available: counts.into_iter().max().unwrap_or(0),
            }));
        }
        // Lowest level of c with enough atoms of every required type.
        let mut chosen = None;
        for d in c.level()..=dst.depth() {
            let atoms = atoms_at(dst, c, d)?;
            let enough = pieces.iter().all(|(&q, list)| {
                atoms.iter().filter(|&&a| dst.level(d)[a as usize].ty == q).count() >= list.len()
            });
            if enough {
                chosen = Some((d, atoms));
                break;
            }
        }
        let Some((d, atoms)) = chosen else {
            return Err(exhausted(
                step,
                iso,
                format!("counterpart of a {}-pair lacks room for the split", poset.display(p0)),
            ));
        };
        // Every piece gets one atom of its own type, then the remaining
        // atoms go where the source piece has atoms of that type, so the
        // counterparts keep the shape of their sources.
        let ls = b.level().max(e.level());
        let flat: Vec<(Elem, &RingElement)> = pieces
            .iter()
            .flat_map(|(&q, list)| list.iter().map(move |x| (q, x)))
            .collect();
        let mut want: Vec<BTreeMap<Elem, usize>> = Vec::with_capacity(flat.len());
        for (_, x) in &flat {
            let mut m = BTreeMap::new();
            for a in atoms_at(src, x, ls)? {
                *m.entry(src.level(ls)[a as usize].ty).or_insert(0) += 1;
            }
            want.push(m);
        }
        let ty_at = |a: u32| dst.level(d)[a as usize].ty;
        let mut target: Vec<Vec<u32>> = vec![Vec::new(); flat.len()];
        let mut free: Vec<u32> = atoms.clone();
        for (k, &(q, _)) in flat.iter().enumerate() {
            let at = free.iter().position(|&a| ty_at(a) == q).expect("counted above");
            target[k].push(free.remove(at));
            if let Some(w) = want[k].get_mut(&q) {
                *w = w.saturating_sub(1);
            }
        }
        let mut rest = Vec::new();
        for a in free {
            let t = ty_at(a);
            let home = (0..flat.len())
                .find(|&k| poset.leq(flat[k].0, t) && want[k].get(&t).is_some_and(|&w| w > 0));
            match home {
                Some(k) => {
                    *want[k].get_mut(&t).expect("present") -= 1;
                    target[k].push(a);
                }
                None => rest.push(a),
            }
        }
        let main = flat.iter().position(|&(q, _)| q == p0).expect("p0 piece exists");
        target[main].extend(rest);
        for (k, (q, piece)) in flat.into_iter().enumerate() {
            let t = RingElement::new(dst, d, std::mem::take(&mut target[k]))?;
            next.push(Pair::oriented(side, piece.clone(), t, q));
        }
    }

    // Case 2: the part of e outside the current subring.
    let mut outside = e.clone();
    for pair in &iso.pairs {
        outside = combine(src, &outside, SetOp::Difference, pair.get(side))?;
    }
    let mut added = 0;
    if !outside.is_zero() {
        let taken: Vec<RingElement> = next.iter().map(|p| p.get(side.other()).clone()).collect();
        let mut fresh: Vec<Atom> = Vec::new();
        for (p, piece) in supertrim_split(src, &outside)? {
            let mut found = None;
            'search: for d in 1..=dst.depth() {
                for (i, node) in dst.level(d).iter().enumerate() {
                    if node.ty != p {
                        continue;
                    }
                    let a = Atom::new(d, i);
                    if taken.iter().any(|t| overlaps(dst, a, t))
                        || fresh.iter().any(|&f| nested(dst, a, f))
                    {
                        continue;
                    }
                    found = Some(a);
                    break 'search;
                }
            }
            let Some(a) = found else {
                return Err(exhausted(
                    step,
                    iso,
                    format!("no free {}-supertrim counterpart", poset.display(p)),
                ));
            };
            fresh.push(a);
            next.push(Pair::oriented(side, piece, RingElement::atom(dst, a)?, p));
            added += 1;
        }
    }

    let case = match (split > 0, added > 0) {
        (false, false) => "none",
        (true, false) => "case1",
        (false, true) => "case2",
        (true, true) => "case1+case2",
    };
    let out = PartialIso {
        left: iso.left.clone(),
        right: iso.right.clone(),
        pairs: next,
        stage: iso.stage + 1,
    };
    let t = TranscriptStep {
        step,
        side,
        element: e.clone(),
        case: case.to_string(),
        pairs_split: split,
        pairs_added: added,
        pairs_after: out.pairs.len(),
    };
    Ok(Extend::Done(out, t))
}

/// Every atom of levels `1..=bound` of both trees, each side shuffled by
/// `seed`, interleaved left, right, left, ...
pub fn default_schedule(
    left: &SkeletonTree,
    right: &SkeletonTree,
    bound: usize,
    seed: u64,
) -> Vec<(Side, RingElement)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sides: Vec<Vec<(Side, RingElement)>> = Vec::new();
    for (side, tree) in [(Side::Left, left), (Side::Right, right)] {
        let mut v: Vec<(Side, RingElement)> = (1..=bound.min(tree.depth()))
            .flat_map(|n| {
                (0..tree.level_len(n)).map(move |i| {
                    (side, RingElement::atom(tree, Atom::new(n, i)).expect("atom exists"))
                })
            })
            .collect();
        v.shuffle(&mut rng);
        sides.push(v);
    }
    let right = sides.pop().expect("two sides");
    let left = sides.pop().expect("two sides");
    let mut out = Vec::with_capacity(left.len() + right.len());
    let mut li = left.into_iter();
    let mut ri = right.into_iter();
    loop {
        match (li.next(), ri.next()) {
            (None, None) => break,
            (l, r) => out.extend(l.into_iter().chain(r)),
        }
    }
    out
}

/// Starts from [`init_iso`] and applies [`extend_iso`] along `schedule`.
/// Each step is checked to extend the previous pairing; the final pairing
/// is verified and must contain every scheduled element.
pub fn run_backforth(
    left: Arc<SkeletonTree>,
    right: Arc<SkeletonTree>,
    q: &BTreeSet<Elem>,
    schedule: &[(Side, RingElement)],
) -> Result<BackForthRun, BackForthError> {
    let (mut iso, n0) = init_iso(left, right, q)?;
    let anchor = iso.left.clone();
    let poset = anchor.poset();
    let mut steps = Vec::new();
    let mut monotone = true;
    for (k, (side, e)) in schedule.iter().enumerate() {
        match extend(&iso, e, *side, k + 1)? {
            Extend::Done(next, t) => {
                if !next.extends(&iso) {
                    monotone = false;
                }
                steps.push(t);
                iso = next;
            }
            Extend::Mismatch(w) => {
                let outcome = Outcome::Mismatch { witness: w };
                let transcript = Transcript {
                    poset: poset.name().to_string(),
                    q: poset.display_set(q),
                    n0,
                    steps,
                    pair_table: iso.pairs.clone(),
                    outcome: outcome.clone(),
                    report: None,
                };
                return Ok(BackForthRun {
                    outcome,
                    iso,
                    transcript,
                });
            }
        }
    }
    let mut report = iso.verify();
    report.monotone = monotone;
    report.covers_schedule = schedule
        .iter()
        .all(|(side, e)| iso.contains_element(*side, e));
    if !report.monotone {
        report.failures.push("a step retracted an earlier pair".into());
    }
    if !report.covers_schedule {
        report.failures.push("a scheduled element is not in the subring".into());
    }
    report.passed &= report.monotone && report.covers_schedule;
    let transcript = Transcript {
        poset: poset.name().to_string(),
        q: poset.display_set(q),
        n0,
        steps,
        pair_table: iso.pairs.clone(),
        outcome: Outcome::Iso,
        report: Some(report),
    };
    Ok(BackForthRun {
        outcome: Outcome::Iso,
        iso,
        transcript,
    })
}

/// Re-derives a mismatch from scratch: the source pair member really splits
/// into `demanded` supertrim pieces of type `ty`, while the counterpart is
/// `ty`-trim with `ty` isolated on its side and holds fewer `ty`-atoms than
/// demanded at every built level, so no split of it can match.
pub fn verify_mismatch(left: &SkeletonTree, right: &SkeletonTree, w: &MismatchWitness) -> bool {
    let (src, dst) = match w.side {
        Side::Left => (left, right),
        Side::Right => (right, left),
    };
    let Ok(pieces) = split_by(src, &w.source, &w.element) else {
        return false;
    };
    let demanded = pieces.get(&w.ty).map_or(0, Vec::len);
    let counts = counts_by_level(dst, &w.counterpart, w.ty);
    demanded == w.demanded
        && demanded >= 2
        && dst.config().is_isolated(w.ty)
        && type_of(dst, &w.counterpart).is_trim() == Some(w.ty)
        && counts.iter().all(|&c| c < demanded)
        && count_of_type(dst, &w.counterpart, w.ty) == 1
}

/// Runs back and forth between `tree` and a copy whose types are read
/// through `θ⁻¹`, giving pairs `(A, Aα)` with `T(Aα) = T(A)θ`.
///
/// `theta[i]` is the image of `Elem(i)`; the poset must be finite.
pub fn lift_poset_automorphism(
    tree: Arc<SkeletonTree>,
    theta: &[Elem],
    q: &BTreeSet<Elem>,
    bound: usize,
    seed: u64,
) -> Result<BackForthRun, BackForthError> {
    let poset = tree.poset();
    let n = poset
        .size()
        .ok_or_else(|| BackForthError::Precondition("automorphisms need a finite poset".into()))?;
    if theta.len() != n {
        return Err(BackForthError::Precondition(format!(
            "θ has {} images for {n} elements",
            theta.len()
        )));
    }
    let image: BTreeSet<Elem> = theta.iter().copied().collect();
    if image.len() != n || theta.iter().any(|e| e.0 >= n) {
        return Err(BackForthError::Precondition("θ is not a bijection".into()));
    }
    for a in 0..n {
        for b in 0..n {
            if poset.leq(Elem(a), Elem(b)) != poset.leq(theta[a], theta[b]) {
                return Err(BackForthError::Precondition(format!(
                    "θ does not preserve {} <= {}",
                    poset.display(Elem(a)),
                    poset.display(Elem(b))
                )));
            }
        }
    }
    let cfg = tree.config();
    let q_image: BTreeSet<Elem> = q.iter().map(|e| theta[e.0]).collect();
    if &q_image != q {
        return Err(BackForthError::Precondition("Qθ ≠ Q".into()));
    }
    let i_image: BTreeSet<Elem> = cfg.isolated.iter().map(|e| theta[e.0]).collect();
    if i_image != cfg.isolated {
        return Err(BackForthError::Precondition("Iθ ≠ I".into()));
    }
    if (0..n).any(|i| cfg.part(Elem(i)) != cfg.part(theta[i])) {
        return Err(BackForthError::Precondition("θ moves the split".into()));
    }
    let mut inverse = vec![Elem(0); n];
    for (i, &t) in theta.iter().enumerate() {
        inverse[t.0] = Elem(i);
    }
    let cfg: BuildConfig = cfg.clone();
    let twisted = Arc::new(tree.relabeled(|t| inverse[t.0], cfg));
    let schedule = default_schedule(&tree, &twisted, bound, seed);
    run_backforth(tree, twisted, q, &schedule)
}
