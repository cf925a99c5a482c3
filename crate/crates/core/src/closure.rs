//! Closure algebras generated by one open set, computed on index sets.
//!
//! A space is described by the index poset of a complete trim partition:
//! a set of atoms is closed exactly when its index set is a lower set, so
//! closure is down-closure. Over the Rieger-Nishimura ladder `P(∞)` (and
//! `P(∞)` with a bottom `⊥`) every element of the algebra is finite or
//! cofinite, and both shapes are stored exactly.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::poset::{Elem, Family, Poset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error("{0} is infinite and not a Rieger-Nishimura family")]
    UnsupportedSpace(String),
    #[error("generator {0} is not open")]
    NotOpen(String),
    #[error("trace to n = {max_n} is too short to separate the cases")]
    Inconclusive { max_n: usize },
    #[error("{0} is not P(m,0), P(m,2), P(∞) or P(∞) with ⊥")]
    NotLadder(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Finite,
    RnInfinity,
    RnInfinityBot,
}

/// The index poset of a complete trim partition, with a horizon used for
/// exhaustive checks on the infinite ladders.
#[derive(Clone, Debug)]
pub struct SymbolicSpace {
    poset: Arc<Poset>,
    kind: SpaceKind,
    size: usize,
    horizon: usize,
}

/// A finite set of indices, or the complement of one. Over a finite space
/// only `Finite` occurs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureElement {
    Finite(BTreeSet<usize>),
    Cofinite(BTreeSet<usize>),
}

impl ClosureElement {
    pub fn empty() -> Self {
        ClosureElement::Finite(BTreeSet::new())
    }

    pub fn singleton(i: usize) -> Self {
        ClosureElement::Finite([i].into())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ClosureElement::Finite(s) if s.is_empty())
    }

    pub fn contains(&self, i: usize) -> bool {
        match self {
            ClosureElement::Finite(s) => s.contains(&i),
            ClosureElement::Cofinite(c) => !c.contains(&i),
        }
    }

    /// Members with index below `h`.
    pub fn restrict(&self, h: usize) -> BTreeSet<usize> {
        (0..h).filter(|&i| self.contains(i)).collect()
    }
}

impl SymbolicSpace {
    pub fn new(poset: Arc<Poset>, horizon: usize) -> Result<Self, ClosureError> {
        let (kind, size) = match (poset.size(), poset.family()) {
            (Some(n), _) => (SpaceKind::Finite, n),
            (None, Some(Family::RnInfinity)) => (SpaceKind::RnInfinity, usize::MAX),
            (None, Some(Family::RnInfinityBot)) => (SpaceKind::RnInfinityBot, usize::MAX),
            _ => return Err(ClosureError::UnsupportedSpace(poset.name().to_string())),
        };
        Ok(SymbolicSpace {
            poset,
            kind,
            size,
            horizon,
        })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn is_finite(&self) -> bool {
        self.kind == SpaceKind::Finite
    }

    /// All indices for a finite space, the first `horizon` otherwise.
    pub fn horizon(&self) -> usize {
        if self.is_finite() {
            self.size
        } else {
            self.horizon
        }
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        self.poset.leq(Elem(a), Elem(b))
    }

    pub fn whole(&self) -> ClosureElement {
        if self.is_finite() {
            ClosureElement::Finite((0..self.size).collect())
        } else {
            ClosureElement::Cofinite(BTreeSet::new())
        }
    }

    pub fn complement(&self, x: &ClosureElement) -> ClosureElement {
        match x {
            ClosureElement::Finite(s) if self.is_finite() => {
                ClosureElement::Finite((0..self.size).filter(|i| !s.contains(i)).collect())
            }
            ClosureElement::Finite(s) => ClosureElement::Cofinite(s.clone()),
            ClosureElement::Cofinite(c) => ClosureElement::Finite(c.clone()),
        }
    }

    pub fn union(&self, x: &ClosureElement, y: &ClosureElement) -> ClosureElement {
        use ClosureElement::*;
        match (x, y) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => Cofinite(c - f),
        }
    }

    pub fn intersect(&self, x: &ClosureElement, y: &ClosureElement) -> ClosureElement {
        use ClosureElement::*;
        match (x, y) {
            (Finite(a), Finite(b)) => Finite(a & b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a | b),
            (Finite(f), Cofinite(c)) | (Cofinite(c), Finite(f)) => Finite(f - c),
        }
    }

    pub fn difference(&self, x: &ClosureElement, y: &ClosureElement) -> ClosureElement {
        self.intersect(x, &self.complement(y))
    }

    pub fn is_subset(&self, x: &ClosureElement, y: &ClosureElement) -> bool {
        self.difference(x, y).is_empty()
    }

    /// Down-closure of the index set.
    pub fn closure_of(&self, x: &ClosureElement) -> ClosureElement {
        match x {
            ClosureElement::Finite(s) if s.is_empty() => x.clone(),
            ClosureElement::Finite(s) if self.is_finite() => ClosureElement::Finite(
                (0..self.size)
                    .filter(|&i| s.iter().any(|&j| self.leq(i, j)))
                    .collect(),
            ),
            ClosureElement::Finite(s) => {
                let bot = self.kind == SpaceKind::RnInfinityBot;
                let Some(&lowest) = s.iter().find(|&&i| !(bot && i == 0)) else {
                    // Only ⊥.
                    return x.clone();
                };
                // Every p_j with j >= k + 2 lies below p_k.
                let tail = lowest + 2;
                ClosureElement::Cofinite(
                    (0..tail)
                        .filter(|&i| !s.iter().any(|&j| self.leq(i, j)))
                        .collect(),
                )
            }
            ClosureElement::Cofinite(c) => {
                // Elements above a member of the ladder have smaller index,
                // and ⊥ is below everything, so witnesses outside `c` can be
                // sought up to one past its largest member.
                let top = c.iter().next_back().map_or(0, |m| m + 2);
                ClosureElement::Cofinite(
                    c.iter()
                        .copied()
                        .filter(|&i| !(0..top).any(|d| !c.contains(&d) && self.leq(i, d)))
                        .collect(),
                )
            }
        }
    }

    pub fn is_closed(&self, x: &ClosureElement) -> bool {
        &self.closure_of(x) == x
    }

    pub fn is_open(&self, x: &ClosureElement) -> bool {
        self.is_closed(&self.complement(x))
    }

    /// Index of `p_k`.
    pub fn p(&self, k: usize) -> Option<usize> {
        match self.kind {
            SpaceKind::RnInfinity => Some(k),
            SpaceKind::RnInfinityBot => Some(k + 1),
            SpaceKind::Finite => {
                let name = format!("p{k}");
                (0..self.size).find(|&i| self.poset.display(Elem(i)) == name)
            }
        }
    }

    pub fn bottom(&self) -> Option<usize> {
        (self.kind == SpaceKind::RnInfinityBot).then_some(0)
    }

    pub fn display(&self, x: &ClosureElement) -> String {
        let names = |s: &BTreeSet<usize>| {
            s.iter()
                .map(|&i| self.poset.display(Elem(i)))
                .collect::<Vec<_>>()
                .join(",")
        };
        match x {
            ClosureElement::Finite(s) if s.is_empty() => "∅".to_string(),
            ClosureElement::Finite(s) => format!("{{{}}}", names(s)),
            ClosureElement::Cofinite(c) if c.is_empty() => "W".to_string(),
            ClosureElement::Cofinite(c) => format!("W−{{{}}}", names(c)),
        }
    }

    /// Every element over the first `h` indices: all subsets and, on the
    /// infinite ladders, their complements.
    pub fn enumerate(&self, h: usize) -> Vec<ClosureElement> {
        let h = h.min(self.horizon()).min(16);
        let mut out = Vec::new();
        for mask in 0u32..(1 << h) {
            let s: BTreeSet<usize> = (0..h).filter(|i| mask >> i & 1 == 1).collect();
            if !self.is_finite() {
                out.push(ClosureElement::Cofinite(s.clone()));
            }
            out.push(ClosureElement::Finite(s));
        }
        out
    }
}

/// The four closure-algebra axioms over `space.enumerate(h)`; returns the
/// first failure.
pub fn check_closure_axioms(space: &SymbolicSpace, h: usize) -> Result<usize, String> {
    let all = space.enumerate(h);
    if !space.closure_of(&ClosureElement::empty()).is_empty() {
        return Err("closure of ∅ is not ∅".into());
    }
    for x in &all {
        let c = space.closure_of(x);
        if !space.is_subset(x, &c) {
            return Err(format!("{} ⊄ its closure", space.display(x)));
        }
        if space.closure_of(&c) != c {
            return Err(format!("closure of {} is not idempotent", space.display(x)));
        }
    }
    let mut checked = 0;
    for x in &all {
        let cx = space.closure_of(x);
        for y in &all {
            let lhs = space.closure_of(&space.union(x, y));
            let rhs = space.union(&cx, &space.closure_of(y));
            if lhs != rhs {
                return Err(format!(
                    "closure of {} ∪ {} is not additive",
                    space.display(x),
                    space.display(y)
                ));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

#[derive(Clone, Debug, Serialize)]
pub struct RnStep {
    pub n: usize,
    pub u: ClosureElement,
    pub v: ClosureElement,
    pub b: ClosureElement,
}

#[derive(Clone, Debug, Serialize)]
pub struct RnTrace {
    pub space: String,
    pub generator: ClosureElement,
    pub steps: Vec<RnStep>,
    /// Least `n` with `B_{n+1} = ∅`, if reached.
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// `W − ⋃ B_k`, restricted to the first `max_n + 1` indices.
    pub a_inf: ClosureElement,
    /// Whether the space is finite, so that `N` must eventually appear.
    pub finite: bool,
}

impl RnTrace {
    pub fn max_n(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn b(&self, k: usize) -> &ClosureElement {
        &self.steps[k].b
    }
}

/// Runs `U_n = W − cl(B_{n−1})`, `V_n = U_{n−1} ∪ V_{n−1}`,
/// `B_n = U_n − V_{n−1}` from `V_{−1} = V_0 = ∅`, `U_0 = B_0 = A`.
pub fn rieger_nishimura_run(
    space: &SymbolicSpace,
    a: &ClosureElement,
    max_n: usize,
) -> Result<RnTrace, ClosureError> {
    if !space.is_open(a) {
        return Err(ClosureError::NotOpen(space.display(a)));
    }
    let w = space.whole();
    let mut steps = vec![RnStep {
        n: 0,
        u: a.clone(),
        v: ClosureElement::empty(),
        b: a.clone(),
    }];
    for n in 1..=max_n {
        let prev = &steps[n - 1];
        let u = space.difference(&w, &space.closure_of(&prev.b));
        let v = space.union(&prev.u, &prev.v);
        let b = space.difference(&u, &prev.v);
        steps.push(RnStep { n, u, v, b });
    }
    let n = (0..max_n).find(|&k| steps[k + 1].b.is_empty());
    let mut covered = ClosureElement::empty();
    for s in &steps {
        covered = space.union(&covered, &s.b);
    }
    let rest = space.difference(&w, &covered);
    let a_inf = if space.is_finite() {
        rest
    } else {
        ClosureElement::Finite(rest.restrict(max_n + 1))
    };
    Ok(RnTrace {
        space: space.poset().name().to_string(),
        generator: a.clone(),
        steps,
        n,
        a_inf,
        finite: space.is_finite(),
    })
}

/// `{p0}` on a Rieger-Nishimura space.
pub fn standard_generator(space: &SymbolicSpace) -> Result<ClosureElement, ClosureError> {
    space
        .p(0)
        .map(ClosureElement::singleton)
        .ok_or_else(|| ClosureError::NotLadder(space.poset().name().to_string()))
}

/// Named failures of the recursion identities, the disjointness of the
/// `B_n`, the ladder order between them and the position of `A_∞`.
pub fn check_trace(space: &SymbolicSpace, trace: &RnTrace) -> Vec<String> {
    let mut bad = Vec::new();
    let w = space.whole();
    let steps = &trace.steps;
    let last = trace.max_n();
    for n in 0..last {
        let v_prev = if n == 0 {
            ClosureElement::empty()
        } else {
            steps[n - 1].v.clone()
        };
        let (s, next) = (&steps[n], &steps[n + 1]);
        if space.intersect(&next.u, &s.u) != v_prev {
            bad.push(format!("V_{{n−1}} = U_{{n+1}} ∩ U_n fails at n={n}"));
        }
        if space.intersect(&next.u, &next.v) != s.v {
            bad.push(format!("V_n = U_{{n+1}} ∩ V_{{n+1}} fails at n={n}"));
        }
        if space.difference(&next.v, &s.v) != s.b {
            bad.push(format!("B_n = V_{{n+1}} − V_n fails at n={n}"));
        }
        if space.closure_of(&s.b) != space.difference(&w, &next.u) {
            bad.push(format!("cl(B_n) = W − U_{{n+1}} fails at n={n}"));
        }
    }
    for j in 0..=last {
        for k in 0..=last {
            if j == k || steps[j].b.is_empty() || steps[k].b.is_empty() {
                continue;
            }
            if j < k && !space.intersect(&steps[j].b, &steps[k].b).is_empty() {
                bad.push(format!("B_{j} and B_{k} overlap"));
            }
            let below = space.is_subset(&steps[k].b, &space.closure_of(&steps[j].b));
            if below != (k >= j + 2) {
                bad.push(format!("B_{k} ⊆ cl(B_{j}) is {below}"));
            }
        }
    }
    if !space.is_finite() {
        let h = last + 1;
        let closed = space.closure_of(&trace.a_inf).restrict(h);
        if closed != trace.a_inf.restrict(h) {
            bad.push("A_∞ is not closed".into());
        }
    } else if !space.is_closed(&trace.a_inf) {
        bad.push("A_∞ is not closed".into());
    }
    for s in steps {
        if !space.intersect(&s.b, &trace.a_inf).is_empty() {
            bad.push(format!("A_∞ meets B_{}", s.n));
        }
    }
    bad
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum AlgebraClass {
    /// Case 1.
    Finite { m: usize },
    /// Case 2.
    FiniteWithTail { m: usize },
    /// Case 3.
    Infinity,
    /// Case 4.
    InfinityWithBottom,
}

impl AlgebraClass {
    pub fn case(&self) -> u8 {
        match self {
            AlgebraClass::Finite { .. } => 1,
            AlgebraClass::FiniteWithTail { .. } => 2,
            AlgebraClass::Infinity => 3,
            AlgebraClass::InfinityWithBottom => 4,
        }
    }
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraClass::Finite { m } => write!(f, "P({m},0)"),
            AlgebraClass::FiniteWithTail { m } => write!(f, "P({m},2)"),
            AlgebraClass::Infinity => write!(f, "P(∞)"),
            AlgebraClass::InfinityWithBottom => write!(f, "P(∞) with ⊥"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub class: AlgebraClass,
    pub case: u8,
    pub label: String,
    /// `(k, B_k)` for the nonzero atoms; `B_k ↦ p_k` is the isomorphism.
    pub atoms: Vec<(usize, ClosureElement)>,
}

/// Reads off the case. With `N` not reached the trace is taken to be one of
/// the infinite cases as far as `max_n` shows.
pub fn classify_algebra(trace: &RnTrace) -> Result<Classification, ClosureError> {
    let class = match trace.n {
        Some(n) if n + 2 > trace.max_n() => {
            return Err(ClosureError::Inconclusive {
                max_n: trace.max_n(),
            })
        }
        None if trace.finite => {
            return Err(ClosureError::Inconclusive {
                max_n: trace.max_n(),
            })
        }
        Some(n) if trace.b(n + 2).is_empty() => AlgebraClass::Finite { m: n },
        Some(n) => AlgebraClass::FiniteWithTail { m: n },
        None if trace.a_inf.is_empty() => AlgebraClass::Infinity,
        None => AlgebraClass::InfinityWithBottom,
    };
    let atoms = trace
        .steps
        .iter()
        .filter(|s| !s.b.is_empty())
        .map(|s| (s.n, s.b.clone()))
        .collect();
    Ok(Classification {
        case: class.case(),
        label: class.to_string(),
        class,
        atoms,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorStep {
    pub k: usize,
    pub singleton: ClosureElement,
    pub derived: ClosureElement,
    pub holds: bool,
    /// Whether `P − ↑p_k − ↓p_k` is already `{p_{k+1}}` without removing
    /// the earlier singleton `{p_{k−1}}`.
    pub literal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EAlgebra {
    pub poset: String,
    pub horizon: usize,
    pub steps: Vec<GeneratorStep>,
    pub generated: bool,
}

/// `E(P)` for a Rieger-Nishimura poset, certified as generated by `{p0}`.
///
/// Singletons are derived one at a time from closure and Boolean operations
/// on those already derived: `{p_{k+1}} = P − ↑p_k − ↓p_k − {p_{k−1}}`,
/// where `↑p_k = {p_k} ∪ ⋃_{j≤k−2} {p_j}` and `↓p_k = cl({p_k})`. On
/// `P(m,2)` the last one is `{p_{m+2}} = cl({p_m}) − {p_m}`.
pub fn e_of_p(space: &SymbolicSpace) -> Result<EAlgebra, ClosureError> {
    let not_ladder = || ClosureError::NotLadder(space.poset().name().to_string());
    if space.bottom().is_some() {
        return Err(not_ladder());
    }
    let w = space.whole();
    let mut derived: Vec<ClosureElement> = vec![ClosureElement::singleton(space.p(0).ok_or_else(not_ladder)?)];
    let limit = if space.is_finite() {
        space.horizon()
    } else {
        space.horizon().saturating_sub(1)
    };
    let mut steps = Vec::new();
    for k in 0..limit {
        let sk = derived[k].clone();
        let mut up = sk.clone();
        for s in derived.iter().take(k.saturating_sub(1)) {
            up = space.union(&up, s);
        }
        let down = space.closure_of(&sk);
        let literal_rhs = space.difference(&space.difference(&w, &up), &down);
        let (target, rhs) = match space.p(k + 1) {
            Some(i) => {
                let mut rhs = literal_rhs.clone();
                if k >= 1 {
                    rhs = space.difference(&rhs, &derived[k - 1]);
                }
                (i, rhs)
            }
            None => match space.p(k + 2) {
                // The tail of P(m,2).
                Some(i) => (i, space.difference(&down, &sk)),
                None => break,
            },
        };
        let singleton = ClosureElement::singleton(target);
        steps.push(GeneratorStep {
            k,
            holds: rhs == singleton,
            literal: literal_rhs == singleton,
            singleton: singleton.clone(),
            derived: rhs.clone(),
        });
        if space.p(k + 1).is_none() {
            break;
        }
        derived.push(rhs);
    }
    if space.is_finite() {
        let mut covered = ClosureElement::empty();
        for s in &steps {
            covered = space.union(&covered, &s.singleton);
        }
        covered = space.union(&covered, &derived[0]);
        if covered != w {
            return Err(not_ladder());
        }
    }
    let generated = steps.iter().all(|s| s.holds);
    Ok(EAlgebra {
        poset: space.poset().name().to_string(),
        horizon: space.horizon(),
        steps,
        generated,
    })
}

/// One line per `n`: `n  U_n  V_n  B_n`.
pub fn render_ladder(space: &SymbolicSpace, trace: &RnTrace) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "space {}  A = {}", trace.space, space.display(&trace.generator));
    let _ = writeln!(out, "{:>3}  {:<20} {:<20} B_n", "n", "U_n", "V_n");
    for s in &trace.steps {
        let _ = writeln!(
            out,
            "{:>3}  {:<20} {:<20} {}",
            s.n,
            space.display(&s.u),
            space.display(&s.v),
            space.display(&s.b)
        );
    }
    let n = trace.n.map_or("∞".to_string(), |n| n.to_string());
    let _ = writeln!(out, "N = {n}  A_∞ = {}", space.display(&trace.a_inf));
    out
}

/// The open sets of the trace as a lattice: `V_{n−1} ≤ U_n`,
/// `V_{n−1} ≤ U_{n+1}`, `U_n ≤ V_{n+1}`, `V_n ≤ V_{n+1}`.
pub fn ladder_dot(space: &SymbolicSpace, trace: &RnTrace) -> String {
    let mut out = String::from("digraph rn {\n  rankdir=BT;\n  node [shape=box];\n");
    for s in &trace.steps {
        let _ = writeln!(out, "  u{} [label=\"U{} = {}\"];", s.n, s.n, space.display(&s.u));
        let _ = writeln!(out, "  v{} [label=\"V{} = {}\"];", s.n, s.n, space.display(&s.v));
    }
    let last = trace.max_n();
    for n in 0..last {
        let _ = writeln!(out, "  u{n} -> v{};", n + 1);
        let _ = writeln!(out, "  v{n} -> v{};", n + 1);
        let _ = writeln!(out, "  v{n} -> u{};", n + 1);
        if n + 2 <= last {
            let _ = writeln!(out, "  v{n} -> u{};", n + 2);
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space(tag: &str, h: usize) -> SymbolicSpace {
        SymbolicSpace::new(Arc::new(Poset::builtin(tag).unwrap()), h).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn closure_examples() {
        let s = space("rn-infinity", 12);
        let c = s.closure_of(&ClosureElement::singleton(0));
        assert_eq!(c, ClosureElement::Cofinite(set(&[1])));
        assert!(s.closure_of(&ClosureElement::empty()).is_empty());

        let f = space("rn(2,0)", 0);
        assert_eq!(
            f.closure_of(&ClosureElement::singleton(0)),
            ClosureElement::Finite(set(&[0, 2]))
        );

        let b = space("rn-infinity-bot", 12);
        assert_eq!(
            b.closure_of(&ClosureElement::singleton(0)),
            ClosureElement::singleton(0)
        );
        // cl({p0}) = {⊥, p0, p2, p3, ...}
        assert_eq!(
            b.closure_of(&ClosureElement::singleton(1)),
            ClosureElement::Cofinite(set(&[2]))
        );
        // The complement of {p0} is closed.
        assert!(s.is_open(&ClosureElement::singleton(0)));
        assert!(!s.is_open(&ClosureElement::singleton(2)));
    }

    #[test]
    fn axioms_hold_on_every_space() {
        for tag in ["rn-infinity", "rn-infinity-bot", "rn(3,0)", "rn(2,2)", "diamond", "vee"] {
            let s = space(tag, 7);
            assert!(check_closure_axioms(&s, 7).is_ok(), "{tag}");
        }
    }

    #[test]
    fn traces_and_cases() {
        let s = space("rn-infinity", 31);
        let t = rieger_nishimura_run(&s, &standard_generator(&s).unwrap(), 30).unwrap();
        assert_eq!(t.steps[1].u, ClosureElement::singleton(1));
        assert_eq!(t.steps[2].u, ClosureElement::Finite(set(&[0, 2])));
        assert!((0..=30).all(|k| t.b(k) == &ClosureElement::singleton(k)));
        assert!(check_trace(&s, &t).is_empty(), "{:?}", check_trace(&s, &t));
        assert_eq!(classify_algebra(&t).unwrap().class, AlgebraClass::Infinity);

        let b = space("rn-infinity-bot", 31);
        let t = rieger_nishimura_run(&b, &standard_generator(&b).unwrap(), 30).unwrap();
        assert!((0..=30).all(|k| t.b(k) == &ClosureElement::singleton(k + 1)));
        assert_eq!(t.a_inf, ClosureElement::singleton(0));
        assert!(check_trace(&b, &t).is_empty());
        assert_eq!(classify_algebra(&t).unwrap().case, 4);

        let f = space("rn(2,0)", 0);
        let t = rieger_nishimura_run(&f, &ClosureElement::singleton(0), 6).unwrap();
        assert_eq!(t.n, Some(2));
        assert!(t.b(3).is_empty() && t.a_inf.is_empty());
        assert_eq!(classify_algebra(&t).unwrap().class, AlgebraClass::Finite { m: 2 });

        let g = space("rn(2,2)", 0);
        let t = rieger_nishimura_run(&g, &ClosureElement::singleton(0), 6).unwrap();
        let c = classify_algebra(&t).unwrap();
        assert_eq!(c.class, AlgebraClass::FiniteWithTail { m: 2 });
        assert_eq!(c.label, "P(2,2)");
        assert_eq!(t.b(4), &ClosureElement::singleton(3));

        let z = space("rn(0,0)", 0);
        let t = rieger_nishimura_run(&z, &ClosureElement::singleton(0), 4).unwrap();
        assert_eq!(t.n, Some(0));
        assert_eq!(classify_algebra(&t).unwrap().class, AlgebraClass::Finite { m: 0 });

        let t = rieger_nishimura_run(&f, &ClosureElement::singleton(0), 2).unwrap();
        assert!(matches!(classify_algebra(&t), Err(ClosureError::Inconclusive { .. })));
        assert!(matches!(
            rieger_nishimura_run(&f, &ClosureElement::singleton(2), 3),
            Err(ClosureError::NotOpen(_))
        ));
    }

    #[test]
    fn generator_identity() {
        let f = space("rn(2,0)", 0);
        let e = e_of_p(&f).unwrap();
        assert!(e.generated);
        assert_eq!(e.steps[0].derived, ClosureElement::singleton(1));
        assert!(e.steps[0].literal);

        let s = space("rn-infinity", 12);
        let e = e_of_p(&s).unwrap();
        assert_eq!(e.steps.len(), 11);
        assert!(e.generated);
        assert!(!e.steps[1].literal);

        let g = space("rn(3,2)", 0);
        let e = e_of_p(&g).unwrap();
        assert!(e.generated);
        assert_eq!(e.steps.last().unwrap().singleton, ClosureElement::singleton(4));

        assert!(e_of_p(&space("diamond", 0)).is_err());
    }

    #[test]
    fn renderings() {
        let f = space("rn(2,0)", 0);
        let t = rieger_nishimura_run(&f, &ClosureElement::singleton(0), 3).unwrap();
        let text = render_ladder(&f, &t);
        assert!(text.contains("N = 2"));
        assert!(ladder_dot(&f, &t).starts_with("digraph"));
    }

    proptest! {
        #[test]
        fn closure_commutes_with_restriction(mask in 0u32..(1 << 10)) {
            // On the ladder, a finite truncation agrees with P(9,0).
            let s = space("rn-infinity", 10);
            let f = space("rn(9,0)", 0);
            let x: BTreeSet<usize> = (0..10).filter(|i| mask >> i & 1 == 1).collect();
            let a = s.closure_of(&ClosureElement::Finite(x.clone())).restrict(10);
            let b = f.closure_of(&ClosureElement::Finite(x)).restrict(10);
            prop_assert_eq!(a, b);
        }
    }
}
