//! Finite and countable posets, and the order-theoretic predicates used by
//! the rest of the crate.
//!
//! A countable poset is never materialised. It is an enumeration
//! `p_1, p_2, ...` together with an order oracle, and every predicate that
//! cannot be decided from a finite prefix reports what it saw on the prefix
//! (or an analytic answer, for the builtin families) instead of guessing.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position of an element in the enumeration of its poset (0-based, so
/// `Elem(0)` is `p_1`).
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub usize);

impl Elem {
    /// The 1-based enumeration index `n` such that this element is `p_n`.
    pub fn rank(self) -> usize {
        self.0 + 1
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element index {0} is outside the poset")]
    OutOfRange(usize),
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("cover relations contain a cycle through `{0}`")]
    Cycle(String),
    #[error("subset must be non-empty")]
    EmptySubset,
    #[error("subset declared {kind} but `{witness}` breaks it within the horizon")]
    DeclarationViolated { kind: &'static str, witness: String },
    #[error("horizon {0} is too small to confirm or refute a finite foundation")]
    Inconclusive(usize),
    #[error("unknown poset family `{0}`")]
    UnknownFamily(String),
    #[error("malformed poset json: {0}")]
    Json(String),
}

/// Three-way answer for predicates that may not be decidable from a prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsOnPrefix { horizon: usize },
    Refuted { witness: Vec<Elem>, reason: String },
}

impl Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn refuted(witness: Vec<Elem>, reason: impl Into<String>) -> Self {
        Verdict::Refuted {
            witness,
            reason: reason.into(),
        }
    }
}

/// The countable families with known analytic structure.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `p1 < p2 < p3 < ...`
    OmegaChain,
    /// `q1 > q2 > q3 > ...`
    DescendingChain,
    /// Pairwise incomparable `a1, a2, ...`.
    OmegaAntichain,
    /// `p0, p1, ...` with `p_j > p_k` iff `k >= j + 2` (the Rieger-Nishimura ladder).
    RnInfinity,
    /// [`Family::RnInfinity`] with a new least element `⊥`, enumerated first.
    RnInfinityBot,
    /// Dyadic rationals in `[0, 1]`: `0, 1`, then denominators `2, 4, 8, ...`
    /// with odd numerators in descending order.
    Dyadic,
    /// A root `r` below an infinite antichain of leaves `l1, l2, ...`.
    ZieglerFan,
    /// Two disjoint ascending chains `p1 < p2 < ...` and `q1 < q2 < ...`,
    /// enumerated alternately.
    TwoChains,
    /// `p1 < p2 < ... < r` together with `q < r`, where `q` is below no `p_n`.
    /// Enumerated `p1, q, r, p2, p3, ...`.
    ChainWithSide,
}

/// An ascending sequence of a family whose supremum is known analytically.
#[derive(Clone, Debug)]
pub struct KnownLimit {
    /// Display label of the limit (`lim→1⁻`, `r`, ...).
    pub label: String,
    /// Term `k` (0-based) of the ascending sequence.
    pub term: fn(usize) -> Elem,
    /// The supremum inside the poset, when there is one.
    pub sup_in_poset: Option<Elem>,
    /// Whether the chain completion gains a new element for this limit.
    pub adds_token: bool,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::OmegaChain,
        Family::DescendingChain,
        Family::OmegaAntichain,
        Family::RnInfinity,
        Family::RnInfinityBot,
        Family::Dyadic,
        Family::ZieglerFan,
        Family::TwoChains,
        Family::ChainWithSide,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::OmegaChain => "omega-chain",
            Family::DescendingChain => "descending-chain",
            Family::OmegaAntichain => "omega-antichain",
            Family::RnInfinity => "rn-infinity",
            Family::RnInfinityBot => "rn-infinity-bot",
            Family::Dyadic => "dyadic",
            Family::ZieglerFan => "ziegler-fan",
            Family::TwoChains => "two-chains",
            Family::ChainWithSide => "chain-with-side",
        }
    }

    pub fn leq(self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        match self {
            Family::OmegaChain => a < b,
            Family::DescendingChain => a > b,
            Family::OmegaAntichain => false,
            Family::RnInfinity => a >= b + 2,
            Family::RnInfinityBot => a == 0 || (b > 0 && a >= b + 2),
            Family::Dyadic => {
                let (an, ad) = dyadic_value(a);
                let (bn, bd) = dyadic_value(b);
                an * bd <= bn * ad
            }
            Family::ZieglerFan => a == 0,
            Family::TwoChains => a % 2 == b % 2 && a < b,
            Family::ChainWithSide => match (a, b) {
                (_, 2) => true,
                (2, _) | (1, _) | (_, 1) => false,
                _ => chain_with_side_rank(a) < chain_with_side_rank(b),
            },
        }
    }

    pub fn display(self, i: usize) -> String {
        match self {
            Family::OmegaChain => format!("p{}", i + 1),
            Family::DescendingChain => format!("q{}", i + 1),
            Family::OmegaAntichain => format!("a{}", i + 1),
            Family::RnInfinity => format!("p{i}"),
            Family::RnInfinityBot => {
                if i == 0 {
                    "⊥".to_string()
                } else {
                    format!("p{}", i - 1)
                }
            }
            Family::Dyadic => {
                let (n, d) = dyadic_value(i);
                if d == 1 {
                    n.to_string()
                } else {
                    format!("{n}/{d}")
                }
            }
            Family::ZieglerFan => {
                if i == 0 {
                    "r".to_string()
                } else {
                    format!("l{i}")
                }
            }
            Family::TwoChains => {
                if i % 2 == 0 {
                    format!("p{}", i / 2 + 1)
                } else {
                    format!("q{}", i / 2 + 1)
                }
            }
            Family::ChainWithSide => match i {
                1 => "q".to_string(),
                2 => "r".to_string(),
                _ => format!("p{}", chain_with_side_rank(i) + 1),
            },
        }
    }

    /// Inverse of [`Family::display`], searching at most `limit` indices.
    pub fn parse_element(self, name: &str, limit: usize) -> Option<usize> {
        (0..limit).find(|&i| self.display(i) == name)
    }

    pub fn is_minimal(self, i: usize) -> bool {
        match self {
            Family::OmegaChain | Family::RnInfinityBot | Family::Dyadic | Family::ZieglerFan => {
                i == 0
            }
            Family::DescendingChain | Family::RnInfinity => false,
            Family::OmegaAntichain => true,
            Family::TwoChains | Family::ChainWithSide => i < 2,
        }
    }

    pub fn is_maximal(self, i: usize) -> bool {
        match self {
            Family::OmegaChain | Family::TwoChains => false,
            Family::DescendingChain => i == 0,
            Family::OmegaAntichain => true,
            Family::RnInfinity => i < 2,
            Family::RnInfinityBot => i == 1 || i == 2,
            Family::Dyadic => i == 1,
            Family::ZieglerFan => i > 0,
            Family::ChainWithSide => i == 2,
        }
    }

    /// Minimal elements below `i` forming a finite foundation of `{i}`, or
    /// `None` when `{i}` has no finite foundation.
    pub fn foundation_of(self, i: usize) -> Option<Vec<usize>> {
        match self {
            Family::OmegaChain | Family::Dyadic | Family::ZieglerFan | Family::RnInfinityBot => {
                Some(vec![0])
            }
            Family::DescendingChain | Family::RnInfinity => None,
            Family::OmegaAntichain => Some(vec![i]),
            Family::TwoChains => Some(vec![i % 2]),
            Family::ChainWithSide => match i {
                1 => Some(vec![1]),
                2 => Some(vec![0, 1]),
                _ => Some(vec![0]),
            },
        }
    }

    /// Whether `{q | q <= i}` is finite.
    pub fn down_set_finite(self, i: usize) -> bool {
        match self {
            Family::OmegaChain
            | Family::OmegaAntichain
            | Family::ZieglerFan
            | Family::TwoChains => true,
            Family::DescendingChain | Family::RnInfinity => false,
            Family::RnInfinityBot | Family::Dyadic => i == 0,
            Family::ChainWithSide => i != 2,
        }
    }

    pub fn has_acc(self) -> bool {
        !matches!(
            self,
            Family::OmegaChain | Family::Dyadic | Family::TwoChains | Family::ChainWithSide
        )
    }

    pub fn is_omega_complete(self) -> bool {
        !matches!(self, Family::OmegaChain | Family::Dyadic | Family::TwoChains)
    }

    pub fn known_limits(self) -> Vec<KnownLimit> {
        match self {
            Family::OmegaChain => vec![KnownLimit {
                label: "lim(p_n)".into(),
                term: |k| Elem(k),
                sup_in_poset: None,
                adds_token: true,
            }],
            Family::Dyadic => vec![KnownLimit {
                label: "lim→1⁻".into(),
                // 1 - 2^-(k+1) sits at enumeration index 2^k + 1.
                term: |k| Elem((1usize << k) + 1),
                sup_in_poset: Some(Elem(1)),
                adds_token: true,
            }],
            Family::TwoChains => vec![
                KnownLimit {
                    label: "r".into(),
                    term: |k| Elem(2 * k),
                    sup_in_poset: None,
                    adds_token: true,
                },
                KnownLimit {
                    label: "s".into(),
                    term: |k| Elem(2 * k + 1),
                    sup_in_poset: None,
                    adds_token: true,
                },
            ],
            Family::ChainWithSide => vec![KnownLimit {
                label: "r".into(),
                term: |k| Elem(if k == 0 { 0 } else { k + 2 }),
                sup_in_poset: Some(Elem(2)),
                adds_token: false,
            }],
            _ => Vec::new(),
        }
    }

    pub fn parse(tag: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

/// Rank of `p_n` within the chain of [`Family::ChainWithSide`].
fn chain_with_side_rank(i: usize) -> usize {
    if i == 0 {
        0
    } else {
        i - 2
    }
}

/// Numerator and denominator of the dyadic rational at enumeration index `i`.
pub fn dyadic_value(i: usize) -> (u64, u64) {
    match i {
        0 => (0, 1),
        1 => (1, 1),
        _ => {
            let j = (i - 1) as u64;
            let level = 63 - j.leading_zeros() as u64;
            let den = 1u64 << (level + 1);
            let r = j - (1u64 << level);
            (den - 1 - 2 * r, den)
        }
    }
}

#[derive(Clone, Debug)]
struct FiniteOrder {
    names: Vec<String>,
    // leq[a][b] is a <= b
    leq: Vec<Vec<bool>>,
}

#[derive(Clone, Debug)]
enum Kind {
    Finite(FiniteOrder),
    Generated(Family),
}

/// A finite poset, or a countable one given by enumeration and order oracle.
#[derive(Clone, Debug)]
pub struct Poset {
    name: String,
    kind: Kind,
    family_tag: Option<String>,
}

/// Poset file format: strict cover relations whose reflexive-transitive
/// closure is the order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PosetJson {
    pub name: String,
    pub elements: Vec<String>,
    pub covers: Vec<[String; 2]>,
}

/// A finite subset of a poset with optional closure declarations.
#[derive(Clone, Debug, Default)]
pub struct SubsetSpec {
    pub members: BTreeSet<Elem>,
    pub declared_lower: bool,
    pub declared_upper: bool,
}

impl SubsetSpec {
    pub fn new(members: impl IntoIterator<Item = Elem>) -> Self {
        SubsetSpec {
            members: members.into_iter().collect(),
            ..Default::default()
        }
    }

    pub fn lower(members: impl IntoIterator<Item = Elem>) -> Self {
        SubsetSpec {
            declared_lower: true,
            ..SubsetSpec::new(members)
        }
    }
}

/// Minimal and maximal elements seen within a prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremal {
    pub minimal: Vec<Elem>,
    pub maximal: Vec<Elem>,
    pub exact: bool,
}

/// Default length beyond which an ascending chain counts as evidence
/// against the ACC.
pub const DEFAULT_ACC_BOUND: usize = 8;

impl Poset {
    /// Builds a finite poset from strict cover pairs `(lower, upper)`.
    pub fn from_covers(
        name: impl Into<String>,
        elements: &[&str],
        covers: &[(&str, &str)],
    ) -> Result<Poset, PosetError> {
        let json = PosetJson {
            name: name.into(),
            elements: elements.iter().map(|s| s.to_string()).collect(),
            covers: covers
                .iter()
                .map(|(a, b)| [a.to_string(), b.to_string()])
                .collect(),
        };
        Poset::from_json(&json)
    }

    pub fn from_json(json: &PosetJson) -> Result<Poset, PosetError> {
        let mut index = HashMap::new();
        for (i, e) in json.elements.iter().enumerate() {
            if index.insert(e.as_str(), i).is_some() {
                return Err(PosetError::DuplicateElement(e.clone()));
            }
        }
        let n = json.elements.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for [a, b] in &json.covers {
            let ia = *index
                .get(a.as_str())
                .ok_or_else(|| PosetError::UnknownElement(a.clone()))?;
            let ib = *index
                .get(b.as_str())
                .ok_or_else(|| PosetError::UnknownElement(b.clone()))?;
            leq[ia][ib] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(PosetError::Cycle(json.elements[i].clone()));
                }
            }
        }
        Ok(Poset {
            name: json.name.clone(),
            kind: Kind::Finite(FiniteOrder {
                names: json.elements.clone(),
                leq,
            }),
            family_tag: None,
        })
    }

    pub fn parse_json(text: &str) -> Result<Poset, PosetError> {
        let json: PosetJson =
            serde_json::from_str(text).map_err(|e| PosetError::Json(e.to_string()))?;
        Poset::from_json(&json)
    }

    /// Finite poset from an explicit order predicate on `0..n`.
    pub fn from_relation(
        name: impl Into<String>,
        names: Vec<String>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Poset {
        let n = names.len();
        let leq = (0..n)
            .map(|i| (0..n).map(|j| i == j || leq(i, j)).collect())
            .collect();
        Poset {
            name: name.into(),
            kind: Kind::Finite(FiniteOrder { names, leq }),
            family_tag: None,
        }
    }

    pub fn generated(family: Family) -> Poset {
        Poset {
            name: family.tag().to_string(),
            kind: Kind::Generated(family),
            family_tag: Some(family.tag().to_string()),
        }
    }

    /// Chain `a < b < ...` on the given names.
    pub fn chain(names: &[&str]) -> Poset {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        Poset::from_relation("chain", names, |i, j| i <= j)
    }

    pub fn antichain(names: &[&str]) -> Poset {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        Poset::from_relation("antichain", names, |i, j| i == j)
    }

    /// `{a, b < c}`.
    pub fn vee() -> Poset {
        Poset::from_covers("vee", &["a", "b", "c"], &[("a", "c"), ("b", "c")])
            .expect("static poset")
    }

    /// `a < b, c < d`.
    pub fn diamond() -> Poset {
        Poset::from_covers(
            "diamond",
            &["a", "b", "c", "d"],
            &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")],
        )
        .expect("static poset")
    }

    /// `P(m,0) = {p0..pm}` (`tail = false`) or `P(m,2) = P(m,0) ∪ {p_{m+2}}`,
    /// with the order inherited from the Rieger-Nishimura ladder.
    pub fn rn(m: usize, tail: bool) -> Poset {
        let mut labels: Vec<usize> = (0..=m).collect();
        if tail {
            labels.push(m + 2);
        }
        let names = labels.iter().map(|k| format!("p{k}")).collect();
        let mut poset = Poset::from_relation(String::new(), names, |i, j| {
            labels[i] == labels[j] || labels[i] >= labels[j] + 2
        });
        let tag = format!("rn({m},{})", if tail { 2 } else { 0 });
        poset.name = tag.clone();
        poset.family_tag = Some(tag);
        poset
    }

    /// Resolves a builtin tag: a countable family, `rn(m,0)`, `rn(m,2)`,
    /// `chain(n)`, `antichain(n)`, `vee` or `diamond`.
    pub fn builtin(tag: &str) -> Result<Poset, PosetError> {
        if let Some(f) = Family::parse(tag) {
            return Ok(Poset::generated(f));
        }
        let bad = || PosetError::UnknownFamily(tag.to_string());
        if let Some(args) = tag.strip_prefix("rn(").and_then(|s| s.strip_suffix(')')) {
            let (m, n) = args.split_once(',').ok_or_else(bad)?;
            let m: usize = m.trim().parse().map_err(|_| bad())?;
            return match n.trim() {
                "0" => Ok(Poset::rn(m, false)),
                "2" => Ok(Poset::rn(m, true)),
                _ => Err(bad()),
            };
        }
        let sized = |prefix: &str| -> Option<Result<usize, PosetError>> {
            tag.strip_prefix(prefix)
                .and_then(|s| s.strip_suffix(')'))
                .map(|s| s.trim().parse().map_err(|_| bad()))
        };
        if let Some(n) = sized("chain(") {
            let names: Vec<String> = (1..=n?).map(|i| format!("c{i}")).collect();
            return Ok(Poset::from_relation(tag, names, |i, j| i <= j));
        }
        if let Some(n) = sized("antichain(") {
            let names: Vec<String> = (1..=n?).map(|i| format!("a{i}")).collect();
            return Ok(Poset::from_relation(tag, names, |i, j| i == j));
        }
        match tag {
            "vee" => Ok(Poset::vee()),
            "diamond" => Ok(Poset::diamond()),
            _ => Err(bad()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family_tag(&self) -> Option<&str> {
        self.family_tag.as_deref()
    }

    pub fn family(&self) -> Option<Family> {
        match self.kind {
            Kind::Generated(f) => Some(f),
            Kind::Finite(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, Kind::Finite(_))
    }

    /// Number of elements, or `None` for a countably infinite poset.
    pub fn size(&self) -> Option<usize> {
        match &self.kind {
            Kind::Finite(f) => Some(f.names.len()),
            Kind::Generated(_) => None,
        }
    }

    /// `|P_horizon|`.
    pub fn prefix_len(&self, horizon: usize) -> usize {
        match self.size() {
            Some(n) => n.min(horizon),
            None => horizon,
        }
    }

    pub fn prefix(&self, horizon: usize) -> impl Iterator<Item = Elem> {
        (0..self.prefix_len(horizon)).map(Elem)
    }

    /// Whether `e` exists in the poset (for countable posets, every index does).
    pub fn contains(&self, e: Elem) -> bool {
        self.size().is_none_or(|n| e.0 < n)
    }

    /// Structural fingerprint used to detect values from different posets.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.name.hash(&mut h);
        match &self.kind {
            Kind::Finite(f) => {
                f.names.hash(&mut h);
                f.leq.hash(&mut h);
            }
            Kind::Generated(fam) => fam.hash(&mut h),
        }
        h.finish()
    }

    pub fn leq(&self, p: Elem, q: Elem) -> bool {
        match &self.kind {
            Kind::Finite(f) => f.leq[p.0][q.0],
            Kind::Generated(fam) => fam.leq(p.0, q.0),
        }
    }

    pub fn lt(&self, p: Elem, q: Elem) -> bool {
        p != q && self.leq(p, q)
    }

    pub fn comparable(&self, p: Elem, q: Elem) -> bool {
        self.leq(p, q) || self.leq(q, p)
    }

    /// Order query by element name; unknown names are an error.
    pub fn leq_by_name(&self, p: &str, q: &str) -> Result<bool, PosetError> {
        let p = self.element(p)?;
        let q = self.element(q)?;
        Ok(self.leq(p, q))
    }

    pub fn display(&self, e: Elem) -> String {
        match &self.kind {
            Kind::Finite(f) => f.names[e.0].clone(),
            Kind::Generated(fam) => fam.display(e.0),
        }
    }

    pub fn display_set<'a>(&self, set: impl IntoIterator<Item = &'a Elem>) -> Vec<String> {
        set.into_iter().map(|&e| self.display(e)).collect()
    }

    /// Looks an element up by name. Countable posets are searched up to
    /// index 4096.
    pub fn element(&self, name: &str) -> Result<Elem, PosetError> {
        let found = match &self.kind {
            Kind::Finite(f) => f.names.iter().position(|n| n == name),
            Kind::Generated(fam) => fam.parse_element(name, 4096),
        };
        found
            .map(Elem)
            .ok_or_else(|| PosetError::UnknownElement(name.to_string()))
    }

    pub fn checked(&self, e: Elem) -> Result<Elem, PosetError> {
        if self.contains(e) {
            Ok(e)
        } else {
            Err(PosetError::OutOfRange(e.0))
        }
    }

    /// Checks reflexivity, antisymmetry and transitivity on `P_horizon`,
    /// returning the first violating triple.
    pub fn check_order_axioms(&self, horizon: usize) -> Result<(), (Elem, Elem, Elem)> {
        let els: Vec<Elem> = self.prefix(horizon).collect();
        for &a in &els {
            if !self.leq(a, a) {
                return Err((a, a, a));
            }
            for &b in &els {
                if a != b && self.leq(a, b) && self.leq(b, a) {
                    return Err((a, b, a));
                }
                if !self.leq(a, b) {
                    continue;
                }
                for &c in &els {
                    if self.leq(b, c) && !self.leq(a, c) {
                        return Err((a, b, c));
                    }
                }
            }
        }
        Ok(())
    }

    /// Minimal and maximal elements of `P_horizon`. Builtin families answer
    /// analytically, so elements that merely look extremal because the
    /// prefix is cut off are not reported.
    pub fn extremal_elements(&self, horizon: usize) -> Extremal {
        let els: Vec<Elem> = self.prefix(horizon).collect();
        let (minimal, maximal) = match self.family() {
            Some(fam) => (
                els.iter().copied().filter(|e| fam.is_minimal(e.0)).collect(),
                els.iter().copied().filter(|e| fam.is_maximal(e.0)).collect(),
            ),
            None => (
                els.iter()
                    .copied()
                    .filter(|&p| !els.iter().any(|&q| self.lt(q, p)))
                    .collect(),
                els.iter()
                    .copied()
                    .filter(|&p| !els.iter().any(|&q| self.lt(p, q)))
                    .collect(),
            ),
        };
        let exact = self.size().is_some_and(|n| horizon >= n);
        Extremal {
            minimal,
            maximal,
            exact,
        }
    }

    pub fn is_minimal(&self, p: Elem) -> bool {
        match self.family() {
            Some(fam) => fam.is_minimal(p.0),
            None => !self.prefix(usize::MAX).any(|q| self.lt(q, p)),
        }
    }

    /// `{p ∈ P_horizon | p <= q for some q ∈ set}`.
    pub fn down_closure(&self, set: &BTreeSet<Elem>, horizon: usize) -> BTreeSet<Elem> {
        self.prefix(horizon)
            .filter(|&p| set.iter().any(|&q| self.leq(p, q)))
            .collect()
    }

    /// `{p ∈ P_horizon | p >= q for some q ∈ set}`.
    pub fn up_closure(&self, set: &BTreeSet<Elem>, horizon: usize) -> BTreeSet<Elem> {
        self.prefix(horizon)
            .filter(|&p| set.iter().any(|&q| self.leq(q, p)))
            .collect()
    }

    /// Minimal elements of a finite set.
    pub fn minimal_of(&self, set: &BTreeSet<Elem>) -> BTreeSet<Elem> {
        set.iter()
            .copied()
            .filter(|&p| !set.iter().any(|&q| self.lt(q, p)))
            .collect()
    }

    fn verify_declarations(&self, q: &SubsetSpec, horizon: usize) -> Result<(), PosetError> {
        for &m in &q.members {
            for r in self.prefix(horizon) {
                if q.declared_lower && self.leq(r, m) && !q.members.contains(&r) {
                    return Err(PosetError::DeclarationViolated {
                        kind: "lower",
                        witness: self.display(r),
                    });
                }
                if q.declared_upper && self.leq(m, r) && !q.members.contains(&r) {
                    return Err(PosetError::DeclarationViolated {
                        kind: "upper",
                        witness: self.display(r),
                    });
                }
            }
        }
        Ok(())
    }

    /// A finite foundation of `q` made of minimal elements, `Ok(None)` when
    /// `q` provably has none, and [`PosetError::Inconclusive`] when the
    /// horizon cannot settle the question.
    ///
    /// The foundation returned is `(↓q) ∩ P_min`, which every foundation
    /// inside `P_min` must contain; for lower `q` this is `q ∩ P_min`.
    pub fn finite_foundation(
        &self,
        q: &SubsetSpec,
        horizon: usize,
    ) -> Result<Option<Vec<Elem>>, PosetError> {
        if q.members.is_empty() {
            return Err(PosetError::EmptySubset);
        }
        for &m in &q.members {
            self.checked(m)?;
        }
        self.verify_declarations(q, horizon)?;
        match self.family() {
            None => {
                let below = self.down_closure(&q.members, usize::MAX);
                let f: Vec<Elem> = below
                    .iter()
                    .copied()
                    .filter(|&p| self.is_minimal(p))
                    .collect();
                debug_assert!(self.is_foundation(&f, &q.members, usize::MAX));
                Ok(Some(f))
            }
            Some(fam) => {
                let mut f = BTreeSet::new();
                for &m in &q.members {
                    match fam.foundation_of(m.0) {
                        Some(found) => f.extend(found.into_iter().map(Elem)),
                        None => return Ok(None),
                    }
                }
                Ok(Some(f.into_iter().collect()))
            }
        }
    }

    /// Direct quantifier check of the two foundation conditions on
    /// `P_horizon`: everything below `q` is above a member of `f`, and every
    /// member of `f` is below some member of `q`.
    pub fn is_foundation(&self, f: &[Elem], q: &BTreeSet<Elem>, horizon: usize) -> bool {
        let covers = q.iter().all(|&m| {
            self.prefix(horizon)
                .filter(|&r| self.leq(r, m))
                .all(|r| f.iter().any(|&p| self.leq(p, r)))
        });
        let grounded = f.iter().all(|&p| q.iter().any(|&m| self.leq(p, m)));
        covers && grounded
    }

    /// Elements of `P_horizon` whose singleton has a finite foundation.
    pub fn p_delta(&self, horizon: usize) -> (Vec<Elem>, bool) {
        let members = self
            .prefix(horizon)
            .filter(|&p| {
                matches!(
                    self.finite_foundation(&SubsetSpec::new([p]), horizon),
                    Ok(Some(_))
                )
            })
            .collect();
        (members, self.is_finite())
    }

    /// Longest strictly increasing chain inside `P_horizon`.
    pub fn longest_ascending_chain(&self, horizon: usize) -> Vec<Elem> {
        let els: Vec<Elem> = self.prefix(horizon).collect();
        let n = els.len();
        // height[i]: length of the longest chain starting at els[i].
        let mut height: Vec<Option<usize>> = vec![None; n];
        let mut next = vec![None; n];
        fn visit(
            p: &Poset,
            els: &[Elem],
            i: usize,
            height: &mut Vec<Option<usize>>,
            next: &mut Vec<Option<usize>>,
        ) -> usize {
            if let Some(h) = height[i] {
                return h;
            }
            let mut best = 1;
            for j in 0..els.len() {
                if p.lt(els[i], els[j]) {
                    let h = visit(p, els, j, height, next) + 1;
                    if h > best {
                        best = h;
                        next[i] = Some(j);
                    }
                }
            }
            height[i] = Some(best);
            best
        }
        let mut start = None;
        let mut best = 0;
        for i in 0..n {
            let h = visit(self, &els, i, &mut height, &mut next);
            if h > best {
                best = h;
                start = Some(i);
            }
        }
        let mut chain = Vec::new();
        let mut cur = start;
        while let Some(i) = cur {
            chain.push(els[i]);
            cur = next[i];
        }
        chain
    }

    /// Ascending chain condition. Finite posets hold outright; otherwise a
    /// strictly increasing chain longer than `bound` in the prefix refutes,
    /// and families with the ACC report [`Verdict::HoldsOnPrefix`].
    pub fn check_acc(&self, horizon: usize, bound: usize) -> Verdict {
        if self.is_finite() {
            return Verdict::Holds;
        }
        if self.family().is_some_and(|f| f.has_acc()) {
            return Verdict::HoldsOnPrefix { horizon };
        }
        let chain = self.longest_ascending_chain(horizon);
        if chain.len() > bound {
            let chain: Vec<Elem> = chain.into_iter().take(bound + 1).collect();
            return Verdict::refuted(chain, "strictly increasing chain longer than the bound");
        }
        if self.family().is_some() {
            return Verdict::refuted(Vec::new(), "family has a strictly increasing ω-chain");
        }
        Verdict::HoldsOnPrefix { horizon }
    }

    /// Every non-empty chain of a finite poset, as sorted element lists.
    /// Exponential; meant for small posets.
    pub fn finite_chains(&self) -> Vec<Vec<Elem>> {
        let n = self.size().expect("finite poset");
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(p: &Poset, i: usize, n: usize, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
            if i == n {
                if !cur.is_empty() {
                    out.push(cur.clone());
                }
                return;
            }
            go(p, i + 1, n, cur, out);
            if cur.iter().all(|&c| p.comparable(c, Elem(i))) {
                cur.push(Elem(i));
                go(p, i + 1, n, cur, out);
                cur.pop();
            }
        }
        go(self, 0, n, &mut cur, &mut out);
        out
    }

    /// Least upper bound of a finite set within `P_horizon`, if unique.
    pub fn supremum(&self, set: &[Elem], horizon: usize) -> Option<Elem> {
        let uppers: Vec<Elem> = self
            .prefix(horizon)
            .filter(|&u| set.iter().all(|&s| self.leq(s, u)))
            .collect();
        let least: Vec<Elem> = uppers
            .iter()
            .copied()
            .filter(|&u| uppers.iter().all(|&v| self.leq(u, v)))
            .collect();
        match least.as_slice() {
            [one] => Some(*one),
            _ => None,
        }
    }

    /// ω-completeness. Finite posets are decided by checking that every
    /// chain has a least upper bound; families answer analytically; other
    /// posets are searched for an ascending chain without a unique least
    /// upper bound in the prefix.
    pub fn check_omega_complete(&self, horizon: usize) -> Verdict {
        if self.is_finite() && self.size().unwrap_or(0) <= 20 {
            for chain in self.finite_chains() {
                if self.supremum(&chain, usize::MAX).is_none() {
                    return Verdict::refuted(chain, "chain without a least upper bound");
                }
            }
            return Verdict::Holds;
        }
        if let Some(fam) = self.family() {
            if fam.is_omega_complete() {
                return Verdict::HoldsOnPrefix { horizon };
            }
            let witness = fam
                .known_limits()
                .into_iter()
                .find(|l| l.sup_in_poset.is_none())
                .map(|l| {
                    (0..horizon)
                        .map(l.term)
                        .take_while(|e| e.0 < horizon)
                        .collect()
                })
                .unwrap_or_default();
            return Verdict::refuted(witness, "family has an ascending chain with no supremum");
        }
        let chain = self.longest_ascending_chain(horizon);
        if chain.len() > 1 && self.supremum(&chain, horizon).is_none() {
            return Verdict::refuted(chain, "ascending chain without a unique least upper bound");
        }
        Verdict::HoldsOnPrefix { horizon }
    }

    /// Checks that `q_sub` is chain-unique over the poset: whenever an
    /// ascending sequence has supremum `q ∈ q_sub`, everything strictly below
    /// `q` is below some term. Sequences that stabilise satisfy this
    /// trivially, so only the analytically known limits of a family can fail.
    pub fn is_chain_unique_over(&self, q_sub: &BTreeSet<Elem>, horizon: usize) -> Verdict {
        let Some(fam) = self.family() else {
            return Verdict::Holds;
        };
        for lim in fam.known_limits() {
            let Some(sup) = lim.sup_in_poset else {
                continue;
            };
            if !q_sub.contains(&sup) {
                continue;
            }
            let terms: Vec<Elem> = (0..horizon)
                .map(lim.term)
                .take_while(|e| e.0 < horizon)
                .collect();
            for r in self.prefix(horizon) {
                if !self.lt(r, sup) {
                    continue;
                }
                // Terms ascend, so looking far enough along the sequence
                // settles membership for the builtin families.
                let below_term = (0..horizon.max(64)).map(lim.term).any(|t| self.leq(r, t));
                if !below_term {
                    let mut witness = vec![r, sup];
                    witness.extend(terms.iter().take(3));
                    return Verdict::refuted(
                        witness,
                        format!(
                            "{} < sup of {} but below no term",
                            self.display(r),
                            lim.label
                        ),
                    );
                }
            }
        }
        if self.is_finite() {
            Verdict::Holds
        } else {
            Verdict::HoldsOnPrefix { horizon }
        }
    }

    /// Poset JSON with the transitive reduction as covers. Countable posets
    /// are cut at `horizon`.
    pub fn to_json(&self, horizon: usize) -> PosetJson {
        let els: Vec<Elem> = self.prefix(horizon).collect();
        let mut covers = Vec::new();
        for &a in &els {
            for &b in &els {
                if self.lt(a, b) && !els.iter().any(|&c| self.lt(a, c) && self.lt(c, b)) {
                    covers.push([self.display(a), self.display(b)]);
                }
            }
        }
        PosetJson {
            name: self.name.clone(),
            elements: els.iter().map(|&e| self.display(e)).collect(),
            covers,
        }
    }
}

impl fmt::Display for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.size() {
            Some(n) => write!(f, "{} ({} elements)", self.name, n),
            None => write!(f, "{} (countable)", self.name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(els: &[usize]) -> BTreeSet<Elem> {
        els.iter().map(|&i| Elem(i)).collect()
    }

    fn names(p: &Poset, els: &[Elem]) -> Vec<String> {
        p.display_set(els)
    }

    #[test]
    fn leq_examples() {
        let chain = Poset::chain(&["a", "b"]);
        assert!(chain.leq_by_name("a", "b").unwrap());
        let rn = Poset::generated(Family::RnInfinity);
        assert!(rn.leq_by_name("p2", "p0").unwrap());
        let p20 = Poset::rn(2, false);
        assert!(!p20.leq_by_name("p1", "p0").unwrap());
        assert!(matches!(
            chain.leq_by_name("a", "zz"),
            Err(PosetError::UnknownElement(_))
        ));
    }

    #[test]
    fn rn_two_zero_relations_exhaustive() {
        let p = Poset::rn(2, false);
        let rel: Vec<(usize, usize)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| p.lt(Elem(i), Elem(j)))
            .collect();
        // only p2 < p0
        assert_eq!(rel, vec![(2, 0)]);
    }

    #[test]
    fn extremal_examples() {
        let v = Poset::vee();
        let ex = v.extremal_elements(10);
        assert_eq!(names(&v, &ex.minimal), ["a", "b"]);
        assert_eq!(names(&v, &ex.maximal), ["c"]);
        assert!(ex.exact);

        let p20 = Poset::rn(2, false);
        let ex = p20.extremal_elements(10);
        assert_eq!(names(&p20, &ex.minimal), ["p1", "p2"]);
        assert_eq!(names(&p20, &ex.maximal), ["p0", "p1"]);

        let rn = Poset::generated(Family::RnInfinity);
        let ex = rn.extremal_elements(10);
        assert!(ex.minimal.is_empty());
        assert_eq!(names(&rn, &ex.maximal), ["p0", "p1"]);
        assert!(!ex.exact);
    }

    #[test]
    fn rn_infinity_has_no_minimal_element_in_any_prefix() {
        let rn = Poset::generated(Family::RnInfinity);
        for k in 0..10 {
            assert!(rn.lt(Elem(k + 2), Elem(k)));
        }
    }

    #[test]
    fn down_closure_examples() {
        let rn = Poset::generated(Family::RnInfinity);
        let d = rn.down_closure(&set(&[0]), 6);
        assert_eq!(names(&rn, &d.into_iter().collect::<Vec<_>>()), ["p0", "p2", "p3", "p4", "p5"]);
        assert!(Poset::vee().down_closure(&BTreeSet::new(), 5).is_empty());
        let chain = Poset::chain(&["a", "b"]);
        assert_eq!(chain.down_closure(&set(&[1]), 5), set(&[0, 1]));
    }

    #[test]
    fn foundation_examples() {
        let chain = Poset::chain(&["a", "b"]);
        assert_eq!(
            chain.finite_foundation(&SubsetSpec::new([Elem(1)]), 5).unwrap(),
            Some(vec![Elem(0)])
        );
        let v = Poset::vee();
        assert_eq!(
            v.finite_foundation(&SubsetSpec::new([Elem(2)]), 5).unwrap(),
            Some(vec![Elem(0), Elem(1)])
        );
        let desc = Poset::generated(Family::DescendingChain);
        assert_eq!(desc.finite_foundation(&SubsetSpec::new([Elem(0)]), 10).unwrap(), None);
        assert_eq!(
            chain.finite_foundation(&SubsetSpec::default(), 5),
            Err(PosetError::EmptySubset)
        );
    }

    #[test]
    fn foundation_brute_force_on_vee() {
        // Enumerate every candidate F and keep the ones meeting both
        // conditions; the minimal-element one is {a, b}.
        let v = Poset::vee();
        let q = set(&[2]);
        let mut found = Vec::new();
        for mask in 0u32..8 {
            let f: Vec<Elem> = (0..3).filter(|i| mask >> i & 1 == 1).map(Elem).collect();
            if v.is_foundation(&f, &q, 10) {
                found.push(f);
            }
        }
        assert!(found.contains(&vec![Elem(0), Elem(1)]));
        assert!(found.iter().all(|f| f.contains(&Elem(0)) && f.contains(&Elem(1))));
    }

    #[test]
    fn declared_lower_is_checked() {
        let chain = Poset::chain(&["a", "b"]);
        let err = chain
            .finite_foundation(&SubsetSpec::lower([Elem(1)]), 5)
            .unwrap_err();
        assert!(matches!(err, PosetError::DeclarationViolated { kind: "lower", .. }));
    }

    #[test]
    fn p_delta_examples() {
        let v = Poset::vee();
        assert_eq!(v.p_delta(10), (vec![Elem(0), Elem(1), Elem(2)], true));
        let desc = Poset::generated(Family::DescendingChain);
        assert_eq!(desc.p_delta(10), (vec![], false));
        let asc = Poset::generated(Family::OmegaChain);
        assert_eq!(asc.p_delta(10).0.len(), 10);
    }

    #[test]
    fn acc_examples() {
        assert_eq!(Poset::diamond().check_acc(10, 8), Verdict::Holds);
        let asc = Poset::generated(Family::OmegaChain);
        match asc.check_acc(10, 8) {
            Verdict::Refuted { witness, .. } => {
                assert_eq!(witness, (0..9).map(Elem).collect::<Vec<_>>());
                for w in witness.windows(2) {
                    assert!(asc.lt(w[0], w[1]));
                }
            }
            other => panic!("expected refutation, got {other:?}"),
        }
        let rn = Poset::generated(Family::RnInfinity);
        assert_eq!(rn.check_acc(20, 8), Verdict::HoldsOnPrefix { horizon: 20 });
    }

    #[test]
    fn longest_chain_in_rn_prefix_has_decreasing_indices() {
        let rn = Poset::generated(Family::RnInfinity);
        let chain = rn.longest_ascending_chain(20);
        assert_eq!(chain.len(), 10);
        for w in chain.windows(2) {
            assert!(w[0].0 > w[1].0);
        }
    }

    #[test]
    fn omega_completeness_examples() {
        assert_eq!(Poset::vee().check_omega_complete(10), Verdict::Holds);
        assert!(Poset::generated(Family::OmegaChain)
            .check_omega_complete(10)
            .is_refuted());
        assert!(Poset::generated(Family::Dyadic)
            .check_omega_complete(10)
            .is_refuted());
    }

    #[test]
    fn chain_unique_examples() {
        let chain = Poset::chain(&["a", "b"]);
        assert_eq!(chain.is_chain_unique_over(&set(&[0, 1]), 5), Verdict::Holds);
        let side = Poset::generated(Family::ChainWithSide);
        let all: BTreeSet<Elem> = side.prefix(10).collect();
        match side.is_chain_unique_over(&all, 10) {
            Verdict::Refuted { witness, .. } => {
                assert_eq!(side.display(witness[0]), "q");
                assert_eq!(side.display(witness[1]), "r");
            }
            other => panic!("expected refutation, got {other:?}"),
        }
        let p20 = Poset::rn(2, false);
        assert_eq!(p20.is_chain_unique_over(&set(&[0, 1, 2]), 5), Verdict::Holds);
    }

    #[test]
    fn dyadic_enumeration() {
        let shown: Vec<String> = (0..9).map(|i| Family::Dyadic.display(i)).collect();
        assert_eq!(shown, ["0", "1", "1/2", "3/4", "1/4", "7/8", "5/8", "3/8", "1/8"]);
        let lim = &Family::Dyadic.known_limits()[0];
        let terms: Vec<String> = (0..3).map(|k| Family::Dyadic.display((lim.term)(k).0)).collect();
        assert_eq!(terms, ["1/2", "3/4", "7/8"]);
    }

    #[test]
    fn family_analytics_agree_with_order_on_prefix() {
        for fam in Family::ALL {
            let p = Poset::generated(fam);
            assert!(p.check_order_axioms(24).is_ok(), "{fam:?}");
            for i in 0..24 {
                let below = (0..24).any(|j| j != i && fam.leq(j, i));
                let above = (0..24).any(|j| j != i && fam.leq(i, j));
                // Analytic minimality implies nothing below in the prefix.
                if fam.is_minimal(i) {
                    assert!(!below, "{fam:?} {i}");
                }
                if fam.is_maximal(i) {
                    assert!(!above, "{fam:?} {i}");
                }
                if let Some(f) = fam.foundation_of(i) {
                    let f: Vec<Elem> = f.into_iter().map(Elem).collect();
                    assert!(p.is_foundation(&f, &set(&[i]), 24), "{fam:?} {i}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip_and_cycle_detection() {
        let d = Poset::diamond();
        let back = Poset::from_json(&d.to_json(10)).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(d.leq(Elem(a), Elem(b)), back.leq(Elem(a), Elem(b)));
            }
        }
        let cyc = Poset::from_covers("c", &["x", "y"], &[("x", "y"), ("y", "x")]);
        assert!(matches!(cyc, Err(PosetError::Cycle(_))));
    }

    #[test]
    fn builtin_tags() {
        assert_eq!(Poset::builtin("rn(2,2)").unwrap().size(), Some(4));
        assert_eq!(Poset::builtin("chain(3)").unwrap().size(), Some(3));
        assert!(Poset::builtin("dyadic").unwrap().family().is_some());
        assert!(Poset::builtin("nope").is_err());
    }
}
