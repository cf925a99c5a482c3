//! Chain completion of countable posets and completion over a subset.
//!
//! Every element of the chain completion is the chain-closure of an
//! ascending sequence: either `↓p` for some `p` or the union of the down-sets
//! of a sequence without a supremum. Base elements are kept as themselves;
//! limits of the analytically known sequences of a family become tokens.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::poset::{Elem, KnownLimit, Poset, PosetJson, Verdict};

/// How many terms of a generating sequence are consulted when comparing a
/// limit token with other carrier elements.
pub const LIMIT_TERMS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("sequence is not ascending at position {0}")]
    NotAscending(usize),
    #[error("element index {0} is outside the poset")]
    UnknownElement(usize),
    #[error("complete_finite needs a finite poset")]
    NotFinite,
}

/// The supremum of an ascending sequence that the poset itself lacks (or,
/// for `lim→1⁻`, one kept apart from the poset's own supremum).
#[derive(Clone, Debug, Serialize)]
pub struct LimitToken {
    pub label: String,
    /// First terms of the generating sequence.
    pub seq_prefix: Vec<Elem>,
    /// The supremum of the sequence inside the poset, if any.
    pub sup_in_poset: Option<Elem>,
    #[serde(skip)]
    term: fn(usize) -> Elem,
}

impl LimitToken {
    fn from_known(lim: &KnownLimit) -> LimitToken {
        LimitToken {
            label: lim.label.clone(),
            seq_prefix: (0..3).map(lim.term).collect(),
            sup_in_poset: lim.sup_in_poset,
            term: lim.term,
        }
    }

    pub fn terms(&self, n: usize) -> impl Iterator<Item = Elem> + '_ {
        (0..n).map(self.term)
    }

    /// Whether the strictly increasing `seq` keeps pace with the generating
    /// sequence: `seq[i] >= p_i` and every term stays strictly below some `p_n`.
    pub fn matches_chain(&self, poset: &Poset, seq: &[Elem]) -> bool {
        let terms: Vec<Elem> = self.terms(LIMIT_TERMS).collect();
        !seq.is_empty()
            && seq.len() < LIMIT_TERMS
            && seq.windows(2).all(|w| poset.lt(w[0], w[1]))
            && seq.iter().zip(&terms).all(|(&s, &t)| poset.leq(t, s))
            && seq.iter().all(|&s| terms.iter().any(|&t| poset.lt(s, t)))
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompletionElement {
    Base { element: Elem },
    Limit { token: LimitToken },
}

impl CompletionElement {
    pub fn base(&self) -> Option<Elem> {
        match self {
            CompletionElement::Base { element } => Some(*element),
            CompletionElement::Limit { .. } => None,
        }
    }

    pub fn token(&self) -> Option<&LimitToken> {
        match self {
            CompletionElement::Limit { token } => Some(token),
            CompletionElement::Base { .. } => None,
        }
    }
}

/// A completion truncated to `P_horizon` plus its limit tokens.
#[derive(Clone, Debug)]
pub struct CompletedPoset {
    pub name: String,
    pub elements: Vec<CompletionElement>,
    pub names: Vec<String>,
    leq: Vec<Vec<bool>>,
    /// `embedding[i]` is the carrier index of base element `Elem(i)`.
    pub embedding: Vec<usize>,
    pub horizon: usize,
}

/// `{q ∈ P_horizon | q <= p_n for some n}` for an ascending `seq`.
pub fn chain_closure(
    poset: &Poset,
    seq: &[Elem],
    horizon: usize,
) -> Result<BTreeSet<Elem>, CompletionError> {
    for &s in seq {
        if !poset.contains(s) {
            return Err(CompletionError::UnknownElement(s.0));
        }
    }
    if let Some(i) = seq.windows(2).position(|w| !poset.leq(w[0], w[1])) {
        return Err(CompletionError::NotAscending(i + 1));
    }
    Ok(poset.down_closure(&seq.iter().copied().collect(), horizon))
}

/// Each term of `a` is below some term of `b` and vice versa.
pub fn interleave(poset: &Poset, a: &[Elem], b: &[Elem]) -> bool {
    let covered = |x: &[Elem], y: &[Elem]| x.iter().all(|&s| y.iter().any(|&t| poset.leq(s, t)));
    covered(a, b) && covered(b, a)
}

fn carrier_leq(poset: &Poset, x: &CompletionElement, y: &CompletionElement) -> bool {
    use CompletionElement::*;
    match (x, y) {
        (Base { element: p }, Base { element: q }) => poset.leq(*p, *q),
        (Base { element: p }, Limit { token }) => token.terms(LIMIT_TERMS).any(|t| poset.leq(*p, t)),
        (Limit { token }, Base { element: p }) => token.terms(LIMIT_TERMS).all(|t| poset.leq(t, *p)),
        (Limit { token: s }, Limit { token: t }) => {
            let ts: Vec<Elem> = t.terms(LIMIT_TERMS).collect();
            s.terms(LIMIT_TERMS).all(|a| ts.iter().any(|&b| poset.leq(a, b)))
        }
    }
}

fn assemble(poset: &Poset, horizon: usize, tokens: Vec<LimitToken>) -> CompletedPoset {
    let mut elements: Vec<CompletionElement> = poset
        .prefix(horizon)
        .map(|element| CompletionElement::Base { element })
        .collect();
    let embedding = (0..elements.len()).collect();
    let mut kept: Vec<LimitToken> = Vec::new();
    for tok in tokens {
        // Interleaving sequences describe the same element.
        let dup = kept.iter().any(|k| {
            let a: Vec<Elem> = k.terms(LIMIT_TERMS).collect();
            let b: Vec<Elem> = tok.terms(LIMIT_TERMS).collect();
            interleave(poset, &a, &b)
        });
        if !dup {
            kept.push(tok);
        }
    }
    elements.extend(kept.into_iter().map(|token| CompletionElement::Limit { token }));
    let leq = elements
        .iter()
        .map(|x| elements.iter().map(|y| carrier_leq(poset, x, y)).collect())
        .collect();
    let names = elements
        .iter()
        .map(|e| match e {
            CompletionElement::Base { element } => poset.display(*element),
            CompletionElement::Limit { token } => format!(
                "lim({},…)",
                poset.display_set(&token.seq_prefix).join(",")
            ),
        })
        .collect();
    CompletedPoset {
        name: format!("{}-completion", poset.name()),
        elements,
        names,
        leq,
        embedding,
        horizon,
    }
}

/// The chain completion of a finite poset. Every ascending sequence
/// stabilises, so each chain-closure is `↓p` and the carrier is a copy of P.
pub fn complete_finite(poset: &Poset) -> Result<CompletedPoset, CompletionError> {
    let n = poset.size().ok_or(CompletionError::NotFinite)?;
    Ok(assemble(poset, n, Vec::new()))
}

/// `P_horizon` together with the suprema of the known ascending sequences
/// whose terms lie in `in_q` and that gain a new element.
pub fn complete_over(
    poset: &Poset,
    in_q: impl Fn(Elem) -> bool,
    horizon: usize,
) -> CompletedPoset {
    let tokens = poset
        .family()
        .map(|fam| fam.known_limits())
        .unwrap_or_default()
        .iter()
        .filter(|lim| lim.adds_token && (0..LIMIT_TERMS).map(lim.term).all(&in_q))
        .map(LimitToken::from_known)
        .collect();
    assemble(poset, horizon, tokens)
}

/// Completion of the poset over itself.
pub fn complete(poset: &Poset, horizon: usize) -> CompletedPoset {
    complete_over(poset, |_| true, horizon)
}

impl CompletedPoset {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn tokens(&self) -> impl Iterator<Item = &LimitToken> {
        self.elements.iter().filter_map(|e| e.token())
    }

    pub fn token_count(&self) -> usize {
        self.tokens().count()
    }

    /// The carrier as a finite poset (names as in the JSON export).
    pub fn as_poset(&self) -> Poset {
        Poset::from_relation(self.name.clone(), self.names.clone(), |i, j| self.leq[i][j])
    }

    pub fn to_json(&self) -> PosetJson {
        self.as_poset().to_json(usize::MAX)
    }

    /// Embedding preserves and reflects the order.
    pub fn embedding_is_order_embedding(&self, poset: &Poset) -> bool {
        let els: Vec<Elem> = poset.prefix(self.horizon).collect();
        els.iter().all(|&p| {
            els.iter().all(|&q| {
                poset.leq(p, q) == self.leq(self.embedding[p.0], self.embedding[q.0])
            })
        })
    }

    /// Every ascending chain has exactly one least upper bound: exhaustive
    /// over the finite chains of the carrier, and over the generating
    /// sequence of every token (whose upper bounds are decided analytically).
    pub fn check_unique_suprema(&self, poset: &Poset) -> Verdict {
        let carrier = self.as_poset();
        if self.size() <= 16 {
            for chain in carrier.finite_chains() {
                if carrier.supremum(&chain, usize::MAX).is_none() {
                    return Verdict::refuted(chain, "carrier chain without a unique supremum");
                }
            }
        }
        let limits = poset.family().map(|f| f.known_limits()).unwrap_or_default();
        for lim in &limits {
            let terms: Vec<Elem> = (0..LIMIT_TERMS).map(lim.term).collect();
            let uppers: Vec<usize> = (0..self.size())
                .filter(|&u| {
                    terms.iter().all(|&t| {
                        carrier_leq(
                            poset,
                            &CompletionElement::Base { element: t },
                            &self.elements[u],
                        )
                    })
                })
                .collect();
            let least: Vec<usize> = uppers
                .iter()
                .copied()
                .filter(|&u| uppers.iter().all(|&v| self.leq(u, v)))
                .collect();
            // A sequence whose supremum lies beyond the horizon has no upper
            // bound in the carrier; that is a truncation effect, not a failure.
            if uppers.is_empty() {
                continue;
            }
            if least.len() != 1 {
                return Verdict::refuted(
                    terms.into_iter().take(3).collect(),
                    format!("sequence {} has {} least upper bounds", lim.label, least.len()),
                );
            }
        }
        if poset.is_finite() {
            Verdict::Holds
        } else {
            Verdict::HoldsOnPrefix {
                horizon: self.horizon,
            }
        }
    }

    /// For a token `q` with sequence `p_n`: every `r ∈ P_horizon` with
    /// `r < q` is below some `p_n`.
    pub fn check_property5(&self, poset: &Poset) -> Verdict {
        for (i, e) in self.elements.iter().enumerate() {
            let Some(tok) = e.token() else { continue };
            for r in poset.prefix(self.horizon) {
                let ri = self.embedding[r.0];
                if self.leq(ri, i) && !tok.terms(LIMIT_TERMS).any(|t| poset.leq(r, t)) {
                    return Verdict::refuted(vec![r], format!("below {} but below no term", tok.label));
                }
            }
        }
        if poset.is_finite() {
            Verdict::Holds
        } else {
            Verdict::HoldsOnPrefix {
                horizon: self.horizon,
            }
        }
    }

    /// The token whose sequence the ascending `seq` follows, if any.
    pub fn token_for_chain(&self, poset: &Poset, seq: &[Elem]) -> Option<&LimitToken> {
        self.tokens().find(|t| t.matches_chain(poset, seq))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Family;

    #[test]
    fn chain_closure_examples() {
        let c = Poset::chain(&["a", "b"]);
        let a = chain_closure(&c, &[Elem(0), Elem(0)], 2).unwrap();
        assert_eq!(a, BTreeSet::from([Elem(0)]));

        let w = Poset::generated(Family::OmegaChain);
        let seq: Vec<Elem> = (0..8).map(Elem).collect();
        assert_eq!(chain_closure(&w, &seq, 8).unwrap().len(), 8);

        let d = Poset::generated(Family::Dyadic);
        let seq = [Elem(2), Elem(3), Elem(5)];
        let cl = chain_closure(&d, &seq, 12).unwrap();
        let top = d.down_closure(&BTreeSet::from([Elem(1)]), 12);
        assert!(!cl.contains(&Elem(1)));
        assert_ne!(cl, top);

        assert_eq!(
            chain_closure(&c, &[Elem(1), Elem(0)], 2),
            Err(CompletionError::NotAscending(1))
        );
    }

    #[test]
    fn finite_completion_is_a_copy() {
        for p in [Poset::diamond(), Poset::chain(&["x"]), Poset::rn(2, true)] {
            let c = complete_finite(&p).unwrap();
            assert_eq!(c.size(), p.size().unwrap());
            assert_eq!(c.token_count(), 0);
            assert!(c.embedding_is_order_embedding(&p));
            assert_eq!(c.check_unique_suprema(&p), Verdict::Holds);
        }
        assert_eq!(
            complete_finite(&Poset::generated(Family::OmegaChain)).unwrap_err(),
            CompletionError::NotFinite
        );
    }

    #[test]
    fn countable_completions() {
        let w = Poset::generated(Family::OmegaChain);
        let c = complete(&w, 8);
        assert_eq!(c.token_count(), 1);
        assert_eq!(c.size(), 9);
        let top = c.size() - 1;
        assert!((0..8).all(|i| c.leq(i, top) && !c.leq(top, i)));
        assert!(c.names[top].starts_with("lim(p1,p2,p3"));
        assert!(!c.check_unique_suprema(&w).is_refuted());
        assert!(!c.check_property5(&w).is_refuted());

        let two = Poset::generated(Family::TwoChains);
        let c = complete(&two, 10);
        let labels: Vec<&str> = c.tokens().map(|t| t.label.as_str()).collect();
        assert_eq!(labels, ["r", "s"]);
        let (r, s) = (c.size() - 2, c.size() - 1);
        assert!(!c.leq(r, s) && !c.leq(s, r));

        let side = Poset::generated(Family::ChainWithSide);
        assert_eq!(complete(&side, 10).token_count(), 0);

        let anti = Poset::generated(Family::OmegaAntichain);
        assert_eq!(complete(&anti, 10).token_count(), 0);
    }

    #[test]
    fn dyadic_token_sits_below_one() {
        let d = Poset::generated(Family::Dyadic);
        let c = complete(&d, 12);
        let tok = c.tokens().next().unwrap();
        assert_eq!(tok.label, "lim→1⁻");
        assert_eq!(tok.sup_in_poset, Some(Elem(1)));
        let t = c.size() - 1;
        assert!(c.leq(t, c.embedding[1]));
        assert!(!c.leq(c.embedding[1], t));
        assert!(c.leq(c.embedding[5], t));
        assert!(!c.check_unique_suprema(&d).is_refuted());
        assert!(c
            .token_for_chain(&d, &[Elem(2), Elem(3), Elem(5)])
            .is_some());
        assert!(c.token_for_chain(&d, &[Elem(0), Elem(4)]).is_none());
    }

    #[test]
    fn over_a_subset_without_the_sequence() {
        let w = Poset::generated(Family::OmegaChain);
        let c = complete_over(&w, |e| e.0 < 5, 8);
        assert_eq!(c.token_count(), 0);
    }

    #[test]
    fn interleaving() {
        let w = Poset::generated(Family::OmegaChain);
        let evens: Vec<Elem> = (0..5).map(|k| Elem(2 * k)).collect();
        let odds: Vec<Elem> = (0..5).map(|k| Elem(2 * k + 1)).collect();
        assert!(!interleave(&w, &evens, &odds));
        let mut longer = evens.clone();
        longer.push(Elem(10));
        assert!(interleave(&w, &longer, &[Elem(1), Elem(10)]));
    }
}
