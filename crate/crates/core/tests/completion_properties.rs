mod common;

use proptest::prelude::*;
use trimpart::completion::{chain_closure, complete, complete_finite, interleave};
use trimpart::{Elem, Family, Poset};

proptest! {
    #[test]
    fn interleaving_characterises_equal_closures(
        p in common::poset(6),
        s1 in 0usize..6, a in proptest::collection::vec(0usize..6, 0..5),
        s2 in 0usize..6, b in proptest::collection::vec(0usize..6, 0..5),
    ) {
        let x = common::ascending(&p, s1, &a);
        let y = common::ascending(&p, s2, &b);
        let cx = chain_closure(&p, &x, 6).unwrap();
        let cy = chain_closure(&p, &y, 6).unwrap();
        prop_assert_eq!(cx == cy, interleave(&p, &x, &y));
    }

    #[test]
    fn interleaving_on_the_omega_chain(
        a in proptest::collection::btree_set(0usize..30, 1..8),
        b in proptest::collection::btree_set(0usize..30, 1..8),
    ) {
        let p = Poset::generated(Family::OmegaChain);
        let x: Vec<Elem> = a.into_iter().map(Elem).collect();
        let y: Vec<Elem> = b.into_iter().map(Elem).collect();
        let cx = chain_closure(&p, &x, 32).unwrap();
        let cy = chain_closure(&p, &y, 32).unwrap();
        prop_assert_eq!(cx == cy, interleave(&p, &x, &y));
    }

    #[test]
    fn finite_completions(p in common::poset(6)) {
        let c = complete_finite(&p).unwrap();
        prop_assert!(!c.check_unique_suprema(&p).is_refuted());
        prop_assert!(c.embedding_is_order_embedding(&p));
        prop_assert_eq!(c.token_count(), 0);
    }
}

#[test]
fn family_completions_have_unique_suprema() {
    for fam in Family::ALL {
        let p = Poset::generated(fam);
        let c = complete(&p, 10);
        assert!(!c.check_unique_suprema(&p).is_refuted(), "{}", fam.tag());
        assert!(c.embedding_is_order_embedding(&p), "{}", fam.tag());
    }
}

#[test]
fn not_ascending_is_rejected() {
    let p = Poset::chain(&["a", "b"]);
    assert!(chain_closure(&p, &[Elem(1), Elem(0)], 2).is_err());
}
