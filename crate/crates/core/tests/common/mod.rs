#![allow(dead_code)]

use proptest::prelude::*;
use trimpart::{Elem, Poset};

/// A random partial order on `1..=max` elements: random relations between
/// earlier and later indices, closed under transitivity.
pub fn poset(max: usize) -> impl Strategy<Value = Poset> {
    (1..=max)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), n * n)))
        .prop_map(|(n, bits)| {
            let mut rel = vec![vec![false; n]; n];
            for i in 0..n {
                rel[i][i] = true;
                for j in i + 1..n {
                    rel[i][j] = bits[i * n + j] && bits[j * n + i];
                }
            }
            for m in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if rel[i][m] && rel[m][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
            let names = (0..n).map(|i| format!("x{i}")).collect();
            Poset::from_relation("random".to_string(), names, |i, j| rel[i][j])
        })
}

pub fn elems(poset: &Poset, mask: u32) -> std::collections::BTreeSet<Elem> {
    let n = poset.size().unwrap();
    (0..n).filter(|i| mask >> i & 1 == 1).map(Elem).collect()
}

/// An ascending sequence: each term is `>=` the previous one, picked by the
/// `picks` indices among the candidates.
pub fn ascending(poset: &Poset, start: usize, picks: &[usize]) -> Vec<Elem> {
    let n = poset.size().unwrap();
    let mut seq = vec![Elem(start % n)];
    for &k in picks {
        let cur = *seq.last().unwrap();
        let up: Vec<Elem> = (0..n).map(Elem).filter(|&q| poset.leq(cur, q)).collect();
        seq.push(up[k % up.len()]);
    }
    seq
}
