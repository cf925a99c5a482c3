//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! to stderr (bypassing output capture) before asserting.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trimpart::backforth::{default_schedule, run_backforth, verify_mismatch, Outcome};
use trimpart::closure::{
    check_trace, classify_algebra, e_of_p, rieger_nishimura_run, standard_generator,
    AlgebraClass, ClosureElement, SymbolicSpace,
};
use trimpart::completion::{complete, complete_finite};
use trimpart::points::{label_prefix, realize_chain, Classification};
use trimpart::ring::{
    type_of, verify_structure, verify_type_axioms, xq_cover, RingElement, CHECK_UPPER_SET,
    DEFAULT_SAMPLES, DEFAULT_SEED,
};
use trimpart::{build_levels, Atom, BuildConfig, Elem, Family, Part, Poset, SkeletonTree, Split};

const DEPTH: usize = 6;
const AXIOM_BUDGET: Duration = Duration::from_secs(60);
const ISO_BUDGET: Duration = Duration::from_secs(30);
const CLOSURE_BUDGET: Duration = Duration::from_secs(5);

fn report(n: u8, name: &str, pass: bool, detail: &str) {
    let mark = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "acceptance [{n}] {name}: {mark} ({detail})");
}

/// The axiom suite: (tag, split, isolated singleton).
fn suite() -> Vec<(&'static str, Part, &'static str)> {
    vec![
        ("chain(2)", Part::Bounded, "c1"),
        ("vee", Part::Bounded, "a"),
        ("diamond", Part::Bounded, "a"),
        ("rn(2,0)", Part::Bounded, "p2"),
        ("rn(2,2)", Part::Bounded, "p4"),
        // No element of P(∞) has a finite down-set, so P_Δ = ∅.
        ("rn-infinity", Part::Infinite, "p1"),
        ("omega-antichain", Part::Bounded, "a1"),
        ("ziegler-fan", Part::Bounded, "r"),
    ]
}

fn suite_trees() -> Vec<(String, SkeletonTree)> {
    let mut out = Vec::new();
    for (tag, part, single) in suite() {
        let poset = Arc::new(Poset::builtin(tag).unwrap());
        let base = BuildConfig::bounded(poset.clone()).with_split(Split::all(part));
        let e = poset.element(single).unwrap();
        for (label, cfg) in [
            (format!("{tag} I=∅"), base.clone()),
            (format!("{tag} I={{{single}}}"), base.with_isolated([e])),
        ] {
            out.push((label, build_levels(&cfg, DEPTH).unwrap()));
        }
    }
    out
}

#[test]
fn type_function_axioms() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut upper_checked = 0;
    let mut upper_bad = Vec::new();
    let trees = suite_trees();
    for (label, tree) in &trees {
        let r = verify_type_axioms(tree, DEPTH, DEFAULT_SAMPLES, DEFAULT_SEED);
        for c in r.checks.iter().filter(|c| !c.passed) {
            failures.push(format!("{label}: {} {:?}", c.name, c.counterexample));
        }
        let up = r.check(CHECK_UPPER_SET).unwrap();
        upper_checked += up.checked;
        if !up.passed {
            upper_bad.push(label.clone());
        }
        // Independent pass over every atom.
        let poset = tree.poset();
        for n in 1..=tree.depth() {
            for i in 0..tree.level_len(n) {
                let t = type_of(tree, &RingElement::atom(tree, Atom::new(n, i)).unwrap());
                upper_checked += 1;
                if !t.is_upper_set_on_prefix(poset, DEPTH + 2) {
                    upper_bad.push(format!("{label} atom {n}.{i}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed <= AXIOM_BUDGET;
    report(
        1,
        "type-function axioms",
        pass,
        &format!(
            "{} configs at depth {DEPTH}, {} failures, {:.1}s of {}s",
            trees.len(),
            failures.len(),
            elapsed.as_secs_f64(),
            AXIOM_BUDGET.as_secs()
        ),
    );
    let up_pass = upper_bad.is_empty();
    report(
        2,
        "upper-set law",
        up_pass,
        &format!("{upper_checked} elements, {} violations", upper_bad.len()),
    );
    assert!(failures.is_empty(), "{failures:#?}");
    assert!(elapsed <= AXIOM_BUDGET, "{elapsed:?}");
    assert!(up_pass, "{upper_bad:#?}");
}

#[test]
fn isolation_counts() {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (label, tree) in suite_trees() {
        let poset = tree.poset();
        let cfg = tree.config();
        for p in poset.prefix(DEPTH) {
            if cfg.is_isolated(p) && poset.is_minimal(p) {
                for n in p.rank()..=DEPTH {
                    checked += 1;
                    let count = tree.level(n).iter().filter(|x| x.ty == p).count();
                    if count != 1 {
                        bad.push(format!("{label}: {count} {}-nodes at level {n}", poset.display(p)));
                    }
                }
            }
            if cfg.is_isolated(p) {
                continue;
            }
            for n in 1..DEPTH {
                for (i, node) in tree.level(n).iter().enumerate() {
                    if node.ty != p {
                        continue;
                    }
                    checked += 1;
                    let kids = tree
                        .children(Atom::new(n, i))
                        .unwrap()
                        .into_iter()
                        .filter(|&c| tree.ty(c) == p)
                        .count();
                    if kids != 2 {
                        bad.push(format!("{label}: {}-node {n}.{i} has {kids}", poset.display(p)));
                    }
                }
            }
        }
        let s = verify_structure(&tree, &[]);
        if !s.iter().find(|c| c.name == "isolation counts").unwrap().passed {
            bad.push(format!("{label}: structural check disagrees"));
        }
    }
    let pass = bad.is_empty();
    report(3, "isolation counts", pass, &format!("{checked} nodes, {} violations", bad.len()));
    assert!(pass, "{bad:#?}");
}

#[test]
fn compactness_encodings() {
    let mut bad = Vec::new();
    let chain = Arc::new(Poset::chain(&["a", "b"]));
    let cfg = BuildConfig::bounded(chain).with_split(Split::all(Part::Bounded).with([Elem(1)], Part::Infinite));
    let tree = build_levels(&cfg, DEPTH).unwrap();
    for n in 3..=DEPTH {
        if !tree.u_nodes(n).any(|(_, x)| x.ty == Elem(1)) {
            bad.push(format!("U_{n} has no b-node"));
        }
    }

    let mut shadows = 0;
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("chain(2)", vec!["c1"]),
        ("chain(2)", vec!["c1", "c2"]),
        ("vee", vec!["a"]),
        ("vee", vec!["a", "b", "c"]),
        ("diamond", vec!["a", "b"]),
        ("diamond", vec!["a", "b", "c"]),
        ("rn(2,2)", vec!["p4", "p2"]),
        ("rn(2,2)", vec!["p4", "p1", "p2", "p0"]),
    ];
    for (tag, q) in cases {
        let poset = Arc::new(Poset::builtin(tag).unwrap());
        let q: BTreeSet<Elem> = q.iter().map(|n| poset.element(n).unwrap()).collect();
        assert_eq!(poset.down_closure(&q, DEPTH), q, "{tag}: Q must be lower");
        let cfg = BuildConfig::for_lower_set(poset.clone(), q.iter().copied(), []);
        let tree = build_levels(&cfg, DEPTH).unwrap();
        let (n0, cover) = xq_cover(&tree, &q).unwrap();
        let f_max = q
            .iter()
            .filter(|&&p| poset.is_minimal(p))
            .map(|p| p.rank())
            .max()
            .unwrap();
        if n0 != f_max {
            bad.push(format!("{tag}: n0 = {n0}, foundation needs {f_max}"));
        }
        for n in n0..=DEPTH {
            for (i, node) in tree.level(n).iter().enumerate() {
                if !q.contains(&node.ty) {
                    continue;
                }
                shadows += 1;
                let a = tree.ancestor(Atom::new(n, i), cover.level()).unwrap();
                if !cover.atoms().contains(&a.index) {
                    bad.push(format!("{tag}: node {n}.{i} outside the cover"));
                }
            }
        }
    }
    let pass = bad.is_empty();
    report(
        4,
        "compactness encodings",
        pass,
        &format!("U-node supply at levels 3..={DEPTH}, {shadows} Q-typed nodes under covers"),
    );
    assert!(pass, "{bad:#?}");
}

#[test]
fn back_and_forth() {
    let start = Instant::now();
    let configs: Vec<(&str, Vec<&str>, Vec<&str>, u64)> = vec![
        ("chain(2)", vec!["c1", "c2"], vec![], 11),
        ("chain(2)", vec!["c1"], vec!["c1"], 12),
        ("vee", vec!["a", "b", "c"], vec!["c"], 13),
        ("diamond", vec!["a", "b"], vec![], 14),
        ("rn(2,0)", vec!["p0", "p1", "p2"], vec!["p1"], 15),
    ];
    let mut bad = Vec::new();
    let mut pairs = 0;
    for (tag, q, i, seed) in configs {
        let poset = Arc::new(Poset::builtin(tag).unwrap());
        let q: BTreeSet<Elem> = q.iter().map(|n| poset.element(n).unwrap()).collect();
        let i: Vec<Elem> = i.iter().map(|n| poset.element(n).unwrap()).collect();
        let cfg = BuildConfig::for_lower_set(poset, q.iter().copied(), i);
        let left = Arc::new(build_levels(&cfg, DEPTH).unwrap());
        let right = Arc::new(build_levels(&cfg, DEPTH).unwrap());
        let schedule = default_schedule(&left, &right, DEPTH - 3, seed);
        match run_backforth(left, right, &q, &schedule) {
            Ok(run) => {
                let r = run.transcript.report.unwrap();
                pairs += r.pairs;
                if !matches!(run.outcome, Outcome::Iso) || !r.passed {
                    bad.push(format!("{tag}: {:?}", r.failures));
                }
                if !(r.bijective && r.type_matched && r.supertrim) {
                    bad.push(format!("{tag}: pair table not clean"));
                }
            }
            Err(e) => bad.push(format!("{tag}: {e}")),
        }
    }

    let poset = Arc::new(Poset::chain(&["a", "b"]));
    let q: BTreeSet<Elem> = [Elem(0), Elem(1)].into();
    let l = BuildConfig::for_lower_set(poset.clone(), q.iter().copied(), [Elem(0)]);
    let r = BuildConfig::for_lower_set(poset, q.iter().copied(), []);
    let left = Arc::new(build_levels(&l, DEPTH).unwrap());
    let right = Arc::new(build_levels(&r, DEPTH).unwrap());
    let schedule = default_schedule(&left, &right, DEPTH - 3, 0);
    let mismatch = match run_backforth(left.clone(), right.clone(), &q, &schedule) {
        Ok(run) => match run.outcome {
            Outcome::Mismatch { witness } => verify_mismatch(&left, &right, &witness),
            Outcome::Iso => false,
        },
        Err(_) => false,
    };
    if !mismatch {
        bad.push("isolation mismatch not witnessed".into());
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed <= ISO_BUDGET;
    report(
        5,
        "back-and-forth",
        pass,
        &format!(
            "5 seeded pairs, {pairs} verified pairs, mismatch witnessed: {mismatch}, {:.1}s of {}s",
            elapsed.as_secs_f64(),
            ISO_BUDGET.as_secs()
        ),
    );
    assert!(bad.is_empty(), "{bad:#?}");
    assert!(elapsed <= ISO_BUDGET);
}

fn random_poset(rng: &mut ChaCha8Rng, k: usize) -> Poset {
    let n = rng.gen_range(1..=6);
    let mut rel = vec![vec![false; n]; n];
    for (i, row) in rel.iter_mut().enumerate() {
        row[i] = true;
        for cell in row.iter_mut().skip(i + 1) {
            *cell = rng.gen_bool(0.35);
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
    Poset::from_relation(format!("random-{k}"), names, |i, j| rel[i][j])
}

/// Chain-closures of all non-empty chains, by brute force over subsets.
fn chain_closures(poset: &Poset) -> BTreeSet<BTreeSet<usize>> {
    let n = poset.size().unwrap();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let chain = s
            .iter()
            .all(|&a| s.iter().all(|&b| poset.comparable(Elem(a), Elem(b))));
        if chain {
            out.insert(
                (0..n)
                    .filter(|&q| s.iter().any(|&p| poset.leq(Elem(q), Elem(p))))
                    .collect(),
            );
        }
    }
    out
}

#[test]
fn chain_completion() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c6f_6e67);
    let mut bad = Vec::new();
    for k in 0..100 {
        let poset = random_poset(&mut rng, k);
        let n = poset.size().unwrap();
        let closures = chain_closures(&poset);
        let principal: BTreeSet<BTreeSet<usize>> = (0..n)
            .map(|p| (0..n).filter(|&q| poset.leq(Elem(q), Elem(p))).collect())
            .collect();
        if closures != principal {
            bad.push(format!("{}: oracle finds a non-principal closure", poset.name()));
        }
        let c = complete_finite(&poset).unwrap();
        let iso = c.size() == n
            && c.token_count() == 0
            && c.embedding_is_order_embedding(&poset)
            && (0..n).all(|i| (0..n).all(|j| c.leq(c.embedding[i], c.embedding[j]) == poset.leq(Elem(i), Elem(j))));
        if !iso {
            bad.push(format!("{}: completion is not P", poset.name()));
        }
    }
    let omega = complete(&Poset::generated(Family::OmegaChain), 10);
    if omega.token_count() != 1 {
        bad.push(format!("omega-chain: {} tokens", omega.token_count()));
    }
    let two = complete(&Poset::generated(Family::TwoChains), 10);
    if two.token_count() != 2 {
        bad.push(format!("two-chains: {} tokens", two.token_count()));
    }
    let pass = bad.is_empty();
    report(
        6,
        "chain completion",
        pass,
        &format!(
            "100 random posets, omega-chain +{}, two-chains {} tokens",
            omega.token_count(),
            two.token_count()
        ),
    );
    assert!(pass, "{bad:#?}");
}

#[test]
fn rieger_nishimura() {
    const MAX_N: usize = 30;
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut spaces = 0;
    for m in 0..=10 {
        for tail in [false, true] {
            let poset = Arc::new(Poset::rn(m, tail));
            let space = SymbolicSpace::new(poset, MAX_N + 1).unwrap();
            let trace = rieger_nishimura_run(&space, &standard_generator(&space).unwrap(), MAX_N).unwrap();
            spaces += 1;
            let name = space.poset().name().to_string();
            for p in check_trace(&space, &trace) {
                bad.push(format!("{name}: {p}"));
            }
            let want = if tail {
                AlgebraClass::FiniteWithTail { m }
            } else {
                AlgebraClass::Finite { m }
            };
            match classify_algebra(&trace) {
                Ok(c) if c.class == want => {}
                other => bad.push(format!("{name}: classified {other:?}")),
            }
            for k in 0..=MAX_N {
                let expect = match space.p(k) {
                    Some(i) => ClosureElement::singleton(i),
                    None => ClosureElement::empty(),
                };
                if trace.b(k) != &expect {
                    bad.push(format!("{name}: B_{k} = {}", space.display(trace.b(k))));
                }
            }
            let e = e_of_p(&space).unwrap();
            if !e.generated {
                bad.push(format!("{name}: E(P) not generated by {{p0}}"));
            }
        }
    }
    for (family, want) in [
        (Family::RnInfinity, AlgebraClass::Infinity),
        (Family::RnInfinityBot, AlgebraClass::InfinityWithBottom),
    ] {
        let space = SymbolicSpace::new(Arc::new(Poset::generated(family)), MAX_N + 1).unwrap();
        let trace = rieger_nishimura_run(&space, &standard_generator(&space).unwrap(), MAX_N).unwrap();
        spaces += 1;
        for p in check_trace(&space, &trace) {
            bad.push(format!("{}: {p}", family.tag()));
        }
        match classify_algebra(&trace) {
            Ok(c) if c.class == want => {}
            other => bad.push(format!("{}: classified {other:?}", family.tag())),
        }
        for k in 0..=MAX_N {
            if trace.b(k) != &ClosureElement::singleton(space.p(k).unwrap()) {
                bad.push(format!("{}: B_{k} = {}", family.tag(), space.display(trace.b(k))));
            }
        }
        if family == Family::RnInfinity {
            let e = e_of_p(&space).unwrap();
            let covered = e.steps.iter().map(|s| s.k).max();
            if !e.generated || covered != Some(space.horizon() - 2) {
                bad.push(format!("P(∞): identity up to {covered:?}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = bad.is_empty() && elapsed <= CLOSURE_BUDGET;
    report(
        7,
        "Rieger-Nishimura",
        pass,
        &format!(
            "{spaces} spaces to n = {MAX_N}, {} failures, {:.2}s of {}s",
            bad.len(),
            elapsed.as_secs_f64(),
            CLOSURE_BUDGET.as_secs()
        ),
    );
    assert!(bad.is_empty(), "{bad:#?}");
    assert!(elapsed <= CLOSURE_BUDGET);
}

#[test]
fn dyadic_shadow() {
    let poset = Arc::new(Poset::generated(Family::Dyadic));
    let tree = build_levels(&BuildConfig::bounded(poset.clone()), DEPTH).unwrap();
    let axioms = verify_type_axioms(&tree, DEPTH, DEFAULT_SAMPLES, DEFAULT_SEED);
    let chain: Vec<Elem> = ["1/2", "3/4", "7/8"]
        .iter()
        .map(|n| poset.element(n).unwrap())
        .collect();
    let path = realize_chain(&tree, &chain).unwrap();
    let label = label_prefix(&tree, &path, &complete(&poset, 12));
    let limit = label.classification == Classification::Limit;
    let token = label.label.as_deref() == Some("lim→1⁻");
    let pass = axioms.passed && limit && token;
    report(
        8,
        "dyadic shadow",
        pass,
        &format!(
            "axioms {}, 1/2,3/4,7/8 labelled {:?} {:?}",
            if axioms.passed { "pass" } else { "fail" },
            label.classification,
            label.label
        ),
    );
    assert!(pass);
}
