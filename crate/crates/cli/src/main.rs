use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use trimpart::backforth::{
    default_schedule, lift_poset_automorphism, run_backforth, verify_mismatch, BackForthError,
    BackForthRun, Outcome,
};
use trimpart::closure::{
    check_trace, classify_algebra, e_of_p, ladder_dot, render_ladder, rieger_nishimura_run,
    standard_generator, SymbolicSpace,
};
use trimpart::completion::complete;
use trimpart::ring::{verify_structure, verify_type_axioms, DEFAULT_SAMPLES, DEFAULT_SEED};
use trimpart::skeleton::SkeletonError;
use trimpart::{build_levels, validate_config, BuildConfig, Elem, Part, Poset, Split, SubsetSpec, Verdict};

const EXIT_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_MISMATCH: u8 = 4;
const EXIT_EXHAUSTED: u8 = 5;

#[derive(Parser)]
#[command(name = "trimpart", version, about = "Trim partitions, skeleton rings and closure algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Order-theoretic report on a poset.
    Analyze(AnalyzeArgs),
    /// Build a skeleton tree and verify the type-function axioms on it.
    BuildVerify(BuildArgs),
    /// Run back and forth between two skeleton rings.
    Iso(IsoArgs),
    /// Rieger-Nishimura trace of the closure algebra generated by {p0}.
    Closure(ClosureArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Args)]
struct Source {
    /// Poset JSON file.
    file: Option<PathBuf>,
    /// Builtin poset or family tag, e.g. `vee`, `rn(2,0)`, `dyadic`.
    #[arg(long, conflicts_with = "file")]
    family: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 12)]
    horizon: usize,
    /// Comma-separated subset whose finite foundation is reported; repeatable.
    #[arg(long = "subset")]
    subsets: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ConfigArgs {
    /// Isolated elements.
    #[arg(long, default_value = "")]
    isolated: String,
    /// Elements of P^b.
    #[arg(long, default_value = "")]
    pb: String,
    /// Elements of P^u.
    #[arg(long, default_value = "")]
    pu: String,
    /// Elements of P^∞.
    #[arg(long, default_value = "")]
    pinf: String,
    /// Block of every element not listed.
    #[arg(long, value_enum, default_value_t = DefaultPart::Bounded)]
    rest: DefaultPart,
}

#[derive(Copy, Clone, ValueEnum)]
enum DefaultPart {
    Bounded,
    Unbounded,
    Infinite,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct IsoArgs {
    #[command(flatten)]
    source: Source,
    /// The lower set Q = P^b; every other element goes to P^∞.
    #[arg(long)]
    q: String,
    /// Isolated elements on both sides.
    #[arg(long, default_value = "")]
    isolated: String,
    /// Isolated elements on the left, overriding --isolated.
    #[arg(long)]
    isolated_left: Option<String>,
    /// Isolated elements on the right, overriding --isolated.
    #[arg(long)]
    isolated_right: Option<String>,
    /// Lift this poset automorphism instead: images of the elements in order.
    #[arg(long)]
    automorphism: Option<String>,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Levels of atoms fed to the schedule; defaults to depth − 3.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ClosureArgs {
    #[command(flatten)]
    source: Source,
    /// Steps of the recursion; defaults to 30, or |P| + 2 for a finite poset.
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type Exit = Result<u8, Failure>;

fn load(source: &Source) -> Result<Arc<Poset>, Failure> {
    let poset = match (&source.file, &source.family) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
            Poset::parse_json(&text)
        }
        (None, Some(tag)) => Poset::builtin(tag),
        _ => return Err(fail(EXIT_PARSE, "give exactly one of a poset file or --family")),
    };
    poset
        .map(Arc::new)
        .map_err(|e| fail(EXIT_PARSE, e.to_string()))
}

fn elements(poset: &Poset, list: &str) -> Result<BTreeSet<Elem>, Failure> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| poset.element(name).map_err(|e| fail(EXIT_PARSE, e.to_string())))
        .collect()
}

fn names(poset: &Poset, set: impl IntoIterator<Item = Elem>) -> Vec<String> {
    set.into_iter().map(|e| poset.display(e)).collect()
}

fn verdict(poset: &Poset, v: &Verdict) -> Value {
    match v {
        Verdict::Holds => json!({"verdict": "holds"}),
        Verdict::HoldsOnPrefix { horizon } => {
            json!({"verdict": "holds_on_prefix", "horizon": horizon})
        }
        Verdict::Refuted { witness, reason } => json!({
            "verdict": "refuted",
            "witness": names(poset, witness.iter().copied()),
            "reason": reason,
        }),
    }
}

fn verdict_text(v: &Value) -> String {
    let mut s = v["verdict"].as_str().unwrap_or("?").to_string();
    if let Some(h) = v.get("horizon") {
        s.push_str(&format!(" (horizon {h})"));
    }
    if let Some(w) = v.get("witness") {
        s.push_str(&format!(" {w}"));
    }
    s
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn analyze(args: &AnalyzeArgs) -> Exit {
    let poset = load(&args.source)?;
    let h = args.horizon;
    if args.format == Format::Dot {
        let j = poset.to_json(h);
        println!("digraph poset {{\n  rankdir=BT;");
        for name in &j.elements {
            println!("  \"{name}\";");
        }
        for [a, b] in &j.covers {
            println!("  \"{a}\" -> \"{b}\";");
        }
        println!("}}");
        return Ok(0);
    }
    let ext = poset.extremal_elements(h);
    let (delta, delta_exact) = poset.p_delta(h);
    let acc = verdict(&poset, &poset.check_acc(h, trimpart::poset::DEFAULT_ACC_BOUND));
    let omega = verdict(&poset, &poset.check_omega_complete(h));
    let mut foundations = Vec::new();
    for s in &args.subsets {
        let set = elements(&poset, s)?;
        let spec = SubsetSpec::new(set.iter().copied());
        let f = match poset.finite_foundation(&spec, h) {
            Ok(Some(f)) => json!({"subset": names(&poset, set), "foundation": names(&poset, f)}),
            Ok(None) => json!({"subset": names(&poset, set), "foundation": null}),
            Err(e) => json!({"subset": names(&poset, set), "error": e.to_string()}),
        };
        foundations.push(f);
    }
    let completed = complete(&poset, h);
    let completion = json!({
        "size": completed.size(),
        "tokens": completed.tokens().map(|t| t.label.clone()).collect::<Vec<_>>(),
        "unique_suprema": verdict(&poset, &completed.check_unique_suprema(&poset)),
    });
    let report = json!({
        "poset": poset.name(),
        "horizon": h,
        "finite": poset.is_finite(),
        "minimal": names(&poset, ext.minimal.iter().copied()),
        "maximal": names(&poset, ext.maximal.iter().copied()),
        "extremal_exact": ext.exact,
        "p_delta": {"elements": names(&poset, delta), "exact": delta_exact},
        "acc": acc,
        "omega_complete": omega,
        "foundations": foundations,
        "completion": completion,
    });
    match args.format {
        Format::Json => print_json(&report),
        _ => {
            println!("poset     {}", poset.name());
            println!("minimal   {}", report["minimal"]);
            println!("maximal   {}", report["maximal"]);
            println!("P_Δ       {}", report["p_delta"]["elements"]);
            println!("ACC       {}", verdict_text(&report["acc"]));
            println!("ω-complete {}", verdict_text(&report["omega_complete"]));
            for f in &foundations {
                println!("foundation {f}");
            }
            println!(
                "completion {} elements, tokens {}",
                completion["size"], completion["tokens"]
            );
        }
    }
    Ok(0)
}

fn build_config(poset: Arc<Poset>, c: &ConfigArgs) -> Result<BuildConfig, Failure> {
    let default = match c.rest {
        DefaultPart::Bounded => Part::Bounded,
        DefaultPart::Unbounded => Part::Unbounded,
        DefaultPart::Infinite => Part::Infinite,
    };
    let split = Split::all(default)
        .with(elements(&poset, &c.pb)?, Part::Bounded)
        .with(elements(&poset, &c.pu)?, Part::Unbounded)
        .with(elements(&poset, &c.pinf)?, Part::Infinite);
    let isolated = elements(&poset, &c.isolated)?;
    Ok(BuildConfig::bounded(poset)
        .with_isolated(isolated)
        .with_split(split))
}

fn report_violations(cfg: &BuildConfig, depth: usize) -> Result<(), Failure> {
    let violations = validate_config(cfg, depth);
    if violations.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = violations
        .iter()
        .map(|v| format!("{}: {} ({})", v.clause.describe(), v.witness.join(","), v.detail))
        .collect();
    Err(fail(EXIT_INVALID, format!("invalid configuration\n  {}", lines.join("\n  "))))
}

fn skeleton_failure(e: SkeletonError) -> Failure {
    match e {
        SkeletonError::InvalidConfig(_) => fail(EXIT_INVALID, e.to_string()),
        other => fail(EXIT_FAILED, other.to_string()),
    }
}

/// Down-sets `↓p` inside `P^b` for each bounded `p` with a finite down-set.
fn bounded_lower_sets(cfg: &BuildConfig, depth: usize) -> Vec<BTreeSet<Elem>> {
    let poset = &cfg.poset;
    poset
        .prefix(depth)
        .filter(|&p| cfg.part(p) == Part::Bounded)
        .filter(|&p| poset.family().is_none_or(|f| f.down_set_finite(p.0)))
        .map(|p| poset.down_closure(&[p].into(), depth))
        .filter(|d| d.iter().all(|&q| cfg.part(q) == Part::Bounded))
        .collect()
}

fn build_verify(args: &BuildArgs) -> Exit {
    let poset = load(&args.source)?;
    let cfg = build_config(poset.clone(), &args.config)?;
    report_violations(&cfg, args.depth)?;
    let tree = build_levels(&cfg, args.depth).map_err(skeleton_failure)?;
    if args.format == Format::Dot {
        print!("{}", tree.to_dot());
        return Ok(0);
    }
    let axioms = verify_type_axioms(&tree, args.depth, args.samples, args.seed);
    let structure = verify_structure(&tree, &bounded_lower_sets(&cfg, args.depth));
    let passed = axioms.passed && structure.iter().all(|c| c.passed);
    let levels: Vec<usize> = (1..=tree.depth()).map(|n| tree.level_len(n)).collect();
    match args.format {
        Format::Json => print_json(&json!({
            "poset": poset.name(),
            "depth": args.depth,
            "level_sizes": levels,
            "axioms": axioms.to_json(),
            "structure": structure,
            "passed": passed,
        })),
        _ => {
            println!("poset {}  depth {}  level sizes {levels:?}", poset.name(), args.depth);
            for c in axioms.checks.iter().chain(&structure) {
                let mark = if c.passed { "pass" } else { "FAIL" };
                println!("{mark}  {:<40} {} checked", c.name, c.checked);
                if let Some(ce) = &c.counterexample {
                    println!("      {ce}");
                }
            }
            println!("{}", if passed { "all checks pass" } else { "checks failed" });
        }
    }
    Ok(if passed { 0 } else { EXIT_FAILED })
}

fn iso(args: &IsoArgs) -> Exit {
    let poset = load(&args.source)?;
    let q = elements(&poset, &args.q)?;
    let both = elements(&poset, &args.isolated)?;
    let side = |o: &Option<String>| -> Result<BTreeSet<Elem>, Failure> {
        match o {
            Some(list) => elements(&poset, list),
            None => Ok(both.clone()),
        }
    };
    let il = side(&args.isolated_left)?;
    let ir = side(&args.isolated_right)?;
    let mut trees = Vec::new();
    for iso_set in [il, ir] {
        let cfg = BuildConfig::for_lower_set(poset.clone(), q.iter().copied(), iso_set);
        report_violations(&cfg, args.depth)?;
        trees.push(Arc::new(build_levels(&cfg, args.depth).map_err(skeleton_failure)?));
    }
    let right = trees.pop().expect("two trees");
    let left = trees.pop().expect("two trees");
    let bound = args.bound.unwrap_or(args.depth.saturating_sub(3).max(1));
    let result = match &args.automorphism {
        Some(list) => {
            let theta: Vec<Elem> = list
                .split(',')
                .map(|s| poset.element(s.trim()).map_err(|e| fail(EXIT_PARSE, e.to_string())))
                .collect::<Result<_, _>>()?;
            lift_poset_automorphism(left.clone(), &theta, &q, bound, args.seed)
        }
        None => {
            let schedule = default_schedule(&left, &right, bound, args.seed);
            run_backforth(left.clone(), right.clone(), &q, &schedule)
        }
    };
    let run: BackForthRun = match result {
        Ok(run) => run,
        Err(e @ BackForthError::DepthExhausted { .. }) => return Err(fail(EXIT_EXHAUSTED, e.to_string())),
        Err(e @ BackForthError::Precondition(_)) => return Err(fail(EXIT_INVALID, e.to_string())),
        Err(e) => return Err(fail(EXIT_FAILED, e.to_string())),
    };
    let (code, verified) = match &run.outcome {
        Outcome::Iso => {
            let ok = run.transcript.report.as_ref().is_some_and(|r| r.passed);
            (if ok { 0 } else { EXIT_FAILED }, ok)
        }
        Outcome::Mismatch { witness } => (EXIT_MISMATCH, verify_mismatch(&left, &right, witness)),
    };
    match args.format {
        Format::Text => {
            let t = &run.transcript;
            println!("poset {}  Q = {:?}  n0 = {}", t.poset, t.q, t.n0);
            for s in &t.steps {
                println!(
                    "step {:>3} {:?} {:<12} split {} added {} → {} pairs",
                    s.step, s.side, s.case, s.pairs_split, s.pairs_added, s.pairs_after
                );
            }
            match &run.outcome {
                Outcome::Iso => println!("iso with {} pairs, verified {verified}", t.pair_table.len()),
                Outcome::Mismatch { witness } => println!(
                    "mismatch at step {}: {} pieces of type {} demanded, {} available; verified {verified}",
                    witness.step, witness.demanded, witness.type_name, witness.available
                ),
            }
        }
        _ => {
            let mut v = serde_json::to_value(&run.transcript).expect("serializable");
            v["verified"] = json!(verified);
            print_json(&v);
        }
    }
    Ok(code)
}

fn closure(args: &ClosureArgs) -> Exit {
    let poset = load(&args.source)?;
    let max_n = args
        .max_n
        .unwrap_or_else(|| poset.size().map_or(30, |n| n + 2));
    let space = SymbolicSpace::new(poset.clone(), max_n + 1).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
    let a = standard_generator(&space).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
    let trace = rieger_nishimura_run(&space, &a, max_n).map_err(|e| fail(EXIT_FAILED, e.to_string()))?;
    let problems = check_trace(&space, &trace);
    let class = classify_algebra(&trace);
    let e = e_of_p(&space).ok();
    let ok = problems.is_empty() && class.is_ok() && e.as_ref().is_none_or(|e| e.generated);
    match args.format {
        Format::Dot => print!("{}", ladder_dot(&space, &trace)),
        Format::Text => {
            print!("{}", render_ladder(&space, &trace));
            let bs: Vec<String> = trace.steps.iter().map(|s| space.display(&s.b)).collect();
            println!("B-sequence {}", bs.join(", "));
            match &class {
                Ok(c) => println!("Case {}: {}", c.case, c.label),
                Err(err) => println!("classification: {err}"),
            }
            if let Some(e) = &e {
                println!("E(P) generated by {{p0}}: {}", e.generated);
            }
            for p in &problems {
                println!("FAIL {p}");
            }
        }
        Format::Json => print_json(&json!({
            "trace": trace,
            "classification": class.as_ref().ok(),
            "classification_error": class.as_ref().err().map(|e| e.to_string()),
            "e_of_p": e,
            "identity_failures": problems,
        })),
    }
    Ok(if ok { 0 } else { EXIT_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::BuildVerify(a) => build_verify(a),
        Command::Iso(a) => iso(a),
        Command::Closure(a) => closure(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
