//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use relfd::cex::{registry, search_law, two_tuple_witness, Scope};
use relfd::fd::{parse_fds, satisfies_algebraic, satisfies_oracle, satisfies_typed, typecheck_join, typecheck_union};
use relfd::infer::derive;
use relfd::query::{eval, rewrite_selfjoin, verify_equiv, Env, QueryExpr};
use relfd::table::{encode_pairs, load_table, pid, proj_fn, AttrSet, Attribute, Row, Scheme, Table};
use relfd::{AttrFd, Carrier, Rel, Value};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn fixture(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect()
}

fn subsets(names: &[&str]) -> Vec<AttrSet> {
    (0..1u32 << names.len())
        .map(|m| (0..names.len()).filter(|i| m >> i & 1 == 1).map(|i| names[i].to_string()).collect())
        .collect()
}

/// Three checkers on every table over a binary 3-attribute scheme.
fn definitions_agree() -> Outcome {
    let start = Instant::now();
    let names = ["A", "B", "C"];
    let s = Scheme::uniform("S", &names, &["0", "1"]).unwrap();
    let all_rows: Vec<Row> = Table::full(s.clone()).unwrap().rows().cloned().collect();
    let sides: Vec<AttrSet> = subsets(&names).into_iter().filter(|x| !x.is_empty()).collect();
    let projs: Vec<Rel> = sides.iter().map(|x| proj_fn(&s, x).unwrap()).collect();
    let mut cases = 0;
    for mask in 0u32..256 {
        let rows = (0..8).filter(|i| mask >> i & 1 == 1).map(|i| all_rows[i].clone());
        let t = Table::new(s.clone(), rows).unwrap();
        let p = pid(&t).unwrap();
        for (xi, x) in sides.iter().enumerate() {
            for (yi, y) in sides.iter().enumerate() {
                let fd = AttrFd { antecedent: x.clone(), consequent: y.clone() };
                let oracle = satisfies_oracle(&t, &fd).unwrap();
                let algebraic = satisfies_algebraic(&t, &fd).unwrap();
                let typed = satisfies_typed(&p, &projs[xi], &projs[yi]).unwrap();
                ensure(oracle == algebraic && oracle == typed, || {
                    format!("{fd} on {t}: oracle {oracle}, algebraic {algebraic}, typed {typed}")
                })?;
                cases += 1;
            }
        }
    }
    ensure(cases == 256 * 49, || format!("{cases} cases"))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!("{cases} table/FD cases, three checkers agree"))
}

fn single_scan() -> QueryExpr {
    QueryExpr::compose(vec![
        QueryExpr::proj("movies", &["Director"]),
        QueryExpr::pid("movies"),
        QueryExpr::converse(QueryExpr::proj("movies", &["Actor"])),
    ])
}

fn unwrap1(v: &Value) -> String {
    match v {
        Value::Tuple(vs) if vs.len() == 1 => vs[0].to_string(),
        other => other.to_string(),
    }
}

/// Self-join elimination on the Movies fixtures.
fn movies_optimization() -> Outcome {
    let start = Instant::now();
    let q = QueryExpr::from_json(&std::fs::read_to_string(fixture("movies_query.json")).unwrap()).unwrap();
    let fds = parse_fds(&std::fs::read_to_string(fixture("movies_fds.txt")).unwrap()).unwrap();
    let rewritten = rewrite_selfjoin(&q, &fds);
    ensure(rewritten == single_scan(), || format!("rewrote to {rewritten}"))?;

    let good = Env::new().with_table(load_table(&fixture("movies.csv"), None).unwrap());
    let lhs = eval(&q, &good).unwrap();
    let rhs = eval(&single_scan(), &good).unwrap();
    ensure(lhs == rhs, || "evaluations differ on the satisfying fixture".into())?;
    let got: BTreeSet<(String, String)> = lhs.pairs().map(|(i, o)| (unwrap1(o), unwrap1(i))).collect();
    let want: BTreeSet<(String, String)> =
        [("d1", "a1"), ("d1", "a2"), ("d2", "a1")].iter().map(|(d, a)| (d.to_string(), a.to_string())).collect();
    ensure(got == want, || format!("{got:?}"))?;

    let bad = load_table(&fixture("movies_violating.csv"), Some(&fixture("movies_schema.json"))).unwrap();
    let w = verify_equiv(&q, &rewritten, &Env::new().with_table(bad)).unwrap();
    let w = w.ok_or("no witness on the violating fixture")?;
    ensure((unwrap1(&w.output), unwrap1(&w.input)) == ("d1".into(), "a2".into()) && w.in_first, || {
        format!("witness {w}")
    })?;
    within(start, Duration::from_secs(1))?;
    Ok("equal on the satisfying fixture; witness (d1,a2) on the violating one".into())
}

/// Exhaustive counter-model search for every registered law.
fn law_suite() -> Outcome {
    let start = Instant::now();
    let scope = Scope::default();
    let mut searched = 0u128;
    for law in registry() {
        let out = search_law(law.name, &scope).map_err(|e| e.to_string())?;
        searched += out.candidates;
        match (&out.witness, law.theorem) {
            (None, true) => {}
            (Some(w), false) => {
                let max = w.assignment.iter().map(|b| b.rel.source().len().max(b.rel.target().len())).max();
                ensure(max <= Some(3), || format!("{}: witness too large", law.name))?;
            }
            (Some(_), true) => return Err(format!("{} refuted", law.name)),
            (None, false) => return Err(format!("{} not refuted", law.name)),
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} theorems hold and the planted law is refuted at carrier size <= 3 ({searched} assignments, {:.1?})",
        registry().iter().filter(|l| l.theorem).count(),
        start.elapsed()
    ))
}

fn attr_names(n: usize) -> Vec<String> {
    ["A", "B", "C", "D", "E"][..n].iter().map(|s| s.to_string()).collect()
}

fn random_set(rng: &mut ChaCha8Rng, names: &[String], p: f64) -> AttrSet {
    names.iter().filter(|_| rng.random_bool(p)).cloned().collect()
}

fn random_fds(rng: &mut ChaCha8Rng, names: &[String], max: usize) -> Vec<AttrFd> {
    let n = rng.random_range(0..=max);
    (0..n)
        .map(|_| AttrFd { antecedent: random_set(rng, names, 0.35), consequent: random_set(rng, names, 0.35) })
        .collect()
}

/// A table over `names` built by keeping only rows that preserve `fds`.
fn random_model(rng: &mut ChaCha8Rng, names: &[String], fds: &[AttrFd]) -> Table {
    let dom = ["0", "1", "2"];
    let s = Scheme::uniform("T", names, &dom).unwrap();
    let width = rng.random_range(2..=3);
    let mut rows: Vec<Row> = Vec::new();
    for _ in 0..rng.random_range(0..=20) {
        let row = Row::atoms(&names.iter().map(|_| dom[rng.random_range(0..width)]).collect::<Vec<_>>());
        let mut next = rows.clone();
        next.push(row);
        let t = Table::new(s.clone(), next.clone()).unwrap();
        if fds.iter().all(|f| satisfies_oracle(&t, f).unwrap()) {
            rows = next;
        }
    }
    Table::new(s, rows).unwrap()
}

/// Everything derivable holds on models of the axioms.
fn armstrong_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut derived, mut rows) = (0usize, 0usize);
    for pair in 0..1000 {
        let names = attr_names(rng.random_range(1..=5));
        let fds = random_fds(&mut rng, &names, 5);
        let t = random_model(&mut rng, &names, &fds);
        rows += t.len();
        for x in subsets(&names.iter().map(String::as_str).collect::<Vec<_>>()) {
            for y in subsets(&names.iter().map(String::as_str).collect::<Vec<_>>()) {
                let goal = AttrFd { antecedent: x.clone(), consequent: y };
                if let Ok(d) = derive(&fds, &goal) {
                    d.verify(&fds).map_err(|e| e.to_string())?;
                    ensure(satisfies_oracle(&t, &goal).unwrap(), || format!("pair {pair}: {goal} fails on\n{t}"))?;
                    derived += 1;
                }
            }
        }
    }
    Ok(format!("1000 pairs, {derived} derived FDs all hold ({rows} rows in total)"))
}

/// Non-derivable exactly when the two-row witness exists.
fn completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7_700_417);
    let mut refuted = 0;
    for i in 0..200 {
        let names = attr_names(rng.random_range(1..=4));
        let fds = random_fds(&mut rng, &names, 4);
        let goal = AttrFd { antecedent: random_set(&mut rng, &names, 0.4), consequent: random_set(&mut rng, &names, 0.5) };
        let witness = two_tuple_witness(&fds, &goal).map_err(|e| e.to_string())?;
        let not_derivable = derive(&fds, &goal).is_err();
        ensure(not_derivable == witness.is_some(), || format!("case {i}: {goal} from {fds:?}"))?;
        if let Some(t) = witness {
            ensure(fds.iter().all(|f| satisfies_oracle(&t, f).unwrap()), || format!("case {i}: witness breaks an axiom"))?;
            ensure(!satisfies_oracle(&t, &goal).unwrap(), || format!("case {i}: witness satisfies the goal"))?;
            refuted += 1;
        }
    }
    Ok(format!("200 cases agree ({refuted} not derivable)"))
}

fn numbered(name: &str, n: usize) -> Arc<Carrier> {
    Carrier::numbered(name, &name.to_lowercase(), n)
}

fn all_relations(a: &Arc<Carrier>, b: &Arc<Carrier>) -> Vec<Rel> {
    let cells = a.len() * b.len();
    (0u32..1 << cells)
        .map(|m| Rel::from_index_pairs(a, b, (0..cells).filter(|i| m >> i & 1 == 1).map(|i| (i / b.len(), i % b.len()))).unwrap())
        .collect()
}

/// One observer per partition of `a`: an FD only sees its observers'
/// kernels, and these realise every kernel.
fn partitions(a: &Arc<Carrier>) -> Vec<Rel> {
    fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            cur.push(b);
            go(n, cur, out);
            cur.pop();
        }
    }
    let mut codes = Vec::new();
    go(a.len(), &mut Vec::new(), &mut codes);
    let d = numbered(&format!("K{}", a.name()), a.len());
    codes.iter().map(|c| Rel::from_index_fn(a, &d, c).unwrap()).collect()
}

/// Union decomposition and join rule over every instance with carriers of
/// size at most 3.
fn union_and_join_rules() -> Outcome {
    let start = Instant::now();
    let sizes = 1..=3;
    let (mut unions, mut joins, mut premised) = (0u64, 0u64, 0u64);
    for na in sizes.clone() {
        let a = numbered("A", na);
        let fs = partitions(&a);
        for nb in sizes.clone() {
            let b = numbered("B", nb);
            let gs = partitions(&b);
            let rels = all_relations(&a, &b);
            for f in &fs {
                for g in &gs {
                    for r in &rels {
                        for s in &rels {
                            let report = typecheck_union(r, s, f, g).map_err(|e| e.to_string())?;
                            let split = report.conjuncts.iter().all(|c| c.holds);
                            let direct = satisfies_typed(&r.union(s).unwrap(), f, g).unwrap();
                            ensure(report.holds == split && split == direct, || format!("union: {r:?} {s:?}"))?;
                            unions += 1;
                        }
                    }
                }
            }
            for nc in sizes.clone() {
                let c = numbered("C", nc);
                let hs = partitions(&c);
                let rels_c = all_relations(&a, &c);
                for f in &fs {
                    // Only instances with both premises true can break the
                    // rule; each premise depends on one relation.
                    let left: Vec<Vec<&Rel>> = gs
                        .iter()
                        .map(|g| rels.iter().filter(|r| satisfies_typed(r, f, g).unwrap()).collect())
                        .collect();
                    let right: Vec<Vec<&Rel>> = hs
                        .iter()
                        .map(|h| rels_c.iter().filter(|s| satisfies_typed(s, f, h).unwrap()).collect())
                        .collect();
                    for (g, rs) in gs.iter().zip(&left) {
                        for (h, ss) in hs.iter().zip(&right) {
                            joins += (rels.len() * rels_c.len()) as u64;
                            for r in rs {
                                for s in ss {
                                    let conclusion = typecheck_join(r, s, f, g, h).map_err(|e| e.to_string())?;
                                    ensure(conclusion, || format!("join: {r:?} {s:?}"))?;
                                    premised += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{unions} union instances match their decomposition; of {joins} join instances, all {premised} with true premises have a true conclusion ({:.1?})",
        start.elapsed()
    ))
}

/// Pair encoding of a ternary table.
fn pairing() -> Outcome {
    let attr = |name: &str, vals: &[&str]| Attribute { name: name.into(), domain: Carrier::atoms(name, vals).unwrap() };
    let s = Scheme::new("T", vec![attr("X", &["a", "d"]), attr("Y", &["b", "e"]), attr("Z", &["c", "f"])]).unwrap();
    let t = Table::new(s, [Row::atoms(&["a", "b", "c"]), Row::atoms(&["d", "e", "f"])]).unwrap();
    let r = encode_pairs(&t).map_err(|e| e.to_string())?;
    let got: Vec<(Value, Value)> = r.pairs().map(|(i, o)| (i.clone(), o.clone())).collect();
    let v = Value::atom;
    let want = vec![(v("a"), Value::pair(v("b"), v("c"))), (v("d"), Value::pair(v("e"), v("f")))];
    ensure(got == want, || format!("{got:?}"))?;
    Ok("{(a,b,c),(d,e,f)} encodes as {(a,(b,c)),(d,(e,f))}".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("AC1 definition equivalence", definitions_agree),
        ("AC2 movies optimization", movies_optimization),
        ("AC3 algebraic law suite", law_suite),
        ("AC4 inference soundness", armstrong_soundness),
        ("AC5 completeness cross-check", completeness),
        ("AC6 union/join type rules", union_and_join_rules),
        ("AC7 pairing", pairing),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg} [{:.2?}]", start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{:.2?}]", start.elapsed());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
