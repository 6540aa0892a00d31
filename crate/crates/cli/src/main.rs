use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use relfd::cex::{registry, sample_law, search_law, search_tables, LawWitness, Scope, DEFAULT_CAP};
use relfd::fd::{parse_fds, satisfies_algebraic, satisfies_oracle, satisfies_typed, violation};
use relfd::infer::{attr_closure, check_fds, derive};
use relfd::query::{eval, rewrite_selfjoin_traced, verify_equiv, Env, QueryExpr};
use relfd::table::{load_table, pid, proj_fn, write_csv, AttrSet, Table};
use relfd::{AttrFd, Error};

const HOLDS: u8 = 0;
const REFUTED: u8 = 1;
const INPUT_ERROR: u8 = 2;
const INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "relfd", version, about = "Functional dependencies checked, derived and refuted over finite relations")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check each FD against a table with every checker.
    Check {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        fds: PathBuf,
    },
    /// Attribute closure of a set under the FDs.
    Closure {
        #[arg(long)]
        fds: PathBuf,
        /// Attributes, separated by spaces or commas.
        #[arg(long, allow_hyphen_values = true)]
        attrs: String,
    },
    /// Derivation of a goal FD, or why there is none.
    Derive {
        #[arg(long)]
        fds: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        goal: String,
    },
    /// Smallest table satisfying the FDs but not the goal.
    Cex {
        #[arg(long)]
        fds: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        goal: String,
        #[command(flatten)]
        scope: ScopeArgs,
    },
    /// Self-join elimination, verified on a table when one is given.
    Optimize {
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        fds: PathBuf,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
    /// Search the registered relation-algebra laws for counter-models.
    Laws {
        /// Only this law; all when omitted.
        #[arg(long)]
        law: Option<String>,
        #[command(flatten)]
        scope: ScopeArgs,
        /// Random assignments per law instead of exhaustive search.
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    table: PathBuf,
    /// JSON sidecar naming the scheme and declaring domains.
    #[arg(long)]
    schema: Option<PathBuf>,
}

#[derive(Args)]
struct ScopeArgs {
    #[arg(long, default_value_t = 4)]
    scope_rows: usize,
    /// Domain sizes per attribute, comma separated; the last repeats.
    #[arg(long, default_value = "2", value_delimiter = ',')]
    scope_dom: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    scope_carrier: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
}

impl ScopeArgs {
    fn scope(&self) -> relfd::Result<Scope> {
        Ok(Scope::new(self.scope_rows, self.scope_dom.clone(), self.scope_carrier)?.with_cap(self.cap))
    }
}

/// Outcome of a command: exit code plus text and JSON renderings.
struct Report {
    code: u8,
    text: String,
    json: Json,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let _ = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("json"))
            } else {
                write!(out, "{}", report.text)
            };
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, Error::Internal(_)) { INTERNAL } else { INPUT_ERROR })
        }
    }
}

fn run(cli: &Cli) -> relfd::Result<Report> {
    match &cli.cmd {
        Cmd::Check { table, fds } => cmd_check(&load(&table.table, table.schema.as_deref())?, &read_fds(fds)?),
        Cmd::Closure { fds, attrs } => cmd_closure(&read_fds(fds)?, &parse_attrs(attrs)?),
        Cmd::Derive { fds, goal } => cmd_derive(&read_fds(fds)?, &goal.parse()?),
        Cmd::Cex { fds, goal, scope } => cmd_cex(&read_fds(fds)?, &goal.parse()?, &scope.scope()?),
        Cmd::Optimize { query, fds, table, schema } => {
            let q = QueryExpr::from_json(&read(query)?)?;
            let t = table.as_deref().map(|p| load(p, schema.as_deref())).transpose()?;
            cmd_optimize(&q, &read_fds(fds)?, t)
        }
        Cmd::Laws { law, scope, samples } => cmd_laws(law.as_deref(), &scope.scope()?, *samples, cli.seed),
    }
}

fn read(path: &Path) -> relfd::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_fds(path: &Path) -> relfd::Result<Vec<AttrFd>> {
    parse_fds(&read(path)?).map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", path.display()) },
        other => other,
    })
}

fn load(path: &Path, schema: Option<&Path>) -> relfd::Result<Table> {
    load_table(path, schema).map_err(|e| match e {
        Error::Io(msg) => Error::Io(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn parse_attrs(s: &str) -> relfd::Result<AttrSet> {
    Ok(format!("{s} ->").parse::<AttrFd>()?.antecedent)
}

fn names(set: &AttrSet) -> Vec<&str> {
    set.iter().map(String::as_str).collect()
}

fn row_strings(row: &relfd::Row) -> Vec<String> {
    row.values().iter().map(ToString::to_string).collect()
}

fn table_json(t: &Table) -> Json {
    json!({
        "attributes": t.scheme().attribute_names().collect::<Vec<_>>(),
        "rows": t.rows().map(row_strings).collect::<Vec<_>>(),
    })
}

fn table_csv(t: &Table) -> relfd::Result<String> {
    let mut buf = Vec::new();
    write_csv(t, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// A checker verdict; `None` when the relations would not fit in memory.
fn bounded(r: relfd::Result<bool>) -> relfd::Result<Option<bool>> {
    match r {
        Ok(b) => Ok(Some(b)),
        Err(Error::ResourceExceeded { what, needed, limit }) => {
            log::warn!("checker skipped: {what} needs {needed}, limit {limit}");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn verdict_json(v: Option<bool>) -> Json {
    v.map_or(json!("skipped"), Json::Bool)
}

fn cmd_check(t: &Table, fds: &[AttrFd]) -> relfd::Result<Report> {
    check_fds(t.scheme(), fds)?;
    let mut text = String::new();
    let mut results = Vec::new();
    let mut code = HOLDS;
    for fd in fds {
        let oracle = satisfies_oracle(t, fd)?;
        let algebraic = bounded(satisfies_algebraic(t, fd))?;
        let typed = bounded((|| {
            let s = t.scheme();
            satisfies_typed(&pid(t)?, &proj_fn(s, &fd.antecedent)?, &proj_fn(s, &fd.consequent)?)
        })())?;
        let agree = [algebraic, typed].iter().flatten().all(|&v| v == oracle);
        let witness = violation(t, fd)?;
        let skipped = if algebraic.is_none() || typed.is_none() { " (algebraic checkers skipped)" } else { "" };
        if !agree {
            code = INTERNAL;
            text += &format!(
                "{fd}: CHECKERS DISAGREE oracle={oracle} algebraic={} typed={}\n",
                verdict_json(algebraic),
                verdict_json(typed)
            );
        } else if let Some((a, b)) = &witness {
            code = code.max(REFUTED);
            text += &format!("{fd}: fails{skipped}\n  {a}\n  {b}\n");
        } else {
            text += &format!("{fd}: holds{skipped}\n");
        }
        results.push(json!({
            "fd": fd,
            "holds": oracle,
            "checkers": {"oracle": oracle, "algebraic": verdict_json(algebraic), "typed": verdict_json(typed)},
            "agree": agree,
            "witness": witness.map(|(a, b)| vec![row_strings(&a), row_strings(&b)]),
        }));
    }
    Ok(Report { code, text, json: json!({"table": t.name(), "results": results}) })
}

fn cmd_closure(fds: &[AttrFd], attrs: &AttrSet) -> relfd::Result<Report> {
    let closure = attr_closure(fds, attrs);
    Ok(Report {
        code: HOLDS,
        text: format!("{}\n", names(&closure).join(" ")),
        json: json!({"attrs": names(attrs), "closure": names(&closure)}),
    })
}

fn cmd_derive(fds: &[AttrFd], goal: &AttrFd) -> relfd::Result<Report> {
    Ok(match derive(fds, goal) {
        Ok(d) => {
            d.verify(fds).map_err(|e| Error::Internal(format!("derived an invalid proof: {e}")))?;
            Report { code: HOLDS, text: d.to_string(), json: serde_json::to_value(&d)? }
        }
        Err(nd) => Report {
            code: REFUTED,
            text: format!("{nd}\nclosure: {}\n", names(&nd.closure).join(" ")),
            json: json!({"goal": goal, "derivable": false, "closure": names(&nd.closure)}),
        },
    })
}

fn cmd_cex(fds: &[AttrFd], goal: &AttrFd, scope: &Scope) -> relfd::Result<Report> {
    Ok(match search_tables(fds, goal, scope)? {
        Some(t) => Report {
            code: REFUTED,
            text: table_csv(&t)?,
            json: json!({"goal": goal, "witness": table_json(&t)}),
        },
        None => Report {
            code: HOLDS,
            text: "none\n".into(),
            json: json!({"goal": goal, "witness": null}),
        },
    })
}

fn cmd_optimize(q: &QueryExpr, fds: &[AttrFd], table: Option<Table>) -> relfd::Result<Report> {
    let rw = rewrite_selfjoin_traced(q, fds);
    let mut text = format!("original:  {q}\nrewritten: {}\n", rw.query);
    for step in &rw.steps {
        text += &format!("  {}  =>  {}  by {}\n", step.before, step.after, step.enabled_by.conclusion);
    }
    let mut code = HOLDS;
    let mut verification = Json::Null;
    if let Some(t) = table {
        let env = Env::new().with_table(t);
        eval(q, &env)?;
        match verify_equiv(q, &rw.query, &env)? {
            None => {
                text += "verified\n";
                verification = json!("verified");
            }
            Some(d) => {
                code = REFUTED;
                text += &format!("witness: {d}\n");
                verification = serde_json::to_value(&d)?;
            }
        }
    }
    text += &format!("{}\n", rw.query.to_json());
    Ok(Report {
        code,
        text,
        json: json!({
            "query": rw.query,
            "rewritten": !rw.steps.is_empty(),
            "steps": rw.steps,
            "verification": verification,
        }),
    })
}

fn witness_text(w: &LawWitness) -> String {
    w.assignment
        .iter()
        .map(|b| {
            let pairs: Vec<String> = b.rel.pairs().map(|(i, o)| format!("{i}->{o}")).collect();
            format!("    {} = {{{}}}\n", b.name, pairs.join(", "))
        })
        .collect()
}

/// One law: 0 when nothing refutes it, 1 otherwise. The whole suite: 0 when
/// every theorem survives and every non-theorem is refuted, 3 otherwise.
fn cmd_laws(only: Option<&str>, scope: &Scope, samples: Option<usize>, seed: u64) -> relfd::Result<Report> {
    let laws: Vec<_> = match only {
        Some(name) => vec![relfd::cex::find_law(name)?],
        None => registry().iter().collect(),
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut as_expected = true;
    let mut any_refuted = false;
    for law in &laws {
        let (witness, searched) = match samples {
            Some(n) => (sample_law(law.name, scope.max_carrier, n, seed)?, n as u128),
            None => {
                let out = search_law(law.name, scope)?;
                (out.witness, out.candidates)
            }
        };
        let refuted = witness.is_some();
        any_refuted |= refuted;
        as_expected &= refuted != law.theorem;
        let kind = if law.theorem { "theorem" } else { "planted" };
        let verdict = if refuted { "REFUTED" } else { "holds" };
        text += &format!("{:<26} {kind:<8} {verdict:<8} {searched:>9} assignments in scope  {}\n", law.name, law.statement);
        if let Some(w) = &witness {
            text += &witness_text(w);
        }
        rows.push(json!({
            "law": law.name,
            "statement": law.statement,
            "theorem": law.theorem,
            "refuted": refuted,
            "assignments": searched,
            "witness": witness,
        }));
    }
    let code = match only {
        Some(_) if any_refuted => REFUTED,
        Some(_) => HOLDS,
        None if as_expected => HOLDS,
        None => INTERNAL,
    };
    Ok(Report { code, text, json: json!({"max_carrier": scope.max_carrier, "laws": rows}) })
}
