//! A small relational query IR over tables, with evaluation and the
//! FD-conditioned self-join elimination
//! `g · ⌜M⌝ · ker f · ⌜M⌝ · h°  =  g · ⌜M⌝ · h°`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::AttrFd;
use crate::infer::{derive, Derivation};
use crate::rel::{same_carrier, Carrier, Rel, Value};
use crate::table::{pid, proj_fn, AttrSet, Table};


/// Query tree. `Compose` lists its factors in written order, so the last
/// one is applied first; `Id` is the identity on whatever carrier its
/// neighbours in a composition fix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum QueryExpr {
    Rel { name: String },
    Compose { args: Vec<QueryExpr> },
    Converse { arg: Box<QueryExpr> },
    Kernel { arg: Box<QueryExpr> },
    Proj { scheme: String, attrs: AttrSet },
    Pid { table: String },
    Union { args: Vec<QueryExpr> },
    Fork { args: Vec<QueryExpr> },
    Id,
}

impl QueryExpr {
    pub fn rel(name: &str) -> QueryExpr {
        QueryExpr::Rel { name: name.into() }
    }

    pub fn compose(args: Vec<QueryExpr>) -> QueryExpr {
        QueryExpr::Compose { args }
    }

    pub fn converse(arg: QueryExpr) -> QueryExpr {
        QueryExpr::Converse { arg: Box::new(arg) }
    }

    pub fn kernel(arg: QueryExpr) -> QueryExpr {
        QueryExpr::Kernel { arg: Box::new(arg) }
    }

    pub fn proj<S: AsRef<str>>(scheme: &str, attrs: &[S]) -> QueryExpr {
        QueryExpr::Proj {
            scheme: scheme.into(),
            attrs: attrs.iter().map(|a| a.as_ref().to_string()).collect(),
        }
    }

    pub fn pid(table: &str) -> QueryExpr {
        QueryExpr::Pid { table: table.into() }
    }

    pub fn from_json(text: &str) -> Result<QueryExpr> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("query trees always serialize")
    }

    pub fn pid_count(&self) -> usize {
        match self {
            QueryExpr::Pid { .. } => 1,
            QueryExpr::Compose { args } | QueryExpr::Union { args } | QueryExpr::Fork { args } => {
                args.iter().map(QueryExpr::pid_count).sum()
            }
            QueryExpr::Converse { arg } | QueryExpr::Kernel { arg } => arg.pid_count(),
            _ => 0,
        }
    }
}

impl fmt::Display for QueryExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryExpr::Rel { name } => f.write_str(name),
            QueryExpr::Compose { args } => {
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" · ")?;
                    }
                    match a {
                        QueryExpr::Compose { .. } => write!(f, "({a})")?,
                        _ => write!(f, "{a}")?,
                    }
                }
                Ok(())
            }
            QueryExpr::Converse { arg } => match **arg {
                QueryExpr::Compose { .. } => write!(f, "({arg})°"),
                _ => write!(f, "{arg}°"),
            },
            QueryExpr::Kernel { arg } => write!(f, "ker({arg})"),
            QueryExpr::Proj { scheme, attrs } => {
                let names: Vec<&str> = attrs.iter().map(String::as_str).collect();
                write!(f, "π{}[{}]", scheme, names.join(","))
            }
            QueryExpr::Pid { table } => write!(f, "⌜{table}⌝"),
            QueryExpr::Union { args } => write_list(f, args, "(", " ∪ ", ")"),
            QueryExpr::Fork { args } => write_list(f, args, "⟨", ", ", "⟩"),
            QueryExpr::Id => f.write_str("id"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, args: &[QueryExpr], open: &str, sep: &str, close: &str) -> fmt::Result {
    f.write_str(open)?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(close)
}

/// Named relations and tables. Tables are keyed by their scheme name, which
/// is what both `pid` and `proj` nodes refer to.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub rels: BTreeMap<String, Rel>,
    pub tables: BTreeMap<String, Table>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn with_rel(mut self, name: &str, r: Rel) -> Env {
        self.rels.insert(name.into(), r);
        self
    }

    pub fn with_table(mut self, t: Table) -> Env {
        self.tables.insert(t.name().to_string(), t);
        self
    }

    fn table(&self, name: &str, path: &str) -> Result<&Table> {
        self.tables.get(name).ok_or_else(|| query_err(path, format!("unbound table `{name}`")))
    }
}

fn query_err(path: &str, msg: impl Into<String>) -> Error {
    Error::Query {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn child(path: &str, i: usize) -> String {
    format!("{path}.args[{i}]")
}

fn binary<'a>(args: &'a [QueryExpr], path: &str, op: &str) -> Result<(&'a QueryExpr, &'a QueryExpr)> {
    match args {
        [l, r] => Ok((l, r)),
        _ => Err(query_err(path, format!("{op} takes 2 arguments, got {}", args.len()))),
    }
}

/// Source and target carriers; `None` for a bare identity.
pub type Ty = Option<(Arc<Carrier>, Arc<Carrier>)>;

/// Assigns carriers to every node or reports the first offending node by
/// its path from the root (`$`, `$.args[1]`, `$.arg`).
pub fn typecheck(e: &QueryExpr, env: &Env) -> Result<Ty> {
    ty(e, env, "$")
}

fn ty(e: &QueryExpr, env: &Env, path: &str) -> Result<Ty> {
    Ok(match e {
        QueryExpr::Rel { name } => {
            let r = env.rels.get(name).ok_or_else(|| query_err(path, format!("unbound relation `{name}`")))?;
            Some((r.source().clone(), r.target().clone()))
        }
        QueryExpr::Id => None,
        QueryExpr::Pid { table } => {
            let c = env.table(table, path)?.scheme().row_carrier()?;
            Some((c.clone(), c))
        }
        QueryExpr::Proj { scheme, attrs } => {
            let s = env.table(scheme, path)?.scheme().clone();
            let idx = s.indices_of(attrs).map_err(|e| query_err(path, e.to_string()))?;
            Some((s.row_carrier()?, s.sub_carrier(&idx)?))
        }
        QueryExpr::Converse { arg } => ty(arg, env, &format!("{path}.arg"))?.map(|(s, t)| (t, s)),
        QueryExpr::Kernel { arg } => ty(arg, env, &format!("{path}.arg"))?.map(|(s, _)| (s.clone(), s)),
        QueryExpr::Compose { args } => {
            if args.is_empty() {
                return Err(query_err(path, "empty composition"));
            }
            // Walk right to left, in application order.
            let mut acc: Ty = None;
            for (i, a) in args.iter().enumerate().rev() {
                let p = child(path, i);
                let Some((s, t)) = ty(a, env, &p)? else { continue };
                acc = match acc {
                    None => Some((s, t)),
                    Some((src, mid)) => {
                        if !same_carrier(&s, &mid) {
                            return Err(query_err(&p, format!("expects input from {s}, but receives {mid}")));
                        }
                        Some((src, t))
                    }
                };
            }
            acc
        }
        QueryExpr::Union { args } => {
            let (l, r) = binary(args, path, "union")?;
            let lt = ty(l, env, &child(path, 0))?;
            let rt = ty(r, env, &child(path, 1))?;
            match (lt, rt) {
                (Some((ls, lt)), Some((rs, rt))) => {
                    if !same_carrier(&ls, &rs) || !same_carrier(&lt, &rt) {
                        return Err(query_err(path, format!("union of {ls} -> {lt} with {rs} -> {rt}")));
                    }
                    Some((ls, lt))
                }
                (Some((s, t)), None) | (None, Some((s, t))) => {
                    if !same_carrier(&s, &t) {
                        return Err(query_err(path, "union with id needs an endo-relation"));
                    }
                    Some((s, t))
                }
                (None, None) => None,
            }
        }
        QueryExpr::Fork { args } => {
            let (l, r) = binary(args, path, "fork")?;
            let lt = ty(l, env, &child(path, 0))?;
            let rt = ty(r, env, &child(path, 1))?;
            let (Some((ls, lt)), Some((rs, rt))) = (lt, rt) else {
                return Err(query_err(path, "cannot infer the carrier of id inside a fork"));
            };
            if !same_carrier(&ls, &rs) {
                return Err(query_err(path, format!("fork of relations from {ls} and {rs}")));
            }
            Some((ls, Carrier::product(&lt, &rt)?))
        }
    })
}

/// Evaluates bottom-up. Errors carry the path of the failing node.
pub fn eval(e: &QueryExpr, env: &Env) -> Result<Rel> {
    match typecheck(e, env)? {
        None => Err(query_err("$", "cannot infer the carrier of a bare id")),
        Some(_) => Ok(ev(e, env, "$")?.expect("typed")),
    }
}

fn at<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Query { .. } => e,
        other => query_err(path, other.to_string()),
    })
}

fn ev(e: &QueryExpr, env: &Env, path: &str) -> Result<Option<Rel>> {
    Ok(Some(match e {
        QueryExpr::Id => return Ok(None),
        QueryExpr::Rel { name } => env.rels[name].clone(),
        QueryExpr::Pid { table } => at(path, pid(env.table(table, path)?))?,
        QueryExpr::Proj { scheme, attrs } => at(path, proj_fn(env.table(scheme, path)?.scheme(), attrs))?,
        QueryExpr::Converse { arg } => match ev(arg, env, &format!("{path}.arg"))? {
            None => return Ok(None),
            Some(r) => r.converse(),
        },
        QueryExpr::Kernel { arg } => match ev(arg, env, &format!("{path}.arg"))? {
            None => return Ok(None),
            Some(r) => at(path, r.kernel())?,
        },
        QueryExpr::Compose { args } => {
            let mut acc: Option<Rel> = None;
            for (i, a) in args.iter().enumerate().rev() {
                let p = child(path, i);
                if let Some(r) = ev(a, env, &p)? {
                    acc = Some(match acc {
                        None => r,
                        Some(inner) => at(&p, r.compose(&inner))?,
                    });
                }
            }
            return Ok(acc);
        }
        QueryExpr::Union { args } => {
            let (l, r) = binary(args, path, "union")?;
            match (ev(l, env, &child(path, 0))?, ev(r, env, &child(path, 1))?) {
                (Some(l), Some(r)) => at(path, l.union(&r))?,
                (Some(r), None) | (None, Some(r)) => at(path, r.union(&Rel::identity(r.source())?))?,
                (None, None) => return Ok(None),
            }
        }
        QueryExpr::Fork { args } => {
            let (l, r) = binary(args, path, "fork")?;
            match (ev(l, env, &child(path, 0))?, ev(r, env, &child(path, 1))?) {
                (Some(l), Some(r)) => at(path, l.fork(&r))?,
                _ => return Err(query_err(path, "cannot infer the carrier of id inside a fork")),
            }
        }
    }))
}

/// Puts a query in the form the rewrite matches against: nested
/// compositions flattened, `⌜M⌝°` as `⌜M⌝`, and `⌜M⌝ · ⌜M⌝` as `⌜M⌝`.
pub fn normalize(e: &QueryExpr) -> QueryExpr {
    match e {
        QueryExpr::Compose { args } => {
            let mut flat: Vec<QueryExpr> = Vec::with_capacity(args.len());
            for a in args {
                match normalize(a) {
                    QueryExpr::Compose { args } => flat.extend(args),
                    other => flat.push(other),
                }
            }
            flat.dedup_by(|b, a| matches!((a, b), (QueryExpr::Pid { table: x }, QueryExpr::Pid { table: y }) if x == y));
            if flat.len() == 1 {
                flat.pop().expect("one element")
            } else {
                QueryExpr::Compose { args: flat }
            }
        }
        QueryExpr::Converse { arg } => match normalize(arg) {
            p @ QueryExpr::Pid { .. } => p,
            other => QueryExpr::converse(other),
        },
        QueryExpr::Kernel { arg } => QueryExpr::kernel(normalize(arg)),
        QueryExpr::Union { args } => QueryExpr::Union {
            args: args.iter().map(normalize).collect(),
        },
        QueryExpr::Fork { args } => QueryExpr::Fork {
            args: args.iter().map(normalize).collect(),
        },
        leaf => leaf.clone(),
    }
}

/// Fixpoint bound for the rewrite loop.
pub const REWRITE_STEP_CAP: usize = 100;

/// One applied elimination and the derivation that enabled it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub before: QueryExpr,
    pub after: QueryExpr,
    pub enabled_by: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rewrite {
    pub query: QueryExpr,
    pub steps: Vec<RewriteStep>,
}

/// Replaces every `g · ⌜M⌝ · ker f · ⌜M⌝ · h°` (projections of M's scheme)
/// by `g · ⌜M⌝ · h°` when `f -> g` or `f -> h` follows from `fds`.
/// Leftmost-innermost, to a fixpoint. Without any match the input comes
/// back exactly as given.
pub fn rewrite_selfjoin(e: &QueryExpr, fds: &[AttrFd]) -> QueryExpr {
    rewrite_selfjoin_traced(e, fds).query
}

pub fn rewrite_selfjoin_traced(e: &QueryExpr, fds: &[AttrFd]) -> Rewrite {
    let mut cur = normalize(e);
    let mut steps = Vec::new();
    while steps.len() < REWRITE_STEP_CAP {
        let Some((next, step)) = rewrite_once(&cur, fds) else { break };
        steps.push(step);
        cur = normalize(&next);
    }
    if steps.is_empty() {
        cur = e.clone();
    }
    Rewrite { query: cur, steps }
}

fn rewrite_once(e: &QueryExpr, fds: &[AttrFd]) -> Option<(QueryExpr, RewriteStep)> {
    let rebuild = |args: &[QueryExpr], i: usize, new: QueryExpr| {
        let mut args = args.to_vec();
        args[i] = new;
        args
    };
    match e {
        QueryExpr::Compose { args } => {
            for (i, a) in args.iter().enumerate() {
                if let Some((new, step)) = rewrite_once(a, fds) {
                    return Some((QueryExpr::Compose { args: rebuild(args, i, new) }, step));
                }
            }
            for i in 0..args.len().saturating_sub(4) {
                if let Some((replacement, enabled_by)) = match_selfjoin(&args[i..i + 5], fds) {
                    let before = QueryExpr::compose(args[i..i + 5].to_vec());
                    let after = QueryExpr::compose(replacement.clone());
                    let mut out = args[..i].to_vec();
                    out.extend(replacement);
                    out.extend_from_slice(&args[i + 5..]);
                    return Some((QueryExpr::Compose { args: out }, RewriteStep { before, after, enabled_by }));
                }
            }
            None
        }
        QueryExpr::Union { args } | QueryExpr::Fork { args } => {
            for (i, a) in args.iter().enumerate() {
                if let Some((new, step)) = rewrite_once(a, fds) {
                    let args = rebuild(args, i, new);
                    let node = match e {
                        QueryExpr::Union { .. } => QueryExpr::Union { args },
                        _ => QueryExpr::Fork { args },
                    };
                    return Some((node, step));
                }
            }
            None
        }
        QueryExpr::Converse { arg } => rewrite_once(arg, fds).map(|(a, s)| (QueryExpr::converse(a), s)),
        QueryExpr::Kernel { arg } => rewrite_once(arg, fds).map(|(a, s)| (QueryExpr::kernel(a), s)),
        _ => None,
    }
}

fn match_selfjoin(window: &[QueryExpr], fds: &[AttrFd]) -> Option<(Vec<QueryExpr>, Derivation)> {
    let [g @ QueryExpr::Proj { scheme: sg, attrs: ga }, m @ QueryExpr::Pid { table }, QueryExpr::Kernel { arg: k }, QueryExpr::Pid { table: table2 }, h @ QueryExpr::Converse { arg: hc }] =
        window
    else {
        return None;
    };
    let (QueryExpr::Proj { scheme: sf, attrs: fa }, QueryExpr::Proj { scheme: sh, attrs: ha }) = (&**k, &**hc) else {
        return None;
    };
    if table != table2 || [sg, sf, sh].iter().any(|s| *s != table) {
        return None;
    }
    let enabled = derive(fds, &AttrFd { antecedent: fa.clone(), consequent: ga.clone() })
        .or_else(|_| derive(fds, &AttrFd { antecedent: fa.clone(), consequent: ha.clone() }))
        .ok()?;
    Some((vec![g.clone(), m.clone(), h.clone()], enabled))
}

/// A pair in exactly one of two compared relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Difference {
    pub output: Value,
    pub input: Value,
    /// Whether the pair comes from the first query.
    pub in_first: bool,
}

impl fmt::Display for Difference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.in_first { "first" } else { "second" };
        write!(f, "({}, {}) only in the {side} query", self.output, self.input)
    }
}

/// `None` when both queries evaluate to the same relation; otherwise the
/// least differing pair ordered by (output, input).
pub fn verify_equiv(e1: &QueryExpr, e2: &QueryExpr, env: &Env) -> Result<Option<Difference>> {
    let (r1, r2) = (eval(e1, env)?, eval(e2, env)?);
    if !same_carrier(r1.source(), r2.source()) || !same_carrier(r1.target(), r2.target()) {
        return Err(Error::CarrierMismatch {
            op: "verify_equiv",
            left: format!("{} -> {}", r1.source(), r1.target()),
            right: format!("{} -> {}", r2.source(), r2.target()),
        });
    }
    let only = |a: &Rel, b: &Rel, in_first: bool| {
        a.pairs()
            .filter(|(i, o)| !b.holds(i, o))
            .map(|(i, o)| Difference { output: o.clone(), input: i.clone(), in_first })
            .collect::<Vec<_>>()
    };
    let mut diffs = only(&r1, &r2, true);
    diffs.extend(only(&r2, &r1, false));
    Ok(diffs.into_iter().min_by(|a, b| (&a.output, &a.input).cmp(&(&b.output, &b.input))))
}
