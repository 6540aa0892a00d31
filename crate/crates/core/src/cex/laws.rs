//! Exhaustive counter-model search for relation-algebra laws.
//!
//! A law names its carriers and variables (each a relation or a function
//! between two carriers) and a predicate over an assignment. The search
//! tries every carrier size up to the scope bound and every assignment.
//!
//! Permuting the elements of a carrier never changes whether a law holds, so
//! each law lists anchors that fix that freedom:
//!
//! * `Rows(X, vs)`: the rows of `vs` along their common source `X` are
//!   non-decreasing (as a joint code).
//! * `Cols(X, vs)`: the same for columns along a common target `X`.
//! * `Prefix(f)`: `f` is non-decreasing, starts at 0 and steps by at most 1;
//!   valid when no other variable uses `f`'s target.
//!
//! An anchor on `X` through a variable whose other side is `Y` is only
//! sound if `Y` is anchored earlier or never, and `X` is not the other side
//! of an earlier anchor. [`Law::check_anchors`] enforces this.

use std::sync::{Arc, LazyLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Scope;
use crate::error::{Error, Result};
use crate::fd::satisfies_typed;
use crate::infer::trade_sides;
use crate::rel::{Carrier, Rel};

#[derive(Clone, Copy, Debug)]
pub struct Var {
    pub name: &'static str,
    pub source: usize,
    pub target: usize,
    pub function: bool,
}

#[derive(Clone, Debug)]
pub enum Anchor {
    Rows(usize, Vec<usize>),
    Cols(usize, Vec<usize>),
    Prefix(usize),
}

pub type LawFn = fn(&[&Rel]) -> Result<bool>;

pub struct Law {
    pub name: &'static str,
    pub statement: &'static str,
    pub carriers: &'static [&'static str],
    pub vars: Vec<Var>,
    pub anchors: Vec<Anchor>,
    /// Whether the law is expected to hold (false for planted mistakes).
    pub theorem: bool,
    pub holds: LawFn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    pub name: String,
    pub rel: Rel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LawWitness {
    pub law: String,
    pub assignment: Vec<Binding>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawOutcome {
    pub law: String,
    pub candidates: u128,
    pub witness: Option<LawWitness>,
}

fn rel(name: &'static str, source: usize, target: usize) -> Var {
    Var { name, source, target, function: false }
}

fn fun(name: &'static str, source: usize, target: usize) -> Var {
    Var { name, source, target, function: true }
}

static REGISTRY: LazyLock<Vec<Law>> = LazyLock::new(|| {
    use Anchor::*;
    vec![
        Law {
            name: "converse-of-composition",
            statement: "(R.S)° = S°.R°",
            carriers: &["A", "B", "C"],
            vars: vec![rel("R", 0, 1), rel("S", 2, 0)],
            anchors: vec![Rows(2, vec![1]), Cols(1, vec![0])],
            theorem: true,
            holds: |v| Ok(v[0].compose(v[1])?.converse() == v[1].converse().compose(&v[0].converse())?),
        },
        Law {
            name: "converse-involution",
            statement: "(R°)° = R",
            carriers: &["A", "B"],
            vars: vec![rel("R", 0, 1)],
            anchors: vec![Rows(0, vec![0])],
            theorem: true,
            holds: |v| Ok(&v[0].converse().converse() == v[0]),
        },
        Law {
            name: "shunting-left",
            statement: "f.R ⊆ S  ≡  R ⊆ f°.S",
            carriers: &["A", "B", "C"],
            vars: vec![rel("R", 0, 1), fun("f", 1, 2), rel("S", 0, 2)],
            anchors: vec![Rows(1, vec![1]), Rows(0, vec![2])],
            theorem: true,
            holds: |v| {
                let (r, f, s) = (v[0], v[1], v[2]);
                Ok(s.includes(&f.compose(r)?)? == f.converse().compose(s)?.includes(r)?)
            },
        },
        Law {
            name: "shunting-right",
            statement: "R.f° ⊆ S  ≡  R ⊆ S.f",
            carriers: &["A", "B", "C"],
            vars: vec![rel("R", 0, 1), fun("f", 0, 2), rel("S", 2, 1)],
            anchors: vec![Rows(0, vec![1]), Cols(1, vec![2])],
            theorem: true,
            holds: |v| {
                let (r, f, s) = (v[0], v[1], v[2]);
                Ok(s.includes(&r.compose(&f.converse())?)? == s.compose(f)?.includes(r)?)
            },
        },
        Law {
            name: "injectivity-galois",
            statement: "R.f ≤ S  ≡  R ≤ S.f°",
            carriers: &["A", "B", "C", "D"],
            vars: vec![fun("f", 0, 1), rel("R", 1, 2), rel("S", 0, 3)],
            anchors: vec![Rows(0, vec![2]), Rows(1, vec![1])],
            theorem: true,
            holds: |v| {
                let (f, r, s) = (v[0], v[1], v[2]);
                Ok(r.compose(f)?.leq(s)? == r.leq(&s.compose(&f.converse())?)?)
            },
        },
        Law {
            name: "fd-trading",
            statement: "x <- z.R.k° -> y  ≡  x.k <- R -> y.z",
            carriers: &["A", "B", "X", "Z", "D", "C"],
            vars: vec![
                rel("R", 0, 1),
                fun("k", 0, 2),
                fun("z", 1, 3),
                fun("x", 2, 4),
                fun("y", 3, 5),
            ],
            anchors: vec![Prefix(3), Prefix(4), Rows(1, vec![2]), Rows(0, vec![0, 1])],
            theorem: true,
            holds: |v| {
                let (lhs, rhs) = trade_sides(v[3], v[2], v[0], v[1], v[4])?;
                Ok(lhs == rhs)
            },
        },
        Law {
            name: "injectivity-union",
            statement: "X ≤ R ∪ S  ≡  X ≤ R ∧ X ≤ S ∧ R°.S ⊆ ker X",
            carriers: &["A", "B", "C"],
            vars: vec![rel("X", 0, 2), rel("R", 0, 1), rel("S", 0, 1)],
            anchors: vec![Rows(0, vec![1, 2]), Cols(2, vec![0])],
            theorem: true,
            holds: |v| {
                let (x, r, s) = (v[0], v[1], v[2]);
                let lhs = x.leq(&r.union(s)?)?;
                let rhs = x.leq(r)? && x.leq(s)? && x.kernel_includes(&r.converse().compose(s)?)?;
                Ok(lhs == rhs)
            },
        },
        Law {
            name: "join-lub",
            statement: "R ⋈ S ≤ T  ≡  R ≤ T ∧ S ≤ T",
            carriers: &["A", "B", "C", "D"],
            vars: vec![rel("R", 0, 1), rel("S", 0, 2), rel("T", 0, 3)],
            anchors: vec![Cols(1, vec![0]), Cols(2, vec![1]), Cols(3, vec![2])],
            theorem: true,
            holds: |v| {
                let (r, s, t) = (v[0], v[1], v[2]);
                Ok(r.fork(s)?.leq(t)? == (r.leq(t)? && s.leq(t)?))
            },
        },
        Law {
            name: "fd-additivity",
            statement: "f <- R -> g h  ≡  f <- R -> g ∧ f <- R -> h",
            carriers: &["A", "B", "C", "D", "E"],
            vars: vec![rel("R", 0, 1), fun("f", 0, 3), fun("g", 1, 2), fun("h", 1, 4)],
            anchors: vec![Prefix(1), Rows(1, vec![2, 3])],
            theorem: true,
            holds: |v| {
                let (r, f, g, h) = (v[0], v[1], v[2], v[3]);
                let both = satisfies_typed(r, f, &g.fork(h)?)?;
                Ok(both == (satisfies_typed(r, f, g)? && satisfies_typed(r, f, h)?))
            },
        },
        Law {
            name: "galois-without-converse",
            statement: "R.f ≤ S  ≡  R ≤ S.f  (planted mistake)",
            carriers: &["A", "C", "D"],
            vars: vec![fun("f", 0, 0), rel("R", 0, 1), rel("S", 0, 2)],
            anchors: vec![Cols(1, vec![1]), Cols(2, vec![2])],
            theorem: false,
            holds: |v| {
                let (f, r, s) = (v[0], v[1], v[2]);
                Ok(r.compose(f)?.leq(s)? == r.leq(&s.compose(f)?)?)
            },
        },
    ]
});

pub fn registry() -> &'static [Law] {
    &REGISTRY
}

pub fn find_law(name: &str) -> Result<&'static Law> {
    registry()
        .iter()
        .find(|l| l.name == name)
        .ok_or_else(|| Error::UnknownLaw(name.to_string()))
}

/// Multisets of size `k` drawn from `n` values.
fn multichoose(n: u128, k: u128) -> u128 {
    if n == 0 {
        return u128::from(k == 0);
    }
    // C(n + k - 1, k), saturating.
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n + i) / (i + 1);
    }
    acc
}

/// Non-decreasing sequences of length `n` starting at 0 with steps of 0 or
/// 1, staying below `m`.
fn prefix_count(n: usize, m: usize) -> u128 {
    if n == 0 {
        return 1;
    }
    (0..m.min(n)).map(|j| binomial(n as u128 - 1, j as u128)).sum()
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).saturating_pow(exp as u32)
}

/// Options per element for a variable anchored along one of its sides.
fn per_element(var: &Var, other: usize) -> u128 {
    if var.function {
        other as u128
    } else {
        pow(2, other)
    }
}

/// All non-decreasing sequences of length `len` over `0..n`.
fn sorted_sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, len: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in from..n {
            cur.push(v);
            go(n, len, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, len, 0, &mut Vec::with_capacity(len), &mut out);
    out
}

fn prefix_sequences(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    for steps in 0u32..1 << (n - 1) {
        let mut seq = vec![0usize];
        for i in 0..n - 1 {
            seq.push(seq[i] + (steps >> i & 1) as usize);
        }
        if seq[n - 1] < m {
            out.push(seq);
        }
    }
    out.sort();
    out
}

/// One group of variables enumerated together.
struct Block {
    vars: Vec<usize>,
    options: Vec<Vec<Rel>>,
}

impl Law {
    /// Checks that the anchors only remove isomorphic copies.
    pub fn check_anchors(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Internal(format!("law {}: {msg}", self.name)));
        let mut anchored: Vec<usize> = Vec::new();
        let mut others: Vec<usize> = Vec::new();
        let mut used = vec![false; self.vars.len()];
        let anchored_carrier = |a: &Anchor| match a {
            Anchor::Rows(x, _) | Anchor::Cols(x, _) => vec![*x],
            Anchor::Prefix(v) => vec![self.vars[*v].source, self.vars[*v].target],
        };
        for (pos, a) in self.anchors.iter().enumerate() {
            let later: Vec<usize> = self.anchors[pos + 1..].iter().flat_map(&anchored_carrier).collect();
            let (carrier, vars, side_other): (usize, Vec<usize>, Vec<usize>) = match a {
                Anchor::Rows(x, vs) => {
                    for &v in vs {
                        if self.vars[v].source != *x {
                            return bad(format!("{} does not start at anchored carrier", self.vars[v].name));
                        }
                    }
                    (*x, vs.clone(), vs.iter().map(|&v| self.vars[v].target).collect())
                }
                Anchor::Cols(x, vs) => {
                    for &v in vs {
                        if self.vars[v].target != *x || self.vars[v].function {
                            return bad(format!("{} cannot anchor columns", self.vars[v].name));
                        }
                    }
                    (*x, vs.clone(), vs.iter().map(|&v| self.vars[v].source).collect())
                }
                Anchor::Prefix(v) => {
                    let var = self.vars[*v];
                    if !var.function {
                        return bad(format!("{} is not a function", var.name));
                    }
                    let shared = self
                        .vars
                        .iter()
                        .enumerate()
                        .any(|(i, w)| i != *v && (w.source == var.target || w.target == var.target));
                    if shared || var.source == var.target {
                        return bad(format!("target of {} is shared", var.name));
                    }
                    if anchored.contains(&var.target) || others.contains(&var.target) {
                        return bad(format!("target of {} already fixed", var.name));
                    }
                    anchored.push(var.target);
                    (var.source, vec![*v], vec![])
                }
            };
            if anchored.contains(&carrier) || others.contains(&carrier) {
                return bad(format!("carrier {} anchored after being fixed", self.carriers[carrier]));
            }
            for y in &side_other {
                if *y == carrier || (!anchored.contains(y) && later.contains(y)) {
                    return bad(format!("carrier {} is permuted later", self.carriers[*y]));
                }
            }
            for v in vars {
                if used[v] {
                    return bad(format!("{} anchors twice", self.vars[v].name));
                }
                used[v] = true;
            }
            anchored.push(carrier);
            others.extend(side_other);
        }
        Ok(())
    }

    fn free_vars(&self) -> Vec<usize> {
        let mut anchored = vec![false; self.vars.len()];
        for a in &self.anchors {
            match a {
                Anchor::Rows(_, vs) | Anchor::Cols(_, vs) => vs.iter().for_each(|&v| anchored[v] = true),
                Anchor::Prefix(v) => anchored[*v] = true,
            }
        }
        (0..self.vars.len()).filter(|&v| !anchored[v]).collect()
    }

    pub(crate) fn count_for(&self, sizes: &[usize]) -> u128 {
        let mut total: u128 = 1;
        for a in &self.anchors {
            let n = match a {
                Anchor::Rows(x, vs) => {
                    let per = vs.iter().fold(1u128, |acc, &v| {
                        acc.saturating_mul(per_element(&self.vars[v], sizes[self.vars[v].target]))
                    });
                    multichoose(per, sizes[*x] as u128)
                }
                Anchor::Cols(x, vs) => {
                    let per = vs
                        .iter()
                        .fold(1u128, |acc, &v| acc.saturating_mul(pow(2, sizes[self.vars[v].source])));
                    multichoose(per, sizes[*x] as u128)
                }
                Anchor::Prefix(v) => {
                    let var = &self.vars[*v];
                    prefix_count(sizes[var.source], sizes[var.target])
                }
            };
            total = total.saturating_mul(n);
        }
        for v in self.free_vars() {
            let var = &self.vars[v];
            let (s, t) = (sizes[var.source], sizes[var.target]);
            let n = if var.function { pow(t, s) } else { pow(2, s.saturating_mul(t)) };
            total = total.saturating_mul(n);
        }
        total
    }

    pub(crate) fn size_tuples(&self, max: usize) -> Vec<Vec<usize>> {
        let k = self.carriers.len();
        let mut out = Vec::new();
        let mut cur = vec![1; k];
        loop {
            out.push(cur.clone());
            let Some(pos) = (0..k).rev().find(|&i| cur[i] < max) else {
                return out;
            };
            cur[pos] += 1;
            for c in cur.iter_mut().skip(pos + 1) {
                *c = 1;
            }
        }
    }

    /// Number of assignments the search visits.
    pub fn candidates(&self, max_carrier: usize) -> u128 {
        self.size_tuples(max_carrier)
            .iter()
            .fold(0u128, |acc, s| acc.saturating_add(self.count_for(s)))
    }

    fn blocks(&self, carriers: &[Arc<Carrier>]) -> Result<Vec<Block>> {
        let mut blocks = Vec::new();
        for a in &self.anchors {
            blocks.push(match a {
                Anchor::Rows(x, vs) => {
                    let radices: Vec<usize> = vs
                        .iter()
                        .map(|&v| {
                            let t = carriers[self.vars[v].target].len();
                            if self.vars[v].function { t } else { 1 << t }
                        })
                        .collect();
                    let per: usize = radices.iter().product();
                    let mut options = Vec::new();
                    for seq in sorted_sequences(per, carriers[*x].len()) {
                        let mut rels = Vec::with_capacity(vs.len());
                        for (k, &v) in vs.iter().enumerate() {
                            let var = &self.vars[v];
                            let div: usize = radices[k + 1..].iter().product();
                            let codes = seq.iter().map(|j| j / div % radices[k]);
                            let pairs: Vec<(usize, usize)> = if var.function {
                                codes.enumerate().collect()
                            } else {
                                codes
                                    .enumerate()
                                    .flat_map(|(i, c)| {
                                        (0..radices[k].trailing_zeros() as usize)
                                            .filter(move |b| c >> b & 1 == 1)
                                            .map(move |b| (i, b))
                                    })
                                    .collect()
                            };
                            rels.push(Rel::from_index_pairs(
                                &carriers[var.source],
                                &carriers[var.target],
                                pairs,
                            )?);
                        }
                        options.push(rels);
                    }
                    Block { vars: vs.clone(), options }
                }
                Anchor::Cols(x, vs) => {
                    let widths: Vec<usize> = vs.iter().map(|&v| carriers[self.vars[v].source].len()).collect();
                    let total_bits: usize = widths.iter().sum();
                    let mut options = Vec::new();
                    for seq in sorted_sequences(1 << total_bits, carriers[*x].len()) {
                        let mut rels = Vec::with_capacity(vs.len());
                        let mut shift = total_bits;
                        for (k, &v) in vs.iter().enumerate() {
                            let var = &self.vars[v];
                            shift -= widths[k];
                            let pairs: Vec<(usize, usize)> = seq
                                .iter()
                                .enumerate()
                                .flat_map(|(col, code)| {
                                    let c = code >> shift;
                                    (0..widths[k]).filter(move |b| c >> b & 1 == 1).map(move |b| (b, col))
                                })
                                .collect();
                            rels.push(Rel::from_index_pairs(
                                &carriers[var.source],
                                &carriers[var.target],
                                pairs,
                            )?);
                        }
                        options.push(rels);
                    }
                    Block { vars: vs.clone(), options }
                }
                Anchor::Prefix(v) => {
                    let var = &self.vars[*v];
                    let (s, t) = (&carriers[var.source], &carriers[var.target]);
                    let options = prefix_sequences(s.len(), t.len())
                        .into_iter()
                        .map(|seq| Ok(vec![Rel::from_index_fn(s, t, &seq)?]))
                        .collect::<Result<Vec<_>>>()?;
                    Block { vars: vec![*v], options }
                }
            });
        }
        for v in self.free_vars() {
            let var = &self.vars[v];
            let (s, t) = (&carriers[var.source], &carriers[var.target]);
            let options = if var.function {
                let total = t.len().pow(s.len() as u32);
                (0..total)
                    .map(|mut code| {
                        let outs: Vec<usize> = (0..s.len())
                            .map(|_| {
                                let o = code % t.len();
                                code /= t.len();
                                o
                            })
                            .collect();
                        Ok(vec![Rel::from_index_fn(s, t, &outs)?])
                    })
                    .collect::<Result<Vec<_>>>()?
            } else {
                let cells = s.len() * t.len();
                (0u64..1 << cells)
                    .map(|m| {
                        let pairs = (0..cells).filter(|i| m >> i & 1 == 1).map(|i| (i / t.len(), i % t.len()));
                        Ok(vec![Rel::from_index_pairs(s, t, pairs)?])
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            blocks.push(Block { vars: vec![v], options });
        }
        Ok(blocks)
    }

    pub(crate) fn carriers_for(&self, sizes: &[usize]) -> Vec<Arc<Carrier>> {
        self.carriers
            .iter()
            .zip(sizes)
            .map(|(name, &n)| Carrier::numbered(*name, &name.to_lowercase(), n))
            .collect()
    }

    fn witness(&self, rels: Vec<Rel>) -> Result<LawWitness> {
        let refs: Vec<&Rel> = rels.iter().collect();
        if (self.holds)(&refs)? {
            return Err(Error::Internal(format!("law {}: witness does not refute", self.name)));
        }
        Ok(LawWitness {
            law: self.name.to_string(),
            assignment: self
                .vars
                .iter()
                .zip(rels)
                .map(|(v, rel)| Binding { name: v.name.to_string(), rel })
                .collect(),
        })
    }

    /// Every enumerated assignment, in search order.
    #[cfg(test)]
    pub(crate) fn assignments(&self, carriers: &[Arc<Carrier>]) -> Result<Vec<Vec<Rel>>> {
        let mut out: Vec<Vec<Option<Rel>>> = vec![vec![None; self.vars.len()]];
        for b in self.blocks(carriers)? {
            let mut next = Vec::with_capacity(out.len() * b.options.len());
            for partial in &out {
                for opt in &b.options {
                    let mut a = partial.clone();
                    for (k, &v) in b.vars.iter().enumerate() {
                        a[v] = Some(opt[k].clone());
                    }
                    next.push(a);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(|a| a.into_iter().map(|r| r.expect("bound")).collect()).collect())
    }

    /// First refuting assignment at the given carrier sizes, if any.
    fn search_sizes(&self, sizes: &[usize]) -> Result<Option<LawWitness>> {
        let carriers = self.carriers_for(sizes);
        let blocks = self.blocks(&carriers)?;
        let n = self.vars.len();
        let first = &blocks[0];
        let rest = &blocks[1..];
        let found = (0..first.options.len())
            .into_par_iter()
            .map(|i| -> Result<Option<Vec<Rel>>> {
                let mut slots: Vec<Option<&Rel>> = vec![None; n];
                for (k, &v) in first.vars.iter().enumerate() {
                    slots[v] = Some(&first.options[i][k]);
                }
                let mut idx = vec![0usize; rest.len()];
                if rest.iter().any(|b| b.options.is_empty()) {
                    return Ok(None);
                }
                loop {
                    for (b, &j) in rest.iter().zip(&idx) {
                        for (k, &v) in b.vars.iter().enumerate() {
                            slots[v] = Some(&b.options[j][k]);
                        }
                    }
                    let refs: Vec<&Rel> = slots.iter().map(|s| s.expect("every variable is bound")).collect();
                    if !(self.holds)(&refs)? {
                        return Ok(Some(refs.into_iter().cloned().collect()));
                    }
                    // Odometer, last block fastest.
                    let Some(pos) = (0..rest.len()).rev().find(|&p| idx[p] + 1 < rest[p].options.len()) else {
                        return Ok(None);
                    };
                    idx[pos] += 1;
                    for j in idx.iter_mut().skip(pos + 1) {
                        *j = 0;
                    }
                }
            })
            .find_map_first(|r| match r {
                Ok(None) => None,
                other => Some(other),
            });
        match found {
            None => Ok(None),
            Some(r) => r?.map(|rels| self.witness(rels)).transpose(),
        }
    }
}

/// Searches every assignment over carriers of size `1..=scope.max_carrier`
/// for one that refutes the law; the first in enumeration order is returned.
pub fn search_law(name: &str, scope: &Scope) -> Result<LawOutcome> {
    scope.validate()?;
    let law = find_law(name)?;
    let candidates = law.candidates(scope.max_carrier);
    if candidates > scope.cap {
        return Err(Error::ResourceExceeded {
            what: format!("assignments for law {name}"),
            needed: candidates,
            limit: scope.cap,
        });
    }
    for sizes in law.size_tuples(scope.max_carrier) {
        if let Some(w) = law.search_sizes(&sizes)? {
            log::debug!("{name}: refuted at sizes {sizes:?}");
            return Ok(LawOutcome {
                law: name.to_string(),
                candidates,
                witness: Some(w),
            });
        }
    }
    Ok(LawOutcome {
        law: name.to_string(),
        candidates,
        witness: None,
    })
}

/// Random assignments with carriers up to `max_carrier`; returns the first
/// refutation found in `samples` draws.
pub fn sample_law(name: &str, max_carrier: usize, samples: usize, seed: u64) -> Result<Option<LawWitness>> {
    let law = find_law(name)?;
    if max_carrier == 0 {
        return Err(Error::InvalidScope("carrier bound must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let sizes: Vec<usize> = law.carriers.iter().map(|_| rng.random_range(1..=max_carrier)).collect();
        let carriers = law.carriers_for(&sizes);
        let density = rng.random_range(0.1..0.9);
        let mut rels = Vec::with_capacity(law.vars.len());
        for var in &law.vars {
            let (s, t) = (&carriers[var.source], &carriers[var.target]);
            rels.push(if var.function {
                let outs: Vec<usize> = (0..s.len()).map(|_| rng.random_range(0..t.len())).collect();
                Rel::from_index_fn(s, t, &outs)?
            } else {
                let mut pairs = Vec::new();
                for i in 0..s.len() {
                    for j in 0..t.len() {
                        if rng.random_bool(density) {
                            pairs.push((i, j));
                        }
                    }
                }
                Rel::from_index_pairs(s, t, pairs)?
            });
        }
        let refs: Vec<&Rel> = rels.iter().collect();
        if !(law.holds)(&refs)? {
            return law.witness(rels).map(Some);
        }
    }
    Ok(None)
}
