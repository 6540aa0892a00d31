//! FD satisfaction, from the row-pair definition up to typed relations.
//!
//! Orientation used throughout: for `r : A -> B`, `f` observes the inputs
//! (`f : A -> D`) and `g` the outputs (`g : B -> C`). `r` satisfies `f -> g`
//! when any two outputs reachable from `f`-indistinguishable inputs are
//! `g`-indistinguishable, which is `g ≤ f . r°`.

use std::fmt;

use serde::Serialize;

use super::AttrFd;
use crate::error::{Error, Result};
use crate::rel::{Rel, Value};
use crate::table::{pid, proj_fn, Row, Table};

/// Ground truth: two rows that agree on the antecedent must agree on the
/// consequent.
pub fn satisfies_oracle(t: &Table, fd: &AttrFd) -> Result<bool> {
    Ok(violation(t, fd)?.is_none())
}

/// The least pair of rows (in row order) that breaks `fd`.
pub fn violation(t: &Table, fd: &AttrFd) -> Result<Option<(Row, Row)>> {
    let scheme = t.scheme();
    let x = scheme.indices_of(&fd.antecedent)?;
    let y = scheme.indices_of(&fd.consequent)?;
    let agree = |a: &Row, b: &Row, idx: &[usize]| idx.iter().all(|&i| a.get(i) == b.get(i));
    let rows: Vec<&Row> = t.rows().collect();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if agree(a, b, &x) && !agree(a, b, &y) {
                return Ok(Some(((*a).clone(), (*b).clone())));
            }
        }
    }
    Ok(None)
}

/// `pid . ker x . pid° ⊆ ker y`, evaluated on relations over the row carrier.
pub fn satisfies_algebraic(t: &Table, fd: &AttrFd) -> Result<bool> {
    let p = pid(t)?;
    let x = proj_fn(t.scheme(), &fd.antecedent)?;
    let y = proj_fn(t.scheme(), &fd.consequent)?;
    let lhs = p.compose(&x.kernel()?)?.compose(&p.converse())?;
    y.kernel_includes(&lhs)
}

/// `r` satisfies `f -> g`, i.e. `g ≤ f . r°`.
pub fn satisfies_typed(r: &Rel, f: &Rel, g: &Rel) -> Result<bool> {
    g.leq(&f.compose(&r.converse())?)
}

/// A pair of `(input, output)` links that together break an FD.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub left: (Value, Value),
    pub right: (Value, Value),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} <- {} and {} <- {}",
            self.left.1, self.left.0, self.right.1, self.right.0
        )
    }
}

fn check_observers(r: &Rel, f: &Rel, g: &Rel) -> Result<()> {
    f.require_function("antecedent observer")?;
    g.require_function("consequent observer")?;
    if !crate::rel::same_carrier(f.source(), r.source()) {
        return Err(Error::CarrierMismatch {
            op: "fd antecedent",
            left: f.source().name().into(),
            right: r.source().name().into(),
        });
    }
    if !crate::rel::same_carrier(g.source(), r.target()) {
        return Err(Error::CarrierMismatch {
            op: "fd consequent",
            left: g.source().name().into(),
            right: r.target().name().into(),
        });
    }
    Ok(())
}

/// First link of `r` and link of `s` whose inputs `f` cannot tell apart
/// but whose outputs `g` can.
pub fn first_violation(r: &Rel, s: &Rel, f: &Rel, g: &Rel) -> Result<Option<Witness>> {
    check_observers(r, f, g)?;
    check_observers(s, f, g)?;
    let fv = |i| f.apply_index(i).expect("checked total");
    let gv = |i| g.apply_index(i).expect("checked total");
    for (a, b) in r.index_pairs() {
        for (a2, b2) in s.index_pairs() {
            if fv(a) == fv(a2) && gv(b) != gv(b2) {
                let src = r.source();
                let tgt = r.target();
                return Ok(Some(Witness {
                    left: (src.element(a).clone(), tgt.element(b).clone()),
                    right: (src.element(a2).clone(), tgt.element(b2).clone()),
                }));
            }
        }
    }
    Ok(None)
}

/// Nested-quantifier reading: for all `b r a` and `b' r a'`,
/// `f a = f a'` implies `g b = g b'`. Needs `f` and `g` to be functions.
pub fn satisfies_general_quantified(r: &Rel, f: &Rel, g: &Rel) -> Result<bool> {
    Ok(first_violation(r, r, f, g)?.is_none())
}

/// `f -> g` across two relations: `r . ker f . s° ⊆ ker g`.
pub fn mutual_dependency(r: &Rel, s: &Rel, f: &Rel, g: &Rel) -> Result<bool> {
    let lhs = r.compose(&f.kernel()?)?.compose(&s.converse())?;
    g.kernel_includes(&lhs)
}

/// A typed FD `f <- r -> g` with its invariants checked.
#[derive(Clone, Debug)]
pub struct GenFd {
    pub f: Rel,
    pub g: Rel,
    pub r: Rel,
}

impl GenFd {
    pub fn new(f: Rel, r: Rel, g: Rel) -> Result<GenFd> {
        check_observers(&r, &f, &g)?;
        Ok(GenFd { f, g, r })
    }

    pub fn holds(&self) -> Result<bool> {
        satisfies_typed(&self.r, &self.f, &self.g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjunct {
    /// The FD on the first relation.
    Left,
    /// The FD on the second relation.
    Right,
    /// The mutual dependency between them.
    Mutual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjunctReport {
    pub conjunct: Conjunct,
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnionReport {
    pub holds: bool,
    pub conjuncts: Vec<ConjunctReport>,
}

impl UnionReport {
    pub fn failed(&self) -> impl Iterator<Item = &ConjunctReport> {
        self.conjuncts.iter().filter(|c| !c.holds)
    }
}

/// Does `r ∪ s` satisfy `f -> g`? The answer is split into the FD on each
/// side plus their mutual dependency; all three together are equivalent to
/// the FD on the union.
pub fn typecheck_union(r: &Rel, s: &Rel, f: &Rel, g: &Rel) -> Result<UnionReport> {
    let holds = satisfies_typed(&r.union(s)?, f, g)?;
    let mut conjuncts = Vec::with_capacity(3);
    let parts = [
        (Conjunct::Left, r, r, satisfies_typed(r, f, g)?),
        (Conjunct::Right, s, s, satisfies_typed(s, f, g)?),
        (Conjunct::Mutual, r, s, mutual_dependency(r, s, f, g)?),
    ];
    for (conjunct, a, b, ok) in parts {
        let witness = if ok { None } else { first_violation(a, b, f, g)? };
        conjuncts.push(ConjunctReport {
            conjunct,
            holds: ok,
            witness,
        });
    }
    let all = conjuncts.iter().all(|c| c.holds);
    if all != holds {
        return Err(Error::Internal(format!(
            "union check {holds} disagrees with its decomposition {all}"
        )));
    }
    Ok(UnionReport { holds, conjuncts })
}

/// FD on a join: `f <- r -> g` and `f <- s -> h` give
/// `f <- fork(r, s) -> g × h`. Returns whether the conclusion holds; a
/// failure under true premises is reported as an internal error.
pub fn typecheck_join(r: &Rel, s: &Rel, f: &Rel, g: &Rel, h: &Rel) -> Result<bool> {
    let premises = satisfies_typed(r, f, g)? && satisfies_typed(s, f, h)?;
    let conclusion = satisfies_typed(&r.fork(s)?, f, &g.product(h)?)?;
    if premises && !conclusion {
        return Err(Error::Internal(
            "join rule violated although both premises hold".into(),
        ));
    }
    Ok(conclusion)
}
