//! Inference of attribute FDs with checkable proof trees.
//!
//! Rules (all at attribute level, where a larger attribute set is a more
//! injective projection):
//!
//! * Axiom: a given FD.
//! * Reflexivity: `X -> X`.
//! * Composition: `X -> Z` and `Z -> Y` give `X -> Y`.
//! * Consequence: `X -> Y` gives `X' -> Y'` for `X ⊆ X'`, `Y' ⊆ Y`.
//! * Additivity: `X -> Y` and `X -> Z` give `X -> Y Z`.
//! * Projectivity: `X -> Y Z` gives `X -> Y`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cex::{search_tables, Scope};
use crate::error::{Error, Result};
use crate::fd::{satisfies_typed, AttrFd};
use crate::rel::Rel;
use crate::table::{AttrSet, Scheme, Table};


/// Checks every FD against `scheme`.
pub fn check_fds(scheme: &Scheme, fds: &[AttrFd]) -> Result<()> {
    fds.iter().try_for_each(|fd| fd.check_against(scheme))
}

/// Applies FDs in passes over the list until nothing changes. Returns the
/// closure and the indices of the FDs that added something, in order.
fn closure_steps(fds: &[AttrFd], attrs: &AttrSet) -> (AttrSet, Vec<usize>) {
    let mut cur = attrs.clone();
    let mut steps = Vec::new();
    loop {
        let before = steps.len();
        for (i, fd) in fds.iter().enumerate() {
            if fd.antecedent.is_subset(&cur) && !fd.consequent.is_subset(&cur) {
                cur.extend(fd.consequent.iter().cloned());
                steps.push(i);
            }
        }
        if steps.len() == before {
            return (cur, steps);
        }
    }
}

pub fn attr_closure(fds: &[AttrFd], attrs: &AttrSet) -> AttrSet {
    closure_steps(fds, attrs).0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    Reflexivity,
    Composition,
    Consequence,
    Additivity,
    Projectivity,
    Axiom,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub conclusion: AttrFd,
    pub rule: Rule,
    #[serde(default)]
    pub premises: Vec<Derivation>,
}

impl Derivation {
    fn leaf(rule: Rule, conclusion: AttrFd) -> Derivation {
        Derivation {
            conclusion,
            rule,
            premises: Vec::new(),
        }
    }

    fn node(rule: Rule, conclusion: AttrFd, premises: Vec<Derivation>) -> Derivation {
        Derivation {
            conclusion,
            rule,
            premises,
        }
    }

    /// Re-checks every rule application; axioms must come from `fds`.
    pub fn verify(&self, fds: &[AttrFd]) -> Result<()> {
        let bad = |why: &str| Err(Error::InvalidDerivation(format!("{}: {why} ({})", self.rule, self.conclusion)));
        let c = &self.conclusion;
        let p: Vec<&AttrFd> = self.premises.iter().map(|d| &d.conclusion).collect();
        let arity = match self.rule {
            Rule::Axiom | Rule::Reflexivity => 0,
            Rule::Consequence | Rule::Projectivity => 1,
            Rule::Composition | Rule::Additivity => 2,
        };
        if p.len() != arity {
            return bad(&format!("expected {arity} premises, got {}", p.len()));
        }
        let ok = match self.rule {
            Rule::Axiom => fds.contains(c),
            Rule::Reflexivity => c.antecedent == c.consequent,
            Rule::Consequence => {
                p[0].antecedent.is_subset(&c.antecedent) && c.consequent.is_subset(&p[0].consequent)
            }
            Rule::Projectivity => {
                p[0].antecedent == c.antecedent && c.consequent.is_subset(&p[0].consequent)
            }
            Rule::Composition => {
                p[0].antecedent == c.antecedent
                    && p[0].consequent == p[1].antecedent
                    && p[1].consequent == c.consequent
            }
            Rule::Additivity => {
                p[0].antecedent == c.antecedent
                    && p[1].antecedent == c.antecedent
                    && c.consequent == p[0].consequent.union(&p[1].consequent).cloned().collect()
            }
        };
        if !ok {
            return bad("premises do not match the rule");
        }
        self.premises.iter().try_for_each(|d| d.verify(fds))
    }

    /// Axiom leaves, left to right.
    pub fn axioms(&self) -> Vec<&AttrFd> {
        let mut out = Vec::new();
        self.walk(&mut |d| {
            if d.rule == Rule::Axiom {
                out.push(&d.conclusion)
            }
        });
        out
    }

    pub fn rules(&self) -> Vec<Rule> {
        let mut out = Vec::new();
        self.walk(&mut |d| out.push(d.rule));
        out
    }

    fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Derivation)) {
        visit(self);
        for p in &self.premises {
            p.walk(visit);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        writeln!(f, "{:width$}{}  [{}]", "", self.conclusion, self.rule, width = depth * 2)?;
        for p in &self.premises {
            p.fmt_indented(f, depth + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotDerivable {
    pub goal: AttrFd,
    pub closure: AttrSet,
}

impl fmt::Display for NotDerivable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let missing: Vec<&str> = self
            .goal
            .consequent
            .difference(&self.closure)
            .map(String::as_str)
            .collect();
        write!(f, "{} is not derivable; missing {}", self.goal, missing.join(" "))
    }
}

/// Builds a proof of `goal` from `fds`, or explains why there is none.
pub fn derive(fds: &[AttrFd], goal: &AttrFd) -> std::result::Result<Derivation, NotDerivable> {
    let x = &goal.antecedent;
    let y = &goal.consequent;
    if fds.contains(goal) {
        return Ok(Derivation::leaf(Rule::Axiom, goal.clone()));
    }
    let refl = Derivation::leaf(Rule::Reflexivity, AttrFd { antecedent: x.clone(), consequent: x.clone() });
    if y.is_subset(x) {
        return Ok(weaken(refl, goal));
    }
    if let Some(fd) = fds.iter().find(|fd| fd.antecedent.is_subset(x) && y.is_subset(&fd.consequent)) {
        return Ok(weaken(Derivation::leaf(Rule::Axiom, fd.clone()), goal));
    }

    let (closure, steps) = closure_steps(fds, x);
    if !y.is_subset(&closure) {
        return Err(NotDerivable { goal: goal.clone(), closure });
    }

    // Keep only the steps that the goal transitively needs.
    let mut introduced: BTreeMap<&str, usize> = BTreeMap::new();
    for (pos, &i) in steps.iter().enumerate() {
        for a in &fds[i].consequent {
            introduced.entry(a.as_str()).or_insert(pos);
        }
    }
    let mut keep = vec![false; steps.len()];
    let mut todo: Vec<&str> = y.difference(x).map(String::as_str).collect();
    while let Some(a) = todo.pop() {
        let pos = introduced[a];
        if !keep[pos] {
            keep[pos] = true;
            todo.extend(fds[steps[pos]].antecedent.difference(x).map(String::as_str));
        }
    }

    // Each step extends `X -> C` to `X -> C B` through `C -> C B`, so the
    // tree grows linearly with the number of steps.
    let mut acc = refl;
    for (pos, &i) in steps.iter().enumerate() {
        if !keep[pos] {
            continue;
        }
        let fd = &fds[i];
        let have = acc.conclusion.consequent.clone();
        let grown: AttrSet = have.union(&fd.consequent).cloned().collect();
        let reach = weaken(
            Derivation::leaf(Rule::Axiom, fd.clone()),
            &AttrFd { antecedent: have.clone(), consequent: fd.consequent.clone() },
        );
        let keep_have = Derivation::leaf(Rule::Reflexivity, AttrFd { antecedent: have.clone(), consequent: have.clone() });
        let extend = Derivation::node(
            Rule::Additivity,
            AttrFd { antecedent: have.clone(), consequent: grown.clone() },
            vec![keep_have, reach],
        );
        acc = if acc.rule == Rule::Reflexivity {
            extend
        } else {
            Derivation::node(Rule::Composition, AttrFd { antecedent: x.clone(), consequent: grown }, vec![acc, extend])
        };
    }
    Ok(weaken(acc, goal))
}

/// `d` itself if it already concludes `goal`, else one narrowing step:
/// Projectivity when only the consequent shrinks, Consequence otherwise.
fn weaken(d: Derivation, goal: &AttrFd) -> Derivation {
    if &d.conclusion == goal {
        d
    } else if d.conclusion.antecedent == goal.antecedent && d.rule != Rule::Reflexivity {
        Derivation::node(Rule::Projectivity, goal.clone(), vec![d])
    } else {
        Derivation::node(Rule::Consequence, goal.clone(), vec![d])
    }
}

/// A rule instance to test empirically: premises and a conclusion over the
/// attributes they mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub premises: Vec<AttrFd>,
    pub conclusion: AttrFd,
}

#[derive(Clone, Debug)]
pub struct Soundness {
    pub sound: bool,
    /// A table satisfying the premises but not the conclusion.
    pub witness: Option<Table>,
}

/// Enumerates every table in `scope`; the instance is sound there if no
/// table satisfies all premises while violating the conclusion.
pub fn check_rule_soundness(rule: &RuleInstance, scope: &Scope) -> Result<Soundness> {
    let witness = search_tables(&rule.premises, &rule.conclusion, scope)?;
    Ok(Soundness {
        sound: witness.is_none(),
        witness,
    })
}

/// Trading functions across a typed FD: with `r : A -> B`, `k : A -> X`,
/// `z : B -> Z`, `x : X -> D`, `y : Z -> C`, checks
/// `x <- z.r.k° -> y` against `x.k <- r -> y.z` and returns both verdicts.
pub fn trade_sides(x: &Rel, z: &Rel, r: &Rel, k: &Rel, y: &Rel) -> Result<(bool, bool)> {
    for (f, name) in [(x, "x"), (z, "z"), (k, "k"), (y, "y")] {
        f.require_function(name)?;
    }
    let inner = z.compose(r)?.compose(&k.converse())?;
    let lhs = satisfies_typed(&inner, x, y)?;
    let rhs = satisfies_typed(r, &x.compose(k)?, &y.compose(z)?)?;
    Ok((lhs, rhs))
}

/// Do both sides of the trading rule agree?
pub fn fd_trade(x: &Rel, z: &Rel, r: &Rel, k: &Rel, y: &Rel) -> Result<bool> {
    let (l, r) = trade_sides(x, z, r, k, y)?;
    Ok(l == r)
}
