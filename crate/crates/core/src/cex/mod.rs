//! Small-scope refutation: counterexample tables for FD implications and
//! counter-models for relation-algebra laws.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{satisfies_oracle, AttrFd};
use crate::infer::attr_closure;
use crate::rel::{Carrier, Value};
use crate::table::{AttrSet, Attribute, Row, Scheme, Table};

mod laws;

pub use laws::*;

/// Default bound on enumerated candidates.
pub const DEFAULT_CAP: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    pub max_rows: usize,
    /// Domain size per attribute, in attribute order; the last entry
    /// repeats for any further attributes.
    pub domain_sizes: Vec<usize>,
    pub max_carrier: usize,
    pub cap: u128,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            max_rows: 4,
            domain_sizes: vec![2],
            max_carrier: 3,
            cap: DEFAULT_CAP,
        }
    }
}

impl Scope {
    pub fn new(max_rows: usize, domain_sizes: Vec<usize>, max_carrier: usize) -> Result<Scope> {
        let s = Scope {
            max_rows,
            domain_sizes,
            max_carrier,
            cap: DEFAULT_CAP,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_cap(mut self, cap: u128) -> Scope {
        self.cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_rows == 0 || self.max_carrier == 0 || self.cap == 0 {
            return Err(Error::InvalidScope("bounds must be positive".into()));
        }
        if self.domain_sizes.is_empty() || self.domain_sizes.contains(&0) {
            return Err(Error::InvalidScope(
                "need at least one domain size, all positive".into(),
            ));
        }
        Ok(())
    }

    pub fn domain_size(&self, i: usize) -> usize {
        self.domain_sizes[i.min(self.domain_sizes.len() - 1)]
    }
}

fn all_attrs(fds: &[AttrFd], goal: &AttrFd) -> Vec<String> {
    let mut set: AttrSet = goal.attributes();
    for fd in fds {
        set.extend(fd.attributes());
    }
    set.into_iter().collect()
}

fn numeric_scheme(attrs: &[String], sizes: &[usize]) -> Result<Arc<Scheme>> {
    let attributes = attrs
        .iter()
        .zip(sizes)
        .map(|(a, &n)| {
            let values: Vec<String> = (0..n).map(|v| v.to_string()).collect();
            Ok(Attribute {
                name: a.clone(),
                domain: Carrier::atoms(a.clone(), &values)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Scheme::new("cex", attributes)
}

fn verified(table: Table, fds: &[AttrFd], goal: &AttrFd) -> Result<Table> {
    for fd in fds {
        if !satisfies_oracle(&table, fd)? {
            return Err(Error::Internal(format!("counterexample violates premise {fd}")));
        }
    }
    if satisfies_oracle(&table, goal)? {
        return Err(Error::Internal(format!("counterexample satisfies goal {goal}")));
    }
    Ok(table)
}

/// The two-row table agreeing exactly on the closure of the goal's
/// antecedent. It satisfies every FD in `fds`, and violates `goal` whenever
/// `goal` is not derivable; `None` when it is.
pub fn two_tuple_witness(fds: &[AttrFd], goal: &AttrFd) -> Result<Option<Table>> {
    let closure = attr_closure(fds, &goal.antecedent);
    if goal.consequent.is_subset(&closure) {
        return Ok(None);
    }
    let attrs = all_attrs(fds, goal);
    let scheme = numeric_scheme(&attrs, &vec![2; attrs.len()])?;
    let first = Row::atoms(&vec!["0"; attrs.len()]);
    let second = Row::atoms(
        &attrs
            .iter()
            .map(|a| if closure.contains(a) { "0" } else { "1" })
            .collect::<Vec<_>>(),
    );
    let table = Table::new(scheme, [first, second])?;
    verified(table, fds, goal).map(Some)
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Masks over attribute positions.
struct MaskFd {
    lhs: u64,
    rhs: u64,
}

fn mask(attrs: &[String], set: &AttrSet) -> u64 {
    attrs
        .iter()
        .enumerate()
        .filter(|(_, a)| set.contains(*a))
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Every table in `scope` over the attributes mentioned, ordered by row
/// count and then lexicographically by row indices; returns the first that
/// satisfies all of `fds` and violates `goal`.
pub fn search_tables(fds: &[AttrFd], goal: &AttrFd, scope: &Scope) -> Result<Option<Table>> {
    scope.validate()?;
    let attrs = all_attrs(fds, goal);
    if attrs.len() > 63 {
        return Err(Error::InvalidScope("too many attributes".into()));
    }
    let sizes: Vec<usize> = (0..attrs.len()).map(|i| scope.domain_size(i)).collect();
    let universe = sizes
        .iter()
        .try_fold(1u128, |acc, &d| acc.checked_mul(d as u128))
        .filter(|n| *n <= scope.cap)
        .ok_or_else(|| Error::ResourceExceeded {
            what: "rows in search scope".into(),
            needed: u128::MAX,
            limit: scope.cap,
        })?;
    let mut candidates: u128 = 0;
    for k in 0..=scope.max_rows as u128 {
        candidates = candidates.saturating_add(binomial(universe, k));
    }
    if candidates > scope.cap {
        return Err(Error::ResourceExceeded {
            what: "candidate tables".into(),
            needed: candidates,
            limit: scope.cap,
        });
    }
    let n = universe as usize;

    // Digits of every candidate row, last attribute fastest.
    let digits: Vec<Vec<usize>> = (0..n)
        .map(|mut code| {
            let mut d = vec![0; sizes.len()];
            for i in (0..sizes.len()).rev() {
                d[i] = code % sizes[i];
                code /= sizes[i];
            }
            d
        })
        .collect();
    let agree = |a: usize, b: usize| -> u64 {
        (0..sizes.len())
            .filter(|&i| digits[a][i] == digits[b][i])
            .fold(0, |m, i| m | 1 << i)
    };
    let to_mask = |fd: &AttrFd| MaskFd {
        lhs: mask(&attrs, &fd.antecedent),
        rhs: mask(&attrs, &fd.consequent),
    };
    let premises: Vec<MaskFd> = fds.iter().map(to_mask).collect();
    let target = to_mask(goal);
    let breaks = |fd: &MaskFd, m: u64| m & fd.lhs == fd.lhs && m & fd.rhs != fd.rhs;

    for k in 0..=scope.max_rows.min(n) {
        let mut combo: Vec<usize> = (0..k).collect();
        loop {
            let mut violates_goal = false;
            let mut ok = true;
            'pairs: for i in 0..k {
                for j in i + 1..k {
                    let m = agree(combo[i], combo[j]);
                    if premises.iter().any(|fd| breaks(fd, m)) {
                        ok = false;
                        break 'pairs;
                    }
                    violates_goal |= breaks(&target, m);
                }
            }
            if ok && violates_goal {
                let scheme = numeric_scheme(&attrs, &sizes)?;
                let rows = combo.iter().map(|&r| {
                    Row(digits[r]
                        .iter()
                        .map(|v| Value::atom(v.to_string()))
                        .collect())
                });
                let table = Table::new(scheme, rows)?;
                return verified(table, fds, goal).map(Some);
            }
            // Next k-combination in lexicographic order.
            let Some(pos) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
                break;
            };
            combo[pos] += 1;
            for i in pos + 1..k {
                combo[i] = combo[i - 1] + 1;
            }
        }
    }
    Ok(None)
}
