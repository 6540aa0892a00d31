//! Attribute-level functional dependencies and their text form.
//!
//! `fd := attrs "->" attrs`, where `attrs` is a possibly empty list of
//! identifiers separated by commas and/or whitespace. One FD per line in
//! files; `#` starts a comment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::table::{AttrSet, Scheme};

mod check;

pub use check::*;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttrFd {
    pub antecedent: AttrSet,
    pub consequent: AttrSet,
}

impl AttrFd {
    pub fn new<I, J, S, T>(antecedent: I, consequent: J) -> AttrFd
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        AttrFd {
            antecedent: antecedent.into_iter().map(Into::into).collect(),
            consequent: consequent.into_iter().map(Into::into).collect(),
        }
    }

    pub fn attributes(&self) -> AttrSet {
        self.antecedent.union(&self.consequent).cloned().collect()
    }

    pub fn check_against(&self, scheme: &Scheme) -> Result<()> {
        scheme.check_attrs(&self.antecedent)?;
        scheme.check_attrs(&self.consequent)
    }

    /// Consequent already contained in the antecedent.
    pub fn is_trivial(&self) -> bool {
        self.consequent.is_subset(&self.antecedent)
    }
}

fn join(attrs: &AttrSet) -> String {
    attrs.iter().map(String::as_str).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for AttrFd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = join(&self.antecedent);
        let rhs = join(&self.consequent);
        match (lhs.is_empty(), rhs.is_empty()) {
            (true, true) => write!(f, "->"),
            (true, false) => write!(f, "-> {rhs}"),
            (false, true) => write!(f, "{lhs} ->"),
            (false, false) => write!(f, "{lhs} -> {rhs}"),
        }
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_attrs(side: &str) -> std::result::Result<AttrSet, String> {
    let mut out = AttrSet::new();
    for name in side.split(|c: char| c == ',' || c.is_whitespace()) {
        if name.is_empty() {
            continue;
        }
        if !is_name(name) {
            return Err(format!("`{name}` is not an attribute name"));
        }
        out.insert(name.to_string());
    }
    // A stray comma with nothing around it is still a syntax error.
    if side.contains(',') && side.split(',').any(|p| p.trim().is_empty()) {
        return Err(format!("empty name in `{}`", side.trim()));
    }
    Ok(out)
}

impl FromStr for AttrFd {
    type Err = Error;

    fn from_str(s: &str) -> Result<AttrFd> {
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let mut parts = s.splitn(2, "->");
        let lhs = parts.next().unwrap_or("");
        let rhs = parts
            .next()
            .ok_or_else(|| bad(format!("missing `->` in `{}`", s.trim())))?;
        if rhs.contains("->") {
            return Err(bad(format!("more than one `->` in `{}`", s.trim())));
        }
        Ok(AttrFd {
            antecedent: parse_attrs(lhs).map_err(bad)?,
            consequent: parse_attrs(rhs).map_err(bad)?,
        })
    }
}

impl Serialize for AttrFd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AttrFd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses an FD list, one per line. Blank lines and `#` comments are skipped.
pub fn parse_fds(text: &str) -> Result<Vec<AttrFd>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fd = content.parse::<AttrFd>().map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse { line: n + 1, msg },
            e => e,
        })?;
        out.push(fd);
    }
    Ok(out)
}
