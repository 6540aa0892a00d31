//! n-ary tables and their encoding as binary relations.
//!
//! A table over scheme `S` lives inside the *row carrier* of `S`, the full
//! Cartesian product of the attribute domains. The table itself becomes a
//! partial identity on that carrier ([`pid`]) and every attribute set
//! becomes a total projection function out of it ([`proj_fn`]).

mod io;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

pub use io::{load_table, read_csv, write_csv, AttributeDecl, SchemaFile};

use crate::error::{Error, Result};
use crate::rel::{Carrier, Rel, Value};

/// Attribute names; iteration order is alphabetical, not scheme order.
pub type AttrSet = BTreeSet<String>;

/// Default bound on the number of rows in a row carrier.
pub const ROW_CARRIER_LIMIT: u128 = 1_000_000;

pub fn attr_set<I, S>(names: I) -> AttrSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(Into::into).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    pub name: String,
    pub domain: Arc<Carrier>,
}

/// Named, ordered attribute list.
pub struct Scheme {
    name: String,
    attributes: Vec<Attribute>,
    row_carrier: OnceLock<Arc<Carrier>>,
    sub_carriers: Mutex<HashMap<Vec<usize>, Arc<Carrier>>>,
}

impl Scheme {
    pub fn new(name: impl Into<String>, attributes: Vec<Attribute>) -> Result<Arc<Scheme>> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if !seen.insert(a.name.as_str()) {
                return Err(Error::InvalidScheme(format!(
                    "duplicate attribute `{}` in `{name}`",
                    a.name
                )));
            }
        }
        Ok(Arc::new(Scheme {
            name,
            attributes,
            row_carrier: OnceLock::new(),
            sub_carriers: Mutex::new(HashMap::new()),
        }))
    }

    /// Scheme whose attributes all range over the same atoms.
    pub fn uniform<S: AsRef<str>>(name: &str, attrs: &[S], domain: &[&str]) -> Result<Arc<Scheme>> {
        let attributes = attrs
            .iter()
            .map(|a| {
                Ok(Attribute {
                    name: a.as_ref().to_string(),
                    domain: Carrier::atoms(a.as_ref(), domain)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Scheme::new(name, attributes)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }

    pub fn all_attributes(&self) -> AttrSet {
        attr_set(self.attribute_names())
    }

    pub fn index_of(&self, attr: &str) -> Result<usize> {
        self.attributes
            .iter()
            .position(|a| a.name == attr)
            .ok_or_else(|| Error::UnknownAttribute(attr.to_string()))
    }

    /// Positions of `attrs`, in scheme order.
    pub fn indices_of(&self, attrs: &AttrSet) -> Result<Vec<usize>> {
        let mut idx = attrs
            .iter()
            .map(|a| self.index_of(a))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        Ok(idx)
    }

    pub fn check_attrs(&self, attrs: &AttrSet) -> Result<()> {
        self.indices_of(attrs).map(|_| ())
    }

    fn product_size(&self, idx: &[usize]) -> u128 {
        idx.iter()
            .map(|&i| self.attributes[i].domain.len() as u128)
            .product()
    }

    /// All rows of the product of the domains, lexicographic in domain order.
    pub fn row_carrier(&self) -> Result<Arc<Carrier>> {
        self.row_carrier_bounded(ROW_CARRIER_LIMIT)
    }

    pub fn row_carrier_bounded(&self, limit: u128) -> Result<Arc<Carrier>> {
        if let Some(c) = self.row_carrier.get() {
            return Ok(c.clone());
        }
        let all: Vec<usize> = (0..self.arity()).collect();
        let c = self.build_product(&all, self.name.clone(), limit)?;
        Ok(self.row_carrier.get_or_init(|| c).clone())
    }

    /// Carrier of sub-rows over the attributes at `idx` (scheme order).
    pub fn sub_carrier(&self, idx: &[usize]) -> Result<Arc<Carrier>> {
        if idx.len() == self.arity() {
            return self.row_carrier();
        }
        if let Some(c) = self.sub_carriers.lock().unwrap().get(idx) {
            return Ok(c.clone());
        }
        let names: Vec<&str> = idx.iter().map(|&i| self.attributes[i].name.as_str()).collect();
        let name = format!("{}[{}]", self.name, names.join(","));
        let c = self.build_product(idx, name, ROW_CARRIER_LIMIT)?;
        Ok(self
            .sub_carriers
            .lock()
            .unwrap()
            .entry(idx.to_vec())
            .or_insert(c)
            .clone())
    }

    fn build_product(&self, idx: &[usize], name: String, limit: u128) -> Result<Arc<Carrier>> {
        let needed = self.product_size(idx);
        if needed > limit {
            return Err(Error::ResourceExceeded {
                what: format!("row carrier `{name}`"),
                needed,
                limit,
            });
        }
        let mut rows: Vec<Vec<Value>> = vec![Vec::with_capacity(idx.len())];
        for &i in idx {
            let dom = &self.attributes[i].domain;
            let mut next = Vec::with_capacity(rows.len() * dom.len());
            for r in &rows {
                for v in dom.elements() {
                    let mut r2 = r.clone();
                    r2.push(v.clone());
                    next.push(r2);
                }
            }
            rows = next;
        }
        Carrier::new(name, rows.into_iter().map(Value::Tuple).collect())
    }

    /// Index of a row (given as per-attribute domain positions) in the
    /// carrier over `idx`.
    fn mixed_radix(&self, idx: &[usize], digits: impl Iterator<Item = usize>) -> usize {
        let mut pos = 0;
        for (&i, d) in idx.iter().zip(digits) {
            pos = pos * self.attributes[i].domain.len() + d;
        }
        pos
    }

    fn row_digits(&self, row: &Row) -> Result<Vec<usize>> {
        row.0
            .iter()
            .zip(&self.attributes)
            .map(|(v, a)| a.domain.position_or_err(v))
            .collect()
    }
}

impl PartialEq for Scheme {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.attributes == other.attributes
    }
}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, a) in self.attributes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {:?}", a.name, a.domain)?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Row(pub Vec<Value>);

impl Row {
    pub fn atoms<S: AsRef<str>>(values: &[S]) -> Row {
        Row(values.iter().map(|v| Value::atom(v.as_ref())).collect())
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Value {
        &self.0[i]
    }
}

impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// A set of rows over a scheme.
#[derive(Clone, Debug)]
pub struct Table {
    scheme: Arc<Scheme>,
    rows: BTreeSet<Row>,
}

impl Table {
    /// Duplicate rows collapse; every value must lie in its domain.
    pub fn new<I>(scheme: Arc<Scheme>, rows: I) -> Result<Table>
    where
        I: IntoIterator<Item = Row>,
    {
        let mut set = BTreeSet::new();
        for row in rows {
            if row.0.len() != scheme.arity() {
                return Err(Error::InvalidTable(format!(
                    "row {row} has {} values, scheme `{}` has {} attributes",
                    row.0.len(),
                    scheme.name(),
                    scheme.arity()
                )));
            }
            for (v, a) in row.0.iter().zip(scheme.attributes()) {
                if !a.domain.contains(v) {
                    return Err(Error::NotAnElement {
                        value: v.to_string(),
                        carrier: a.name.clone(),
                    });
                }
            }
            set.insert(row);
        }
        Ok(Table { scheme, rows: set })
    }

    pub fn empty(scheme: Arc<Scheme>) -> Table {
        Table {
            scheme,
            rows: BTreeSet::new(),
        }
    }

    /// Every row of the row carrier.
    pub fn full(scheme: Arc<Scheme>) -> Result<Table> {
        let carrier = scheme.row_carrier()?;
        let rows = carrier
            .elements()
            .iter()
            .map(|v| match v {
                Value::Tuple(vs) => Row(vs.clone()),
                _ => unreachable!("row carriers hold tuples"),
            })
            .collect::<Vec<_>>();
        Table::new(scheme, rows)
    }

    pub fn name(&self) -> &str {
        self.scheme.name()
    }

    pub fn scheme(&self) -> &Arc<Scheme> {
        &self.scheme
    }

    pub fn rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn contains(&self, row: &Row) -> bool {
        self.rows.contains(row)
    }

    pub fn intersection(&self, other: &Table) -> Result<Table> {
        if self.scheme != other.scheme {
            return Err(Error::InvalidTable(format!(
                "cannot intersect `{}` with `{}`",
                self.name(),
                other.name()
            )));
        }
        Ok(Table {
            scheme: self.scheme.clone(),
            rows: self.rows.intersection(&other.rows).cloned().collect(),
        })
    }

    /// Values of `row` at the scheme positions `idx`.
    pub fn restrict<'a>(row: &'a Row, idx: &'a [usize]) -> impl Iterator<Item = &'a Value> + 'a {
        idx.iter().map(move |&i| &row.0[i])
    }
}

impl PartialEq for Table {
    fn eq(&self, other: &Self) -> bool {
        self.scheme == other.scheme && self.rows == other.rows
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.scheme.attribute_names().collect();
        writeln!(f, "{}", names.join(","))?;
        for r in &self.rows {
            let vals: Vec<String> = r.0.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", vals.join(","))?;
        }
        Ok(())
    }
}

/// Carrier of all candidate rows of `t`.
pub fn row_carrier(t: &Table) -> Result<Arc<Carrier>> {
    t.scheme.row_carrier()
}

/// The partial identity of `t` on its row carrier: `b pid a` iff `b = a`
/// and `a` is a row of `t`.
pub fn pid(t: &Table) -> Result<Rel> {
    let carrier = t.scheme.row_carrier()?;
    let all: Vec<usize> = (0..t.scheme.arity()).collect();
    let mut idx = Vec::with_capacity(t.len());
    for row in t.rows() {
        let digits = t.scheme.row_digits(row)?;
        let i = t.scheme.mixed_radix(&all, digits.into_iter());
        idx.push((i, i));
    }
    Rel::from_index_pairs(&carrier, &carrier, idx)
}

/// Projection function from the row carrier onto sub-rows over `attrs`.
pub fn proj_fn(scheme: &Scheme, attrs: &AttrSet) -> Result<Rel> {
    let idx = scheme.indices_of(attrs)?;
    let source = scheme.row_carrier()?;
    let target = scheme.sub_carrier(&idx)?;
    let radix: Vec<usize> = scheme.attributes.iter().map(|a| a.domain.len()).collect();
    let mut outputs = Vec::with_capacity(source.len());
    let mut digits = vec![0usize; radix.len()];
    for _ in 0..source.len() {
        outputs.push(scheme.mixed_radix(&idx, idx.iter().map(|&i| digits[i])));
        // Advance the odometer, rightmost digit fastest.
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < radix[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    Rel::from_index_fn(&source, &target, &outputs)
}

/// Binary encoding of an n-ary table: each row `(a, b, c, ...)` becomes the
/// pair `a -> (b, (c, ...))`, nested to the right.
pub fn encode_pairs(t: &Table) -> Result<Rel> {
    let attrs = t.scheme.attributes();
    if attrs.len() < 2 {
        return Err(Error::InvalidTable(format!(
            "pair encoding needs at least 2 attributes, `{}` has {}",
            t.name(),
            attrs.len()
        )));
    }
    let source = attrs[0].domain.clone();
    let mut target = attrs[attrs.len() - 1].domain.clone();
    for a in attrs[1..attrs.len() - 1].iter().rev() {
        target = Carrier::product(&a.domain, &target)?;
    }
    let pairs: Vec<(Value, Value)> = t
        .rows()
        .map(|r| {
            let vals = r.values();
            let nested = vals[1..vals.len() - 1]
                .iter()
                .rev()
                .fold(vals[vals.len() - 1].clone(), |acc, v| Value::pair(v.clone(), acc));
            (vals[0].clone(), nested)
        })
        .collect();
    Rel::from_value_pairs(&source, &target, pairs)
}

#[cfg(test)]
mod tests;
