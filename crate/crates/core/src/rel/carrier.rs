use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest carrier that will be enumerated element by element.
pub const MAX_CARRIER_ELEMENTS: u128 = 10_000_000;

/// An element of a carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    /// Sole inhabitant of the unit carrier, the target of `bang`.
    Unit,
    Atom(String),
    Pair(Box<Value>, Box<Value>),
    /// A table row or sub-row.
    Tuple(Vec<Value>),
}

impl Value {
    pub fn atom(name: impl Into<String>) -> Value {
        Value::Atom(name.into())
    }

    pub fn pair(left: Value, right: Value) -> Value {
        Value::Pair(Box::new(left), Box::new(right))
    }

    pub fn tuple<I: IntoIterator<Item = Value>>(items: I) -> Value {
        Value::Tuple(items.into_iter().collect())
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(l, r) => Some((l, r)),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => f.write_str("()"),
            Value::Atom(a) => f.write_str(a),
            Value::Pair(l, r) => write!(f, "({l},{r})"),
            Value::Tuple(vs) => {
                f.write_str("[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
        }
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

/// A named finite set with a fixed element order.
///
/// Equality compares name and elements; two carriers holding the same
/// values under different names are different carriers.
pub struct Carrier {
    id: u64,
    name: String,
    elements: Vec<Value>,
    index: HashMap<Value, usize>,
    factors: Option<(Arc<Carrier>, Arc<Carrier>)>,
}

impl Carrier {
    pub fn new(name: impl Into<String>, elements: Vec<Value>) -> Result<Arc<Carrier>> {
        Self::build(name.into(), elements, None)
    }

    /// Carrier of atoms, in the given order.
    pub fn atoms<S: AsRef<str>>(name: impl Into<String>, atoms: &[S]) -> Result<Arc<Carrier>> {
        Self::new(
            name,
            atoms.iter().map(|a| Value::atom(a.as_ref())).collect(),
        )
    }

    /// `n` atoms named `{prefix}0 .. {prefix}{n-1}`.
    pub fn numbered(name: impl Into<String>, prefix: &str, n: usize) -> Arc<Carrier> {
        let elements = (0..n).map(|i| Value::atom(format!("{prefix}{i}"))).collect();
        Self::build(name.into(), elements, None).expect("numbered atoms are distinct")
    }

    fn build(
        name: String,
        elements: Vec<Value>,
        factors: Option<(Arc<Carrier>, Arc<Carrier>)>,
    ) -> Result<Arc<Carrier>> {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, v) in elements.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateElement {
                    value: v.to_string(),
                    carrier: name,
                });
            }
        }
        Ok(Arc::new(Carrier {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            name,
            elements,
            index,
            factors,
        }))
    }

    /// The one-element carrier `{()}`.
    pub fn unit() -> Arc<Carrier> {
        static UNIT: OnceLock<Arc<Carrier>> = OnceLock::new();
        UNIT.get_or_init(|| Self::build("1".into(), vec![Value::Unit], None).unwrap())
            .clone()
    }

    /// Pair carrier `left * right`, elements in left-major lexicographic
    /// order. Repeated requests for the same factors return the same carrier.
    pub fn product(left: &Arc<Carrier>, right: &Arc<Carrier>) -> Result<Arc<Carrier>> {
        type Cache = Mutex<HashMap<(u64, u64), Arc<Carrier>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (left.id, right.id);
        if let Some(c) = cache.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let needed = left.len() as u128 * right.len() as u128;
        if needed > MAX_CARRIER_ELEMENTS {
            return Err(Error::ResourceExceeded {
                what: format!("pair carrier {}*{}", left.name, right.name),
                needed,
                limit: MAX_CARRIER_ELEMENTS,
            });
        }
        let mut elements = Vec::with_capacity(needed as usize);
        for l in &left.elements {
            for r in &right.elements {
                elements.push(Value::pair(l.clone(), r.clone()));
            }
        }
        let name = format!("{}*{}", left.name, right.name);
        let carrier = Self::build(name, elements, Some((left.clone(), right.clone())))?;
        Ok(cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(carrier)
            .clone())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[Value] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, v: &Value) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.index.contains_key(v)
    }

    pub fn element(&self, i: usize) -> &Value {
        &self.elements[i]
    }

    /// Left and right factors, for carriers built by [`Carrier::product`].
    pub fn factors(&self) -> Option<&(Arc<Carrier>, Arc<Carrier>)> {
        self.factors.as_ref()
    }

    pub fn is_pair_carrier(&self) -> bool {
        self.factors.is_some() || self.elements.iter().all(|v| v.as_pair().is_some())
    }

    pub(crate) fn position_or_err(&self, v: &Value) -> Result<usize> {
        self.position(v).ok_or_else(|| Error::NotAnElement {
            value: v.to_string(),
            carrier: self.name.clone(),
        })
    }
}

/// Same carrier: identical allocation, or equal name and elements.
pub fn same_carrier(a: &Arc<Carrier>, b: &Arc<Carrier>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for Carrier {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id || (self.name == other.name && self.elements == other.elements)
    }
}

impl Eq for Carrier {}

impl fmt::Debug for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{", self.name)?;
        for (i, v) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Serialized form of a carrier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarrierRepr {
    pub name: String,
    pub elements: Vec<Value>,
}

impl From<&Carrier> for CarrierRepr {
    fn from(c: &Carrier) -> Self {
        CarrierRepr {
            name: c.name.clone(),
            elements: c.elements.clone(),
        }
    }
}

impl CarrierRepr {
    pub fn into_carrier(self) -> Result<Arc<Carrier>> {
        Carrier::new(self.name, self.elements)
    }
}
