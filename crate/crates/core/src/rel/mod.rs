//! Finite binary relations between named carriers.
//!
//! A [`Rel`] from carrier `A` (its *source*) to carrier `B` (its *target*)
//! is a set of pairs stored input-first: the pair `(a, b)` is present iff
//! `b R a` holds in the usual point-free notation, where the output is
//! written on the left. Composition follows the same convention, so
//! `compose(r, s)` is `r . s`, "first `s`, then `r`", and requires
//! `s.target == r.source`.
//!
//! Functions, partial identities, projections and data tables are all
//! plain relations; [`Rel::is_function`] and friends classify them.

mod bits;
mod carrier;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use bits::MAX_DENSE_BITS;
use bits::BitMatrix;
pub use carrier::{same_carrier, Carrier, CarrierRepr, Value, MAX_CARRIER_ELEMENTS};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Rel {
    source: Arc<Carrier>,
    target: Arc<Carrier>,
    bits: BitMatrix,
}

fn mismatch(op: &'static str, left: &Carrier, right: &Carrier) -> Error {
    Error::CarrierMismatch {
        op,
        left: left.name().to_string(),
        right: right.name().to_string(),
    }
}

fn expect_same(op: &'static str, a: &Arc<Carrier>, b: &Arc<Carrier>) -> Result<()> {
    if same_carrier(a, b) {
        Ok(())
    } else {
        Err(mismatch(op, a, b))
    }
}

impl Rel {
    fn with_bits(source: Arc<Carrier>, target: Arc<Carrier>, bits: BitMatrix) -> Rel {
        debug_assert_eq!(bits.rows(), source.len());
        debug_assert_eq!(bits.cols(), target.len());
        Rel {
            source,
            target,
            bits,
        }
    }

    /// The empty relation.
    pub fn empty(source: &Arc<Carrier>, target: &Arc<Carrier>) -> Result<Rel> {
        let bits = BitMatrix::zeros(source.len(), target.len())?;
        Ok(Rel::with_bits(source.clone(), target.clone(), bits))
    }

    /// The full relation `source x target`.
    pub fn top(source: &Arc<Carrier>, target: &Arc<Carrier>) -> Result<Rel> {
        let mut r = Rel::empty(source, target)?;
        for i in 0..source.len() {
            for j in 0..target.len() {
                r.bits.set(i, j);
            }
        }
        Ok(r)
    }

    pub fn identity(carrier: &Arc<Carrier>) -> Result<Rel> {
        let mut r = Rel::empty(carrier, carrier)?;
        for i in 0..carrier.len() {
            r.bits.set(i, i);
        }
        Ok(r)
    }

    /// The constant function into the unit carrier.
    pub fn bang(carrier: &Arc<Carrier>) -> Result<Rel> {
        let unit = Carrier::unit();
        let mut r = Rel::empty(carrier, &unit)?;
        for i in 0..carrier.len() {
            r.bits.set(i, 0);
        }
        Ok(r)
    }

    /// Left projection `(y, x) -> y` out of a pair carrier.
    pub fn proj1(pairs: &Arc<Carrier>) -> Result<Rel> {
        Self::projection(pairs, true)
    }

    /// Right projection `(y, x) -> x` out of a pair carrier.
    pub fn proj2(pairs: &Arc<Carrier>) -> Result<Rel> {
        Self::projection(pairs, false)
    }

    fn projection(pairs: &Arc<Carrier>, left: bool) -> Result<Rel> {
        if !pairs.is_pair_carrier() {
            return Err(Error::NotPairCarrier(pairs.name().to_string()));
        }
        let target = match pairs.factors() {
            Some((l, r)) => {
                if left {
                    l.clone()
                } else {
                    r.clone()
                }
            }
            None => {
                // Components in order of first appearance.
                let mut seen = Vec::new();
                for v in pairs.elements() {
                    let (l, r) = v.as_pair().expect("checked pair carrier");
                    let c = if left { l } else { r };
                    if !seen.contains(c) {
                        seen.push(c.clone());
                    }
                }
                let tag = if left { "fst" } else { "snd" };
                Carrier::new(format!("{tag}({})", pairs.name()), seen)?
            }
        };
        Rel::from_fn(pairs, &target, |v| {
            let (l, r) = v.as_pair().expect("checked pair carrier");
            if left {
                l.clone()
            } else {
                r.clone()
            }
        })
    }

    /// Relation from explicit `(input, output)` pairs.
    pub fn from_pairs<'a, I>(source: &Arc<Carrier>, target: &Arc<Carrier>, pairs: I) -> Result<Rel>
    where
        I: IntoIterator<Item = (&'a Value, &'a Value)>,
    {
        let mut r = Rel::empty(source, target)?;
        for (a, b) in pairs {
            let i = source.position_or_err(a)?;
            let j = target.position_or_err(b)?;
            r.bits.set(i, j);
        }
        Ok(r)
    }

    /// Owned-value variant of [`Rel::from_pairs`].
    pub fn from_value_pairs<I>(source: &Arc<Carrier>, target: &Arc<Carrier>, pairs: I) -> Result<Rel>
    where
        I: IntoIterator<Item = (Value, Value)>,
    {
        let pairs: Vec<_> = pairs.into_iter().collect();
        Rel::from_pairs(source, target, pairs.iter().map(|(a, b)| (a, b)))
    }

    /// Relation from `(input index, output index)` pairs.
    pub fn from_index_pairs<I>(source: &Arc<Carrier>, target: &Arc<Carrier>, pairs: I) -> Result<Rel>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut r = Rel::empty(source, target)?;
        for (i, j) in pairs {
            if i >= source.len() || j >= target.len() {
                return Err(Error::NotAnElement {
                    value: format!("#{i}->#{j}"),
                    carrier: format!("{}->{}", source.name(), target.name()),
                });
            }
            r.bits.set(i, j);
        }
        Ok(r)
    }

    /// The total function `a -> f(a)`.
    pub fn from_fn<F>(source: &Arc<Carrier>, target: &Arc<Carrier>, f: F) -> Result<Rel>
    where
        F: Fn(&Value) -> Value,
    {
        let mut r = Rel::empty(source, target)?;
        for (i, a) in source.elements().iter().enumerate() {
            let j = target.position_or_err(&f(a))?;
            r.bits.set(i, j);
        }
        Ok(r)
    }

    /// Function given as a table of output indices, one per input.
    pub fn from_index_fn(source: &Arc<Carrier>, target: &Arc<Carrier>, outputs: &[usize]) -> Result<Rel> {
        if outputs.len() != source.len() {
            return Err(Error::NotAFunction(format!(
                "{} outputs for {} inputs",
                outputs.len(),
                source.len()
            )));
        }
        Rel::from_index_pairs(source, target, outputs.iter().copied().enumerate())
    }

    pub fn source(&self) -> &Arc<Carrier> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Carrier> {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Does `output R input` hold?
    pub fn holds(&self, input: &Value, output: &Value) -> bool {
        match (self.source.position(input), self.target.position(output)) {
            (Some(i), Some(j)) => self.bits.get(i, j),
            _ => false,
        }
    }

    pub fn holds_at(&self, input: usize, output: usize) -> bool {
        self.bits.get(input, output)
    }

    /// `(input, output)` pairs in source-major carrier order.
    pub fn pairs(&self) -> impl Iterator<Item = (&Value, &Value)> + '_ {
        self.bits
            .ones()
            .map(|(i, j)| (self.source.element(i), self.target.element(j)))
    }

    pub fn index_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.ones()
    }

    /// Output indices related to input index `i`.
    pub fn outputs_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones_in_row(i)
    }

    /// Some output of `input`, the first in target order.
    pub fn apply(&self, input: &Value) -> Option<&Value> {
        let i = self.source.position(input)?;
        self.bits.ones_in_row(i).next().map(|j| self.target.element(j))
    }

    /// Output index of a function at input index `i`.
    pub fn apply_index(&self, i: usize) -> Option<usize> {
        self.bits.ones_in_row(i).next()
    }

    /// `self . other`: first `other`, then `self`.
    pub fn compose(&self, other: &Rel) -> Result<Rel> {
        expect_same("compose", &other.target, &self.source)?;
        let bits = other.bits.product(&self.bits)?;
        Ok(Rel::with_bits(other.source.clone(), self.target.clone(), bits))
    }

    pub fn converse(&self) -> Rel {
        let bits = self
            .bits
            .transpose()
            .expect("transpose has the same size as its input");
        Rel::with_bits(self.target.clone(), self.source.clone(), bits)
    }

    fn same_type(&self, other: &Rel, op: &'static str) -> Result<()> {
        expect_same(op, &self.source, &other.source)?;
        expect_same(op, &self.target, &other.target)
    }

    pub fn union(&self, other: &Rel) -> Result<Rel> {
        self.same_type(other, "union")?;
        Ok(Rel::with_bits(
            self.source.clone(),
            self.target.clone(),
            self.bits.union(&other.bits),
        ))
    }

    pub fn intersect(&self, other: &Rel) -> Result<Rel> {
        self.same_type(other, "intersect")?;
        Ok(Rel::with_bits(
            self.source.clone(),
            self.target.clone(),
            self.bits.intersect(&other.bits),
        ))
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &Rel) -> Result<bool> {
        self.same_type(other, "includes")?;
        Ok(other.bits.is_subset_of(&self.bits))
    }

    /// `self ⊆ other`.
    pub fn subset_of(&self, other: &Rel) -> Result<bool> {
        other.includes(self)
    }

    /// `ker R = R° . R`, relating inputs that share an output.
    pub fn kernel(&self) -> Result<Rel> {
        self.converse().compose(self)
    }

    /// `s ⊆ ker self`, without materializing the kernel.
    pub fn kernel_includes(&self, s: &Rel) -> Result<bool> {
        expect_same("kernel_includes", &s.source, &self.source)?;
        expect_same("kernel_includes", &s.target, &self.source)?;
        Ok(s
            .bits
            .ones()
            .all(|(i, j)| self.bits.rows_intersect(i, &self.bits, j)))
    }

    /// Injectivity preorder: `self ≤ other` iff `ker other ⊆ ker self`,
    /// i.e. `self` is less injective than `other`.
    pub fn leq(&self, other: &Rel) -> Result<bool> {
        expect_same("leq", &self.source, &other.source)?;
        self.kernel_includes(&other.kernel()?)
    }

    /// Join (fork / split): `(a, b)` is an output of `x` iff `a R x` and
    /// `b S x`. For functions this pairs their outputs.
    pub fn fork(&self, other: &Rel) -> Result<Rel> {
        expect_same("fork", &self.source, &other.source)?;
        let target = Carrier::product(&self.target, &other.target)?;
        let width = other.target.len();
        let mut bits = BitMatrix::zeros(self.source.len(), target.len())?;
        for x in 0..self.source.len() {
            for a in self.bits.ones_in_row(x) {
                for b in other.bits.ones_in_row(x) {
                    bits.set(x, a * width + b);
                }
            }
        }
        Ok(Rel::with_bits(self.source.clone(), target, bits))
    }

    /// `f × g = (f . π1) ⋈ (g . π2)` over the pair carrier of the sources.
    pub fn product(&self, other: &Rel) -> Result<Rel> {
        let pairs = Carrier::product(&self.source, &other.source)?;
        let left = self.compose(&Rel::proj1(&pairs)?)?;
        let right = other.compose(&Rel::proj2(&pairs)?)?;
        left.fork(&right)
    }

    /// Every input has at least one output.
    pub fn is_entire(&self) -> bool {
        (0..self.source.len()).all(|i| !self.bits.row_is_empty(i))
    }

    /// No input has two outputs.
    pub fn is_simple(&self) -> bool {
        (0..self.source.len()).all(|i| self.bits.row_count(i) <= 1)
    }

    pub fn is_function(&self) -> bool {
        (0..self.source.len()).all(|i| self.bits.row_count(i) == 1)
    }

    /// Distinct inputs never share an output (`ker R ⊆ id`).
    pub fn is_injective(&self) -> bool {
        let n = self.source.len();
        (0..n).all(|i| (i + 1..n).all(|j| !self.bits.rows_intersect(i, &self.bits, j)))
    }

    /// Every output is reached.
    pub fn is_surjective(&self) -> bool {
        self.converse().is_entire()
    }

    pub(crate) fn require_function(&self, what: &str) -> Result<()> {
        if self.is_function() {
            Ok(())
        } else {
            Err(Error::NotAFunction(format!(
                "{what}: {} -> {}",
                self.source.name(),
                self.target.name()
            )))
        }
    }

    /// Serializable form.
    pub fn to_repr(&self) -> RelRepr {
        RelRepr {
            source: self.source.as_ref().into(),
            target: self.target.as_ref().into(),
            pairs: self.pairs().map(|(a, b)| (a.clone(), b.clone())).collect(),
        }
    }
}

impl PartialEq for Rel {
    fn eq(&self, other: &Self) -> bool {
        same_carrier(&self.source, &other.source)
            && same_carrier(&self.target, &other.target)
            && self.bits == other.bits
    }
}

impl Eq for Rel {}

/// One `b <- a` line per pair, sorted by output then input in carrier order.
impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pairs: Vec<(usize, usize)> = self.bits.ones().map(|(i, j)| (j, i)).collect();
        pairs.sort_unstable();
        for (j, i) in pairs {
            writeln!(f, "{} <- {}", self.target.element(j), self.source.element(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rel({} -> {}) {{", self.source.name(), self.target.name())?;
        for (n, (a, b)) in self.pairs().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b} <- {a}")?;
        }
        f.write_str("}")
    }
}

/// Serialized relation: carriers plus `(input, output)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelRepr {
    pub source: CarrierRepr,
    pub target: CarrierRepr,
    pub pairs: Vec<(Value, Value)>,
}

impl RelRepr {
    pub fn into_rel(self) -> Result<Rel> {
        let source = self.source.into_carrier()?;
        let target = self.target.into_carrier()?;
        Rel::from_pairs(&source, &target, self.pairs.iter().map(|(a, b)| (a, b)))
    }
}

impl Serialize for Rel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_repr().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        RelRepr::deserialize(d)?
            .into_rel()
            .map_err(serde::de::Error::custom)
    }
}
