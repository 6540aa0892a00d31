//! Enumeration and sampling helpers shared by unit tests.

use std::sync::Arc;

use rand::Rng;

use crate::rel::{Carrier, Rel};

pub fn carrier(name: &str, n: usize) -> Arc<Carrier> {
    Carrier::numbered(name, &name.to_lowercase(), n)
}

/// Every relation between `a` and `b`, by bitmask.
pub fn all_relations(a: &Arc<Carrier>, b: &Arc<Carrier>) -> Vec<Rel> {
    let cells = a.len() * b.len();
    assert!(cells <= 16, "too many relations to enumerate");
    (0u32..1 << cells)
        .map(|m| {
            let pairs = (0..cells).filter(|i| m >> i & 1 == 1).map(|i| (i / b.len(), i % b.len()));
            Rel::from_index_pairs(a, b, pairs).unwrap()
        })
        .collect()
}

/// Every total function from `a` to `d`.
pub fn all_functions(a: &Arc<Carrier>, d: &Arc<Carrier>) -> Vec<Rel> {
    let total = d.len().pow(a.len() as u32);
    (0..total)
        .map(|mut code| {
            let outs: Vec<usize> = (0..a.len())
                .map(|_| {
                    let o = code % d.len();
                    code /= d.len();
                    o
                })
                .collect();
            Rel::from_index_fn(a, d, &outs).unwrap()
        })
        .collect()
}

pub fn random_rel<R: Rng>(rng: &mut R, a: &Arc<Carrier>, b: &Arc<Carrier>, density: f64) -> Rel {
    let mut pairs = Vec::new();
    for i in 0..a.len() {
        for j in 0..b.len() {
            if rng.random_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    Rel::from_index_pairs(a, b, pairs).unwrap()
}

pub fn random_fn<R: Rng>(rng: &mut R, a: &Arc<Carrier>, d: &Arc<Carrier>) -> Rel {
    let outs: Vec<usize> = (0..a.len()).map(|_| rng.random_range(0..d.len())).collect();
    Rel::from_index_fn(a, d, &outs).unwrap()
}
