//! Dense row-major bit matrix backing [`Rel`](super::Rel).
//!
//! Row `i` holds the outputs of input `i`; bit `j` of that row is set iff
//! the pair (input `i`, output `j`) is present.

use smallvec::{smallvec, SmallVec};

use crate::error::{Error, Result};

/// Largest matrix (in bits) that will be materialized.
pub const MAX_DENSE_BITS: u128 = 1 << 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    words: SmallVec<[u64; 4]>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        let needed = rows as u128 * cols as u128;
        if needed > MAX_DENSE_BITS {
            return Err(Error::ResourceExceeded {
                what: format!("{rows}x{cols} relation"),
                needed,
                limit: MAX_DENSE_BITS,
            });
        }
        let wpr = cols.div_ceil(64);
        Ok(BitMatrix {
            rows,
            cols,
            wpr,
            words: smallvec![0; rows * wpr],
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.wpr + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows && c < self.cols);
        self.words[r * self.wpr + c / 64] |= 1 << (c % 64);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.wpr..(r + 1) * self.wpr]
    }

    pub fn row_is_empty(&self, r: usize) -> bool {
        self.row(r).iter().all(|w| *w == 0)
    }

    pub fn row_count(&self, r: usize) -> usize {
        self.row(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Do rows `a` of `self` and `b` of `other` share a set bit?
    pub fn rows_intersect(&self, a: usize, other: &BitMatrix, b: usize) -> bool {
        self.row(a)
            .iter()
            .zip(other.row(b))
            .any(|(x, y)| x & y != 0)
    }

    pub fn ones_in_row(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(r)
            .iter()
            .enumerate()
            .flat_map(|(wi, &w)| BitIter(w).map(move |b| wi * 64 + b))
    }

    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| self.ones_in_row(r).map(move |c| (r, c)))
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Result<BitMatrix> {
        let mut out = BitMatrix::zeros(self.cols, self.rows)?;
        for (r, c) in self.ones() {
            out.set(c, r);
        }
        Ok(out)
    }

    /// Boolean product: row `i` of the result is the union of the rows of
    /// `right` selected by row `i` of `self`.
    pub fn product(&self, right: &BitMatrix) -> Result<BitMatrix> {
        debug_assert_eq!(self.cols, right.rows);
        let mut out = BitMatrix::zeros(self.rows, right.cols)?;
        let wpr = out.wpr;
        for i in 0..self.rows {
            for k in self.ones_in_row(i) {
                let src = right.row(k);
                let dst = &mut out.words[i * wpr..(i + 1) * wpr];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d |= s;
                }
            }
        }
        Ok(out)
    }

    pub fn union(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = self.clone();
        for (d, s) in out.words.iter_mut().zip(&other.words) {
            *d |= s;
        }
        out
    }

    pub fn intersect(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = self.clone();
        for (d, s) in out.words.iter_mut().zip(&other.words) {
            *d &= s;
        }
        out
    }

    pub fn is_subset_of(&self, other: &BitMatrix) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(tz)
    }
}
