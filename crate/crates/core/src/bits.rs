//! Square boolean matrices packed into `u64` words.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix { n, words, data: vec![0; n * words] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.data[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let w = &mut self.data[i * self.words + j / 64];
        if v {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    /// Indices `j` with `get(i, j)`.
    pub fn row_iter(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(i);
        let n = self.n;
        row.iter().enumerate().flat_map(move |(w, &bits)| {
            let mut b = bits;
            core::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let t = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * 64 + t)
            })
        })
        .take_while(move |&j| j < n)
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `row(i) |= row(j)`.
    pub fn or_row_into(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let (wi, wj) = (i * self.words, j * self.words);
        for k in 0..self.words {
            let v = self.data[wj + k];
            self.data[wi + k] |= v;
        }
    }

    /// Whether row `j` is a subset of row `i`.
    pub fn row_contains(&self, i: usize, j: usize) -> bool {
        self.row(i).iter().zip(self.row(j)).all(|(a, b)| b & !a == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.n);
        for i in 0..self.n {
            for j in self.row_iter(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Warshall closure.
    pub fn transitive_closure(&mut self) {
        for k in 0..self.n {
            for i in 0..self.n {
                if self.get(i, k) {
                    self.or_row_into(i, k);
                }
            }
        }
    }
}

/// Number of bits set in the word-wise intersection of two rows.
pub fn intersection_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}
