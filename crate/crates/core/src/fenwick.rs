//! Binary indexed tree over value ranks.

use num_traits::{NumAssign, PrimInt};

/// Cells are `u128` by default; `u64` halves the footprint when sums are known to fit.
#[derive(Debug, Clone)]
pub struct Fenwick<T = u128> {
    cells: Vec<T>,
    /// Active length; capacity may be larger after shrinking resets.
    size: usize,
}

impl<T: PrimInt + NumAssign> Fenwick<T> {
    pub fn new(n: usize) -> Self {
        Fenwick {
            cells: vec![T::zero(); n + 1],
            size: n,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Resizes to `n` positions and clears.
    pub fn reset(&mut self, n: usize) {
        if self.cells.len() < n + 1 {
            self.cells.resize(n + 1, T::zero());
        }
        self.size = n;
        self.clear();
    }

    /// `O(len)`, below the cost of the sweep that follows.
    pub fn clear(&mut self) {
        self.cells[..=self.size].fill(T::zero());
    }

    /// Adds `v` at 0-based position `i`.
    #[inline]
    pub fn add(&mut self, i: usize, v: T) {
        let mut i = i + 1;
        while i <= self.size {
            self.cells[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `0..i`.
    #[inline]
    pub fn prefix(&self, mut i: usize) -> T {
        let mut s = T::zero();
        while i > 0 {
            s += self.cells[i];
            i &= i - 1;
        }
        s
    }

    /// Sum over positions `i..len`.
    #[inline]
    pub fn suffix(&self, i: usize, total: T) -> T {
        total - self.prefix(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums_match_naive() {
        let mut f = Fenwick::<u128>::new(17);
        let mut naive = [0u128; 17];
        for (step, i) in [3usize, 0, 16, 7, 7, 12, 1].iter().enumerate() {
            f.add(*i, step as u128 + 1);
            naive[*i] += step as u128 + 1;
            for q in 0..=17 {
                assert_eq!(f.prefix(q), naive[..q].iter().sum::<u128>());
            }
        }
    }

    #[test]
    fn clear_and_shrink() {
        let mut f = Fenwick::<u64>::new(8);
        f.add(2, 5);
        f.add(6, 1);
        assert_eq!(f.prefix(8), 6);
        f.clear();
        assert_eq!(f.prefix(8), 0);
        f.add(6, 2);
        assert_eq!(f.prefix(7), 2);
        assert_eq!(f.prefix(6), 0);
        f.reset(3);
        f.add(2, 4);
        assert_eq!((f.len(), f.prefix(3)), (3, 4));
        f.reset(8);
        assert_eq!(f.prefix(8), 0);
    }
}
