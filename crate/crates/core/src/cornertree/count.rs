use num_traits::{AsPrimitive, NumAssign, PrimInt};

use super::tree::{CornerTree, Direction};
use crate::fenwick::Fenwick;
use crate::series::RankSequence;

/// Reusable scratch space for counting trees over one sequence length.
#[derive(Debug, Default)]
pub struct TreeCounter {
    narrow: Scratch<u64>,
    wide: Scratch<u128>,
}

#[derive(Debug)]
struct Scratch<T> {
    fenwick: Fenwick<T>,
    weights: Vec<Vec<T>>,
    sums: Vec<T>,
}

impl<T: PrimInt + NumAssign> Default for Scratch<T> {
    fn default() -> Self {
        Scratch {
            fenwick: Fenwick::new(0),
            weights: vec![],
            sums: vec![],
        }
    }
}

impl TreeCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of vertex maps from `tree` into `0..n` satisfying every edge constraint.
    ///
    /// Post-order sweep: `weights[u][i]` is the number of embeddings of the
    /// subtree at `u` with `u` placed at `i`. A child's contribution to its parent
    /// at `i` is a sum over one quadrant, read off a Fenwick tree over value ranks
    /// while scanning time in the direction opposite to the edge.
    pub fn count(&mut self, tree: &CornerTree, rs: &RankSequence) -> u128 {
        let n = rs.len();
        if n == 0 {
            return 0;
        }
        // every per-vertex weight and quadrant sum is at most n^(v-1)
        let fits_u64 = (n as u128)
            .checked_pow(tree.vertices() as u32 - 1)
            .is_some_and(|b| b <= u64::MAX as u128);
        if fits_u64 {
            self.narrow.count(tree, rs.ranks())
        } else {
            self.wide.count(tree, rs.ranks())
        }
    }
}

impl<T> Scratch<T>
where
    T: PrimInt + NumAssign + AsPrimitive<u128>,
{
    fn count(&mut self, tree: &CornerTree, x: &[u32]) -> u128 {
        let n = x.len();
        let v = tree.vertices();
        self.fenwick.reset(n);
        if self.weights.len() < v {
            self.weights.resize_with(v, Vec::new);
        }
        self.sums.clear();
        self.sums.resize(n, T::zero());

        // preorder numbering: children always have larger ids than parents
        for u in (0..v).rev() {
            let mut w = std::mem::take(&mut self.weights[u]);
            w.clear();
            w.resize(n, T::one());
            for &c in tree.children(u) {
                let dir = tree.label(c).expect("child has a label");
                quadrant_sums(&mut self.fenwick, x, &self.weights[c], dir, &mut self.sums);
                for (wi, si) in w.iter_mut().zip(&self.sums) {
                    *wi *= *si;
                }
            }
            self.weights[u] = w;
        }
        self.weights[0].iter().map(|w| w.as_()).sum()
    }
}

/// `out[i] = sum of child[j]` over `j` lying in direction `dir` from `i`.
fn quadrant_sums<T: PrimInt + NumAssign>(
    fenwick: &mut Fenwick<T>,
    x: &[u32],
    child: &[T],
    dir: Direction,
    out: &mut [T],
) {
    fenwick.clear();
    let n = x.len();
    let mut total = T::zero();
    let mut step = |i: usize, fenwick: &mut Fenwick<T>, total: &mut T| {
        let r = (x[i] - 1) as usize;
        let below = fenwick.prefix(r);
        out[i] = if dir.is_north() {
            *total - below
        } else {
            below
        };
        if !child[i].is_zero() {
            fenwick.add(r, child[i]);
            *total += child[i];
        }
    };
    if dir.is_east() {
        for i in (0..n).rev() {
            step(i, fenwick, &mut total);
        }
    } else {
        for i in 0..n {
            step(i, fenwick, &mut total);
        }
    }
}

pub fn count_tree(tree: &CornerTree, rs: &RankSequence) -> u128 {
    TreeCounter::new().count(tree, rs)
}
