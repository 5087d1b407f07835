use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::tree::CornerTree;
use crate::patterns::PatternId;

/// Expansion of a tree's count as a linear functional of pattern counts.
///
/// `coeffs[m - 1][p]` is the number of maps from the tree onto all `m` points of
/// pattern `p` (order `m`) that satisfy every edge constraint. For any sequence,
/// `count_tree = sum over m, p of coeffs[m - 1][p] * profile_m[p]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    pub tree: CornerTree,
    pub coeffs: Vec<Vec<u64>>,
}

impl CoefficientVector {
    pub fn max_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, p: PatternId) -> u64 {
        self.coeffs
            .get(p.order() - 1)
            .map_or(0, |row| row[p.index()])
    }

    /// Component of order `m`; all zeros when `m` exceeds the vertex count.
    pub fn order_component(&self, m: usize) -> Vec<u64> {
        match self.coeffs.get(m - 1) {
            Some(row) => row.clone(),
            None => vec![0; crate::math::factorial(m)],
        }
    }

    /// Non-zero entries, ordered by pattern order then index.
    pub fn nonzero(&self) -> Vec<(PatternId, u64)> {
        let mut out = vec![];
        for (m, row) in self.coeffs.iter().enumerate() {
            for (p, &c) in PatternId::all(m + 1).zip(row) {
                if c != 0 {
                    out.push((p, c));
                }
            }
        }
        out
    }
}

/// Coefficients for every order `1..=v`, cached by canonical encoding.
pub fn coefficient_vector(tree: &CornerTree) -> Arc<CoefficientVector> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<CoefficientVector>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(tree.encoding()) {
        return hit.clone();
    }
    let coeffs = (1..=tree.vertices())
        .map(|m| order_coefficients(tree, m))
        .collect();
    let cv = Arc::new(CoefficientVector {
        tree: tree.clone(),
        coeffs,
    });
    cache
        .lock()
        .unwrap()
        .insert(tree.encoding().to_string(), cv.clone());
    cv
}

/// Coefficients of order `m` only: surjective maps onto each order-`m` pattern.
pub fn order_coefficients(tree: &CornerTree, m: usize) -> Vec<u64> {
    PatternId::all(m)
        .map(|p| surjective_maps(tree, &p.to_permutation()))
        .collect()
}

/// Number of maps from the tree's vertices onto all positions of `perm` that
/// respect the edge directions, with position as time and entry as value.
fn surjective_maps(tree: &CornerTree, perm: &[u8]) -> u64 {
    let v = tree.vertices();
    let m = perm.len();
    if m > v {
        return 0;
    }
    let mut pos = vec![0usize; v];
    let mut cover = vec![0u8; m];

    fn go(
        u: usize,
        covered: usize,
        tree: &CornerTree,
        perm: &[u8],
        pos: &mut [usize],
        cover: &mut [u8],
    ) -> u64 {
        let v = tree.vertices();
        let m = perm.len();
        if u == v {
            return (covered == m) as u64;
        }
        if v - u < m - covered {
            return 0;
        }
        let mut total = 0;
        for p in 0..m {
            if let Some(parent) = tree.parent(u) {
                let q = pos[parent];
                let dir = tree.label(u).unwrap();
                if !dir.holds((q, perm[q]), (p, perm[p])) {
                    continue;
                }
            }
            pos[u] = p;
            cover[p] += 1;
            let newly = (cover[p] == 1) as usize;
            total += go(u + 1, covered + newly, tree, perm, pos, cover);
            cover[p] -= 1;
        }
        total
    }
    go(0, 0, tree, perm, &mut pos, &mut cover)
}
