//! Selection of independent count functionals spanning a full k-profile.
//!
//! For order `k` only trees with exactly `k` vertices have a non-zero order-`k`
//! component, so the candidates are the `k`-vertex trees in canonical order.
//! Trees span the order-2 and order-3 pattern spaces and a 23-dimensional
//! subspace at order 4; the pattern 3214, counted directly, completes order 4.
//! Orders 5 and 6 need further functionals that trees alone cannot supply.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use super::coeffs::{coefficient_vector, order_coefficients, CoefficientVector};
use super::tree::{enumerate_corner_trees, CornerTree};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, IntegerInverse};
use crate::math::factorial;
use crate::patterns::{PatternId, Profile};

/// Independent tree counts expected at each order (before adding 3214).
pub const EXPECTED_TREE_RANKS: [(usize, usize); 3] = [(2, 2), (3, 6), (4, 23)];

/// Bumped whenever selection or the cache payload changes.
pub const BASIS_VERSION: u32 = 1;

/// Pattern counted directly to complete the order-4 system.
pub const COMPLETION_PATTERN: &str = "3214";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisEntry {
    Tree(CornerTree),
    Pattern(PatternId),
}

/// An invertible system recovering the order-`k` profile from `k!` functionals.
#[derive(Debug, Clone)]
pub struct Basis {
    pub order: usize,
    pub entries: Vec<BasisEntry>,
    rows: Vec<Vec<i64>>,
    expansions: Expansions,
    inverse: IntegerInverse,
}

impl Basis {
    pub fn trees(&self) -> impl Iterator<Item = &CornerTree> {
        self.entries.iter().filter_map(|e| match e {
            BasisEntry::Tree(t) => Some(t),
            BasisEntry::Pattern(_) => None,
        })
    }

    pub fn tree_count(&self) -> usize {
        self.trees().count()
    }

    /// The order-`k` component rows, one per entry.
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn inverse(&self) -> &IntegerInverse {
        &self.inverse
    }

    /// Recovers the order-`k` profile.
    ///
    /// `values[i]` is the raw count of entry `i` (tree occurrences, or the
    /// direct pattern count). `lower[m - 1]` must be the order-`m` profile for
    /// `m < k`; their contributions are subtracted before the solve.
    pub fn recover(&self, n: usize, values: &[u128], lower: &[Profile]) -> Result<Profile> {
        let k = self.order;
        if values.len() != self.entries.len() || lower.len() + 1 < k {
            return Err(Error::Internal(
                "basis recovery called with wrong arity".into(),
            ));
        }
        let overflow = || Error::Internal("overflow subtracting lower-order terms".into());
        let mut b = Vec::with_capacity(values.len());
        for (i, &raw) in values.iter().enumerate() {
            let mut acc = i128::try_from(raw).map_err(|_| overflow())?;
            if let Some(cv) = &self.expansions[i] {
                for m in 1..k {
                    for (c, count) in cv.coeffs[m - 1].iter().zip(&lower[m - 1].counts) {
                        if *c != 0 {
                            let t = (*c as i128)
                                .checked_mul(i128::try_from(*count).map_err(|_| overflow())?)
                                .ok_or_else(overflow)?;
                            acc = acc.checked_sub(t).ok_or_else(overflow)?;
                        }
                    }
                }
            }
            b.push(acc);
        }
        let counts = self.inverse.solve_nonnegative(&b)?;
        Ok(Profile {
            order: k,
            n,
            counts,
            method: crate::patterns::Method::Fast,
        })
    }

    fn assemble(order: usize, entries: Vec<BasisEntry>) -> Result<Basis> {
        let (rows, expansions) = system_rows(order, &entries);
        let inverse = IntegerInverse::of(&rows)?;
        Ok(Basis {
            order,
            entries,
            rows,
            expansions,
            inverse,
        })
    }
}

type Expansions = Vec<Option<Arc<CoefficientVector>>>;

fn system_rows(order: usize, entries: &[BasisEntry]) -> (Vec<Vec<i64>>, Expansions) {
    entries
        .iter()
        .map(|e| match e {
            BasisEntry::Tree(t) => {
                let cv = coefficient_vector(t);
                let row = cv
                    .order_component(order)
                    .iter()
                    .map(|&c| c as i64)
                    .collect();
                (row, Some(cv))
            }
            BasisEntry::Pattern(p) => {
                let mut row = vec![0i64; factorial(order)];
                row[p.index()] = 1;
                (row, None)
            }
        })
        .unzip()
}

/// Maximal set of `k`-vertex trees with independent order-`k` components,
/// first-come in canonical order.
pub fn independent_trees(k: usize, max_candidates: usize) -> Result<Vec<CornerTree>> {
    let candidates = enumerate_corner_trees(k)?;
    if candidates.len() > max_candidates {
        return Err(Error::LimitExceeded(format!(
            "{} candidate trees with {k} vertices (limit {max_candidates})",
            candidates.len()
        )));
    }
    let dim = factorial(k);
    let mut ech = Echelon::new(dim);
    let mut chosen = vec![];
    for t in candidates.iter() {
        let row: Vec<i64> = order_coefficients(t, k).iter().map(|&c| c as i64).collect();
        if ech.insert(&row)? {
            chosen.push(t.clone());
            if ech.rank() == dim {
                break;
            }
        }
    }
    Ok(chosen)
}

/// Selects the recovery system for `k` in `{2, 3, 4}`.
pub fn select_basis(k: usize) -> Result<Basis> {
    let expected = EXPECTED_TREE_RANKS
        .iter()
        .find(|(o, _)| *o == k)
        .map(|(_, r)| *r)
        .ok_or(Error::OrderOutOfRange {
            order: k,
            min: 2,
            max: 4,
        })?;
    let trees = independent_trees(k, usize::MAX)?;
    if trees.len() != expected {
        return Err(Error::Internal(format!(
            "order {k}: {} independent trees, expected {expected}",
            trees.len()
        )));
    }
    let mut entries: Vec<BasisEntry> = trees.into_iter().map(BasisEntry::Tree).collect();
    if entries.len() < factorial(k) {
        let p = PatternId::parse(COMPLETION_PATTERN)?;
        if p.order() != k {
            return Err(Error::Internal(format!("order {k} not spanned by trees")));
        }
        entries.push(BasisEntry::Pattern(p));
    }
    if entries.len() != factorial(k) {
        return Err(Error::Internal(format!(
            "order {k}: rank {} after completion, expected {}",
            entries.len(),
            factorial(k)
        )));
    }
    // singular here means 3214 lies in the tree span
    Basis::assemble(k, entries)
}

/// Recovery systems for orders 2, 3 and 4.
#[derive(Debug, Clone)]
pub struct BasisSet {
    bases: Vec<Basis>,
}

impl BasisSet {
    pub fn build() -> Result<Self> {
        let bases = (2..=4).map(select_basis).collect::<Result<Vec<_>>>()?;
        Ok(BasisSet { bases })
    }

    pub fn get(&self, k: usize) -> Result<&Basis> {
        self.bases
            .iter()
            .find(|b| b.order == k)
            .ok_or(Error::OrderOutOfRange {
                order: k,
                min: 2,
                max: 4,
            })
    }

    /// Text payload: selected entries and the exact inverse for each order.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        writeln!(s, "basis-version {BASIS_VERSION}").unwrap();
        for b in &self.bases {
            writeln!(s, "order {}", b.order).unwrap();
            for e in &b.entries {
                match e {
                    BasisEntry::Tree(t) => writeln!(s, "tree {t}").unwrap(),
                    BasisEntry::Pattern(p) => writeln!(s, "pattern {p}").unwrap(),
                }
            }
            writeln!(s, "denom {}", b.inverse.denom).unwrap();
            for row in &b.inverse.numer {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                writeln!(s, "row {}", cells.join(" ")).unwrap();
            }
        }
        s
    }

    /// Inverse of [`BasisSet::serialize`]. Rebuilds coefficient rows from the
    /// named entries and rejects the payload unless the stored inverse checks out.
    pub fn deserialize(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("basis payload: {m}"));
        let mut lines = text.lines().peekable();
        match lines.next() {
            Some(l) if l == format!("basis-version {BASIS_VERSION}") => {}
            _ => return Err(bad("version mismatch")),
        }
        let mut bases = vec![];
        while let Some(line) = lines.next() {
            let order: usize = line
                .strip_prefix("order ")
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("order line"))?;
            let mut entries = vec![];
            while let Some(l) = lines.peek() {
                if let Some(t) = l.strip_prefix("tree ") {
                    entries.push(BasisEntry::Tree(t.parse()?));
                } else if let Some(p) = l.strip_prefix("pattern ") {
                    entries.push(BasisEntry::Pattern(PatternId::parse(p)?));
                } else {
                    break;
                }
                lines.next();
            }
            let denom: i128 = lines
                .next()
                .and_then(|l| l.strip_prefix("denom "))
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("denom line"))?;
            let mut numer = vec![];
            for _ in 0..entries.len() {
                let row = lines
                    .next()
                    .and_then(|l| l.strip_prefix("row "))
                    .ok_or_else(|| bad("row line"))?;
                let row: Vec<i128> = row
                    .split_whitespace()
                    .map(|x| x.parse().map_err(|_| bad("row entry")))
                    .collect::<Result<_>>()?;
                numer.push(row);
            }
            let (rows, expansions) = system_rows(order, &entries);
            let inverse = IntegerInverse { numer, denom };
            if rows.len() != factorial(order) || !inverse.verify(&rows) {
                return Err(bad("stored inverse does not match entries"));
            }
            bases.push(Basis {
                order,
                entries,
                rows,
                expansions,
                inverse,
            });
        }
        let set = BasisSet { bases };
        for (k, expected) in EXPECTED_TREE_RANKS {
            if set.get(k)?.tree_count() != expected {
                return Err(bad("tree counts differ from expected ranks"));
            }
        }
        Ok(set)
    }
}

static BASES: OnceLock<std::result::Result<BasisSet, Error>> = OnceLock::new();

/// The process-wide recovery systems, built on first use.
pub fn bases() -> Result<&'static BasisSet> {
    BASES
        .get_or_init(BasisSet::build)
        .as_ref()
        .map_err(Clone::clone)
}

/// Installs a prebuilt set (e.g. from an on-disk cache). Returns false if one is already in use.
pub fn install_bases(set: BasisSet) -> bool {
    BASES.set(Ok(set)).is_ok()
}
