//! Full k-profiles: corner-tree recovery for k <= 4, guarded enumeration for k = 5, 6.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cornertree::{bases, BasisEntry, TreeCounter};
use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::math::{binomial, factorial};
use crate::patterns::{
    check_order, lehmer_rank, oracle_profile_with_budget, Method, Profile, DEFAULT_ORACLE_BUDGET,
};
use crate::series::RankSequence;

pub const MIN_ORDER: usize = 2;
pub const MAX_ORDER: usize = 6;
pub const MAX_FAST_ORDER: usize = 4;

/// Default cap on tuples enumerated by the fallback counter.
pub const DEFAULT_GUARD: u128 = 20_000_000;

/// Requested counting path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MethodChoice {
    #[default]
    Auto,
    Fast,
    Fallback,
    Oracle,
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(MethodChoice::Auto),
            "fast" => Ok(MethodChoice::Fast),
            "fallback" => Ok(MethodChoice::Fallback),
            "oracle" => Ok(MethodChoice::Oracle),
            _ => Err(Error::InvalidParameter(format!("unknown method {s:?}"))),
        }
    }
}

impl fmt::Display for MethodChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodChoice::Auto => "auto",
            MethodChoice::Fast => "fast",
            MethodChoice::Fallback => "fallback",
            MethodChoice::Oracle => "oracle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProfileOptions {
    pub method: MethodChoice,
    /// Tuple cap for the fallback counter.
    pub guard: u128,
    /// Tuple cap for the oracle.
    pub oracle_budget: u128,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            method: MethodChoice::Auto,
            guard: DEFAULT_GUARD,
            oracle_budget: DEFAULT_ORACLE_BUDGET,
        }
    }
}

impl ProfileOptions {
    pub fn with_method(method: MethodChoice) -> Self {
        ProfileOptions {
            method,
            ..Default::default()
        }
    }

    /// The concrete path `Auto` resolves to for order `k`.
    pub fn resolve(&self, k: usize) -> Method {
        match self.method {
            MethodChoice::Auto if k <= MAX_FAST_ORDER => Method::Fast,
            MethodChoice::Auto => Method::Fallback,
            MethodChoice::Fast => Method::Fast,
            MethodChoice::Fallback => Method::Fallback,
            MethodChoice::Oracle => Method::Oracle,
        }
    }
}

/// Number of occurrences of the pattern 3214: `i < j < l < m` with `x_l < x_j < x_i < x_m`.
///
/// For each `m`, restrict the prefix to values below `x_m` and count its
/// decreasing triples through their middle element: larger entries to the
/// left times smaller entries to the right. `O(n^2 log n)` overall.
pub fn count_3214(rs: &RankSequence) -> u128 {
    let x = rs.ranks();
    let n = x.len();
    let mut fen = Fenwick::<u64>::new(n);
    let mut greater_left = vec![0u64; n];
    let mut total = 0u128;
    for m in 3..n {
        let top = x[m];
        fen.clear();
        let mut inserted = 0u64;
        for t in 0..m {
            if x[t] < top {
                let r = (x[t] - 1) as usize;
                greater_left[t] = inserted - fen.prefix(r);
                fen.add(r, 1);
                inserted += 1;
            }
        }
        fen.clear();
        for t in (0..m).rev() {
            if x[t] < top {
                let r = (x[t] - 1) as usize;
                let smaller_right = fen.prefix(r);
                total += greater_left[t] as u128 * smaller_right as u128;
                fen.add(r, 1);
            }
        }
    }
    total
}

/// Profiles of orders `1..=k` through corner-tree counts, `k <= 4`.
pub fn fast_profiles(rs: &RankSequence, k: usize) -> Result<Vec<Profile>> {
    check_order(k, 1, MAX_FAST_ORDER)?;
    let n = rs.len();
    let mut out = vec![Profile {
        order: 1,
        n,
        counts: vec![n as u128],
        method: Method::Fast,
    }];
    if k == 1 {
        return Ok(out);
    }
    let set = bases()?;
    let mut counter = TreeCounter::new();
    for m in 2..=k {
        let basis = set.get(m)?;
        let values: Vec<u128> = basis
            .entries
            .iter()
            .map(|e| match e {
                BasisEntry::Tree(t) => counter.count(t, rs),
                BasisEntry::Pattern(_) => count_3214(rs),
            })
            .collect();
        let p = basis.recover(n, &values, &out)?;
        if p.total() != binomial(n as u64, m as u64) {
            return Err(Error::Internal(format!(
                "order {m} counts sum to {} instead of C({n},{m})",
                p.total()
            )));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn fast_profile(rs: &RankSequence, k: usize) -> Result<Profile> {
    check_order(k, MIN_ORDER, MAX_FAST_ORDER)?;
    Ok(fast_profiles(rs, k)?.pop().expect("non-empty"))
}

/// Maps insertion codes to Lehmer ranks.
///
/// While walking a tuple left to right, each new entry's rank among the
/// entries so far (`0..=d` at depth `d`) is a mixed-radix digit; the digits
/// determine the pattern.
fn insertion_table(k: usize) -> Vec<usize> {
    (0..factorial(k))
        .map(|code| {
            let mut digits = vec![0usize; k];
            let mut c = code;
            for d in (0..k).rev() {
                digits[d] = c % (d + 1);
                c /= d + 1;
            }
            // positions sorted by value
            let mut by_value: Vec<usize> = vec![];
            for (pos, &r) in digits.iter().enumerate() {
                by_value.insert(r, pos);
            }
            let mut perm = vec![0usize; k];
            for (v, &pos) in by_value.iter().enumerate() {
                perm[pos] = v;
            }
            lehmer_rank(&perm)
        })
        .collect()
}

/// Per-last-index counts over every increasing tuple, flattened as
/// `[last * k! + insertion code]`.
fn enumerate_by_last(x: &[u32], k: usize) -> Vec<u64> {
    let n = x.len();
    let size = factorial(k);
    let empty = || vec![0u64; n * size];
    if n < k {
        return empty();
    }

    fn descend(
        x: &[u32],
        k: usize,
        depth: usize,
        start: usize,
        code: usize,
        chosen: &mut [u32; 8],
        out: &mut [u64],
    ) {
        let n = x.len();
        let size = out.len() / n;
        for j in start..=n - (k - depth) {
            let v = x[j];
            let r = chosen[..depth].iter().filter(|&&c| c < v).count();
            let next = code * (depth + 1) + r;
            if depth + 1 == k {
                out[j * size + next] += 1;
            } else {
                chosen[depth] = v;
                descend(x, k, depth + 1, j + 1, next, chosen, out);
            }
        }
    }

    let visit = |mut out: Vec<u64>, first: usize| {
        let mut chosen = [0u32; 8];
        chosen[0] = x[first];
        descend(x, k, 1, first + 1, 0, &mut chosen, &mut out);
        out
    };
    if binomial(n as u64, k as u64) < 100_000 {
        return (0..=n - k).fold(empty(), visit);
    }
    (0..=n - k)
        .into_par_iter()
        .fold(empty, visit)
        .reduce(empty, |mut a, b| {
            a.iter_mut().zip(b).for_each(|(ca, cb)| *ca += cb);
            a
        })
}

fn check_guard(n: usize, k: usize, guard: u128) -> Result<()> {
    let tuples = binomial(n as u64, k as u64);
    if tuples > guard {
        return Err(Error::GuardExceeded {
            tuples,
            threshold: guard,
        });
    }
    Ok(())
}

/// Exact profile by prefix-sharing enumeration, refused above `guard` tuples.
pub fn fallback_profile(rs: &RankSequence, k: usize, guard: u128) -> Result<Profile> {
    check_order(k, MIN_ORDER, MAX_ORDER)?;
    let n = rs.len();
    check_guard(n, k, guard)?;
    let table = insertion_table(k);
    let mut p = Profile::zeros(k, n, Method::Fallback);
    for row in enumerate_by_last(rs.ranks(), k).chunks(table.len()) {
        for (code, &c) in row.iter().enumerate() {
            p.counts[table[code]] += c as u128;
        }
    }
    Ok(p)
}

/// Profile of order `k` by the requested path.
pub fn profile(rs: &RankSequence, k: usize, opts: &ProfileOptions) -> Result<Profile> {
    check_order(k, MIN_ORDER, MAX_ORDER)?;
    warn_if_undersampled(rs.len(), k);
    match opts.resolve(k) {
        Method::Fast => fast_profile(rs, k),
        Method::Fallback => fallback_profile(rs, k, opts.guard),
        Method::Oracle => oracle_profile_with_budget(rs, k, opts.oracle_budget),
    }
}

/// Profiles of every prefix `x[..len]` for `len = 1..=n`; element `len - 1` is the prefix of length `len`.
///
/// The enumeration path makes a single pass, bucketing tuples by their last index.
pub fn prefix_profiles(rs: &RankSequence, k: usize, opts: &ProfileOptions) -> Result<Vec<Profile>> {
    check_order(k, MIN_ORDER, MAX_ORDER)?;
    let n = rs.len();
    match opts.resolve(k) {
        Method::Fallback => {
            check_guard(n, k, opts.guard)?;
            let table = insertion_table(k);
            let mut running = Profile::zeros(k, 0, Method::Fallback);
            let mut out = Vec::with_capacity(n);
            let flat = enumerate_by_last(rs.ranks(), k);
            for (last, row) in flat.chunks(table.len()).enumerate() {
                for (code, &c) in row.iter().enumerate() {
                    running.counts[table[code]] += c as u128;
                }
                running.n = last + 1;
                out.push(running.clone());
            }
            Ok(out)
        }
        _ => (1..=n)
            .map(|len| profile(&rs.window(0, len), k, opts))
            .collect(),
    }
}

/// Whether `C(w, k)` comfortably exceeds the `k!` pattern count (a factor of 100).
pub fn sample_size_adequate(w: usize, k: usize) -> bool {
    binomial(w as u64, k as u64) >= 100 * factorial(k) as u128
}

fn warn_if_undersampled(n: usize, k: usize) {
    if n >= k && !sample_size_adequate(n, k) {
        log::debug!(
            "C({n},{k}) = {} is small relative to {k}! = {}; GPE estimates will be coarse",
            binomial(n as u64, k as u64),
            factorial(k)
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::{oracle_profile, PatternId};

    fn rs(v: &[u32]) -> RankSequence {
        RankSequence::from_ranks(v.to_vec()).unwrap()
    }

    #[test]
    fn count_3214_examples() {
        assert_eq!(count_3214(&RankSequence::identity(10)), 0);
        assert_eq!(count_3214(&rs(&[3, 2, 1, 4])), 1);
        assert_eq!(count_3214(&rs(&[4, 3, 2, 1, 5])), 4);
        assert_eq!(count_3214(&rs(&[1])), 0);
    }

    #[test]
    fn count_3214_matches_oracle() {
        let p3214 = PatternId::parse("3214").unwrap();
        let seqs: [&[u32]; 3] = [
            &[7, 4, 3, 5, 2, 1, 6],
            &[5, 3, 2, 8, 1, 7, 4, 6],
            &[2, 1, 3],
        ];
        for s in seqs {
            let r = rs(s);
            assert_eq!(count_3214(&r), oracle_profile(&r, 4).unwrap().count(p3214));
        }
    }

    #[test]
    fn fast_examples() {
        let p = fast_profile(&RankSequence::identity(6), 4).unwrap();
        assert_eq!(p.counts[0], 15);
        assert_eq!(p.total(), 15);
        let p = fast_profile(&rs(&[7, 4, 3, 5, 2, 1, 6]), 3).unwrap();
        assert_eq!(p.counts, vec![2, 0, 9, 4, 7, 13]);
        assert_eq!(p.method, Method::Fast);
    }

    #[test]
    fn fast_on_tiny_inputs() {
        for n in 0..4 {
            let p = fast_profile(&RankSequence::identity(n), 4).unwrap();
            assert_eq!(p.total(), 0);
        }
    }

    #[test]
    fn insertion_table_is_a_bijection() {
        for k in 1..=6 {
            let mut t = insertion_table(k);
            t.sort_unstable();
            assert_eq!(t, (0..factorial(k)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn fallback_examples() {
        let p = fallback_profile(&RankSequence::identity(8), 5, DEFAULT_GUARD).unwrap();
        assert_eq!(p.counts[0], 56);
        assert_eq!(p.total(), 56);
        let p = fallback_profile(&RankSequence::identity(3), 5, DEFAULT_GUARD).unwrap();
        assert_eq!(p.total(), 0);
        let r = rs(&[7, 4, 3, 5, 2, 1, 6]);
        assert_eq!(
            fallback_profile(&r, 3, DEFAULT_GUARD).unwrap().counts,
            vec![2, 0, 9, 4, 7, 13]
        );
    }

    #[test]
    fn guard_refuses() {
        let err = fallback_profile(&RankSequence::identity(100), 6, DEFAULT_GUARD).unwrap_err();
        assert!(matches!(
            err,
            Error::GuardExceeded {
                tuples: 1_192_052_400,
                ..
            }
        ));
        assert!(err.is_guard());
        assert!(err.to_string().contains("--guard"));
    }

    #[test]
    fn dispatch() {
        let r = RankSequence::identity(10);
        let auto = ProfileOptions::default();
        assert_eq!(profile(&r, 3, &auto).unwrap().method, Method::Fast);
        assert_eq!(profile(&r, 5, &auto).unwrap().method, Method::Fallback);
        assert_eq!(
            profile(&r, 3, &ProfileOptions::with_method(MethodChoice::Oracle))
                .unwrap()
                .method,
            Method::Oracle
        );
        assert!(profile(&r, 5, &ProfileOptions::with_method(MethodChoice::Fast)).is_err());
        assert!(matches!(
            profile(&r, 7, &auto),
            Err(Error::OrderOutOfRange { order: 7, .. })
        ));
        assert!(profile(&r, 1, &auto).is_err());
    }

    #[test]
    fn prefix_profiles_agree_with_direct() {
        let r = rs(&[5, 3, 2, 8, 1, 7, 4, 6]);
        for method in [MethodChoice::Fallback, MethodChoice::Fast] {
            let opts = ProfileOptions::with_method(method);
            let pre = prefix_profiles(&r, 3, &opts).unwrap();
            assert_eq!(pre.len(), 8);
            for (i, p) in pre.iter().enumerate() {
                let direct = oracle_profile(&r.window(0, i + 1), 3).unwrap();
                assert_eq!(p.counts, direct.counts);
                assert_eq!(p.n, i + 1);
            }
        }
    }

    #[test]
    fn adequacy_threshold() {
        // C(17,3) = 680 >= 600 > C(16,3) = 560
        assert!(sample_size_adequate(17, 3));
        assert!(!sample_size_adequate(16, 3));
    }
}
