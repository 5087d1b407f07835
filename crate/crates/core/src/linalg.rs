//! Exact integer linear algebra for basis selection and profile recovery.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Row echelon form over the integers, built one vector at a time.
///
/// Rows are kept primitive (gcd of entries 1) and each has zeros before its pivot.
#[derive(Debug, Clone)]
pub struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<i128>)>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: vec![] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` against the current rows; inserts it and returns true if independent.
    pub fn insert(&mut self, v: &[i64]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::Internal(format!(
                "vector of length {} in echelon of dim {}",
                v.len(),
                self.dim
            )));
        }
        let mut w: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        for (pivot, row) in &self.rows {
            let a = w[*pivot];
            if a == 0 {
                continue;
            }
            let b = row[*pivot];
            let g = a.gcd(&b);
            let (ra, rb) = (b / g, a / g);
            for (wi, &ri) in w.iter_mut().zip(row) {
                *wi = ra
                    .checked_mul(*wi)
                    .and_then(|x| rb.checked_mul(ri).and_then(|y| x.checked_sub(y)))
                    .ok_or_else(|| Error::Internal("overflow in exact elimination".into()))?;
            }
            make_primitive(&mut w);
        }
        match w.iter().position(|&x| x != 0) {
            None => Ok(false),
            Some(p) => {
                if w[p] < 0 {
                    w.iter_mut().for_each(|x| *x = -*x);
                }
                let at = self.rows.partition_point(|(q, _)| *q < p);
                self.rows.insert(at, (p, w));
                Ok(true)
            }
        }
    }
}

fn make_primitive(w: &mut [i128]) {
    let g = w.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        w.iter_mut().for_each(|x| *x /= g);
    }
}

/// Exact inverse of a square integer matrix, stored as `numer / denom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerInverse {
    pub numer: Vec<Vec<i128>>,
    pub denom: i128,
}

impl IntegerInverse {
    /// Gauss-Jordan elimination over the rationals.
    pub fn of(matrix: &[Vec<i64>]) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Internal("inverse of a non-square matrix".into()));
        }
        let q = |x: i64| BigRational::from_integer(BigInt::from(x));
        let mut a: Vec<Vec<BigRational>> = matrix
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| q((i == j) as i64)).collect())
            .collect();
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::Internal("singular system matrix".into()))?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = &a[col][j] / &p;
                inv[col][j] = &inv[col][j] / &p;
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for j in 0..n {
                        let t = &f * &a[col][j];
                        a[r][j] -= t;
                        let t = &f * &inv[col][j];
                        inv[r][j] -= t;
                    }
                }
            }
        }
        let mut denom = BigInt::one();
        for row in &inv {
            for x in row {
                denom = denom.lcm(x.denom());
            }
        }
        let to_i128 = |b: &BigInt| {
            b.to_i128()
                .ok_or_else(|| Error::Internal("inverse entry exceeds 128 bits".into()))
        };
        let numer = inv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| to_i128(&(x.numer() * (&denom / x.denom()))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let denom = to_i128(&denom.abs())?;
        Ok(IntegerInverse { numer, denom })
    }

    /// Solves `M x = b` for an integral `x`; a non-integral or negative result is an error.
    pub fn solve_nonnegative(&self, b: &[i128]) -> Result<Vec<u128>> {
        let overflow = || Error::Internal("overflow in profile recovery".into());
        self.numer
            .iter()
            .map(|row| {
                let mut acc: i128 = 0;
                for (&c, &bi) in row.iter().zip(b) {
                    acc = c
                        .checked_mul(bi)
                        .and_then(|t| acc.checked_add(t))
                        .ok_or_else(overflow)?;
                }
                if acc % self.denom != 0 {
                    return Err(Error::Internal(format!(
                        "non-integral pattern count {acc}/{}",
                        self.denom
                    )));
                }
                let x = acc / self.denom;
                u128::try_from(x)
                    .map_err(|_| Error::Internal(format!("negative pattern count {x}")))
            })
            .collect()
    }

    /// Checks `M * numer == denom * I`.
    pub fn verify(&self, matrix: &[Vec<i64>]) -> bool {
        let n = matrix.len();
        if self.numer.len() != n || self.denom <= 0 {
            return false;
        }
        for (i, row) in matrix.iter().enumerate() {
            for j in 0..n {
                let s: Option<i128> = (0..n).try_fold(0i128, |acc, l| {
                    (row[l] as i128)
                        .checked_mul(self.numer[l][j])
                        .and_then(|t| acc.checked_add(t))
                });
                if s != Some(if i == j { self.denom } else { 0 }) {
                    return false;
                }
            }
        }
        true
    }
}
