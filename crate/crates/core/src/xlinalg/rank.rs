//! Exact rank over the rationals.
//!
//! Denominators are cleared with one global LCM, after which the matrix is
//! eliminated fraction-free (Bareiss) in integers. Two shortcuts sit in
//! front of the big-integer elimination:
//!
//! * rank modulo the prime `2^61 - 1` never exceeds the rational rank, so a
//!   full modular rank certifies full rational rank;
//! * Bareiss intermediates are minors of the input, so small integer inputs
//!   usually finish in checked `i128` arithmetic.
//!
//! Any overflow falls through to [`num_bigint::BigInt`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::matrix::ExactMatrix;
use crate::error::{Error, Result};
use crate::exact::Rational;

const MODULUS: u64 = (1 << 61) - 1;

enum IntegerForm {
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

fn clear_denominators(a: &ExactMatrix) -> IntegerForm {
    let lcm = a
        .entries()
        .iter()
        .fold(BigInt::one(), |acc, x| if x.denom().is_one() { acc } else { acc.lcm(x.denom()) });
    let ints: Vec<BigInt> = a
        .entries()
        .iter()
        .map(|x| {
            if lcm.is_one() {
                x.numer().clone()
            } else {
                x.numer() * (&lcm / x.denom())
            }
        })
        .collect();
    match ints.iter().map(|v| v.to_i64()).collect::<Option<Vec<i64>>>() {
        Some(small) => IntegerForm::Small(small),
        None => IntegerForm::Big(ints),
    }
}

/// Exact rank of `a` over the rationals.
pub fn rank(a: &ExactMatrix) -> usize {
    let (m, n) = (a.rows(), a.cols());
    match clear_denominators(a) {
        IntegerForm::Small(v) => {
            let full = m.min(n);
            if modular_rank(&v, m, n) == full {
                return full;
            }
            let wide: Vec<i128> = v.iter().map(|&x| i128::from(x)).collect();
            match bareiss_i128(wide, m, n) {
                Some(r) => r,
                None => bareiss_big(v.into_iter().map(BigInt::from).collect(), m, n),
            }
        }
        IntegerForm::Big(v) => bareiss_big(v, m, n),
    }
}

fn a_to_big(a: &ExactMatrix) -> Vec<BigInt> {
    match clear_denominators(a) {
        IntegerForm::Small(v) => v.into_iter().map(BigInt::from).collect(),
        IntegerForm::Big(v) => v,
    }
}

/// Rank by big-integer Bareiss elimination only, without shortcuts.
pub fn rank_bareiss(a: &ExactMatrix) -> usize {
    bareiss_big(a_to_big(a), a.rows(), a.cols())
}

/// Rank of the span of `vectors` (all of equal length).
pub fn rank_of_vectors(vectors: &[Vec<Rational>]) -> Result<usize> {
    if vectors.is_empty() || vectors[0].is_empty() {
        return Ok(0);
    }
    Ok(rank(&ExactMatrix::from_rows(vectors.to_vec())?))
}

fn bareiss_big(mut a: Vec<BigInt>, m: usize, n: usize) -> usize {
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i * n + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..n {
                a.swap(p * n + j, r * n + j);
            }
        }
        let pivot = a[r * n + c].clone();
        for i in r + 1..m {
            let lead = a[i * n + c].clone();
            for j in c + 1..n {
                let v = (&pivot * &a[i * n + j] - &lead * &a[r * n + j]) / &prev;
                a[i * n + j] = v;
            }
            a[i * n + c] = BigInt::zero();
        }
        prev = pivot;
        r += 1;
    }
    r
}

fn bareiss_i128(mut a: Vec<i128>, m: usize, n: usize) -> Option<usize> {
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| a[i * n + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..n {
                a.swap(p * n + j, r * n + j);
            }
        }
        let pivot = a[r * n + c];
        for i in r + 1..m {
            let lead = a[i * n + c];
            for j in c + 1..n {
                let x = pivot.checked_mul(a[i * n + j])?;
                let y = lead.checked_mul(a[r * n + j])?;
                a[i * n + j] = x.checked_sub(y)? / prev;
            }
            a[i * n + c] = 0;
        }
        prev = pivot;
        r += 1;
    }
    Some(r)
}

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn powmod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b);
        }
        b = mulmod(b, b);
        e >>= 1;
    }
    acc
}

/// Rank modulo `2^61 - 1`; a lower bound for the rational rank.
fn modular_rank(v: &[i64], m: usize, n: usize) -> usize {
    let mut a: Vec<u64> = v.iter().map(|&x| x.rem_euclid(MODULUS as i64) as u64).collect();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| a[i * n + c] != 0) else {
            continue;
        };
        if p != r {
            for j in 0..n {
                a.swap(p * n + j, r * n + j);
            }
        }
        let inv = powmod(a[r * n + c], MODULUS - 2);
        for i in r + 1..m {
            let f = mulmod(a[i * n + c], inv);
            if f == 0 {
                continue;
            }
            for j in c..n {
                let sub = mulmod(f, a[r * n + j]);
                a[i * n + j] = (a[i * n + j] + MODULUS - sub) % MODULUS;
            }
        }
        r += 1;
    }
    r
}

/// Basis of the right null space `{x : A x = 0}` from the reduced row
/// echelon form. Each basis vector has a 1 in its free coordinate.
pub fn kernel_basis(a: &ExactMatrix) -> Vec<Vec<Rational>> {
    let (m, n) = (a.rows(), a.cols());
    let mut rows = a.row_vectors();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(p, r);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..n {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); n];
            x[f] = Rational::one();
            for (k, &pc) in pivots.iter().enumerate() {
                x[pc] = -rows[k][f].clone();
            }
            x
        })
        .collect()
}

/// Scales `v` so that its first nonzero coordinate is 1.
pub fn normalize_first_nonzero(mut v: Vec<Rational>) -> Vec<Rational> {
    if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
        for x in v.iter_mut() {
            *x /= &lead;
        }
    }
    v
}

/// The unique (up to scale) column dependency of an `(n-1) × n` matrix of
/// rank `n - 1`, normalized so its first nonzero coefficient is 1.
pub fn null_combination(a: &ExactMatrix) -> Result<Vec<Rational>> {
    let n = a.cols();
    if a.rows() + 1 != n {
        return Err(Error::Precondition(format!(
            "expected an (n-1)x n matrix, got {}x{}",
            a.rows(),
            n
        )));
    }
    let r = rank(a);
    if r != n - 1 {
        return Err(Error::Precondition(format!("rank {r} differs from n-1 = {}", n - 1)));
    }
    let mut basis = kernel_basis(a);
    debug_assert_eq!(basis.len(), 1);
    Ok(normalize_first_nonzero(basis.remove(0)))
}

/// Whether `u` lies in the column span of `a`.
pub fn in_column_span(a: &ExactMatrix, u: &[Rational]) -> Result<bool> {
    Ok(rank(&a.with_column(u)?) == rank(a))
}

/// `Σ_j c_j · column_j(a)`.
pub fn combine_columns(a: &ExactMatrix, c: &[Rational]) -> Vec<Rational> {
    (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .filter(|&j| !c[j].is_zero())
                .map(|j| a.get(i, j) * &c[j])
                .sum()
        })
        .collect()
}

/// Support size of a coefficient vector.
pub fn support_size(c: &[Rational]) -> usize {
    c.iter().filter(|x| !x.is_zero()).count()
}
