//! Minimal vanishing combinations (circuits) and strong rank by exhaustive
//! subset search. Both are exponential in the worst case, so every search
//! is checked against a subset budget before it starts.

use itertools::Itertools;
use num_traits::Zero;
use serde::Serialize;

use super::matrix::ExactMatrix;
use super::rank::{kernel_basis, normalize_first_nonzero, rank, rank_of_vectors};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// Default limit on the number of subsets a search may visit.
pub const DEFAULT_SUBSET_BUDGET: u128 = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitReport {
    pub found: bool,
    pub degree: Option<usize>,
    /// One coefficient per input vector; exactly `degree` are nonzero.
    #[serde(skip)]
    pub witness: Option<Vec<Rational>>,
    pub search_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Rows,
    Columns,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Number of subsets of sizes `1..=max_size` drawn from `n` items.
pub fn subsets_up_to(n: usize, max_size: usize) -> u128 {
    (1..=max_size.min(n)).fold(0u128, |acc, k| acc.saturating_add(binomial(n, k)))
}

fn check_budget(needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::BudgetExceeded { needed, limit })
    } else {
        Ok(())
    }
}

/// Searches subsets of sizes `1..cap` in increasing order for the first
/// linearly dependent one. The first hit is minimal, hence a circuit whose
/// dependency has full support on the subset.
pub fn min_circuit_below(vectors: &[Vec<Rational>], cap: usize) -> Result<CircuitReport> {
    min_circuit_below_with_budget(vectors, cap, DEFAULT_SUBSET_BUDGET)
}

pub fn min_circuit_below_with_budget(
    vectors: &[Vec<Rational>],
    cap: usize,
    budget: u128,
) -> Result<CircuitReport> {
    if cap == 0 {
        return Err(Error::InvalidArgument("circuit search cap must be at least 1".into()));
    }
    check_budget(subsets_up_to(vectors.len(), cap - 1), budget)?;
    Ok(search(vectors, cap - 1).map_or(
        CircuitReport { found: false, degree: None, witness: None, search_cap: cap },
        |w| CircuitReport {
            found: true,
            degree: Some(w.iter().filter(|x| !x.is_zero()).count()),
            witness: Some(w),
            search_cap: cap,
        },
    ))
}

fn search(vectors: &[Vec<Rational>], max_size: usize) -> Option<Vec<Rational>> {
    let n = vectors.len();
    if n == 0 {
        return None;
    }
    // no dependent subset can be smaller than this is large
    let total_rank = rank_of_vectors(vectors).ok()?;
    if total_rank == n {
        return None;
    }
    for k in 1..=max_size.min(n).min(total_rank + 1) {
        for subset in (0..n).combinations(k) {
            let cols: Vec<Vec<Rational>> = subset.iter().map(|&i| vectors[i].clone()).collect();
            let m = ExactMatrix::from_columns(&cols).ok()?;
            if rank(&m) < k {
                let local = normalize_first_nonzero(kernel_basis(&m).swap_remove(0));
                let mut w = vec![Rational::zero(); n];
                for (pos, &i) in subset.iter().enumerate() {
                    w[i] = local[pos].clone();
                }
                return Some(w);
            }
        }
    }
    None
}

/// Largest `k` such that every `k` vectors on `side` are independent (the
/// full count when all of them are).
pub fn strong_rank(a: &ExactMatrix, side: Side) -> Result<usize> {
    strong_rank_with_budget(a, side, DEFAULT_SUBSET_BUDGET)
}

pub fn strong_rank_with_budget(a: &ExactMatrix, side: Side, budget: u128) -> Result<usize> {
    let vectors = match side {
        Side::Rows => a.row_vectors(),
        Side::Columns => a.column_vectors(),
    };
    let count = vectors.len();
    let r = rank(a);
    if r == count {
        return Ok(count);
    }
    check_budget(subsets_up_to(count, r + 1), budget)?;
    let w = search(&vectors, r + 1).expect("a dependent set of size rank+1 always exists");
    Ok(w.iter().filter(|x| !x.is_zero()).count() - 1)
}
