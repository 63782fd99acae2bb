//! Empirical and exact values set against the closed-form tail bounds.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{wilson_interval, Z99};
use crate::bounds::ginibre_tail;
use crate::dist::DiscreteDist;
use crate::ensembles::{EntryScheme, PRule};
use crate::error::{Error, Result};
use crate::exact::{int, ratio, to_f64, Rational};
use crate::oracle::{first_row_zero_prob, span_membership_prob, DEFAULT_ENUMERATION_BUDGET};
use crate::seed::SeedSource;
use crate::xlinalg::{in_column_span, rank, ExactMatrix};
use crate::ensembles::MatrixKind;

fn default_trials() -> u64 {
    100_000
}
fn default_sparse_trials() -> u64 {
    10_000
}
fn default_dist() -> DiscreteDist {
    DiscreteDist::bernoulli(ratio(1, 2)).expect("valid")
}
fn default_mk() -> Vec<(usize, usize)> {
    vec![(4, 2), (6, 3), (8, 4)]
}
fn default_alpha() -> f64 {
    0.8
}
fn default_sparse_grid() -> Vec<usize> {
    vec![16, 32, 64]
}
fn default_gamma() -> f64 {
    0.5
}
fn default_first_row_grid() -> Vec<usize> {
    vec![5, 10, 20]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundCheckConfig {
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Trials per size for the sparse items (iii) and (iv).
    #[serde(default = "default_sparse_trials")]
    pub sparse_trials: u64,
    #[serde(default)]
    pub seed: u64,
    /// Entry law for items (i) and (ii).
    #[serde(default = "default_dist")]
    pub dist: DiscreteDist,
    #[serde(default = "default_mk")]
    pub mk: Vec<(usize, usize)>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_sparse_grid")]
    pub sparse_grid: Vec<usize>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_first_row_grid")]
    pub first_row_grid: Vec<usize>,
}

impl Default for BoundCheckConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields defaulted")
    }
}

impl BoundCheckConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.sparse_trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.mk.iter().any(|&(m, k)| k == 0 || k > m) {
            return Err(Error::Config("each (m, k) needs 1 ≤ k ≤ m".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) || !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::Config("alpha must lie in (0,1] and gamma in (0,1)".into()));
        }
        let kappa = to_f64(&self.dist.kappa());
        if !(kappa < 1.0) {
            return Err(Error::Config("entry law must be non-degenerate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckRow {
    /// `i` to `v`.
    pub item: String,
    pub label: String,
    pub trials: u64,
    pub count: u64,
    pub empirical: f64,
    pub ci99: (f64, f64),
    /// Exact probability when enumerable, as a rational string.
    pub exact: Option<String>,
    pub bound: Option<f64>,
    /// Singularity frequency alongside item (v).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_p_hat: Option<f64>,
    pub holds: bool,
}

impl BoundCheckRow {
    fn new(item: &str, label: String, count: u64, trials: u64) -> Self {
        BoundCheckRow {
            item: item.into(),
            label,
            trials,
            count,
            empirical: count as f64 / trials as f64,
            ci99: wilson_interval(count, trials, Z99),
            exact: None,
            bound: None,
            singular_p_hat: None,
            holds: true,
        }
    }

    pub fn ci_width(&self) -> f64 {
        self.ci99.1 - self.ci99.0
    }
}

/// Fixed full-rank `m × k` integer matrix: the identity on top, then rows
/// `e_{r mod k} + e_{(r+1) mod k}`.
pub fn fixed_full_rank(m: usize, k: usize) -> ExactMatrix {
    let mut a = ExactMatrix::zeros(m, k).expect("m, k ≥ 1");
    for r in 0..m {
        if r < k {
            a.set(r, r, int(1));
        } else {
            let (x, y) = (r % k, (r + 1) % k);
            let v = a.get(r, x) + int(1);
            a.set(r, x, v);
            let v = a.get(r, y) + int(1);
            a.set(r, y, v);
        }
    }
    a
}

fn count_trials(trials: u64, f: impl Fn(u64) -> bool + Sync) -> u64 {
    (0..trials).into_par_iter().filter(|&t| f(t)).count() as u64
}

fn sample_vec<R: rand::RngCore>(dist: &DiscreteDist, len: usize, rng: &mut R) -> Vec<Rational> {
    (0..len).map(|_| dist.sample(rng)).collect()
}

pub fn check_bounds(config: &BoundCheckConfig) -> Result<Vec<BoundCheckRow>> {
    config.validate()?;
    let seed = SeedSource::new(config.seed);
    let kappa = to_f64(&config.dist.kappa());
    let mut rows = Vec::new();

    // (i) P(rank[A | b] = k) for fixed full-rank A
    for &(m, k) in &config.mk {
        let a = fixed_full_rank(m, k);
        let tag = format!("bounds-i-{m}-{k}");
        let count = count_trials(config.trials, |t| {
            let mut rng = seed.trial_stream(&tag, m, t);
            let b = sample_vec(&config.dist, m, &mut rng);
            in_column_span(&a, &b).expect("shapes agree")
        });
        let mut row = BoundCheckRow::new("i", format!("m={m},k={k}"), count, config.trials);
        row.exact = span_membership_prob(&a, &config.dist, DEFAULT_ENUMERATION_BUDGET).ok().map(|p| p.to_string());
        let (b1, _, _) = ginibre_tail(kappa, m, k, k)?;
        row.bound = Some(b1);
        row.holds = row.empirical - b1 <= row.ci_width();
        rows.push(row);
    }

    // (ii) P(rank A < k) for random m × k A
    for &(m, k) in &config.mk {
        let tag = format!("bounds-ii-{m}-{k}");
        let count = count_trials(config.trials, |t| {
            let mut rng = seed.trial_stream(&tag, m, t);
            let a = ExactMatrix::from_vec(m, k, sample_vec(&config.dist, m * k, &mut rng)).expect("shape");
            rank(&a) < k
        });
        let mut row = BoundCheckRow::new("ii", format!("m={m},k={k}"), count, config.trials);
        let (_, b2, _) = ginibre_tail(kappa, m, k, k)?;
        row.bound = Some(b2);
        row.holds = row.empirical - b2 <= row.ci_width();
        rows.push(row);
    }

    // (iii) sparse Wigner singularity, expected non-increasing in n
    let sparse = EntryScheme::SparseBernoulli { rule: PRule::Power { alpha: config.alpha } };
    let mut prev: Option<(f64, f64)> = None;
    for &n in &config.sparse_grid {
        let sized = sparse.at_size(n)?;
        let count = count_trials(config.sparse_trials, |t| {
            let mut rng = seed.trial_stream("bounds-iii", n, t);
            rank(&sized.sample_wigner(&mut rng)) < n
        });
        let mut row = BoundCheckRow::new("iii", format!("n={n},alpha={}", config.alpha), count, config.sparse_trials);
        row.holds = prev.is_none_or(|(_, hi)| row.empirical <= hi);
        prev = Some(row.ci99);
        rows.push(row);
    }

    // (iv) sparse Ginibre rank above γn, expected non-decreasing toward 1
    let mut prev: Option<(f64, f64)> = None;
    for &n in &config.sparse_grid {
        let sized = sparse.at_size(n)?;
        let level = config.gamma * n as f64;
        let count = count_trials(config.sparse_trials, |t| {
            let mut rng = seed.trial_stream("bounds-iv", n, t);
            rank(&sized.sample_ginibre(&mut rng)) as f64 > level
        });
        let mut row = BoundCheckRow::new("iv", format!("n={n},gamma={}", config.gamma), count, config.sparse_trials);
        row.holds = prev.is_none_or(|(lo, _)| row.empirical >= lo);
        prev = Some(row.ci99);
        rows.push(row);
    }

    // (v) zero first row of GB(n, 1/n) against (1 − 1/n)^n
    let gb = EntryScheme::SparseBernoulli { rule: PRule::MeanDegree { mean_degree: int(1) } };
    for &n in &config.first_row_grid {
        let sized = gb.at_size(n)?;
        let (zero_rows, singular) = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = seed.trial_stream("bounds-v", n, t);
                let a = sized.sample_ginibre(&mut rng);
                let z = a.row(0).iter().all(Zero::is_zero);
                (z as u64, (rank(&a) < n) as u64)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let exact = first_row_zero_prob(&gb, n, MatrixKind::Ginibre)?;
        let e = to_f64(&exact);
        let mut row = BoundCheckRow::new("v", format!("n={n}"), zero_rows, config.trials);
        row.exact = Some(exact.to_string());
        row.bound = Some(e);
        row.singular_p_hat = Some(singular as f64 / config.trials as f64);
        row.holds = row.ci99.0 <= e && e <= row.ci99.1;
        rows.push(row);
    }
    Ok(rows)
}
