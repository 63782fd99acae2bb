//! Closed-form right-hand sides of the concentration and singularity
//! estimates, evaluated in `f64`.
//!
//! The universal constant of the Kolmogorov-Rogozin inequality is unknown;
//! it is carried in [`BoundConstants`] and defaults to one.

use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDist;
use crate::error::{Error, Result};
use crate::exact::to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    c_kr: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants { c_kr: 1.0 }
    }
}

impl BoundConstants {
    pub fn new(c_kr: f64) -> Result<Self> {
        if !(c_kr > 0.0 && c_kr.is_finite()) {
            return Err(Error::InvalidArgument(format!("C_KR must be positive, got {c_kr}")));
        }
        Ok(BoundConstants { c_kr })
    }

    pub fn c_kr(&self) -> f64 {
        self.c_kr
    }

    /// `4·√2·(1 + 9C)`.
    pub fn kesten_factor(&self) -> f64 {
        4.0 * std::f64::consts::SQRT_2 * (1.0 + 9.0 * self.c_kr)
    }
}

/// Per-summand data for the Kolmogorov-Rogozin and Kesten inequalities.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BoundInput {
    pub lambdas: Vec<f64>,
    #[serde(rename = "L")]
    pub l: f64,
    pub q_at_lambda: Vec<f64>,
    #[serde(default)]
    pub q_at_l: Vec<f64>,
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} is not a probability")))
    }
}

impl BoundInput {
    fn validate(&self, lambda_cap: f64, need_q_l: bool) -> Result<f64> {
        if !(self.l > 0.0) {
            return Err(Error::InvalidArgument(format!("L must be positive, got {}", self.l)));
        }
        if self.lambdas.len() != self.q_at_lambda.len() || (need_q_l && self.lambdas.len() != self.q_at_l.len()) {
            return Err(Error::InvalidArgument("per-term lists differ in length".into()));
        }
        let mut s = 0.0;
        for (lam, q) in self.lambdas.iter().zip(&self.q_at_lambda) {
            if !(*lam > 0.0) || *lam > lambda_cap * self.l {
                return Err(Error::InvalidArgument(format!(
                    "λ = {lam} outside (0, {lambda_cap}·L]"
                )));
            }
            check_prob("Q(ξ;λ)", *q)?;
            s += lam * lam * (1.0 - q);
        }
        if need_q_l {
            for q in &self.q_at_l {
                check_prob("Q(ξ;L)", *q)?;
            }
        }
        if s <= 0.0 {
            return Err(Error::DegenerateInput("Σ λ²(1 − Q) vanishes".into()));
        }
        Ok(s)
    }
}

/// `C·L·{Σ λ_i²[1 − Q(ξ_i; λ_i)]}^{-1/2}`.
pub fn kr_bound(input: &BoundInput, consts: &BoundConstants) -> Result<f64> {
    let s = input.validate(1.0, false)?;
    Ok(consts.c_kr * input.l / s.sqrt())
}

/// `4√2(1+9C)·L·Σ λ_i²(1 − Q(ξ_i;λ_i))·Q(ξ_i;L) / [Σ λ_i²(1 − Q(ξ_i;λ_i))]^{3/2}`.
pub fn kesten_bound(input: &BoundInput, consts: &BoundConstants) -> Result<f64> {
    let s = input.validate(2.0, true)?;
    let num: f64 = input
        .lambdas
        .iter()
        .zip(&input.q_at_lambda)
        .zip(&input.q_at_l)
        .map(|((lam, q), ql)| lam * lam * (1.0 - q) * ql)
        .sum();
    Ok(consts.kesten_factor() * input.l * num / s.powf(1.5))
}

/// `Σ(1 − κ_i)κ_Δ,i / {Σ(1 − κ_Δ,i)}^{3/2}` over the non-degenerate terms.
fn linear_ratio(terms: impl IntoIterator<Item = (f64, f64)>) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (k, kd) in terms {
        check_prob("κ", k)?;
        check_prob("κ_Δ", kd)?;
        if kd >= 1.0 {
            continue;
        }
        num += (1.0 - k) * kd;
        den += 1.0 - kd;
    }
    if den <= 0.0 {
        return Err(Error::DegenerateInput("every term is degenerate".into()));
    }
    Ok(num / den.powf(1.5))
}

/// Linear concentration bound; terms with `κ_Δ = 1` are dropped.
pub fn linear_bound(kappas: &[f64], kappa_deltas: &[f64], consts: &BoundConstants) -> Result<f64> {
    if kappas.len() != kappa_deltas.len() {
        return Err(Error::InvalidArgument("κ and κ_Δ lists differ in length".into()));
    }
    let r = linear_ratio(kappas.iter().copied().zip(kappa_deltas.iter().copied()))?;
    Ok(consts.kesten_factor() * r)
}

fn check_open_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("κ = {kappa} outside (0,1)")))
    }
}

/// `C·κ / √((1−κ)³ n)`.
pub fn linear_bound_simplified(kappa: f64, n: usize, consts: &BoundConstants) -> Result<f64> {
    check_open_kappa(kappa)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    Ok(consts.c_kr * kappa / ((1.0 - kappa).powi(3) * n as f64).sqrt())
}

/// Jump data of one column `j ∈ S₂`: `(κ̄, κ̄_Δ)` of `ξ_i − ξ_i'` for each
/// `i ∈ N_j`, and `(κ, κ_Δ)` of `ξ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticTerm {
    pub neighbours: Vec<(f64, f64)>,
    pub kappa: f64,
    pub kappa_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticBound {
    pub value: f64,
    pub average_term: f64,
    pub sup_term: f64,
    /// `false` when the supremum over `D` came from the heuristic scan.
    pub exact: bool,
}

/// Largest `|S₂|` for which the supremum over `D` is taken exhaustively.
pub const EXHAUSTIVE_SUP_LIMIT: usize = 20;

/// `sup_{D ⊆ S₂, |D| ≥ |S₂|/2} Σ_D a / (Σ_D b)^{3/2}`; a `D` whose
/// denominator vanishes is skipped.
fn sup_over_halves(a: &[f64], b: &[f64]) -> (f64, bool) {
    let m = a.len();
    let min_size = m.div_ceil(2);
    let ratio = |sa: f64, sb: f64| if sb > 0.0 { Some(sa / sb.powf(1.5)) } else { None };
    if m <= EXHAUSTIVE_SUP_LIMIT {
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1u32 << m) {
            if (mask.count_ones() as usize) < min_size {
                continue;
            }
            let (mut sa, mut sb) = (0.0, 0.0);
            for j in 0..m {
                if mask >> j & 1 == 1 {
                    sa += a[j];
                    sb += b[j];
                }
            }
            if let Some(r) = ratio(sa, sb) {
                best = best.max(r);
            }
        }
        return (best, true);
    }
    let mut orders: Vec<Vec<usize>> = Vec::new();
    let idx: Vec<usize> = (0..m).collect();
    let mut by_a = idx.clone();
    by_a.sort_by(|&x, &y| a[y].total_cmp(&a[x]));
    let mut by_b = idx.clone();
    by_b.sort_by(|&x, &y| b[x].total_cmp(&b[y]));
    let mut by_ratio = idx;
    by_ratio.sort_by(|&x, &y| (a[y] / b[y].max(f64::MIN_POSITIVE)).total_cmp(&(a[x] / b[x].max(f64::MIN_POSITIVE))));
    orders.extend([by_a, by_b, by_ratio]);
    let mut best = f64::NEG_INFINITY;
    for order in &orders {
        let (mut sa, mut sb) = (0.0, 0.0);
        for (count, &j) in order.iter().enumerate() {
            sa += a[j];
            sb += b[j];
            if count + 1 >= min_size {
                if let Some(r) = ratio(sa, sb) {
                    best = best.max(r);
                }
            }
        }
    }
    (best, false)
}

/// Quadratic concentration bound: the square root of `kesten_factor` times
/// the averaged neighbour ratio plus the supremum over large subsets of `S₂`.
pub fn quadratic_bound(terms: &[QuadraticTerm], consts: &BoundConstants) -> Result<QuadraticBound> {
    if terms.is_empty() {
        return Err(Error::Precondition("S₂ is empty".into()));
    }
    let mut avg = 0.0;
    for (j, t) in terms.iter().enumerate() {
        if t.neighbours.is_empty() {
            return Err(Error::Precondition(format!("N_{j} is empty")));
        }
        avg += linear_ratio(t.neighbours.iter().copied())?;
    }
    avg /= terms.len() as f64;
    let mut a = Vec::with_capacity(terms.len());
    let mut b = Vec::with_capacity(terms.len());
    for t in terms {
        check_prob("κ", t.kappa)?;
        check_prob("κ_Δ", t.kappa_delta)?;
        a.push((1.0 - t.kappa) * t.kappa_delta);
        b.push(1.0 - t.kappa_delta);
    }
    let (sup, exact) = sup_over_halves(&a, &b);
    if !sup.is_finite() {
        return Err(Error::DegenerateInput("every admissible D is degenerate".into()));
    }
    let k = consts.kesten_factor();
    let value = (k * (avg + sup)).sqrt();
    Ok(QuadraticBound { value, average_term: k * avg, sup_term: k * sup, exact })
}

/// Builds the per-column jump data for `φ = Σ c_ij ξ_i ξ_j` with the given
/// partition. `c` is row-major `n × n`.
pub fn quadratic_terms(
    c: &[Vec<crate::exact::Rational>],
    dists: &[DiscreteDist],
    s1: &[usize],
    s2: &[usize],
) -> Result<Vec<QuadraticTerm>> {
    use num_traits::Zero;
    let n = dists.len();
    if c.len() != n || c.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("coefficient array does not match the variables".into()));
    }
    let jump = |d: &DiscreteDist| {
        let p = d.kappa_delta_profile();
        (to_f64(&p.kappa), to_f64(&p.kappa_delta))
    };
    let diffs: Vec<(f64, f64)> = dists.iter().map(|d| jump(&d.difference_dist())).collect();
    s2.iter()
        .map(|&j| {
            if j >= n {
                return Err(Error::InvalidArgument(format!("index {j} out of range")));
            }
            let neighbours: Vec<(f64, f64)> =
                s1.iter().filter(|&&i| i < n && !c[i][j].is_zero()).map(|&i| diffs[i]).collect();
            let (kappa, kappa_delta) = jump(&dists[j]);
            Ok(QuadraticTerm { neighbours, kappa, kappa_delta })
        })
        .collect()
}

/// `C·[κ / √((1−κ)³ n^{1−ε})]^{1/2}`.
pub fn quadratic_bound_simplified(kappa: f64, n: usize, epsilon: f64, consts: &BoundConstants) -> Result<f64> {
    check_open_kappa(kappa)?;
    check_epsilon(epsilon, true)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let inner = kappa / ((1.0 - kappa).powi(3) * (n as f64).powf(1.0 - epsilon)).sqrt();
    Ok(consts.c_kr * inner.sqrt())
}

fn check_epsilon(epsilon: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { (0.0..1.0).contains(&epsilon) } else { epsilon > 0.0 && epsilon < 1.0 };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("ε = {epsilon} outside (0,1)")))
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `(κ^{m−k}, κ/(1−κ)·κ^{m−k}, C(n,k)·κ/(1−κ)·κ^{m−k})`.
pub fn ginibre_tail(kappa: f64, m: usize, k: usize, n: usize) -> Result<(f64, f64, f64)> {
    check_open_kappa(kappa)?;
    if k > m {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds m = {m}")));
    }
    let b1 = kappa.powi((m - k) as i32);
    let b2 = kappa / (1.0 - kappa) * b1;
    Ok((b1, b2, binomial(n, k) * b2))
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// `h(x)/log₂κ + x`.
pub fn entropy_g(x: f64, kappa: f64) -> f64 {
    binary_entropy(x) / kappa.log2() + x
}

/// Largest `β` (to bisection precision) with `h(β)/log₂κ + β ≤ α/2`.
pub fn entropy_beta(alpha: f64, kappa: f64) -> Result<f64> {
    check_open_kappa(kappa)?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidArgument(format!("α = {alpha} outside (0,1]")));
    }
    // g is convex with g(0) = 0 and g(1) = 1, so {g ≤ α/2} is an interval [0, x*]
    let target = alpha / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entropy_g(mid, kappa) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// `(α − β)·log₂(1/κ) − h(β)`.
pub fn gamma_kappa(alpha: f64, beta: f64, kappa: f64) -> Result<f64> {
    check_open_kappa(kappa)?;
    Ok((alpha - beta) * (1.0 / kappa).log2() - binary_entropy(beta))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WignerRate {
    pub f_value: f64,
    pub final_rate: f64,
}

/// Rate function of the symmetric rank process and its polynomial part.
pub fn wigner_rate(kappa: f64, n: usize, epsilon: f64) -> Result<WignerRate> {
    check_open_kappa(kappa)?;
    check_epsilon(epsilon, false)?;
    let nf = n as f64;
    let m = nf.powf(1.0 - epsilon);
    let final_rate = (kappa / (m * (1.0 - kappa).powi(3)).sqrt()).sqrt();
    let exp_term = kappa.powf(0.375 * nf - 0.5 * m) / (kappa * (1.0 - kappa));
    Ok(WignerRate { f_value: exp_term + final_rate, final_rate })
}

/// Edge probability used by [`graph_rate`]: `c·ln n / n^β` rounded to a
/// multiple of `2^-32` and clipped to `[2^-32, 1/2]`.
pub fn graph_edge_probability(c: f64, beta: f64, n: usize) -> Result<f64> {
    let rule = crate::ensembles::PRule::LogPower { c, beta };
    Ok(to_f64(&rule.p(n)?))
}

/// Rate for the adjacency matrix of an inhomogeneous random graph with
/// `p_n ≥ c·ln n / n^β`. With `p = p(n)` and `κ_n = 1 − p`, returns the larger
/// of `(κ_n² / (n^{1−ε} p))^{1/4}` and `κ_n^{(3/8)n − n^{1−ε}/2} / (κ_n(1−κ_n))`.
pub fn graph_rate(c: f64, beta: f64, epsilon: f64, n: usize) -> Result<f64> {
    check_epsilon(epsilon, false)?;
    if !(c > 0.0) || !(beta >= 0.0) {
        return Err(Error::InvalidArgument(format!("need c > 0 and β ≥ 0, got c={c}, β={beta}")));
    }
    if epsilon + beta >= 1.0 {
        return Err(Error::InvalidArgument(format!("ε + β = {} must be below 1", epsilon + beta)));
    }
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let p = graph_edge_probability(c, beta, n)?;
    let kappa = 1.0 - p;
    let nf = n as f64;
    let m = nf.powf(1.0 - epsilon);
    let poly = (kappa * kappa / (m * p)).powf(0.25);
    let exp_term = kappa.powf(0.375 * nf - 0.5 * m) / (kappa * (1.0 - kappa));
    Ok(poly.max(exp_term))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ONE: BoundConstants = BoundConstants { c_kr: 1.0 };

    fn uniform(n: usize, lam: f64, l: f64, q: f64, ql: f64) -> BoundInput {
        BoundInput { lambdas: vec![lam; n], l, q_at_lambda: vec![q; n], q_at_l: vec![ql; n] }
    }

    #[test]
    fn kr_examples() {
        for n in [1usize, 4, 9, 100] {
            let v = kr_bound(&uniform(n, 1.0, 1.0, 0.5, 0.5), &ONE).unwrap();
            assert!((v - (n as f64 / 2.0).powf(-0.5)).abs() < 1e-12);
        }
        assert_eq!(kr_bound(&uniform(1, 1.0, 1.0, 0.0, 0.0), &ONE).unwrap(), 1.0);
        let v = kr_bound(&uniform(100, 0.5, 1.0, 0.75, 0.0), &ONE).unwrap();
        assert!((v - 0.4).abs() < 1e-12);
        assert!(matches!(kr_bound(&uniform(3, 1.0, 1.0, 1.0, 1.0), &ONE), Err(Error::DegenerateInput(_))));
        assert!(kr_bound(&uniform(3, 1.5, 1.0, 0.5, 0.5), &ONE).is_err());
    }

    #[test]
    fn kesten_examples() {
        for n in [1usize, 2, 10, 50] {
            let v = kesten_bound(&uniform(n, 1.0, 1.0, 0.5, 0.5), &ONE).unwrap();
            let hand = 4.0 * 2f64.sqrt() * 10.0 * (n as f64 / 4.0) / (n as f64 / 2.0).powf(1.5);
            assert!((v - hand).abs() < 1e-9 * hand);
        }
        assert_eq!(kesten_bound(&uniform(5, 1.0, 1.0, 0.5, 0.0), &ONE).unwrap(), 0.0);
        assert!(kesten_bound(&uniform(3, 1.5, 1.0, 0.5, 0.5), &ONE).is_ok());
        assert!(kesten_bound(&uniform(3, 2.5, 1.0, 0.5, 0.5), &ONE).is_err());
        let c = BoundConstants::new(2.0).unwrap();
        assert!((c.kesten_factor() - 4.0 * 2f64.sqrt() * 19.0).abs() < 1e-12);
        assert!(BoundConstants::new(0.0).is_err());
    }

    #[test]
    fn linear_examples() {
        for n in [1usize, 2, 8, 60] {
            let v = linear_bound_simplified(0.5, n, &ONE).unwrap();
            assert!((v - 2f64.sqrt() / (n as f64).sqrt()).abs() < 1e-12);
        }
        let full = linear_bound(&[0.5], &[0.5], &ONE).unwrap();
        assert!((full - 40.0).abs() < 1e-9, "{full}");
        let with_degenerate = linear_bound(&[0.5, 1.0], &[0.5, 1.0], &ONE).unwrap();
        assert_eq!(full, with_degenerate);
        assert!(matches!(linear_bound(&[1.0], &[1.0], &ONE), Err(Error::DegenerateInput(_))));
        assert!(linear_bound_simplified(1.0, 3, &ONE).is_err());
    }

    #[test]
    fn quadratic_examples() {
        let v = quadratic_bound_simplified(0.5, 16, 0.0, &ONE).unwrap();
        assert!((v - 0.3535533905932738f64.sqrt()).abs() < 1e-12);
        assert!((v - 0.5946).abs() < 1e-4);

        let term = |nb: Vec<(f64, f64)>| QuadraticTerm { neighbours: nb, kappa: 0.5, kappa_delta: 0.5 };
        let terms = vec![term(vec![(0.5, 0.5)]); 4];
        let q = quadratic_bound(&terms, &ONE).unwrap();
        assert!(q.exact);
        // homogeneous terms: the smallest admissible D wins since the ratio decays in |D|
        let expected_sup = 2.0 * 0.25 / 1f64.powf(1.5);
        assert!((q.sup_term - ONE.kesten_factor() * expected_sup).abs() < 1e-9);

        // nearly continuous differences leave the sup term in charge
        let tiny = vec![term(vec![(1e-9, 1e-9); 3]); 4];
        let q = quadratic_bound(&tiny, &ONE).unwrap();
        assert!(q.average_term < 1e-6 * q.sup_term);

        assert!(matches!(quadratic_bound(&[term(vec![])], &ONE), Err(Error::Precondition(_))));
    }

    fn brute_sup(a: &[f64], b: &[f64]) -> f64 {
        let m = a.len();
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..1 << m {
            if 2 * mask.count_ones() as usize >= m {
                let sa: f64 = (0..m).filter(|j| mask >> j & 1 == 1).map(|j| a[j]).sum();
                let sb: f64 = (0..m).filter(|j| mask >> j & 1 == 1).map(|j| b[j]).sum();
                if sb > 0.0 {
                    best = best.max(sa / sb.powf(1.5));
                }
            }
        }
        best
    }

    #[test]
    fn quadratic_terms_from_form() {
        use crate::exact::int;
        let r = DiscreteDist::rademacher();
        let c = vec![vec![int(0), int(1), int(0)], vec![int(1), int(0), int(1)], vec![int(0), int(1), int(0)]];
        let t = quadratic_terms(&c, &vec![r; 3], &[0, 2], &[1]).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].neighbours.len(), 2);
        // ξ − ξ' for Rademacher has atoms {−2: 1/4, 0: 1/2, 2: 1/4}
        assert_eq!(t[0].neighbours[0], (0.5, 0.5));
        assert_eq!((t[0].kappa, t[0].kappa_delta), (0.5, 0.5));
    }

    #[test]
    fn ginibre_tail_examples() {
        assert_eq!(ginibre_tail(0.5, 4, 4, 7).unwrap(), (1.0, 1.0, 35.0));
        let (b1, b2, b3) = ginibre_tail(0.5, 10, 5, 12).unwrap();
        assert_eq!((b1, b2), (1.0 / 32.0, 1.0 / 32.0));
        assert!((b3 - 792.0 / 32.0).abs() < 1e-9);
        assert!(ginibre_tail(1.0, 3, 2, 3).is_err());
        assert!(ginibre_tail(0.5, 2, 3, 3).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert!(binary_entropy(1e-12) < 1e-10);
        let b = entropy_beta(0.5, 0.5).unwrap();
        assert!(b > 0.0);
        let g = -binary_entropy(b) + b;
        assert!(g <= 0.25 + 1e-12);
        // the returned point sits on the crossing
        assert!((g - 0.25).abs() < 1e-9);
        let gk = gamma_kappa(0.5, b, 0.5).unwrap();
        assert!((gk - ((0.5 - b) - binary_entropy(b))).abs() < 1e-12);
    }

    #[test]
    fn wigner_rate_examples() {
        let r = wigner_rate(0.5, 100, 0.2).unwrap();
        let oracle = (0.5 / (100f64.powf(0.8) * 0.125).sqrt()).sqrt();
        assert!((r.final_rate - oracle).abs() < 1e-12);
        let r = wigner_rate(0.5, 200, 0.2).unwrap();
        assert!((r.f_value - r.final_rate).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        for n in 1..300 {
            let f = wigner_rate(0.5, n, 0.2).unwrap().final_rate;
            assert!(f < prev);
            prev = f;
        }
        assert!(wigner_rate(0.0, 5, 0.2).is_err());
    }

    #[test]
    fn graph_rate_examples() {
        let v: Vec<f64> = [100, 1000, 10000].iter().map(|&n| graph_rate(1.0, 0.3, 0.2, n).unwrap()).collect();
        assert!(v[0] > v[1] && v[1] > v[2]);
        let v: Vec<f64> = [16, 32, 64].iter().map(|&n| graph_rate(1.0, 0.3, 0.2, n).unwrap()).collect();
        assert!(v[0] > v[1] && v[1] > v[2], "{v:?}");
        assert!(graph_rate(1.0, 0.8, 0.2, 100).is_err());
        // β toward 1 − ε raises the bound at fixed n
        let lo = graph_rate(1.0, 0.3, 0.2, 1000).unwrap();
        let hi = graph_rate(1.0, 0.7, 0.2, 1000).unwrap();
        assert!(hi > lo);
        // unclipped c = 1 agrees with the closed form
        let n = 1e6f64;
        let p = n.ln() / n.powf(0.3);
        let closed = ((1.0 - p).powi(2) / (n.powf(0.8) * n.ln() / n.powf(0.3))).powf(0.25);
        assert!((graph_rate(1.0, 0.3, 0.2, 1_000_000).unwrap() - closed).abs() < 1e-6);
    }

    #[test]
    fn simplified_linear_dominates_rademacher_sup_atom() {
        for n in 1..=60u32 {
            let atom = binomial(n as usize, n as usize / 2) / 2f64.powi(n as i32);
            assert!(atom <= linear_bound_simplified(0.5, n as usize, &ONE).unwrap());
        }
    }

    proptest! {
        #[test]
        fn sup_matches_brute_force(ab in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..9)) {
            let (a, b): (Vec<f64>, Vec<f64>) = ab.into_iter().unzip();
            let (s, exact) = sup_over_halves(&a, &b);
            prop_assert!(exact);
            let brute = brute_sup(&a, &b);
            prop_assert!((s - brute).abs() <= 1e-12 * brute.abs().max(1.0) || (s == brute));
        }

        #[test]
        fn kesten_with_full_q_matches_kr_structure(
            terms in prop::collection::vec((0.01f64..1.0, 0.0f64..0.99), 1..12),
            l in 1.0f64..3.0,
        ) {
            let input = BoundInput {
                lambdas: terms.iter().map(|t| t.0).collect(),
                l,
                q_at_lambda: terms.iter().map(|t| t.1).collect(),
                q_at_l: vec![1.0; terms.len()],
            };
            let kes = kesten_bound(&input, &ONE).unwrap();
            let kr = kr_bound(&input, &ONE).unwrap();
            prop_assert!((kes - ONE.kesten_factor() * kr).abs() <= 1e-9 * kes);
        }

        #[test]
        fn kesten_nondecreasing_in_l(
            terms in prop::collection::vec((0.01f64..1.0, 0.0f64..0.99, 0.0f64..1.0), 1..8),
        ) {
            let mk = |l: f64, bump: f64| BoundInput {
                lambdas: terms.iter().map(|t| t.0).collect(),
                l,
                q_at_lambda: terms.iter().map(|t| t.1).collect(),
                q_at_l: terms.iter().map(|t| (t.2 + bump).min(1.0)).collect(),
            };
            let a = kesten_bound(&mk(1.0, 0.0), &ONE).unwrap();
            let b = kesten_bound(&mk(2.0, 0.1), &ONE).unwrap();
            prop_assert!(b >= a);
        }

        #[test]
        fn entropy_plug_back(alpha in 0.01f64..=1.0, kappa in 0.01f64..0.99) {
            let b = entropy_beta(alpha, kappa).unwrap();
            prop_assert!(b > 0.0);
            prop_assert!(entropy_g(b, kappa) < alpha);
        }

        #[test]
        fn bounds_are_nonnegative_and_decreasing(kappa in 0.05f64..0.95, n in 1usize..500, eps in 0.01f64..0.99) {
            let l1 = linear_bound_simplified(kappa, n, &ONE).unwrap();
            let l2 = linear_bound_simplified(kappa, n + 1, &ONE).unwrap();
            prop_assert!(l1 > l2 && l2 >= 0.0);
            let q1 = quadratic_bound_simplified(kappa, n, eps, &ONE).unwrap();
            let q2 = quadratic_bound_simplified(kappa, n + 1, eps, &ONE).unwrap();
            prop_assert!(q1 > q2 && q2 >= 0.0);
            let m = n % 40;
            let (b1, b2, _) = ginibre_tail(kappa, m + 1, 1, m + 1).unwrap();
            let (c1, c2, _) = ginibre_tail(kappa, m + 2, 1, m + 2).unwrap();
            prop_assert!(c1 < b1 && c2 < b2);
            prop_assert!((b2 / b1 - kappa / (1.0 - kappa)).abs() < 1e-9);
        }
    }
}
