//! Exact probabilities by exhaustive enumeration of tiny instances.
//!
//! Every engine walks the full product of the entry supports, so each has a
//! budget on the number of joint outcomes (default `2^24`).

use std::collections::BTreeMap;
use std::ops::Bound;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::dist::DiscreteDist;
use crate::ensembles::{EntryScheme, MatrixKind};
use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::xlinalg::{in_column_span, rank, ExactMatrix};

pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

/// Finite law with exact probabilities, sorted by outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLaw<T> {
    outcomes: Vec<(T, Rational)>,
}

impl<T: Ord + Clone> ExactLaw<T> {
    /// Merges equal outcomes and drops zero masses; the total must be one.
    pub fn new(pairs: impl IntoIterator<Item = (T, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<T, Rational> = BTreeMap::new();
        for (t, p) in pairs {
            *map.entry(t).or_insert_with(Rational::zero) += p;
        }
        let law = Self::from_map(map);
        if !law.total().is_one() {
            return Err(Error::InvalidArgument(format!("masses sum to {}", law.total())));
        }
        Ok(law)
    }

    fn from_map(map: BTreeMap<T, Rational>) -> Self {
        ExactLaw { outcomes: map.into_iter().filter(|(_, p)| !p.is_zero()).collect() }
    }

    pub fn outcomes(&self) -> &[(T, Rational)] {
        &self.outcomes
    }

    pub fn prob(&self, t: &T) -> Rational {
        self.outcomes
            .binary_search_by(|(x, _)| x.cmp(t))
            .map(|k| self.outcomes[k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn total(&self) -> Rational {
        self.outcomes.iter().map(|(_, p)| p).sum()
    }

    /// Largest atom; ties go to the smallest outcome.
    pub fn sup_atom(&self) -> (T, Rational) {
        let mut best = &self.outcomes[0];
        for o in &self.outcomes[1..] {
            if o.1 > best.1 {
                best = o;
            }
        }
        (best.0.clone(), best.1.clone())
    }
}

impl<T: Serialize> Serialize for ExactLaw<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.outcomes.len()))?;
        for (t, p) in &self.outcomes {
            seq.serialize_element(&serde_json::json!({
                "value": serde_json::to_value(t).map_err(serde::ser::Error::custom)?,
                "prob": p.to_string(),
                "approx": crate::exact::to_f64(p),
            }))?;
        }
        seq.end()
    }
}

fn outcome_count(laws: &[&DiscreteDist]) -> u128 {
    laws.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
}

fn check_budget(needed: u128, limit: u128) -> Result<()> {
    if needed > limit {
        Err(Error::BudgetExceeded { needed, limit })
    } else {
        Ok(())
    }
}

/// Calls `f(values, probability)` for every joint outcome of independent
/// draws from `laws`.
fn for_each_outcome(laws: &[&DiscreteDist], budget: u128, mut f: impl FnMut(&[Rational], &Rational)) -> Result<()> {
    check_budget(outcome_count(laws), budget)?;
    let k = laws.len();
    let mut idx = vec![0usize; k];
    let mut values: Vec<Rational> = laws.iter().map(|d| d.atoms()[0].0.clone()).collect();
    // prefix[i] = product of the masses of the first i coordinates
    let mut prefix = vec![Rational::one(); k + 1];
    for i in 0..k {
        prefix[i + 1] = &prefix[i] * &laws[i].atoms()[0].1;
    }
    loop {
        f(&values, &prefix[k]);
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < laws[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
        for i in pos..k {
            let (v, m) = &laws[i].atoms()[idx[i]];
            values[i] = v.clone();
            prefix[i + 1] = &prefix[i] * m;
        }
    }
}

fn fill(kind: MatrixKind, n: usize, cells: &[(usize, usize)], values: &[Rational]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(n, n).expect("n ≥ 1");
    for ((i, j), v) in cells.iter().zip(values) {
        m.set(*i, *j, v.clone());
        if kind == MatrixKind::Wigner {
            m.set(*j, *i, v.clone());
        }
    }
    m
}

/// Exact `P(rank < n)`.
pub fn enumerate_singularity(scheme: &EntryScheme, n: usize, kind: MatrixKind) -> Result<Rational> {
    enumerate_singularity_with_budget(scheme, n, kind, DEFAULT_ENUMERATION_BUDGET)
}

pub fn enumerate_singularity_with_budget(
    scheme: &EntryScheme,
    n: usize,
    kind: MatrixKind,
    budget: u128,
) -> Result<Rational> {
    if kind == MatrixKind::Wigner && !scheme.is_symmetric() {
        return Err(Error::InvalidArgument("Wigner enumeration needs a symmetric scheme".into()));
    }
    let sized = scheme.at_size(n)?;
    let cells = kind.cells(n);
    let laws: Vec<&DiscreteDist> = cells.iter().map(|&(i, j)| sized.resolve(i, j)).collect();
    let mut singular = Rational::zero();
    for_each_outcome(&laws, budget, |values, p| {
        if rank(&fill(kind, n, &cells, values)) < n {
            singular += p;
        }
    })?;
    Ok(singular)
}

/// Exact law of `Σ α_i ξ_i`.
pub fn linear_form_law(alphas: &[Rational], dists: &[DiscreteDist]) -> Result<DiscreteDist> {
    if alphas.len() != dists.len() || alphas.is_empty() {
        return Err(Error::InvalidArgument("need one coefficient per variable".into()));
    }
    if let Some(k) = alphas.iter().position(Zero::is_zero) {
        return Err(Error::Precondition(format!("coefficient α_{k} is zero")));
    }
    let mut law = DiscreteDist::point(int(0));
    for (a, d) in alphas.iter().zip(dists) {
        law = law.convolve(&d.scale(a)?);
    }
    Ok(law)
}

/// `(sup_x P(Σ α_i ξ_i = x), argmax)`.
pub fn exact_linear_concentration(alphas: &[Rational], dists: &[DiscreteDist]) -> Result<(Rational, Rational)> {
    let (x, p) = linear_form_law(alphas, dists)?.biggest_jump();
    Ok((p, x))
}

fn check_form(c: &ExactMatrix, dists: &[DiscreteDist]) -> Result<()> {
    if !c.is_square() || c.rows() != dists.len() {
        return Err(Error::InvalidArgument(format!(
            "{}x{} coefficients for {} variables",
            c.rows(),
            c.cols(),
            dists.len()
        )));
    }
    if !c.is_symmetric() {
        return Err(Error::InvalidArgument("coefficient array must be symmetric".into()));
    }
    Ok(())
}

fn quadratic_value(c: &ExactMatrix, xi: &[Rational]) -> Rational {
    let n = xi.len();
    let mut total = Rational::zero();
    for i in 0..n {
        if xi[i].is_zero() {
            continue;
        }
        let mut row = Rational::zero();
        for j in 0..n {
            let cij = c.get(i, j);
            if !cij.is_zero() && !xi[j].is_zero() {
                row += cij * &xi[j];
            }
        }
        total += row * &xi[i];
    }
    total
}

/// Exact law of `φ = Σ_{i,j} c_ij ξ_i ξ_j` (cross terms counted twice).
pub fn quadratic_form_law(c: &ExactMatrix, dists: &[DiscreteDist], budget: u128) -> Result<ExactLaw<Rational>> {
    check_form(c, dists)?;
    let laws: Vec<&DiscreteDist> = dists.iter().collect();
    let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
    for_each_outcome(&laws, budget, |xi, p| {
        *map.entry(quadratic_value(c, xi)).or_insert_with(Rational::zero) += p;
    })?;
    Ok(ExactLaw::from_map(map))
}

/// `(sup_x P(φ = x), argmax)`.
pub fn exact_quadratic_concentration(c: &ExactMatrix, dists: &[DiscreteDist]) -> Result<(Rational, Rational)> {
    let (x, p) = quadratic_form_law(c, dists, DEFAULT_ENUMERATION_BUDGET)?.sup_atom();
    Ok((p, x))
}

/// Interval of the real line with open, closed or missing endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: Bound<Rational>,
    pub hi: Bound<Rational>,
}

impl Interval {
    pub fn whole() -> Self {
        Interval { lo: Bound::Unbounded, hi: Bound::Unbounded }
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: Bound::Included(x.clone()), hi: Bound::Included(x) }
    }

    pub fn closed(a: Rational, b: Rational) -> Self {
        Interval { lo: Bound::Included(a), hi: Bound::Included(b) }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = match &self.lo {
            Bound::Included(a) => x >= a,
            Bound::Excluded(a) => x > a,
            Bound::Unbounded => true,
        };
        let below = match &self.hi {
            Bound::Included(b) => x <= b,
            Bound::Excluded(b) => x < b,
            Bound::Unbounded => true,
        };
        above && below
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecouplingCheck {
    pub lhs: Rational,
    pub lhs_sq: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

/// Compares `P(φ(X,Y) ∈ I)²` with `P(φ(X,Y) ∈ I, φ(X',Y) ∈ I)`, where `X`
/// are the variables in `s1`, `Y` those in `s2`, and `X'` an independent copy.
pub fn verify_decoupling(
    c: &ExactMatrix,
    dists: &[DiscreteDist],
    s1: &[usize],
    s2: &[usize],
    interval: &Interval,
) -> Result<DecouplingCheck> {
    verify_decoupling_with_budget(c, dists, s1, s2, interval, DEFAULT_ENUMERATION_BUDGET)
}

pub fn verify_decoupling_with_budget(
    c: &ExactMatrix,
    dists: &[DiscreteDist],
    s1: &[usize],
    s2: &[usize],
    interval: &Interval,
    budget: u128,
) -> Result<DecouplingCheck> {
    check_form(c, dists)?;
    let n = dists.len();
    let mut seen = vec![false; n];
    for &i in s1.iter().chain(s2) {
        if i >= n || seen[i] {
            return Err(Error::InvalidArgument("S1, S2 must partition the variables".into()));
        }
        seen[i] = true;
    }
    if seen.contains(&false) {
        return Err(Error::InvalidArgument("S1, S2 must partition the variables".into()));
    }
    let x_laws: Vec<&DiscreteDist> = s1.iter().map(|&i| &dists[i]).collect();
    let y_laws: Vec<&DiscreteDist> = s2.iter().map(|&i| &dists[i]).collect();
    check_budget(outcome_count(&x_laws).saturating_mul(outcome_count(&y_laws)), budget)?;

    let mut xi = vec![Rational::zero(); n];
    let mut lhs = Rational::zero();
    let mut rhs = Rational::zero();
    let mut inner: Result<()> = Ok(());
    for_each_outcome(&y_laws, u128::MAX, |y, py| {
        for (&j, v) in s2.iter().zip(y) {
            xi[j] = v.clone();
        }
        let mut p_hit = Rational::zero();
        let r = for_each_outcome(&x_laws, u128::MAX, |x, px| {
            for (&i, v) in s1.iter().zip(x) {
                xi[i] = v.clone();
            }
            if interval.contains(&quadratic_value(c, &xi)) {
                p_hit += px;
            }
        });
        if r.is_err() {
            inner = r;
        }
        lhs += py * &p_hit;
        rhs += py * &p_hit * &p_hit;
    })?;
    inner?;
    let lhs_sq = &lhs * &lhs;
    let holds = lhs_sq <= rhs;
    Ok(DecouplingCheck { lhs, lhs_sq, rhs, holds })
}

/// One border `(u, d)` of a symmetric matrix and its effect on the rank.
#[derive(Debug, Clone, PartialEq)]
pub struct BorderOutcome {
    pub u: Vec<Rational>,
    pub d: Rational,
    pub prob: Rational,
    pub u_in_span: bool,
    pub increment: u8,
}

/// Every border of `w` drawn from `scheme` at size `w.rows() + 1`.
pub fn border_outcomes(w: &ExactMatrix, scheme: &EntryScheme, budget: u128) -> Result<Vec<BorderOutcome>> {
    if !w.is_symmetric() {
        return Err(Error::InvalidArgument("bordering needs a symmetric matrix".into()));
    }
    let m = w.rows();
    let sized = scheme.at_size(m + 1)?;
    let laws: Vec<&DiscreteDist> = (0..=m).map(|i| sized.resolve(i, m)).collect();
    let base = rank(w);
    let mut out = Vec::new();
    for_each_outcome(&laws, budget, |values, p| {
        let (u, d) = values.split_at(m);
        let (grown, _) = crate::xlinalg::border_symmetric(w, u, &d[0]).expect("shapes agree");
        out.push(BorderOutcome {
            u: u.to_vec(),
            d: d[0].clone(),
            prob: p.clone(),
            u_in_span: in_column_span(w, u).expect("shapes agree"),
            increment: (rank(&grown) - base) as u8,
        });
    })?;
    Ok(out)
}

/// Exact law of `rank(W') − rank(W)` over all borders.
pub fn exact_border_law(w: &ExactMatrix, scheme: &EntryScheme) -> Result<ExactLaw<u8>> {
    let outcomes = border_outcomes(w, scheme, DEFAULT_ENUMERATION_BUDGET)?;
    ExactLaw::new(outcomes.into_iter().map(|o| (o.increment, o.prob)))
}

/// Exact rank-deficiency law of the size-`n` symmetric matrix obtained by
/// growth, i.e. with entry `(i, j)` drawn at size `max(i, j) + 1`.
pub fn grown_deficiency_law(scheme: &EntryScheme, n: usize, budget: u128) -> Result<ExactLaw<usize>> {
    if !scheme.is_symmetric() {
        return Err(Error::InvalidArgument("the rank process needs a symmetric scheme".into()));
    }
    let sizes: Vec<_> = (1..=n).map(|s| scheme.at_size(s)).collect::<Result<_>>()?;
    let cells = MatrixKind::Wigner.cells(n);
    let laws: Vec<&DiscreteDist> = cells.iter().map(|&(i, j)| sizes[i.max(j)].resolve(i, j)).collect();
    let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
    for_each_outcome(&laws, budget, |values, p| {
        let d = n - rank(&fill(MatrixKind::Wigner, n, &cells, values));
        *map.entry(d).or_insert_with(Rational::zero) += p;
    })?;
    Ok(ExactLaw::from_map(map))
}

/// `E[X_n]` for the process `X_n = (κ^{-1/8})^{n − rank W_n}` on singular
/// `W_n` and `0` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankProcessValue {
    pub n: usize,
    pub deficiency: ExactLaw<usize>,
    pub expectation: f64,
}

impl RankProcessValue {
    pub fn singular_prob(&self) -> Rational {
        Rational::one() - self.deficiency.prob(&0)
    }
}

/// `E[X_n]` with growth factor `c = κ^{-1/8}` from the exact deficiency law.
pub fn process_expectation(law: &ExactLaw<usize>, growth: f64) -> f64 {
    law.outcomes()
        .iter()
        .filter(|(d, _)| *d > 0)
        .map(|(d, p)| crate::exact::to_f64(p) * growth.powi(*d as i32))
        .sum()
}

pub fn exact_rank_process(scheme: &EntryScheme, n_max: usize, kappa: f64) -> Result<Vec<RankProcessValue>> {
    exact_rank_process_with_budget(scheme, n_max, kappa, DEFAULT_ENUMERATION_BUDGET)
}

pub fn exact_rank_process_with_budget(
    scheme: &EntryScheme,
    n_max: usize,
    kappa: f64,
    budget: u128,
) -> Result<Vec<RankProcessValue>> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::InvalidArgument(format!("κ = {kappa} outside (0,1]")));
    }
    let growth = kappa.powf(-0.125);
    (1..=n_max)
        .map(|n| {
            let deficiency = grown_deficiency_law(scheme, n, budget)?;
            let expectation = process_expectation(&deficiency, growth);
            Ok(RankProcessValue { n, deficiency, expectation })
        })
        .collect()
}

/// Exact `P(b ∈ col(A))` for `b` with iid entries from `dist`, i.e.
/// `P(rank[A | b] = rank A)`.
pub fn span_membership_prob(a: &ExactMatrix, dist: &DiscreteDist, budget: u128) -> Result<Rational> {
    let laws = vec![dist; a.rows()];
    let mut p_in = Rational::zero();
    for_each_outcome(&laws, budget, |b, p| {
        if in_column_span(a, b).expect("shapes agree") {
            p_in += p;
        }
    })?;
    Ok(p_in)
}

/// `Π_j P(ξ_{0j} = 0)`.
pub fn first_row_zero_prob(scheme: &EntryScheme, n: usize, kind: MatrixKind) -> Result<Rational> {
    if kind == MatrixKind::Wigner && !scheme.is_symmetric() {
        return Err(Error::InvalidArgument("Wigner kind needs a symmetric scheme".into()));
    }
    let sized = scheme.at_size(n)?;
    let zero = int(0);
    Ok((0..n).map(|j| sized.resolve(0, j).mass_at(&zero)).product())
}
