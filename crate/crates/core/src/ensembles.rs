//! Entry schemes `(i, j, n) -> law` and seeded matrix samplers.
//!
//! Indices are 0-based throughout. A scheme is first fixed at a size with
//! [`EntryScheme::at_size`], which evaluates any size-dependent rule once;
//! the resulting [`SizedScheme`] is what the samplers read from.
//!
//! Draw order (one `u64` per entry): Ginibre row-major; Wigner upper
//! triangle row-major including the diagonal; adjacency strict upper
//! triangle row-major; a growth step the new column top to bottom and then
//! the corner.

use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDist;
use crate::error::{Error, Result};
use crate::exact::{de_rational, dyadic_from_f64, int, parse_rational, ser_rational, Rational};
use crate::xlinalg::ExactMatrix;

/// Precision of the dyadic rounding applied to transcendental rules.
pub const RULE_BITS: u32 = 32;

/// Edge/one probability as a function of the size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PRule {
    /// `p(n) = n^α / n`.
    Power { alpha: f64 },
    /// `p(n) = c·ln n / n^β`.
    LogPower { c: f64, beta: f64 },
    /// Constant rational `p`.
    Fixed {
        #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
        p: Rational,
    },
    /// `p(n) = d / n`, exact.
    MeanDegree {
        #[serde(serialize_with = "ser_rational", deserialize_with = "de_rational")]
        mean_degree: Rational,
    },
}

impl PRule {
    /// Evaluates the rule. Floating rules are rounded to a multiple of
    /// `2^-32` and clipped to `[2^-32, 1/2]`; exact rules must land in `[0, 1]`.
    pub fn p(&self, n: usize) -> Result<Rational> {
        let nf = n as f64;
        let float = match self {
            PRule::Power { alpha } => nf.powf(*alpha) / nf,
            PRule::LogPower { c, beta } => c * nf.ln() / nf.powf(*beta),
            PRule::Fixed { p } => return check_unit(p.clone()),
            PRule::MeanDegree { mean_degree } => {
                return check_unit(mean_degree / int(n as i64));
            }
        };
        if !float.is_finite() {
            return Err(Error::InvalidArgument(format!("rule {self:?} not finite at n={n}")));
        }
        let lo = Rational::new(1.into(), num_bigint::BigInt::one() << RULE_BITS);
        let hi = Rational::new(1.into(), 2.into());
        let p = dyadic_from_f64(float, RULE_BITS);
        Ok(if p < lo { lo } else if p > hi { hi } else { p })
    }

    /// `(c, β)` when the rule is the logarithmic graph rule.
    pub fn log_power_params(&self) -> Option<(f64, f64)> {
        match self {
            PRule::LogPower { c, beta } => Some((*c, *beta)),
            _ => None,
        }
    }
}

fn check_unit(p: Rational) -> Result<Rational> {
    if p.is_negative() || p > Rational::one() {
        Err(Error::InvalidArgument(format!("probability {p} outside [0,1]")))
    } else {
        Ok(p)
    }
}

/// Edge probabilities of a random graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRule {
    /// Explicit `p_ij` table (only the strict upper triangle is read).
    Table { pij: Vec<Vec<String>> },
    Homogeneous(PRule),
}

impl GraphRule {
    /// `p_ij` at size `n`, `i ≠ j`; must lie in `(0, 1)`.
    fn edge_probabilities(&self, n: usize) -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); n * n];
        match self {
            GraphRule::Homogeneous(rule) => {
                let p = rule.p(n)?;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            out[i * n + j] = p.clone();
                        }
                    }
                }
            }
            GraphRule::Table { pij } => {
                if pij.len() < n || pij.iter().take(n).any(|r| r.len() < n) {
                    return Err(Error::InvalidArgument(format!("p_ij table smaller than n={n}")));
                }
                for i in 0..n {
                    for j in i + 1..n {
                        let p = parse_rational(&pij[i][j])?;
                        out[i * n + j] = p.clone();
                        out[j * n + i] = p;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let p = &out[i * n + j];
                if i != j && (!p.is_positive() || *p >= Rational::one()) {
                    return Err(Error::InvalidArgument(format!("p_{i}{j} = {p} outside (0,1)")));
                }
            }
        }
        Ok(out)
    }
}

/// Which entries of a square matrix are drawn independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// All `n²` entries.
    Ginibre,
    /// Entries on and above the diagonal, mirrored below.
    Wigner,
}

impl MatrixKind {
    /// Cells drawn independently, in sampling order.
    pub fn cells(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            MatrixKind::Ginibre => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
            MatrixKind::Wigner => (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect(),
        }
    }
}

impl std::str::FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ginibre" | "gb" => Ok(MatrixKind::Ginibre),
            "wigner" | "wb" => Ok(MatrixKind::Wigner),
            _ => Err(Error::InvalidArgument(format!("unknown matrix kind {s:?}"))),
        }
    }
}

/// Rule assigning a law to every cell `(i, j)` of an `n × n` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryScheme {
    Iid { dist: DiscreteDist },
    Table { entries: Vec<Vec<DiscreteDist>> },
    SparseBernoulli { rule: PRule },
    Banded { w: usize, dist: DiscreteDist },
    Graph { rule: GraphRule },
}

#[derive(Debug, Clone)]
enum Cells {
    Constant(DiscreteDist),
    Band { w: usize, inside: DiscreteDist, outside: DiscreteDist },
    Full(Vec<DiscreteDist>),
}

/// A scheme evaluated at one size.
#[derive(Debug, Clone)]
pub struct SizedScheme {
    n: usize,
    cells: Cells,
}

impl EntryScheme {
    pub fn iid(dist: DiscreteDist) -> Self {
        EntryScheme::Iid { dist }
    }

    pub fn at_size(&self, n: usize) -> Result<SizedScheme> {
        if n == 0 {
            return Err(Error::InvalidArgument("size must be positive".into()));
        }
        let cells = match self {
            EntryScheme::Iid { dist } => Cells::Constant(dist.clone()),
            EntryScheme::SparseBernoulli { rule } => {
                Cells::Constant(DiscreteDist::bernoulli(rule.p(n)?)?)
            }
            EntryScheme::Banded { w, dist } => Cells::Band {
                w: *w,
                inside: dist.clone(),
                outside: DiscreteDist::point(int(0)),
            },
            EntryScheme::Table { entries } => {
                if entries.len() < n || entries.iter().take(n).any(|r| r.len() < n) {
                    return Err(Error::InvalidArgument(format!("table smaller than n={n}")));
                }
                Cells::Full(entries.iter().take(n).flat_map(|r| r.iter().take(n).cloned()).collect())
            }
            EntryScheme::Graph { rule } => {
                let probs = rule.edge_probabilities(n)?;
                let zero = DiscreteDist::point(int(0));
                Cells::Full(
                    probs
                        .into_iter()
                        .enumerate()
                        .map(|(k, p)| if k / n == k % n { Ok(zero.clone()) } else { DiscreteDist::bernoulli(p) })
                        .collect::<Result<_>>()?,
                )
            }
        };
        Ok(SizedScheme { n, cells })
    }

    /// Law of entry `(i, j)` of the `n × n` matrix.
    pub fn resolve(&self, i: usize, j: usize, n: usize) -> Result<DiscreteDist> {
        if i >= n || j >= n {
            return Err(Error::InvalidArgument(format!("cell ({i},{j}) outside size {n}")));
        }
        Ok(self.at_size(n)?.resolve(i, j).clone())
    }

    /// Whether `resolve(i, j, n) = resolve(j, i, n)` for every size.
    pub fn is_symmetric(&self) -> bool {
        match self {
            EntryScheme::Table { entries } => {
                let n = entries.len();
                entries.iter().all(|r| r.len() == n)
                    && (0..n).all(|i| (0..i).all(|j| entries[i][j] == entries[j][i]))
            }
            EntryScheme::Graph { rule: GraphRule::Table { pij } } => {
                // only the upper triangle is read, so any table is symmetric in effect
                !pij.is_empty()
            }
            _ => true,
        }
    }

    /// Biggest jump over all cells at size `n`.
    pub fn kappa_n(&self, n: usize) -> Result<Rational> {
        Ok(self.at_size(n)?.kappa())
    }
}

impl SizedScheme {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn resolve(&self, i: usize, j: usize) -> &DiscreteDist {
        match &self.cells {
            Cells::Constant(d) => d,
            Cells::Band { w, inside, outside } => {
                if i.abs_diff(j) <= *w {
                    inside
                } else {
                    outside
                }
            }
            Cells::Full(v) => &v[i * self.n + j],
        }
    }

    pub fn kappa(&self) -> Rational {
        match &self.cells {
            Cells::Constant(d) => d.kappa(),
            Cells::Band { w, inside, outside } => {
                if *w + 1 >= self.n {
                    inside.kappa()
                } else {
                    inside.kappa().max(outside.kappa())
                }
            }
            Cells::Full(v) => v.iter().map(DiscreteDist::kappa).max().unwrap_or_else(Rational::zero),
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, kind: MatrixKind, rng: &mut R) -> ExactMatrix {
        match kind {
            MatrixKind::Ginibre => self.sample_ginibre(rng),
            MatrixKind::Wigner => self.sample_wigner(rng),
        }
    }

    pub fn sample_ginibre<R: RngCore + ?Sized>(&self, rng: &mut R) -> ExactMatrix {
        let n = self.n;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.resolve(i, j).sample(rng));
            }
        }
        ExactMatrix::from_vec(n, n, data).expect("n ≥ 1")
    }

    /// Draws the upper triangle and mirrors it. Reads `resolve(i, j)` for
    /// `i ≤ j` only.
    pub fn sample_wigner<R: RngCore + ?Sized>(&self, rng: &mut R) -> ExactMatrix {
        let n = self.n;
        let mut data = vec![Rational::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.resolve(i, j).sample(rng);
                if i != j {
                    data[j * n + i] = v.clone();
                }
                data[i * n + j] = v;
            }
        }
        ExactMatrix::from_vec(n, n, data).expect("n ≥ 1").mark_symmetric()
    }
}

pub fn kappa_n(scheme: &EntryScheme, n: usize) -> Result<Rational> {
    scheme.kappa_n(n)
}

pub fn sample_ginibre<R: RngCore + ?Sized>(scheme: &EntryScheme, n: usize, rng: &mut R) -> Result<ExactMatrix> {
    Ok(scheme.at_size(n)?.sample_ginibre(rng))
}

pub fn sample_wigner<R: RngCore + ?Sized>(scheme: &EntryScheme, n: usize, rng: &mut R) -> Result<ExactMatrix> {
    if !scheme.is_symmetric() {
        return Err(Error::InvalidArgument("Wigner sampling needs a symmetric scheme".into()));
    }
    Ok(scheme.at_size(n)?.sample_wigner(rng))
}

/// Symmetric 0/1 adjacency matrix with zero diagonal; edge `{i, j}` is
/// present with probability `p_ij`.
pub fn sample_adjacency<R: RngCore + ?Sized>(rule: &GraphRule, n: usize, rng: &mut R) -> Result<ExactMatrix> {
    let scheme = EntryScheme::Graph { rule: rule.clone() }.at_size(n)?;
    Ok(scheme.sample_wigner_offdiag(rng))
}

impl SizedScheme {
    /// Like [`SizedScheme::sample_wigner`] but leaves the diagonal at zero
    /// without consuming draws for it.
    pub fn sample_wigner_offdiag<R: RngCore + ?Sized>(&self, rng: &mut R) -> ExactMatrix {
        let n = self.n;
        let mut data = vec![Rational::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = self.resolve(i, j).sample(rng);
                data[j * n + i] = v.clone();
                data[i * n + j] = v;
            }
        }
        ExactMatrix::from_vec(n, n, data).expect("n ≥ 1").mark_symmetric()
    }

    /// Borders an `(n-1) × (n-1)` symmetric matrix with a fresh column drawn
    /// from this size's laws.
    pub fn grow<R: RngCore + ?Sized>(&self, w: &ExactMatrix, rng: &mut R) -> Result<ExactMatrix> {
        let m = w.rows();
        if m + 1 != self.n || !w.is_square() {
            return Err(Error::InvalidArgument(format!(
                "cannot grow a {}x{} matrix to size {}",
                w.rows(),
                w.cols(),
                self.n
            )));
        }
        let n = self.n;
        let col: Vec<Rational> = (0..m).map(|i| self.resolve(i, m).sample(rng)).collect();
        let corner = self.resolve(m, m).sample(rng);
        let mut data = Vec::with_capacity(n * n);
        for (i, c) in col.iter().enumerate() {
            data.extend(w.row(i).iter().cloned());
            data.push(c.clone());
        }
        data.extend(col);
        data.push(corner);
        Ok(ExactMatrix::from_vec(n, n, data)?.mark_symmetric())
    }
}

/// One step of the growth process `W_n -> W_{n+1}`; the new column and
/// corner are drawn from `resolve(·, n, n + 1)`.
pub fn grow_wigner<R: RngCore + ?Sized>(w: &ExactMatrix, scheme: &EntryScheme, rng: &mut R) -> Result<ExactMatrix> {
    if !w.is_symmetric() {
        return Err(Error::InvalidArgument("growth needs a symmetric matrix".into()));
    }
    scheme.at_size(w.rows() + 1)?.grow(w, rng)
}
