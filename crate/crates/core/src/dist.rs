//! Finite-support distributions with exact rational atoms.
//!
//! A [`DiscreteDist`] is the law of a single matrix entry. Besides the usual
//! algebra (independent sums, differences, scaling) it answers the questions
//! the singularity estimates are phrased in: the biggest jump of the
//! distribution function and the Lévy concentration function
//! `Q(ξ; λ) = sup_x P(ξ ∈ [x, x + λ])`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, int, parse_rational, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct DiscreteDist {
    atoms: Vec<(Rational, Rational)>,
    /// `floor(F(x_k) * 2^64)` for every atom but the last.
    thresholds: Vec<u64>,
}

/// Biggest jump together with a window width realizing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpProfile {
    pub x_kappa: Rational,
    pub kappa: Rational,
    pub kappa_delta: Rational,
    pub delta: Rational,
}

impl DiscreteDist {
    /// Builds a distribution from `(value, mass)` pairs. Equal values are
    /// merged; masses must be positive and sum to exactly one.
    pub fn new(atoms: impl IntoIterator<Item = (Rational, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (v, m) in atoms {
            if !m.is_positive() {
                return Err(Error::InvalidArgument(format!(
                    "atom at {v} has non-positive mass {m}"
                )));
            }
            *merged.entry(v).or_insert_with(Rational::zero) += m;
        }
        if merged.is_empty() {
            return Err(Error::InvalidArgument("distribution has no atoms".into()));
        }
        let total: Rational = merged.values().cloned().sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!("masses sum to {total}, not 1")));
        }
        Ok(Self::from_sorted(merged.into_iter().collect()))
    }

    fn from_sorted(atoms: Vec<(Rational, Rational)>) -> Self {
        let two64 = Rational::from_integer(BigInt::one() << 64u32);
        let mut cum = Rational::zero();
        let mut thresholds = Vec::with_capacity(atoms.len().saturating_sub(1));
        for (_, m) in &atoms[..atoms.len() - 1] {
            cum += m;
            let t = (&cum * &two64).floor().to_integer();
            thresholds.push(t.to_u64().unwrap_or(u64::MAX));
        }
        DiscreteDist { atoms, thresholds }
    }

    fn from_map(map: BTreeMap<Rational, Rational>) -> Self {
        Self::from_sorted(map.into_iter().filter(|(_, m)| !m.is_zero()).collect())
    }

    pub fn point(v: Rational) -> Self {
        Self::from_sorted(vec![(v, Rational::one())])
    }

    /// Bernoulli on `{0, 1}` with `P(1) = p`; `p ∈ {0, 1}` gives a point mass.
    pub fn bernoulli(p: Rational) -> Result<Self> {
        if p.is_negative() || p > Rational::one() {
            return Err(Error::InvalidArgument(format!("bernoulli parameter {p} outside [0,1]")));
        }
        if p.is_zero() {
            return Ok(Self::point(int(0)));
        }
        if p.is_one() {
            return Ok(Self::point(int(1)));
        }
        Ok(Self::from_sorted(vec![
            (int(0), Rational::one() - &p),
            (int(1), p),
        ]))
    }

    /// Uniform on `{-1, +1}`.
    pub fn rademacher() -> Self {
        let half = Rational::new(1.into(), 2.into());
        Self::from_sorted(vec![(int(-1), half.clone()), (int(1), half)])
    }

    /// Uniform on the integers `a..=b`.
    pub fn uniform_int(a: i64, b: i64) -> Result<Self> {
        if a > b {
            return Err(Error::InvalidArgument(format!("empty integer range {a}..={b}")));
        }
        let mass = Rational::new(BigInt::one(), BigInt::from(b - a + 1));
        Ok(Self::from_sorted((a..=b).map(|v| (int(v), mass.clone())).collect()))
    }

    pub fn atoms(&self) -> &[(Rational, Rational)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_degenerate(&self) -> bool {
        self.atoms.len() == 1
    }

    pub fn min_value(&self) -> &Rational {
        &self.atoms[0].0
    }

    pub fn max_value(&self) -> &Rational {
        &self.atoms[self.atoms.len() - 1].0
    }

    /// `P(ξ = v)`.
    pub fn mass_at(&self, v: &Rational) -> Rational {
        match self.atoms.binary_search_by(|(x, _)| x.cmp(v)) {
            Ok(i) => self.atoms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Largest atom mass and the smallest value carrying it.
    pub fn biggest_jump(&self) -> (Rational, Rational) {
        let mut best = &self.atoms[0];
        for a in &self.atoms[1..] {
            if a.1 > best.1 {
                best = a;
            }
        }
        (best.0.clone(), best.1.clone())
    }

    pub fn kappa(&self) -> Rational {
        self.biggest_jump().1
    }

    /// Lévy concentration function `sup_x P(ξ ∈ [x, x + λ])`.
    ///
    /// The supremum is attained by a window whose left end is a support
    /// point, so a two-pointer scan over the sorted atoms is exact.
    pub fn levy_concentration(&self, lambda: &Rational) -> Result<Rational> {
        if lambda.is_negative() {
            return Err(Error::InvalidArgument(format!("negative window width {lambda}")));
        }
        let mut best = Rational::zero();
        let mut window = Rational::zero();
        let mut hi = 0;
        for lo in 0..self.atoms.len() {
            if hi < lo {
                hi = lo;
                window = Rational::zero();
            }
            let right = &self.atoms[lo].0 + lambda;
            while hi < self.atoms.len() && self.atoms[hi].0 <= right {
                window += &self.atoms[hi].1;
                hi += 1;
            }
            if window > best {
                best = window.clone();
            }
            window -= &self.atoms[lo].1;
        }
        Ok(best)
    }

    /// Biggest jump plus the half-gap window that realizes it.
    pub fn kappa_delta_profile(&self) -> JumpProfile {
        let (x_kappa, kappa) = self.biggest_jump();
        let delta = self
            .atoms
            .windows(2)
            .map(|w| &w[1].0 - &w[0].0)
            .min()
            .map(|gap| gap / int(2))
            .unwrap_or_else(Rational::one);
        JumpProfile { x_kappa, kappa: kappa.clone(), kappa_delta: kappa, delta }
    }

    /// Law of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &DiscreteDist) -> DiscreteDist {
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (x, p) in &self.atoms {
            for (y, q) in &other.atoms {
                *map.entry(x + y).or_insert_with(Rational::zero) += p * q;
            }
        }
        Self::from_map(map)
    }

    /// Law of `ξ - ξ'` for independent copies `ξ, ξ'`.
    pub fn difference_dist(&self) -> DiscreteDist {
        self.convolve(&self.reflect())
    }

    fn reflect(&self) -> DiscreteDist {
        Self::from_sorted(self.atoms.iter().rev().map(|(v, m)| (-v, m.clone())).collect())
    }

    /// Law of `β ξ`.
    pub fn scale(&self, beta: &Rational) -> Result<DiscreteDist> {
        if beta.is_zero() {
            return Err(Error::InvalidArgument("scale factor must be non-zero".into()));
        }
        let scaled = self.atoms.iter().map(|(v, m)| (v * beta, m.clone()));
        Ok(if beta.is_negative() {
            Self::from_sorted(scaled.rev().collect())
        } else {
            Self::from_sorted(scaled.collect())
        })
    }

    /// Index of the atom selected by one 64-bit uniform word.
    #[inline]
    pub fn index_for(&self, u: u64) -> usize {
        self.thresholds.partition_point(|&t| t <= u)
    }

    /// Draws one value, consuming exactly one `u64` from the stream.
    ///
    /// Atom `k` is selected with probability `(T_k - T_{k-1}) / 2^64`, which
    /// equals its mass whenever the mass is dyadic with denominator ≤ 2^64.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Rational {
        self.atoms[self.index_for(rng.next_u64())].0.clone()
    }
}

impl fmt::Debug for DiscreteDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (v, m)) in self.atoms.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}: {m}")?;
        }
        f.write_str("}")
    }
}

/// JSON literal for a distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DistJson {
    Atoms(Vec<(String, String)>),
    Bernoulli(String),
    Rademacher(bool),
    UniformInt([i64; 2]),
    Point(String),
}

impl TryFrom<DistJson> for DiscreteDist {
    type Error = Error;

    fn try_from(form: DistJson) -> Result<Self> {
        match form {
            DistJson::Atoms(atoms) => {
                let parsed = atoms
                    .iter()
                    .map(|(v, m)| Ok((parse_rational(v)?, parse_rational(m)?)))
                    .collect::<Result<Vec<_>>>()?;
                DiscreteDist::new(parsed)
            }
            DistJson::Bernoulli(p) => DiscreteDist::bernoulli(parse_rational(&p)?),
            DistJson::Rademacher(true) => Ok(DiscreteDist::rademacher()),
            DistJson::Rademacher(false) => {
                Err(Error::Parse("\"rademacher\" must be true".into()))
            }
            DistJson::UniformInt([a, b]) => DiscreteDist::uniform_int(a, b),
            DistJson::Point(v) => Ok(DiscreteDist::point(parse_rational(&v)?)),
        }
    }
}

impl From<DiscreteDist> for DistJson {
    fn from(d: DiscreteDist) -> Self {
        DistJson::Atoms(
            d.atoms.iter().map(|(v, m)| (format_rational(v), format_rational(m))).collect(),
        )
    }
}

impl Serialize for DiscreteDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DistJson::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiscreteDist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let form = DistJson::deserialize(d)?;
        DiscreteDist::try_from(form).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn three_atoms() -> DiscreteDist {
        DiscreteDist::new(vec![
            (int(0), ratio(1, 2)),
            (ratio(1, 3), ratio(1, 4)),
            (int(1), ratio(1, 4)),
        ])
        .unwrap()
    }

    /// Brute-force `Q(ξ; λ)` over windows anchored anywhere in a fine grid of
    /// candidate left ends (support points and support points minus λ).
    fn levy_brute(d: &DiscreteDist, lambda: &Rational) -> Rational {
        let mut anchors: Vec<Rational> = d.atoms().iter().map(|(v, _)| v.clone()).collect();
        anchors.extend(d.atoms().iter().map(|(v, _)| v - lambda));
        anchors
            .iter()
            .map(|x| {
                d.atoms()
                    .iter()
                    .filter(|(v, _)| v >= x && *v <= x + lambda)
                    .map(|(_, m)| m.clone())
                    .sum::<Rational>()
            })
            .max()
            .unwrap()
    }

    #[test]
    fn biggest_jump_examples() {
        let b = DiscreteDist::bernoulli(ratio(3, 10)).unwrap();
        assert_eq!(b.biggest_jump(), (int(0), ratio(7, 10)));
        let u = DiscreteDist::uniform_int(1, 6).unwrap();
        assert_eq!(u.biggest_jump(), (int(1), ratio(1, 6)));
        assert_eq!(DiscreteDist::point(int(5)).biggest_jump(), (int(5), int(1)));
    }

    #[test]
    fn levy_examples() {
        let b = DiscreteDist::bernoulli(ratio(1, 2)).unwrap();
        assert_eq!(b.levy_concentration(&int(0)).unwrap(), ratio(1, 2));
        assert_eq!(b.levy_concentration(&int(1)).unwrap(), int(1));
        let s = b.convolve(&b);
        assert_eq!(s.levy_concentration(&int(0)).unwrap(), ratio(1, 2));
        assert!(b.levy_concentration(&int(-1)).is_err());
    }

    #[test]
    fn kappa_delta_examples() {
        let b = DiscreteDist::bernoulli(ratio(1, 2)).unwrap();
        let p = b.kappa_delta_profile();
        assert_eq!((p.delta, p.kappa_delta), (ratio(1, 2), ratio(1, 2)));

        let d = three_atoms();
        let p = d.kappa_delta_profile();
        assert_eq!(p.delta, ratio(1, 6));
        assert_eq!(p.kappa_delta, ratio(1, 2));
        assert_eq!(d.levy_concentration(&p.delta).unwrap(), p.kappa_delta);

        let p = DiscreteDist::point(int(3)).kappa_delta_profile();
        assert_eq!((p.delta, p.kappa_delta), (int(1), int(1)));
    }

    #[test]
    fn convolution_examples() {
        let b = DiscreteDist::bernoulli(ratio(1, 2)).unwrap();
        let expect = DiscreteDist::new(vec![
            (int(0), ratio(1, 4)),
            (int(1), ratio(1, 2)),
            (int(2), ratio(1, 4)),
        ])
        .unwrap();
        assert_eq!(b.convolve(&b), expect);
        assert_eq!(b.convolve(&DiscreteDist::point(int(0))), b);
        let r = DiscreteDist::rademacher();
        let expect = DiscreteDist::new(vec![
            (int(-2), ratio(1, 4)),
            (int(0), ratio(1, 2)),
            (int(2), ratio(1, 4)),
        ])
        .unwrap();
        assert_eq!(r.convolve(&r), expect);
        assert_eq!(r.difference_dist(), expect);
    }

    #[test]
    fn difference_examples() {
        let b = DiscreteDist::bernoulli(ratio(1, 2)).unwrap();
        let expect = DiscreteDist::new(vec![
            (int(-1), ratio(1, 4)),
            (int(0), ratio(1, 2)),
            (int(1), ratio(1, 4)),
        ])
        .unwrap();
        assert_eq!(b.difference_dist(), expect);
        assert_eq!(DiscreteDist::point(int(7)).difference_dist(), DiscreteDist::point(int(0)));
    }

    #[test]
    fn scale_examples() {
        let b = DiscreteDist::bernoulli(ratio(1, 2)).unwrap();
        let expect = DiscreteDist::new(vec![(int(-1), ratio(1, 2)), (int(0), ratio(1, 2))]).unwrap();
        assert_eq!(b.scale(&int(-1)).unwrap(), expect);
        assert_eq!(b.scale(&int(1)).unwrap(), b);
        assert!(b.scale(&int(0)).is_err());

        let d = three_atoms();
        let prof = d.kappa_delta_profile();
        for beta in [int(1), int(-2), int(3)] {
            let scaled = d.scale(&beta).unwrap();
            assert!(scaled.levy_concentration(&prof.delta).unwrap() <= prof.kappa_delta);
        }
    }

    #[test]
    fn rejects_invalid_atoms() {
        assert!(DiscreteDist::new(vec![]).is_err());
        assert!(DiscreteDist::new(vec![(int(0), ratio(1, 2))]).is_err());
        assert!(DiscreteDist::new(vec![(int(0), int(0)), (int(1), int(1))]).is_err());
        // duplicate values merge
        let d = DiscreteDist::new(vec![(int(1), ratio(1, 2)), (int(1), ratio(1, 2))]).unwrap();
        assert!(d.is_degenerate());
    }

    #[test]
    fn sampling_point_mass_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = DiscreteDist::point(int(7));
        assert!((0..100).all(|_| p.sample(&mut rng) == int(7)));

        let b = DiscreteDist::bernoulli(ratio(1, 2)).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..64).map(|_| b.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn sampling_frequency_within_wilson_interval() {
        let b = DiscreteDist::bernoulli(ratio(1, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 100_000u64;
        let ones = (0..trials).filter(|_| b.sample(&mut rng) == int(1)).count() as u64;
        let (lo, hi) = crate::harness::stats::wilson_interval(ones, trials, crate::harness::stats::Z99);
        assert!(lo <= 0.5 && 0.5 <= hi, "{ones} ones: [{lo}, {hi}]");
    }

    #[test]
    fn json_literals() {
        let d: DiscreteDist = serde_json::from_str(r#"{"atoms": [["0", "1/2"], ["1", "1/2"]]}"#).unwrap();
        assert_eq!(d, DiscreteDist::bernoulli(ratio(1, 2)).unwrap());
        let d: DiscreteDist = serde_json::from_str(r#"{"bernoulli": "3/10"}"#).unwrap();
        assert_eq!(d.kappa(), ratio(7, 10));
        let d: DiscreteDist = serde_json::from_str(r#"{"rademacher": true}"#).unwrap();
        assert_eq!(d, DiscreteDist::rademacher());
        let d: DiscreteDist = serde_json::from_str(r#"{"uniform_int": [1, 6]}"#).unwrap();
        assert_eq!(d.len(), 6);
        let d: DiscreteDist = serde_json::from_str(r#"{"point": "-5/2"}"#).unwrap();
        assert_eq!(d, DiscreteDist::point(ratio(-5, 2)));
        assert!(serde_json::from_str::<DiscreteDist>(r#"{"atoms": [["0", "1/3"]]}"#).is_err());
        let back: DiscreteDist = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    fn small_dist() -> impl Strategy<Value = DiscreteDist> {
        prop::collection::vec((-4i64..=4, 1i64..=5), 1..=4).prop_map(|raw| {
            let total: i64 = raw.iter().map(|(_, w)| w).sum();
            DiscreteDist::new(raw.into_iter().map(|(v, w)| (int(v), ratio(w, total)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn levy_is_monotone_and_matches_brute(d in small_dist(), a in 0i64..8, b in 0i64..8) {
            let (lo, hi) = (ratio(a.min(b), 2), ratio(a.max(b), 2));
            let q_lo = d.levy_concentration(&lo).unwrap();
            let q_hi = d.levy_concentration(&hi).unwrap();
            prop_assert!(q_lo <= q_hi);
            prop_assert_eq!(&q_lo, &levy_brute(&d, &lo));
            prop_assert_eq!(d.levy_concentration(&int(0)).unwrap(), d.kappa());
            let span = d.max_value() - d.min_value();
            prop_assert!(d.levy_concentration(&span).unwrap().is_one());
        }

        #[test]
        fn convolution_algebra(d in small_dist(), e in small_dist(), f in small_dist()) {
            let de = d.convolve(&e);
            prop_assert_eq!(&de, &e.convolve(&d));
            prop_assert_eq!(de.convolve(&f), d.convolve(&e.convolve(&f)));
            let total: Rational = de.atoms().iter().map(|(_, m)| m.clone()).sum();
            prop_assert!(total.is_one());
            let q0 = de.levy_concentration(&int(0)).unwrap();
            prop_assert!(q0 <= d.kappa() && q0 <= e.kappa());
        }

        #[test]
        fn difference_is_symmetric(d in small_dist()) {
            let diff = d.difference_dist();
            for (v, m) in diff.atoms() {
                prop_assert_eq!(&diff.mass_at(&-v), m);
            }
        }

        #[test]
        fn scaling_keeps_half_gap_concentration(d in small_dist(), num in 1i64..6, den in 1i64..4, neg: bool) {
            prop_assume!(num >= den);
            let beta = if neg { ratio(-num, den) } else { ratio(num, den) };
            let prof = d.kappa_delta_profile();
            prop_assert_eq!(d.levy_concentration(&prof.delta).unwrap(), prof.kappa_delta.clone());
            let q = d.scale(&beta).unwrap().levy_concentration(&prof.delta).unwrap();
            prop_assert!(q <= prof.kappa_delta);
        }
    }
}
