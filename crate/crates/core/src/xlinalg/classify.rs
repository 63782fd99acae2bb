//! Normal/abnormal and perfect/imperfect classification of square matrices,
//! and symmetric bordering.

use serde::Serialize;

use super::circuits::{min_circuit_below_with_budget, CircuitReport, DEFAULT_SUBSET_BUDGET};
use super::matrix::ExactMatrix;
use super::rank::{null_combination, rank, support_size};
use crate::error::{Error, Result};
use crate::exact::Rational;

/// `⌈n^{1-ε}⌉`, snapping values within 1e-9 of an integer.
pub fn degree_threshold(n: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} outside (0,1)")));
    }
    let x = (n as f64).powf(1.0 - epsilon);
    let near = x.round();
    Ok(if (x - near).abs() < 1e-9 { near as usize } else { x.ceil() as usize })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normality {
    Normal,
    Abnormal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularClassification {
    pub class: Normality,
    pub threshold: usize,
    pub circuit: CircuitReport,
}

/// A singular matrix is abnormal when its rows admit a vanishing combination
/// of degree strictly below `⌈n^{1-ε}⌉`.
pub fn classify_singular(w: &ExactMatrix, epsilon: f64) -> Result<SingularClassification> {
    classify_singular_with_budget(w, epsilon, DEFAULT_SUBSET_BUDGET)
}

pub fn classify_singular_with_budget(
    w: &ExactMatrix,
    epsilon: f64,
    budget: u128,
) -> Result<SingularClassification> {
    if !w.is_square() {
        return Err(Error::Precondition("classification needs a square matrix".into()));
    }
    let n = w.rows();
    if rank(w) == n {
        return Err(Error::Precondition("matrix is non-singular".into()));
    }
    let threshold = degree_threshold(n, epsilon)?;
    let circuit = min_circuit_below_with_budget(&w.row_vectors(), threshold, budget)?;
    let class = if circuit.found { Normality::Abnormal } else { Normality::Normal };
    Ok(SingularClassification { class, threshold, circuit })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowQuality {
    pub good: bool,
    /// Support size of the column dependency left after deleting the row.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowClassification {
    pub rows: Vec<RowQuality>,
    pub perfect: bool,
    pub threshold: usize,
}

/// Row `i` of a non-singular matrix is good when the unique column
/// dependency of the matrix without row `i` has support `≥ ⌈n^{1-ε}⌉`.
pub fn classify_rows(w: &ExactMatrix, epsilon: f64) -> Result<RowClassification> {
    if !w.is_square() {
        return Err(Error::Precondition("classification needs a square matrix".into()));
    }
    let n = w.rows();
    if rank(w) < n {
        return Err(Error::Precondition("matrix is singular".into()));
    }
    let threshold = degree_threshold(n, epsilon)?;
    let rows = (0..n)
        .map(|i| {
            let support = match w.without_row(i) {
                Some(rest) => support_size(&null_combination(&rest)?),
                // a 1×1 matrix leaves the single coefficient
                None => 1,
            };
            Ok(RowQuality { good: support >= threshold, support })
        })
        .collect::<Result<Vec<_>>>()?;
    let perfect = rows.iter().all(|r| r.good);
    Ok(RowClassification { rows, perfect, threshold })
}

/// Borders a symmetric `W` with column `(u, d)` and its transpose; returns
/// the bordered matrix and `rank(W') - rank(W)`.
pub fn border_symmetric(w: &ExactMatrix, u: &[Rational], d: &Rational) -> Result<(ExactMatrix, u8)> {
    if !w.is_symmetric() {
        return Err(Error::InvalidArgument("bordering needs a symmetric matrix".into()));
    }
    let n = w.rows();
    if u.len() != n {
        return Err(Error::InvalidArgument(format!("border of length {} for size {n}", u.len())));
    }
    let mut data = Vec::with_capacity((n + 1) * (n + 1));
    for i in 0..n {
        data.extend(w.row(i).iter().cloned());
        data.push(u[i].clone());
    }
    data.extend(u.iter().cloned());
    data.push(d.clone());
    let bordered = ExactMatrix::from_vec(n + 1, n + 1, data)?.mark_symmetric();
    let inc = rank(&bordered) - rank(w);
    Ok((bordered, inc as u8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::xlinalg::in_column_span;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> ExactMatrix {
        ExactMatrix::from_ints(rows).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(degree_threshold(3, 0.5).unwrap(), 2);
        assert_eq!(degree_threshold(4, 0.5).unwrap(), 2);
        assert_eq!(degree_threshold(3, 0.9).unwrap(), 2);
        assert_eq!(degree_threshold(1, 0.3).unwrap(), 1);
        assert_eq!(degree_threshold(8, 1.0 / 3.0).unwrap(), 4);
        assert!(degree_threshold(3, 1.0).is_err());
    }

    #[test]
    fn singular_examples() {
        let c = classify_singular(&m(&[&[1, 2, 3], &[0, 0, 0], &[4, 5, 6]]), 0.5).unwrap();
        assert_eq!(c.class, Normality::Abnormal);
        assert_eq!(c.circuit.degree, Some(1));

        let c = classify_singular(&m(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]), 0.5).unwrap();
        assert_eq!(c.class, Normality::Normal);

        let c = classify_singular(&m(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]), 0.9).unwrap();
        assert_eq!((c.class, c.threshold), (Normality::Normal, 2));

        assert!(matches!(
            classify_singular(&ExactMatrix::identity(3).unwrap(), 0.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn row_examples() {
        let c = classify_rows(&ExactMatrix::identity(3).unwrap(), 0.5).unwrap();
        assert!(!c.perfect);
        assert_eq!(c.rows[2], RowQuality { good: false, support: 1 });

        // ε close to 0 forces threshold n = 3
        let w = m(&[&[1, 1, 1], &[1, 0, -1], &[1, -1, 1]]);
        let c = classify_rows(&w, 1e-6).unwrap();
        assert_eq!(c.threshold, 3);
        // leave-one-out dependencies solved by hand:
        // drop row 1 -> (1, 2, 1); drop row 2 -> (1, 0, -1); drop row 3 -> (1, -2, 1)
        let supports: Vec<usize> = c.rows.iter().map(|r| r.support).collect();
        assert_eq!(supports, vec![3, 2, 3]);
        assert!(!c.perfect);

        let one = ExactMatrix::from_ints(&[[5]]).unwrap();
        assert!(classify_rows(&one, 0.5).unwrap().perfect);
        assert!(classify_rows(&m(&[&[1, 1], &[1, 1]]), 0.5).is_err());
    }

    #[test]
    fn bordering_examples() {
        let w = m(&[&[1, 1], &[1, 1]]);
        let inc = |u: [i64; 2], d: i64| {
            border_symmetric(&w, &[int(u[0]), int(u[1])], &int(d)).unwrap().1
        };
        assert_eq!(inc([1, 0], 0), 2);
        assert_eq!(inc([1, 1], 1), 0);
        assert_eq!(inc([1, 1], 0), 1);
        assert!(border_symmetric(&w, &[int(1)], &int(0)).is_err());
        assert!(border_symmetric(&m(&[&[1, 2], &[3, 4]]), &[int(1), int(1)], &int(0)).is_err());
        let (b, _) = border_symmetric(&w, &[int(1), int(0)], &int(0)).unwrap();
        assert!(b.symmetric_flag() && b.rows() == 3);
    }

    proptest! {
        #[test]
        fn bordering_increment_follows_column_span(
            raw in prop::collection::vec(-1i64..=1, 6),
            u in prop::collection::vec(-1i64..=1, 3),
            d in -1i64..=1,
        ) {
            let w = m(&[&[raw[0], raw[1], raw[2]], &[raw[1], raw[3], raw[4]], &[raw[2], raw[4], raw[5]]]);
            let u: Vec<Rational> = u.into_iter().map(int).collect();
            let (_, inc) = border_symmetric(&w, &u, &int(d)).unwrap();
            if in_column_span(&w, &u).unwrap() {
                prop_assert!(inc <= 1);
            } else {
                prop_assert_eq!(inc, 2);
            }
        }

        #[test]
        fn abnormal_has_short_witness(raw in prop::collection::vec(-1i64..=1, 16)) {
            let w = ExactMatrix::from_vec(4, 4, raw.into_iter().map(int).collect()).unwrap();
            prop_assume!(rank(&w) < 4);
            let c = classify_singular(&w, 0.3).unwrap();
            if c.class == Normality::Abnormal {
                let wit = c.circuit.witness.unwrap();
                let deg = support_size(&wit);
                prop_assert!(deg < c.threshold);
                let rows = w.row_vectors();
                for j in 0..4 {
                    let s: Rational = rows.iter().zip(&wit).map(|(r, x)| &r[j] * x).sum();
                    prop_assert!(num_traits::Zero::is_zero(&s));
                }
            }
        }
    }
}
