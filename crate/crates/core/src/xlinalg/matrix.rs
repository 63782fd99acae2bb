use std::fmt;

use num_traits::Zero;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{format_rational, int, parse_rational, Rational};

/// Dense `rows × cols` matrix of exact rationals, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
    symmetric: bool,
}

impl ExactMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, data, symmetric: false })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Self::from_vec(m, n, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from integer rows.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.as_ref().iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_vec(rows, cols, vec![Rational::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, int(1));
        }
        m.symmetric = true;
        Ok(m)
    }

    /// Marks the matrix symmetric after checking it.
    pub fn into_symmetric(mut self) -> Result<Self> {
        if !self.is_symmetric() {
            return Err(Error::InvalidArgument("matrix is not symmetric".into()));
        }
        self.symmetric = true;
        Ok(self)
    }

    pub(crate) fn mark_symmetric(mut self) -> Self {
        debug_assert!(self.is_symmetric());
        self.symmetric = true;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Whether the symmetric flag has been asserted.
    pub fn symmetric_flag(&self) -> bool {
        self.symmetric
    }

    /// Checks `a_ij = a_ji` entrywise.
    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.cols + j] = v;
        self.symmetric = false;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn column_vectors(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        ExactMatrix { rows: self.cols, cols: self.rows, data, symmetric: self.symmetric }
    }

    pub fn scaled(&self, c: &Rational) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
            symmetric: self.symmetric,
        }
    }

    /// Copy with row `i` deleted; `None` when it was the only row.
    pub fn without_row(&self, i: usize) -> Option<ExactMatrix> {
        if self.rows == 1 {
            return None;
        }
        let data = (0..self.rows)
            .filter(|&r| r != i)
            .flat_map(|r| self.row(r).iter().cloned())
            .collect();
        Some(ExactMatrix { rows: self.rows - 1, cols: self.cols, data, symmetric: false })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        let n = cols.len();
        let m = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != m) {
            return Err(Error::InvalidArgument("vectors of unequal length".into()));
        }
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            for c in cols {
                data.push(c[i].clone());
            }
        }
        Self::from_vec(m, n, data)
    }

    /// Appends a column on the right.
    pub fn with_column(&self, col: &[Rational]) -> Result<ExactMatrix> {
        if col.len() != self.rows {
            return Err(Error::InvalidArgument(format!(
                "column of length {} for {} rows",
                col.len(),
                self.rows
            )));
        }
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            data.extend(self.row(i).iter().cloned());
            data.push(col[i].clone());
        }
        Self::from_vec(self.rows, self.cols + 1, data)
    }

    /// Parses the exchange format: a JSON array of arrays of rational strings
    /// (plain JSON integers are accepted too).
    pub fn from_json(value: &Value, expect_symmetric: bool) -> Result<Self> {
        let rows = value
            .as_array()
            .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
        let parsed = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                    .iter()
                    .map(|x| match x {
                        Value::String(s) => parse_rational(s),
                        Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap_or_default())),
                        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Self::from_rows(parsed)?;
        if expect_symmetric {
            m.into_symmetric()
        } else {
            Ok(m)
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| {
                    Value::Array(self.row(i).iter().map(|x| Value::String(format_rational(x))).collect())
                })
                .collect(),
        )
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            f.write_str(&row.join(" "))?;
        }
        f.write_str("]")
    }
}
