use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::unipoly::{Degree, UniPoly};

use super::format_unipoly;

/// Dense matrix over F[t], row-major. Zero rows or columns are allowed
/// (kernel bases of full-rank matrices have no columns).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniPolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<UniPoly>,
}

impl UniPolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        UniPolyMatrix {
            rows,
            cols,
            entries: vec![UniPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, UniPoly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<UniPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(UniPolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[UniPoly]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (k, d) in diag.iter().enumerate() {
            m.set(k, k, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &UniPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut UniPoly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: UniPoly) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[UniPoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[UniPoly] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(UniPoly::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest t-degree among the entries.
    pub fn max_degree(&self) -> Degree {
        self.entries
            .iter()
            .map(UniPoly::degree)
            .max()
            .unwrap_or(Degree::MinusInfinity)
    }

    pub fn mul(&self, rhs: &UniPolyMatrix) -> Result<UniPolyMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let s = out.get(i, j) + &(a * b);
                        out.set(i, j, s);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix.
    pub fn row_times(&self, row: &[UniPoly]) -> Result<Vec<UniPoly>> {
        let r = UniPolyMatrix::from_rows(vec![row.to_vec()])?;
        Ok(r.mul(self)?.entries)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Columns `range` as a new matrix.
    pub fn column_block(&self, from: usize, to: usize) -> Self {
        let mut out = Self::zeros(self.rows, to - from);
        for i in 0..self.rows {
            for j in from..to {
                out.set(i, j - from, self.get(i, j).clone());
            }
        }
        out
    }

    /// Submatrix on the given row and column index sets.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        UniPolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    /// Floating evaluation at `t` with `pi -> pi_approx`.
    pub fn eval_complex(&self, t: Complex64, pi_approx: f64) -> Result<Vec<Vec<Complex64>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|p| p.eval_complex(t, pi_approx))
                    .collect()
            })
            .collect()
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(format_unipoly).collect())
            .collect()
    }
}

impl fmt::Display for UniPolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_string_rows()
            .into_iter()
            .map(|r| format!("[{}]", r.join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}
