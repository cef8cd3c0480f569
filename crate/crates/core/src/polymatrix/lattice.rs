use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactfield::Rational;

/// Period lattice: rows of `a` are the period vectors. Frequencies live on
/// the dual lattice `A^{-1} Z^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyLattice {
    a: Vec<Vec<Rational>>,
    a_inv: Vec<Vec<Rational>>,
}

/// A lattice frequency `v = A^{-1} n` together with its integer mode `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frequency {
    pub v: Vec<Rational>,
    pub mode: Vec<i64>,
}

impl Serialize for Frequency {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Frequency", 2)?;
        st.serialize_field("n", &self.mode)?;
        let v: Vec<String> = self.v.iter().map(|r| r.to_string()).collect();
        st.serialize_field("v", &v)?;
        st.end()
    }
}

impl FrequencyLattice {
    pub fn new(a: Vec<Vec<Rational>>) -> Result<Self> {
        let d = a.len();
        if d == 0 || a.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension(format!("lattice matrix must be square and non-empty, got {d} rows")));
        }
        let a_inv = invert(&a).ok_or(Error::SingularLattice)?;
        Ok(FrequencyLattice { a, a_inv })
    }

    pub fn identity(d: usize) -> Self {
        let a: Vec<Vec<Rational>> = (0..d)
            .map(|i| (0..d).map(|j| Rational::from_i64((i == j) as i64)).collect())
            .collect();
        FrequencyLattice { a_inv: a.clone(), a }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[Vec<Rational>] {
        &self.a
    }

    pub fn a_inv(&self) -> &[Vec<Rational>] {
        &self.a_inv
    }

    pub fn frequency_from_mode(&self, n: &[i64]) -> Result<Frequency> {
        if n.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "mode has {} components, lattice dimension is {}",
                n.len(),
                self.dim()
            )));
        }
        let v = self
            .a_inv
            .iter()
            .map(|row| {
                row.iter()
                    .zip(n)
                    .fold(Rational::zero(), |acc, (x, &k)| acc + x * &Rational::from_i64(k))
            })
            .collect();
        Ok(Frequency { v, mode: n.to_vec() })
    }

    /// Frequencies of every mode with `max |n_k| <= radius`, lexicographic in `n`.
    pub fn box_frequencies(&self, radius: u32) -> Vec<Frequency> {
        box_modes(self.dim(), radius)
            .iter()
            .map(|n| self.frequency_from_mode(n).expect("dimension matches"))
            .collect()
    }
}

/// All integer vectors of length `d` with sup-norm at most `radius`, in
/// lexicographic order.
pub fn box_modes(d: usize, radius: u32) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-r..=r).map(move |k| {
                    let mut p = prefix.clone();
                    p.push(k);
                    p
                })
            })
            .collect();
    }
    out
}

/// Gauss-Jordan inverse over Q; `None` if singular.
fn invert(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let d = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| Rational::from_i64((i == j) as i64)));
            r
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip()?;
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for r in 0..d {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot = m[c].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= &(&f * y);
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[d..].to_vec()).collect())
}
