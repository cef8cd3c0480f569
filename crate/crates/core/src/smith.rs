//! Smith normal form over F[t] with tracked unimodular factors.
//!
//! `M = U * Sigma * V` where `U`, `V` are unimodular and `Sigma` carries the
//! monic invariant factors `d_1 | d_2 | ... | d_r` on its diagonal. `V^{-1}`
//! is tracked alongside `V`; its trailing `n - r` columns span the kernel.

use crate::error::{Error, Result};
use crate::exactfield::FieldElement;
use crate::polymatrix::UniPolyMatrix;
use crate::unipoly::{Degree, UniPoly};

#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub source: UniPolyMatrix,
    pub u: UniPolyMatrix,
    pub sigma: UniPolyMatrix,
    pub v: UniPolyMatrix,
    pub v_inv: UniPolyMatrix,
    pub invariant_factors: Vec<UniPoly>,
    pub rank: usize,
}

struct Work {
    s: UniPolyMatrix,
    u: UniPolyMatrix,
    v: UniPolyMatrix,
    v_inv: UniPolyMatrix,
}

fn axpy(dst: &UniPoly, q: &UniPoly, src: &UniPoly) -> UniPoly {
    if q.is_zero() || src.is_zero() {
        return dst.clone();
    }
    dst + &(q * src)
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.s.cols() {
            let x = self.s.get(a, j).clone();
            let y = std::mem::replace(self.s.get_mut(b, j), x);
            self.s.set(a, j, y);
        }
        for i in 0..self.u.rows() {
            let x = self.u.get(i, a).clone();
            let y = std::mem::replace(self.u.get_mut(i, b), x);
            self.u.set(i, a, y);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.s.rows() {
            let x = self.s.get(i, a).clone();
            let y = std::mem::replace(self.s.get_mut(i, b), x);
            self.s.set(i, a, y);
        }
        for j in 0..self.v.cols() {
            let x = self.v.get(a, j).clone();
            let y = std::mem::replace(self.v.get_mut(b, j), x);
            self.v.set(a, j, y);
        }
        for i in 0..self.v_inv.rows() {
            let x = self.v_inv.get(i, a).clone();
            let y = std::mem::replace(self.v_inv.get_mut(i, b), x);
            self.v_inv.set(i, a, y);
        }
    }

    /// row_i <- row_i + c * row_k
    fn add_row(&mut self, i: usize, k: usize, c: &UniPoly) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.s.cols() {
            let e = axpy(self.s.get(i, j), c, self.s.get(k, j));
            self.s.set(i, j, e);
        }
        // U <- U * (I - c e_i e_k^T)
        let neg = -c;
        for r in 0..self.u.rows() {
            let e = axpy(self.u.get(r, k), &neg, self.u.get(r, i));
            self.u.set(r, k, e);
        }
    }

    /// col_j <- col_j + c * col_k
    fn add_col(&mut self, j: usize, k: usize, c: &UniPoly) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.s.rows() {
            let e = axpy(self.s.get(i, j), c, self.s.get(i, k));
            self.s.set(i, j, e);
        }
        // V <- (I - c e_k e_j^T) V,  V^{-1} <- V^{-1} (I + c e_k e_j^T)
        let neg = -c;
        for r in 0..self.v.cols() {
            let e = axpy(self.v.get(k, r), &neg, self.v.get(j, r));
            self.v.set(k, r, e);
        }
        for r in 0..self.v_inv.rows() {
            let e = axpy(self.v_inv.get(r, j), c, self.v_inv.get(r, k));
            self.v_inv.set(r, j, e);
        }
    }

    /// `[row_a; row_b] <- T [row_a; row_b]` for `T` with determinant 1;
    /// `tinv` is `T^{-1}`.
    fn transform_rows(&mut self, a: usize, b: usize, t: &[[UniPoly; 2]; 2], tinv: &[[UniPoly; 2]; 2]) {
        let comb = |x: &UniPoly, cx: &UniPoly, y: &UniPoly, cy: &UniPoly| &(cx * x) + &(cy * y);
        for j in 0..self.s.cols() {
            let (x, y) = (self.s.get(a, j).clone(), self.s.get(b, j).clone());
            self.s.set(a, j, comb(&x, &t[0][0], &y, &t[0][1]));
            self.s.set(b, j, comb(&x, &t[1][0], &y, &t[1][1]));
        }
        // U <- U * T^{-1} on columns a, b
        for r in 0..self.u.rows() {
            let (x, y) = (self.u.get(r, a).clone(), self.u.get(r, b).clone());
            self.u.set(r, a, comb(&x, &tinv[0][0], &y, &tinv[1][0]));
            self.u.set(r, b, comb(&x, &tinv[0][1], &y, &tinv[1][1]));
        }
    }

    /// `[col_a, col_b] <- [col_a, col_b] C` for `C` with determinant 1;
    /// `cinv` is `C^{-1}`.
    fn transform_cols(&mut self, a: usize, b: usize, c: &[[UniPoly; 2]; 2], cinv: &[[UniPoly; 2]; 2]) {
        let comb = |x: &UniPoly, cx: &UniPoly, y: &UniPoly, cy: &UniPoly| &(cx * x) + &(cy * y);
        for i in 0..self.s.rows() {
            let (x, y) = (self.s.get(i, a).clone(), self.s.get(i, b).clone());
            self.s.set(i, a, comb(&x, &c[0][0], &y, &c[1][0]));
            self.s.set(i, b, comb(&x, &c[0][1], &y, &c[1][1]));
        }
        for i in 0..self.v_inv.rows() {
            let (x, y) = (self.v_inv.get(i, a).clone(), self.v_inv.get(i, b).clone());
            self.v_inv.set(i, a, comb(&x, &c[0][0], &y, &c[1][0]));
            self.v_inv.set(i, b, comb(&x, &c[0][1], &y, &c[1][1]));
        }
        // V <- C^{-1} V on rows a, b
        for j in 0..self.v.cols() {
            let (x, y) = (self.v.get(a, j).clone(), self.v.get(b, j).clone());
            self.v.set(a, j, comb(&x, &cinv[0][0], &y, &cinv[0][1]));
            self.v.set(b, j, comb(&x, &cinv[1][0], &y, &cinv[1][1]));
        }
    }

    /// Clear `s[i][k]` against the pivot `s[k][k]`: a plain row subtraction
    /// when the pivot divides it, otherwise a determinant-1 transform built
    /// from the extended gcd, which leaves the gcd on the diagonal.
    fn clear_below(&mut self, k: usize, i: usize) -> Result<()> {
        let (a, b) = (self.s.get(k, k).clone(), self.s.get(i, k).clone());
        let (q, r) = b.divmod(&a)?;
        if r.is_zero() {
            self.add_row(i, k, &-q);
            return Ok(());
        }
        let (g, x, y) = a.xgcd(&b)?;
        let (ag, bg) = (a.divmod(&g)?.0, b.divmod(&g)?.0);
        let t = [[x.clone(), y.clone()], [-&bg, ag.clone()]];
        let tinv = [[ag, -&y], [bg, x]];
        self.transform_rows(k, i, &t, &tinv);
        Ok(())
    }

    /// Column counterpart of [`Self::clear_below`] for `s[k][j]`.
    fn clear_right(&mut self, k: usize, j: usize) -> Result<()> {
        let (a, b) = (self.s.get(k, k).clone(), self.s.get(k, j).clone());
        let (q, r) = b.divmod(&a)?;
        if r.is_zero() {
            self.add_col(j, k, &-q);
            return Ok(());
        }
        let (g, x, y) = a.xgcd(&b)?;
        let (ag, bg) = (a.divmod(&g)?.0, b.divmod(&g)?.0);
        let c = [[x.clone(), -&bg], [y.clone(), ag.clone()]];
        let cinv = [[ag, bg], [-&y, x]];
        self.transform_cols(k, j, &c, &cinv);
        Ok(())
    }

    /// row_k <- s * row_k for a nonzero constant `s`; U absorbs `1/s`.
    fn scale_row(&mut self, k: usize, s: &FieldElement) -> Result<()> {
        let inv = s.inv()?;
        for j in 0..self.s.cols() {
            let e = self.s.get(k, j).scale(s);
            self.s.set(k, j, e);
        }
        for r in 0..self.u.rows() {
            let e = self.u.get(r, k).scale(&inv);
            self.u.set(r, k, e);
        }
        Ok(())
    }

    /// Nonzero entry of least degree in the block `[k.., k..]`, first in
    /// row-major order among ties.
    fn pivot(&self, k: usize) -> Option<(usize, usize)> {
        let mut best: Option<(Degree, usize, usize)> = None;
        for i in k..self.s.rows() {
            for j in k..self.s.cols() {
                let d = self.s.get(i, j).degree();
                if d == Degree::MinusInfinity {
                    continue;
                }
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }
}

/// Smith normal form with unimodular `U`, `V` such that `M = U * Sigma * V`.
pub fn smith_form(m: &UniPolyMatrix) -> Result<SmithDecomposition> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut w = Work {
        s: m.clone(),
        u: UniPolyMatrix::identity(rows),
        v: UniPolyMatrix::identity(cols),
        v_inv: UniPolyMatrix::identity(cols),
    };
    let mut factors = Vec::new();
    for k in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = w.pivot(k) else { break };
            w.swap_rows(k, pi);
            w.swap_cols(k, pj);
            let lc = w.s.get(k, k).leading().expect("nonzero pivot").clone();
            if !lc.is_one() {
                w.scale_row(k, &lc.inv()?)?;
            }
            for i in k + 1..rows {
                if !w.s.get(i, k).is_zero() {
                    w.clear_below(k, i)?;
                }
            }
            for j in k + 1..cols {
                if !w.s.get(k, j).is_zero() {
                    w.clear_right(k, j)?;
                }
            }
            // column operations can refill column k
            if (k + 1..rows).any(|i| !w.s.get(i, k).is_zero()) {
                continue;
            }
            let p = w.s.get(k, k).clone();
            // pivot must divide the whole remaining block
            let offender = (k + 1..rows).find(|&i| {
                (k + 1..cols).any(|j| !w.s.get(i, j).divisible_by(&p))
            });
            match offender {
                Some(i) => w.add_row(k, i, &UniPoly::one()),
                None => break,
            }
        }
        if w.s.get(k, k).is_zero() {
            break;
        }
        let lc = w.s.get(k, k).leading().expect("nonzero pivot").clone();
        if !lc.is_one() {
            w.scale_row(k, &lc.inv()?)?;
        }
        factors.push(w.s.get(k, k).clone());
    }
    let rank = factors.len();
    Ok(SmithDecomposition {
        source: m.clone(),
        u: w.u,
        sigma: w.s,
        v: w.v,
        v_inv: w.v_inv,
        invariant_factors: factors,
        rank,
    })
}

impl SmithDecomposition {
    /// `U * Sigma * V`.
    pub fn reconstruct(&self) -> Result<UniPolyMatrix> {
        self.u.mul(&self.sigma)?.mul(&self.v)
    }

    /// Whether the invariant factors are all units (quotient module torsion-free).
    pub fn is_torsion_free(&self) -> bool {
        self.invariant_factors.iter().all(UniPoly::is_unit)
    }

    /// Trailing `n - r` columns of `V^{-1}`: a polynomial basis `N` with `M N = 0`.
    pub fn kernel(&self) -> UniPolyMatrix {
        self.v_inv.column_block(self.rank, self.v_inv.cols())
    }

    /// Row-module membership: `row` lies in the F[t]-span of the rows of `M`
    /// iff `y = row * V^{-1}` has `d_k | y_k` for `k <= r` and `y_k = 0` beyond.
    pub fn contains_row(&self, row: &[UniPoly]) -> Result<bool> {
        if row.len() != self.v_inv.rows() {
            return Err(Error::Dimension(format!(
                "row has {} entries, module lives in F[t]^{}",
                row.len(),
                self.v_inv.rows()
            )));
        }
        let y = self.v_inv.row_times(row)?;
        Ok(y.iter().enumerate().all(|(k, yk)| match self.invariant_factors.get(k) {
            Some(d) => yk.divisible_by(d),
            None => yk.is_zero(),
        }))
    }

    /// `(v_r, d_r)`: the r-th row of `V` and the last invariant factor, a torsion
    /// pair whenever `d_r` is not a unit.
    pub fn torsion_pair(&self) -> Option<(Vec<UniPoly>, UniPoly)> {
        let d = self.invariant_factors.last()?;
        if d.is_unit() {
            return None;
        }
        Some((self.v.row(self.rank - 1).to_vec(), d.clone()))
    }
}

/// Determinant by fraction-free (Bareiss) elimination over F[t].
pub fn determinant(m: &UniPolyMatrix) -> Result<UniPoly> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a: Vec<Vec<UniPoly>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut prev = UniPoly::one();
    let mut negate = false;
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(UniPoly::zero());
            };
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                let (q, r) = num.divmod(&prev)?;
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
        }
        prev = a[k][k].clone();
    }
    let det = if n == 0 { UniPoly::one() } else { a[n - 1][n - 1].clone() };
    Ok(if negate { -det } else { det })
}

/// Inverse of a unimodular matrix as adjugate divided by the constant determinant.
pub fn unimodular_inverse(v: &UniPolyMatrix) -> Result<UniPolyMatrix> {
    let det = determinant(v)?;
    if det.degree() != Degree::Finite(0) {
        return Err(Error::NotUnimodular(format!("determinant has degree {}", det.degree())));
    }
    let inv_det = det.coeffs()[0].inv()?;
    let n = v.rows();
    let mut out = UniPolyMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let minor = determinant(&v.select(&rows, &cols))?;
            let c = if (i + j) % 2 == 0 { minor } else { -minor };
            out.set(i, j, c.scale(&inv_det));
        }
    }
    Ok(out)
}

/// Image representation `N` (n x (n - r)) with `M N = 0`.
pub fn kernel_representation(m: &UniPolyMatrix) -> Result<UniPolyMatrix> {
    Ok(smith_form(m)?.kernel())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatrix::parse_output_poly;

    fn p(s: &str) -> UniPoly {
        parse_output_poly(s).unwrap()
    }

    fn mat(rows: &[&[&str]]) -> UniPolyMatrix {
        UniPolyMatrix::from_rows(rows.iter().map(|r| r.iter().map(|s| p(s)).collect()).collect()).unwrap()
    }

    fn check(sd: &SmithDecomposition) {
        assert_eq!(sd.reconstruct().unwrap(), sd.source);
        assert_eq!(determinant(&sd.u).unwrap().degree(), Degree::Finite(0));
        assert_eq!(determinant(&sd.v).unwrap().degree(), Degree::Finite(0));
        let n = sd.v.rows();
        assert_eq!(sd.v.mul(&sd.v_inv).unwrap(), UniPolyMatrix::identity(n));
    }

    #[test]
    fn scalar_and_diagonal() {
        let sd = smith_form(&mat(&[&["t"]])).unwrap();
        assert_eq!(sd.invariant_factors, vec![p("t")]);
        assert_eq!(sd.u, UniPolyMatrix::identity(1));
        assert_eq!(sd.v, UniPolyMatrix::identity(1));
        let sd = smith_form(&mat(&[&["t", "0"], &["0", "t^2"]])).unwrap();
        assert_eq!(sd.invariant_factors, vec![p("t"), p("t^2")]);
        check(&sd);
        // gcd of entries is 1 even though no entry is a unit
        let sd = smith_form(&mat(&[&["t", "0"], &["0", "t - 1"]])).unwrap();
        assert_eq!(sd.invariant_factors, vec![p("1"), p("t^2 - t")]);
        check(&sd);
    }

    #[test]
    fn transport_row() {
        let sd = smith_form(&mat(&[&["t + 4*pi^2", "-1"]])).unwrap();
        assert_eq!(sd.rank, 1);
        assert_eq!(sd.invariant_factors, vec![UniPoly::one()]);
        check(&sd);
        let n = sd.kernel();
        assert_eq!(n.cols(), 1);
        assert!(sd.source.mul(&n).unwrap().is_zero());
    }

    #[test]
    fn kernel_examples() {
        let m = mat(&[&["t", "-1"]]);
        let n = kernel_representation(&m).unwrap();
        assert!(m.mul(&n).unwrap().is_zero());
        assert!(!n.is_zero());
        assert_eq!(kernel_representation(&UniPolyMatrix::identity(3)).unwrap().cols(), 0);
        let z = UniPolyMatrix::zeros(1, 2);
        assert_eq!(kernel_representation(&z).unwrap(), UniPolyMatrix::identity(2));
    }

    #[test]
    fn determinant_examples() {
        assert!(determinant(&UniPolyMatrix::identity(3)).unwrap().is_one());
        assert_eq!(determinant(&mat(&[&["t", "1"], &["0", "t"]])).unwrap(), p("t^2"));
        assert_eq!(determinant(&mat(&[&["0", "1"], &["1", "0"]])).unwrap(), p("-1"));
        assert!(determinant(&UniPolyMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn inverse_examples() {
        let e = mat(&[&["1", "t"], &["0", "1"]]);
        assert_eq!(unimodular_inverse(&e).unwrap(), mat(&[&["1", "-t"], &["0", "1"]]));
        assert_eq!(unimodular_inverse(&UniPolyMatrix::identity(2)).unwrap(), UniPolyMatrix::identity(2));
        assert!(matches!(
            unimodular_inverse(&mat(&[&["t"]])),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn membership_and_torsion() {
        let sd = smith_form(&mat(&[&["t"]])).unwrap();
        let (row, ann) = sd.torsion_pair().unwrap();
        assert_eq!(ann, p("t"));
        assert!(!sd.contains_row(&row).unwrap());
        let scaled: Vec<UniPoly> = row.iter().map(|x| &ann * x).collect();
        assert!(sd.contains_row(&scaled).unwrap());
        let sd = smith_form(&mat(&[&["t", "-1"]])).unwrap();
        assert!(sd.torsion_pair().is_none());
        assert!(sd.contains_row(&[p("t^2"), p("-t")]).unwrap());
        assert!(!sd.contains_row(&[p("1"), p("0")]).unwrap());
    }

    #[test]
    fn zero_matrix() {
        let sd = smith_form(&UniPolyMatrix::zeros(2, 3)).unwrap();
        assert_eq!(sd.rank, 0);
        assert!(sd.invariant_factors.is_empty());
        check(&sd);
    }
}
