use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exactfield::{GaussianRational, Rational};

/// Sparse polynomial in `nvars` variables with Gaussian-rational coefficients.
///
/// For system matrices the variables are `x1..xd, t` (so `nvars = d + 1` and
/// the last slot is the time variable); the same type is reused for other
/// variable sets, e.g. `(pi, t)` when printing invariant factors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, GaussianRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussianRational::one())
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        Self::monomial(nvars, c, vec![0; nvars])
    }

    pub fn monomial(nvars: usize, c: GaussianRational, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    /// The variable with index `k` (0-based).
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        Self::monomial(nvars, GaussianRational::one(), e)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, GaussianRational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Constant term (zero if absent).
    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .get(&vec![0; self.nvars])
            .cloned()
            .unwrap_or_default()
    }

    pub fn coeff(&self, exps: &[u32]) -> GaussianRational {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Degree in variable `k`; `None` for the zero polynomial.
    pub fn degree_in(&self, k: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[k]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: &GaussianRational) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c.clone());
            }
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coefficients with respect to variable `k`: entry `j` collects the terms
    /// of degree `j` in that variable (with the exponent zeroed out).
    pub fn coefficients_in(&self, k: usize) -> Vec<MultiPoly> {
        let mut out: Vec<MultiPoly> = Vec::new();
        for (e, c) in &self.terms {
            let j = e[k] as usize;
            while out.len() <= j {
                out.push(Self::zero(self.nvars));
            }
            let mut e2 = e.clone();
            e2[k] = 0;
            out[j].add_term(e2, c);
        }
        out
    }

    /// Leading term in lexicographic order (variable 0 most significant).
    fn leading_term(&self) -> Option<(&Vec<u32>, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    /// Scale so the lexicographically leading coefficient is 1.
    pub fn normalized(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero leading coefficient")),
            None => self.clone(),
        }
    }

    /// Scale so the first term in printed order has coefficient 1.
    pub fn normalized_for_display(&self) -> Self {
        let last = self.nvars.saturating_sub(1);
        let lead = self.terms.iter().max_by(|(a, _), (b, _)| {
            a.get(last).cmp(&b.get(last)).then_with(|| a[..last].cmp(&b[..last]))
        });
        match lead {
            Some((_, c)) => self.scale(&c.inv().expect("nonzero coefficient")),
            None => self.clone(),
        }
    }

    /// Multiply by the monomial `x^e`.
    pub fn shift(&self, e: &[u32]) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone()))
                .collect(),
        }
    }

    /// `self / b` when `b` divides `self` exactly, else `None`.
    pub fn div_exact(&self, b: &MultiPoly) -> Option<MultiPoly> {
        let (be, bc) = b.leading_term()?;
        let inv = bc.inv().expect("nonzero leading coefficient");
        let mut r = self.clone();
        let mut q = MultiPoly::zero(self.nvars);
        while let Some((re, rc)) = r.leading_term() {
            if re.iter().zip(be).any(|(a, b)| a < b) {
                return None;
            }
            let e: Vec<u32> = re.iter().zip(be).map(|(a, b)| a - b).collect();
            let c = rc * &inv;
            r = &r - &b.shift(&e).scale(&c);
            q.add_term(e, &c);
        }
        Some(q)
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut e2 = e.clone();
                e2[k] -= 1;
                out.add_term(e2, &c.scale(&Rational::from_i64(e[k] as i64)));
            }
        }
        out
    }

    /// Highest-index variable that actually occurs.
    fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&k| self.degree_in(k).unwrap_or(0) > 0)
    }

    /// Leading coefficient with respect to variable `k`.
    pub fn leading_in(&self, k: usize) -> MultiPoly {
        self.coefficients_in(k).pop().unwrap_or_else(|| MultiPoly::zero(self.nvars))
    }

    /// Gcd of the coefficients with respect to variable `k`.
    pub fn content_in(&self, k: usize) -> MultiPoly {
        self.coefficients_in(k)
            .iter()
            .fold(MultiPoly::zero(self.nvars), |g, c| g.gcd(c))
    }

    /// Greatest common divisor over Q(i), normalized by [`Self::normalized`];
    /// `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() {
            return other.normalized();
        }
        if other.is_zero() {
            return self.normalized();
        }
        let k = match (self.main_var(), other.main_var()) {
            (None, _) | (_, None) => return MultiPoly::one(self.nvars),
            (Some(a), Some(b)) => a.max(b),
        };
        if self.degree_in(k) == Some(0) {
            return self.gcd(&other.content_in(k));
        }
        if other.degree_in(k) == Some(0) {
            return other.gcd(&self.content_in(k));
        }
        let (ca, cb) = (self.content_in(k), other.content_in(k));
        let c = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = other.div_exact(&cb).expect("content divides");
        if a.degree_in(k) < b.degree_in(k) {
            std::mem::swap(&mut a, &mut b);
        }
        // primitive remainder sequence in variable k
        let g = loop {
            let r = a.pseudo_rem(&b, k);
            if r.is_zero() {
                break b;
            }
            if r.degree_in(k) == Some(0) {
                break MultiPoly::one(self.nvars);
            }
            let pr = r.div_exact(&r.content_in(k)).expect("content divides");
            a = std::mem::replace(&mut b, pr);
        };
        let g = g.div_exact(&g.content_in(k)).expect("content divides");
        (&c * &g).normalized()
    }

    /// Pseudo-remainder of `self` by `b` in variable `k`.
    fn pseudo_rem(&self, b: &MultiPoly, k: usize) -> MultiPoly {
        let n = b.degree_in(k).expect("nonzero divisor");
        let lc = b.leading_in(k);
        let mut r = self.clone();
        while let Some(m) = r.degree_in(k).filter(|&m| m >= n) {
            let mut e = vec![0; self.nvars];
            e[k] = m - n;
            r = &(&r * &lc) - &(&b.shift(&e) * &r.leading_in(k));
        }
        r
    }

    /// Floating evaluation at a complex point (`point.len() == nvars`).
    pub fn eval_complex(&self, point: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = c.to_complex();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    m *= x.powu(k);
                }
            }
            acc += m;
        }
        if !(acc.re.is_finite() && acc.im.is_finite()) {
            return Err(Error::Evaluation("overflow in polynomial evaluation".into()));
        }
        Ok(acc)
    }

    /// Render with explicit variable names, terms ordered by descending
    /// exponent of the last variable, then of the others in order.
    pub fn to_string_with(&self, names: &[&str]) -> String {
        assert_eq!(names.len(), self.nvars);
        if self.is_zero() {
            return "0".into();
        }
        let mut keys: Vec<&Vec<u32>> = self.terms.keys().collect();
        let last = self.nvars.saturating_sub(1);
        keys.sort_by(|a, b| {
            b.get(last)
                .cmp(&a.get(last))
                .then_with(|| b[..last].cmp(&a[..last]))
        });
        let mut out = String::new();
        for (idx, e) in keys.into_iter().enumerate() {
            let term = format_term(&self.terms[e], e, names);
            match (idx, term.strip_prefix('-')) {
                (0, _) => out.push_str(&term),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(&term);
                }
            }
        }
        out
    }

    /// Default names `x1..x{n-1}, t`.
    pub fn default_names(nvars: usize) -> Vec<String> {
        let mut names: Vec<String> = (1..nvars).map(|k| format!("x{k}")).collect();
        if nvars > 0 {
            names.push("t".into());
        }
        names
    }
}

fn format_term(c: &GaussianRational, e: &[u32], names: &[&str]) -> String {
    let mono: Vec<String> = e
        .iter()
        .zip(names)
        .filter(|(&k, _)| k > 0)
        .map(|(&k, n)| if k == 1 { n.to_string() } else { format!("{n}^{k}") })
        .collect();
    if mono.is_empty() {
        return c.to_string();
    }
    let mono = mono.join("*");
    if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{mono}")
    } else {
        format!("{c}*{mono}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = Self::default_names(self.nvars);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        f.write_str(&self.to_string_with(&refs))
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}
