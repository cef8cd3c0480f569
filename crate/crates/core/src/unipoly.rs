//! Univariate polynomials over F = Q(i)(pi) in the time-symbol variable `t`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exactfield::FieldElement;

/// Degree of a [`UniPoly`]. The zero polynomial has degree `MinusInfinity`,
/// which orders below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    MinusInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::MinusInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::Finite(d) => write!(f, "{d}"),
            Degree::MinusInfinity => write!(f, "-inf"),
        }
    }
}

/// Polynomial in `t` with coefficients in F, ascending powers.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct UniPoly {
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::one())
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(FieldElement::one(), 1)
    }

    pub fn monomial(c: FieldElement, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![FieldElement::zero(); k + 1];
        coeffs[k] = c;
        UniPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::MinusInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Nonzero constant, i.e. a unit of F[t].
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn leading(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if c.is_one() {
            return self.clone();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Divide through by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Euclidean division: `self = q*b + r` with `deg r < deg b`.
    pub fn divmod(&self, b: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        let db = b.degree().finite().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() <= db {
            return Ok((Self::zero(), self.clone()));
        }
        let lc_inv = b.coeffs[db].inv()?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![FieldElement::zero(); rem.len() - db];
        for k in (0..quot.len()).rev() {
            if rem[k + db].is_zero() {
                continue;
            }
            let c = &rem[k + db] * &lc_inv;
            for (j, bj) in b.coeffs.iter().enumerate().take(db) {
                if bj.is_zero() {
                    continue;
                }
                rem[k + j] = &rem[k + j] - &(&c * bj);
            }
            rem[k + db] = FieldElement::zero();
            quot[k] = c;
        }
        rem.truncate(db);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, b: &UniPoly) -> Result<UniPoly> {
        Ok(self.divmod(b)?.1)
    }

    /// True when `b` divides `self` exactly. `b = 0` divides only zero.
    pub fn divisible_by(&self, b: &UniPoly) -> bool {
        if b.is_zero() {
            return self.is_zero();
        }
        self.rem(b).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd via the monic Euclidean remainder sequence.
    pub fn gcd(&self, other: &UniPoly) -> Result<UniPoly> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.monic(), other.monic())
        } else {
            (other.monic(), self.monic())
        };
        while !b.is_zero() {
            if b.is_unit() {
                return Ok(Self::one());
            }
            let r = a.rem(&b)?;
            a = b;
            b = r.monic();
        }
        Ok(a)
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*other = g`, `g` monic,
    /// `deg s < deg other - deg g` and `deg t < deg self - deg g`.
    pub fn xgcd(&self, other: &UniPoly) -> Result<(UniPoly, UniPoly, UniPoly)> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroGcd);
        }
        if other.is_zero() {
            let inv = self.leading().expect("nonzero").inv()?;
            return Ok((self.scale(&inv), Self::constant(inv), Self::zero()));
        }
        // monic remainder sequence tracking only the cofactor of `self`
        let inv0 = self.leading().map(|c| c.inv()).transpose()?;
        let inv1 = other.leading().expect("nonzero").inv()?;
        let (mut r0, mut s0) = match inv0 {
            Some(c) => (self.scale(&c), Self::constant(c)),
            None => (Self::zero(), Self::zero()),
        };
        let (mut r1, mut s1) = (other.scale(&inv1), Self::zero());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1)?;
            let mut s2 = &s0 - &(&q * &s1);
            let mut r2 = r;
            if let Some(lc) = r2.leading() {
                let c = lc.inv()?;
                r2 = r2.scale(&c);
                s2 = s2.scale(&c);
            }
            r0 = std::mem::replace(&mut r1, r2);
            s0 = std::mem::replace(&mut s1, s2);
        }
        let (t, rem) = (&r0 - &(&s0 * self)).divmod(other)?;
        debug_assert!(rem.is_zero());
        Ok((r0, s0, t))
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &FieldElement::from_int(k as i64))
                .collect(),
        )
    }

    /// Horner evaluation at an element of F.
    pub fn eval(&self, x: &FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::zero(), |acc, c| &(&acc * x) + c)
    }

    /// Coefficients evaluated with `pi -> pi_approx`.
    pub fn to_complex_coeffs(&self, pi_approx: f64) -> Result<Vec<Complex64>> {
        self.coeffs.iter().map(|c| c.to_complex(pi_approx)).collect()
    }

    pub fn eval_complex(&self, t: Complex64, pi_approx: f64) -> Result<Complex64> {
        let cs = self.to_complex_coeffs(pi_approx)?;
        Ok(cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c))
    }

    pub fn pow(&self, k: u32) -> UniPoly {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Square-free part `p / gcd(p, p')`, made monic.
    pub fn squarefree_part(&self) -> Result<UniPoly> {
        let d = self.derivative();
        if d.is_zero() {
            return Ok(self.monic());
        }
        let g = self.gcd(&d)?;
        Ok(self.divmod(&g)?.0.monic())
    }
}

impl From<FieldElement> for UniPoly {
    fn from(c: FieldElement) -> Self {
        UniPoly::constant(c)
    }
}

impl<'a> Add<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| match (self.coeffs.get(k), rhs.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        UniPoly::from_coeffs(coeffs)
    }
}

impl<'a> Sub<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElement::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        UniPoly::from_coeffs(coeffs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for UniPoly {
            type Output = UniPoly;
            fn $m(self, rhs: UniPoly) -> UniPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::{GaussianRational, PiPoly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(v: i64) -> FieldElement {
        FieldElement::from_int(v)
    }

    fn pi_term(re: i64, im: i64, k: usize) -> FieldElement {
        FieldElement::from_pipoly(PiPoly::monomial(GaussianRational::from_ints(re, im), k))
    }

    fn poly(cs: Vec<FieldElement>) -> UniPoly {
        UniPoly::from_coeffs(cs)
    }

    #[test]
    fn degree_of_zero_is_minus_infinity() {
        assert_eq!(UniPoly::zero().degree(), Degree::MinusInfinity);
        assert!(Degree::MinusInfinity < Degree::Finite(0));
        assert_eq!(UniPoly::one().degree(), Degree::Finite(0));
    }

    #[test]
    fn divmod_examples() {
        let (q, r) = poly(vec![c(-1), c(0), c(1)]).divmod(&poly(vec![c(-1), c(1)])).unwrap();
        assert_eq!(q, poly(vec![c(1), c(1)]));
        assert!(r.is_zero());

        let (q, r) = UniPoly::t().divmod(&UniPoly::t().pow(2)).unwrap();
        assert!(q.is_zero());
        assert_eq!(r, UniPoly::t());

        // (t^2 + 4 pi^2) / (2t) = (t/2, 4 pi^2)
        let a = poly(vec![pi_term(4, 0, 2), c(0), c(1)]);
        let b = poly(vec![c(0), c(2)]);
        let (q, r) = a.divmod(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert_eq!(q, UniPoly::monomial(FieldElement::one().scale(&GaussianRational::new(
            crate::exactfield::Rational::new(1.into(), 2.into()),
            crate::exactfield::Rational::from_integer(0.into()),
        )), 1));
        assert_eq!(r, UniPoly::constant(pi_term(4, 0, 2)));

        assert!(matches!(a.divmod(&UniPoly::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn gcd_examples() {
        let t2m1 = poly(vec![c(-1), c(0), c(1)]);
        let tm1 = poly(vec![c(-1), c(1)]);
        assert_eq!(t2m1.gcd(&tm1).unwrap(), tm1);

        let a = poly(vec![pi_term(4, 0, 2), c(1)]);
        assert!(a.gcd(&UniPoly::one()).unwrap().is_one());

        // gcd((t + 2 i pi)^2, (t + 2 i pi)(t - 1)) = t + 2 i pi
        let f = poly(vec![pi_term(0, 2, 1), c(1)]);
        let a = f.pow(2);
        let b = &f * &tm1;
        let g = a.gcd(&b).unwrap();
        assert_eq!(g, f);
        assert!(a.divisible_by(&g) && b.divisible_by(&g));

        assert!(matches!(UniPoly::zero().gcd(&UniPoly::zero()), Err(Error::ZeroGcd)));
        assert_eq!(UniPoly::zero().gcd(&b).unwrap(), b.monic());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(UniPoly::t().pow(2).derivative(), poly(vec![c(0), c(2)]));
        assert!(UniPoly::constant(pi_term(1, 1, 3)).derivative().is_zero());
        let p = poly(vec![c(0), pi_term(4, 0, 2), c(0), c(1)]);
        assert_eq!(p.derivative(), poly(vec![pi_term(4, 0, 2), c(0), c(3)]));
    }

    #[test]
    fn eval_examples() {
        let p = poly(vec![c(1), c(0), c(1)]);
        assert_eq!(p.eval(&FieldElement::zero()), FieldElement::one());
        let p = poly(vec![pi_term(4, 0, 2), c(1)]);
        assert!(p.eval(&-pi_term(4, 0, 2)).is_zero());
        let p = poly(vec![-FieldElement::pi(), c(0), c(1)]);
        assert_eq!(p.eval(&c(1)), &c(1) - &FieldElement::pi());
    }

    fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> UniPoly {
        let deg = rng.gen_range(0..=max_deg);
        poly(
            (0..=deg)
                .map(|_| {
                    let k = rng.gen_range(0..=2);
                    pi_term(rng.gen_range(-3..=3), rng.gen_range(-3..=3), k)
                })
                .collect(),
        )
    }

    #[test]
    fn divmod_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = random_poly(&mut rng, 8);
            let b = random_poly(&mut rng, 8);
            if b.is_zero() {
                continue;
            }
            let (q, r) = a.divmod(&b).unwrap();
            assert_eq!(&(&q * &b) + &r, a);
            assert!(r.degree() < b.degree());
        }
    }

    #[test]
    fn gcd_properties_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = random_poly(&mut rng, 4);
            let b = random_poly(&mut rng, 4);
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let g = a.gcd(&b).unwrap();
            assert!(g.is_monic());
            assert!(a.divisible_by(&g) && b.divisible_by(&g));
            assert_eq!(g, b.gcd(&a).unwrap());

            let cpoly = random_poly(&mut rng, 2);
            if cpoly.is_zero() {
                continue;
            }
            let cm = cpoly.monic();
            let lhs = (&a * &cm).gcd(&(&b * &cm)).unwrap();
            assert_eq!(lhs, &cm * &g);
        }
    }

    #[test]
    fn xgcd_bezout_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = random_poly(&mut rng, 5);
            let b = random_poly(&mut rng, 5);
            if a.is_zero() && b.is_zero() {
                assert!(a.xgcd(&b).is_err());
                continue;
            }
            let (g, x, y) = a.xgcd(&b).unwrap();
            assert_eq!(&(&x * &a) + &(&y * &b), g);
            assert_eq!(g, a.gcd(&b).unwrap());
        }
    }

    #[test]
    fn squarefree_part_strips_multiplicity() {
        let f = poly(vec![pi_term(0, 2, 1), c(1)]);
        let p = &f.pow(3) * &poly(vec![c(-1), c(1)]);
        assert_eq!(p.squarefree_part().unwrap(), &f * &poly(vec![c(-1), c(1)]));
    }
}
