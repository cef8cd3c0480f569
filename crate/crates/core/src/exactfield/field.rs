use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{GaussianRational, PiPoly};
use crate::error::{Error, Result};

/// Element of Q(i)(pi), the fraction field of [`PiPoly`].
///
/// Canonical form: `den` is monic, `gcd(num, den) = 1`, and zero is `0/1`.
/// Two equal field elements therefore have identical representations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    num: PiPoly,
    den: PiPoly,
}

impl Default for FieldElement {
    fn default() -> Self {
        Self::zero()
    }
}

impl FieldElement {
    /// Build `num / den` in canonical form.
    pub fn new(num: PiPoly, den: PiPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: PiPoly, den: PiPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g), den.div_exact(&g))
            }
        };
        let lc = den.leading().expect("nonzero denominator");
        if lc.is_one() {
            FieldElement { num, den }
        } else {
            let s = lc.inv().expect("nonzero");
            FieldElement {
                num: num.scale(&s),
                den: den.scale(&s),
            }
        }
    }

    /// Re-normalize an arbitrary representative. Idempotent.
    pub fn canonicalize(&self) -> Self {
        Self::canonical(self.num.clone(), self.den.clone())
    }

    pub fn zero() -> Self {
        FieldElement {
            num: PiPoly::zero(),
            den: PiPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_gaussian(GaussianRational::one())
    }

    pub fn from_gaussian(c: GaussianRational) -> Self {
        FieldElement {
            num: PiPoly::constant(c),
            den: PiPoly::one(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_gaussian(GaussianRational::from_int(v))
    }

    pub fn from_pipoly(p: PiPoly) -> Self {
        FieldElement {
            num: p,
            den: PiPoly::one(),
        }
    }

    pub fn pi() -> Self {
        Self::from_pipoly(PiPoly::pi())
    }

    pub fn i() -> Self {
        Self::from_gaussian(GaussianRational::i())
    }

    pub fn num(&self) -> &PiPoly {
        &self.num
    }

    pub fn den(&self) -> &PiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value lies in Q(i), i.e. does not involve pi.
    pub fn is_pi_free(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// True when the denominator is 1, i.e. the value is a polynomial in pi.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &FieldElement) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FieldElement {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Floating evaluation with `pi` replaced by `pi_approx`.
    pub fn to_complex(&self, pi_approx: f64) -> Result<Complex64> {
        let d = self.den.eval(pi_approx);
        if d.norm() < 1e-300 || !d.norm().is_finite() {
            return Err(Error::Evaluation(format!(
                "denominator {} at pi = {pi_approx}",
                d
            )));
        }
        let v = self.num.eval(pi_approx) / d;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Evaluation("non-finite value".into()));
        }
        Ok(v)
    }
}

impl From<GaussianRational> for FieldElement {
    fn from(c: GaussianRational) -> Self {
        FieldElement::from_gaussian(c)
    }
}

impl From<i64> for FieldElement {
    fn from(v: i64) -> Self {
        FieldElement::from_int(v)
    }
}

impl<'a> Add<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return FieldElement {
                    num,
                    den: PiPoly::one(),
                };
            }
            return FieldElement::canonical(num, self.den.clone());
        }
        // a/b + c/d with g = gcd(b, d): (a*(d/g) + c*(b/g)) / (b*d/g)
        let g = self.den.gcd(&rhs.den);
        let bg = self.den.div_exact(&g);
        let dg = rhs.den.div_exact(&g);
        let num = &(&self.num * &dg) + &(&rhs.num * &bg);
        let den = &self.den * &dg;
        FieldElement::canonical(num, den)
    }
}

impl<'a> Sub<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        if self.is_zero() || rhs.is_zero() {
            return FieldElement::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return FieldElement {
                num: &self.num * &rhs.num,
                den: PiPoly::one(),
            };
        }
        // cross-cancel; both inputs are reduced so the result is too
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (an, bd) = if g1.is_one() {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.div_exact(&g1), rhs.den.div_exact(&g1))
        };
        let (bn, ad) = if g2.is_one() {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.div_exact(&g2), self.den.div_exact(&g2))
        };
        let num = &an * &bn;
        let den = &ad * &bd;
        debug_assert!(den.leading().is_some_and(|c| c.is_one()));
        FieldElement { num, den }
    }
}

impl<'a> Div<&'a FieldElement> for &'a FieldElement {
    type Output = FieldElement;
    /// Panics on division by zero; use [`FieldElement::checked_div`] otherwise.
    fn div(self, rhs: &FieldElement) -> FieldElement {
        self.checked_div(rhs).expect("field division by zero")
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);
