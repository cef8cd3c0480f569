use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Zero};
use rug::{Integer, Rational as Gmp};

/// Exact rational number, always reduced with a positive denominator.
///
/// Values whose numerator and denominator fit in `i64` are stored inline;
/// anything larger is promoted to a heap GMP rational. The two forms never
/// overlap, so structural equality is value equality.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    /// `num / den`, `den > 0`, `gcd(|num|, den) = 1`, `num != i64::MIN`.
    Small(i64, i64),
    Big(Box<Gmp>),
}

fn to_gmp_int(n: &BigInt) -> Integer {
    let (sign, digits) = n.to_u32_digits();
    let mut z = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        z = -z;
    }
    z
}

fn to_bigint(z: &Integer) -> BigInt {
    let digits = z.to_digits::<u32>(rug::integer::Order::Lsf);
    let sign = match z.cmp0() {
        Ordering::Less => Sign::Minus,
        Ordering::Equal => Sign::NoSign,
        Ordering::Greater => Sign::Plus,
    };
    BigInt::from_slice(sign, &digits)
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Self::from_gmp(Gmp::from((to_gmp_int(&num), to_gmp_int(&den))))
    }

    pub fn from_integer(n: BigInt) -> Self {
        Self::from_gmp(Gmp::from(to_gmp_int(&n)))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::small_or_big(n as i128, 1)
    }

    /// Construct from an `i64` ratio; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::small_or_big(num as i128, den as i128)
    }

    pub(crate) fn from_gmp(r: Gmp) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small(n, d));
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    /// Reduce `num/den` given in `i128`.
    fn small_or_big(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return Rational(Repr::Small(0, 1));
        }
        let (an, ad) = (num.unsigned_abs(), den as u128);
        let g = match (u64::try_from(an), u64::try_from(ad)) {
            (Ok(x), Ok(y)) => x.gcd(&y) as u128,
            _ => an.gcd(&ad),
        };
        if g == 1 {
            Self::reduced(num, den)
        } else {
            Self::reduced(num / g as i128, den / g as i128)
        }
    }

    /// `num/den` already in lowest terms with `den > 0`.
    fn reduced(num: i128, den: i128) -> Self {
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational(Repr::Small(n, d)),
            _ => Rational(Repr::Big(Box::new(Gmp::from((Integer::from(num), Integer::from(den)))))),
        }
    }

    /// `a/b + c/d` for small operands.
    fn add_small(a: i64, b: i64, c: i64, d: i64) -> Self {
        if b == d {
            return Self::small_or_big(a as i128 + c as i128, b as i128);
        }
        let g = (b as u64).gcd(&(d as u64));
        let num = a as i128 * d as i128 + c as i128 * b as i128;
        if g == 1 {
            // coprime denominators leave nothing to cancel against b*d
            if num == 0 {
                return Rational::zero();
            }
            return Self::reduced(num, b as i128 * d as i128);
        }
        Self::small_or_big(num, b as i128 * d as i128)
    }

    fn to_gmp(&self) -> std::borrow::Cow<'_, Gmp> {
        match &self.0 {
            Repr::Small(n, d) => std::borrow::Cow::Owned(Gmp::from((*n, *d))),
            Repr::Big(b) => std::borrow::Cow::Borrowed(b),
        }
    }

    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.cmp0() == Ordering::Less,
        }
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(b) => *b.denom() == 1,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => to_bigint(b.numer()),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => to_bigint(b.denom()),
        }
    }

    /// Bit length of the larger of numerator and denominator.
    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => {
                let m = n.unsigned_abs().max(*d as u64);
                64 - m.leading_zeros() as u64
            }
            Repr::Big(b) => b.numer().significant_bits().max(b.denom().significant_bits()) as u64,
        }
    }

    pub fn recip(&self) -> Option<Self> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(Self::small_or_big(*d as i128, *n as i128)),
            Repr::Big(b) => Some(Self::from_gmp(Gmp::from(b.recip_ref()))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => b.to_f64(),
        }
    }

    /// Nonnegative gcd in the sense `gcd(a/b, c/d) = gcd(a, c) / lcm(b, d)`.
    pub fn gcd(&self, other: &Rational) -> Rational {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let n = a.unsigned_abs().gcd(&c.unsigned_abs());
                let l = (*b as u64 / (*b as u64).gcd(&(*d as u64))) as u128 * *d as u128;
                Self::small_or_big(n as i128, l as i128)
            }
            _ => {
                let (x, y) = (self.to_gmp(), other.to_gmp());
                let n = Integer::from(x.numer().gcd_ref(y.numer()));
                let l = Integer::from(x.denom().lcm_ref(y.denom()));
                Self::from_gmp(Gmp::from((n, l)))
            }
        }
    }

    /// Residue modulo a prime `p < 2^62`; `None` when `p` divides the
    /// denominator.
    pub fn mod_prime(&self, p: u64) -> Option<u64> {
        let (n, d) = match &self.0 {
            Repr::Small(n, d) => (
                (*n as i128).rem_euclid(p as i128) as u64,
                (*d as u64) % p,
            ),
            Repr::Big(b) => {
                let m = Integer::from(p);
                let residue = |z: &Integer| {
                    let mut r = Integer::from(z % &m);
                    if r.cmp0() == Ordering::Less {
                        r += &m;
                    }
                    r.to_u64().expect("residue fits")
                };
                (residue(b.numer()), residue(b.denom()))
            }
        };
        if d == 0 {
            return None;
        }
        Some(crate::exactfield::modular::mul_mod(n, crate::exactfield::modular::inv_mod(d, p), p))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_gmp().as_ref().cmp(other.to_gmp().as_ref()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if *b.denom() == 1 => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_i64(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Rational::from_integer(v)
    }
}


impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) => rhs.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => Rational::add_small(*a, *b, *c, *d),
            _ => Rational::from_gmp(Gmp::from(self.to_gmp().as_ref() + rhs.to_gmp().as_ref())),
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) if *c != i64::MIN => Rational::add_small(*a, *b, -*c, *d),
            _ => Rational::from_gmp(Gmp::from(self.to_gmp().as_ref() - rhs.to_gmp().as_ref())),
        }
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Rational::zero(),
            (Repr::Small(1, 1), _) => rhs.clone(),
            (_, Repr::Small(1, 1)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                // cross-reduce first so the i128 products stay small
                let g1 = a.unsigned_abs().gcd(&(*d as u64)) as i64;
                let g2 = c.unsigned_abs().gcd(&(*b as u64)) as i64;
                let n = (*a / g1) as i128 * (*c / g2) as i128;
                let dd = (*b / g2) as i128 * (*d / g1) as i128;
                Rational::reduced(n, dd)
            }
            _ => Rational::from_gmp(Gmp::from(self.to_gmp().as_ref() * rhs.to_gmp().as_ref())),
        }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        self * &rhs.recip().expect("rational division by zero")
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(b) => Rational::from_gmp(Gmp::from(-b.as_ref())),
        }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = &*self * rhs;
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}
