use std::ops::{Add, Mul, Neg, Sub};

use rug::Integer;
use num_complex::Complex64;

use super::{modular, GaussianRational};

/// Polynomial in the transcendental symbol `pi` with Gaussian-rational
/// coefficients, ascending powers. Empty means zero; otherwise the last
/// coefficient is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PiPoly {
    coeffs: Vec<GaussianRational>,
}

impl PiPoly {
    pub fn from_coeffs(mut coeffs: Vec<GaussianRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PiPoly { coeffs }
    }

    pub fn zero() -> Self {
        PiPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * pi^k`.
    pub fn monomial(c: GaussianRational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![GaussianRational::zero(); k + 1];
        coeffs[k] = c;
        PiPoly { coeffs }
    }

    pub fn pi() -> Self {
        Self::monomial(GaussianRational::one(), 1)
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PiPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Divide by the leading coefficient. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.inv().expect("nonzero leading coefficient")),
        }
    }

    /// Gcd of all real and imaginary coefficient parts, as a nonnegative
    /// rational; zero for the zero polynomial.
    pub fn rational_content(&self) -> super::Rational {
        self.coeffs
            .iter()
            .flat_map(|c| [&c.re, &c.im])
            .filter(|r| !r.is_zero())
            .fold(super::Rational::zero(), |g, r| if g.is_zero() { r.abs() } else { g.gcd(r) })
    }

    /// Euclidean division over Q(i). Panics on a zero divisor; callers check.
    pub fn divmod(&self, b: &PiPoly) -> (PiPoly, PiPoly) {
        let db = b.degree().expect("PiPoly division by zero");
        if self.coeffs.len() <= db {
            return (Self::zero(), self.clone());
        }
        let lc_inv = b.coeffs[db].inv().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![GaussianRational::zero(); rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + db] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                let t = &c * bj;
                rem[k + j] -= &t;
            }
            quot[k] = c;
        }
        rem.truncate(db);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Exact quotient; the caller guarantees `b | self`.
    pub fn div_exact(&self, b: &PiPoly) -> PiPoly {
        let (q, r) = self.divmod(b);
        debug_assert!(r.is_zero(), "inexact PiPoly division");
        q
    }

    /// Monic gcd. `gcd(0, 0) = 0`.
    ///
    /// Multi-modular: images under both embeddings `i -> +-r` of Q(i) into
    /// `F_p` fix the degree and, through CRT and rational reconstruction, the
    /// coefficients. A candidate is accepted only after it divides both
    /// inputs exactly.
    pub fn gcd(&self, other: &PiPoly) -> PiPoly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Self::one();
        }
        self.gcd_modular(other).unwrap_or_else(|| self.gcd_euclid(other))
    }

    /// Monic least common multiple of two nonzero polynomials.
    pub fn lcm(&self, other: &PiPoly) -> PiPoly {
        let g = self.gcd(other);
        (self * &other.div_exact(&g)).monic()
    }

    /// Plain monic Euclidean remainder sequence over Q(i).
    pub fn gcd_euclid(&self, other: &PiPoly) -> PiPoly {
        if self.is_constant() && !self.is_zero() || other.is_constant() && !other.is_zero() {
            return Self::one();
        }
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            if b.is_constant() {
                return Self::one();
            }
            let (_, r) = a.divmod(&b);
            a = b;
            b = r.monic();
        }
        a
    }

    /// Residues `(re, im)` of every coefficient mod `p`; `None` if a
    /// denominator vanishes mod p.
    fn residues(&self, p: u64) -> Option<Vec<(u64, u64)>> {
        self.coeffs
            .iter()
            .map(|c| Some((c.re.mod_prime(p)?, c.im.mod_prime(p)?)))
            .collect()
    }

    fn image(res: &[(u64, u64)], p: u64, r: u64) -> Vec<u64> {
        res.iter()
            .map(|&(re, im)| modular::add_mod(re, modular::mul_mod(r, im, p), p))
            .collect()
    }

    fn gcd_modular(&self, other: &PiPoly) -> Option<PiPoly> {
        let da = self.coeffs.len() - 1;
        let db = other.coeffs.len() - 1;
        let mut best_deg = usize::MAX;
        let mut modulus = Integer::from(1);
        // accumulated residues of (re, im) per coefficient, ascending
        let mut acc: Vec<(Integer, Integer)> = Vec::new();
        let mut candidate: Option<PiPoly> = None;
        for gp in modular::gauss_primes() {
            let p = gp.p;
            let (Some(ra), Some(rb)) = (self.residues(p), other.residues(p)) else {
                continue;
            };
            let mut images = Vec::with_capacity(2);
            for r in [gp.sqrt_m1, p - gp.sqrt_m1] {
                let a = Self::image(&ra, p, r);
                let b = Self::image(&rb, p, r);
                if a[da] == 0 || b[db] == 0 {
                    break;
                }
                images.push(modular::poly_gcd_mod(&a, &b, p));
            }
            if images.len() != 2 || images[0].len() != images[1].len() {
                continue;
            }
            let deg = images[0].len() - 1;
            if deg == 0 {
                return Some(Self::one());
            }
            if deg > best_deg {
                continue;
            }
            let inv2 = modular::inv_mod(2, p);
            let inv2r = modular::inv_mod(modular::mul_mod(2, gp.sqrt_m1, p), p);
            let parts: Vec<(u64, u64)> = images[0]
                .iter()
                .zip(&images[1])
                .map(|(&gp_, &gm)| {
                    let x = modular::mul_mod(modular::add_mod(gp_, gm, p), inv2, p);
                    let y = modular::mul_mod(modular::sub_mod(gp_, gm, p), inv2r, p);
                    (x, y)
                })
                .collect();
            if deg < best_deg {
                best_deg = deg;
                modulus = Integer::from(p);
                acc = parts
                    .iter()
                    .map(|&(x, y)| (Integer::from(x), Integer::from(y)))
                    .collect();
                candidate = None;
                continue;
            }
            // a candidate that already matches the new image is only checked
            // by trial division, without another reconstruction
            if let Some(c) = &candidate {
                if c.residues(p).as_deref() == Some(&parts[..])
                    && self.divmod(c).1.is_zero()
                    && other.divmod(c).1.is_zero()
                {
                    return candidate;
                }
            }
            for (slot, &(x, y)) in acc.iter_mut().zip(&parts) {
                slot.0 = modular::crt(&slot.0, &modulus, x, p);
                slot.1 = modular::crt(&slot.1, &modulus, y, p);
            }
            modulus *= p;
            candidate = acc
                .iter()
                .map(|(x, y)| {
                    Some(GaussianRational::new(
                        modular::rational_reconstruct(x, &modulus)?,
                        modular::rational_reconstruct(y, &modulus)?,
                    ))
                })
                .collect::<Option<Vec<_>>>()
                .map(PiPoly::from_coeffs);
        }
        None
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let x = Complex64::new(x, 0.0);
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c.to_complex())
    }
}

impl<'a> Add<&'a PiPoly> for &'a PiPoly {
    type Output = PiPoly;
    fn add(self, rhs: &PiPoly) -> PiPoly {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        PiPoly::from_coeffs(coeffs)
    }
}

impl<'a> Sub<&'a PiPoly> for &'a PiPoly {
    type Output = PiPoly;
    fn sub(self, rhs: &PiPoly) -> PiPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n, GaussianRational::zero());
        for (c, s) in coeffs.iter_mut().zip(&rhs.coeffs) {
            *c -= s;
        }
        PiPoly::from_coeffs(coeffs)
    }
}

impl<'a> Mul<&'a PiPoly> for &'a PiPoly {
    type Output = PiPoly;
    fn mul(self, rhs: &PiPoly) -> PiPoly {
        if self.is_zero() || rhs.is_zero() {
            return PiPoly::zero();
        }
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        let mut coeffs = vec![GaussianRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a * b;
                coeffs[i + j] += &t;
            }
        }
        PiPoly::from_coeffs(coeffs)
    }
}

impl Neg for &PiPoly {
    type Output = PiPoly;
    fn neg(self) -> PiPoly {
        PiPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> PiPoly {
        PiPoly::from_coeffs(cs.iter().map(|&c| GaussianRational::from_int(c)).collect())
    }

    #[test]
    fn trailing_zeros_trimmed() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
    }

    #[test]
    fn divmod_reconstructs() {
        let a = p(&[3, 0, -2, 5, 1]);
        let b = p(&[1, 2, 3]);
        let (q, r) = a.divmod(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let f = p(&[1, 1]); // pi + 1
        let a = &f * &p(&[2, 0, 3]);
        let b = &f * &p(&[-1, 4]);
        assert_eq!(a.gcd(&b), f);
        assert!(p(&[5]).gcd(&a).is_one());
    }

    #[test]
    fn modular_gcd_matches_euclid() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let rp = |rng: &mut rand_chacha::ChaCha8Rng, d: usize| {
            PiPoly::from_coeffs(
                (0..=d)
                    .map(|_| {
                        GaussianRational::new(
                            super::super::Rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4)),
                            super::super::Rational::ratio(rng.gen_range(-9..=9), 1),
                        )
                    })
                    .collect(),
            )
        };
        for k in 0..60 {
            let f = rp(&mut rng, k % 4);
            let a = &rp(&mut rng, 1 + k % 7) * &f;
            let b = &rp(&mut rng, 2 + k % 5) * &f;
            if a.is_zero() || b.is_zero() {
                continue;
            }
            assert_eq!(a.gcd(&b), a.gcd_euclid(&b));
        }
    }
}
