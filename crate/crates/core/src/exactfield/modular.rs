//! Word-size prime-field helpers for the multi-modular gcd of pi-polynomials.
//!
//! Primes are taken congruent to 1 mod 4 so that `i` has two images
//! (`r` and `-r` with `r^2 = -1`); the pair of images determines the real and
//! imaginary parts of a Gaussian-rational coefficient.

use std::sync::OnceLock;

use rug::Integer;

use super::Rational;

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    if a == 1 {
        return 1;
    }
    let (mut r0, mut r1) = (p as i128, (a % p) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i128) as u64
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // deterministic witness set for all 64-bit n
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime `p = 1 (mod 4)` with a fixed square root of `-1`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct GaussPrime {
    pub p: u64,
    pub sqrt_m1: u64,
}

const PRIME_COUNT: usize = 256;

pub(crate) fn gauss_primes() -> &'static [GaussPrime] {
    static PRIMES: OnceLock<Vec<GaussPrime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        // largest candidate below 2^62 that is 1 mod 4
        let mut n: u64 = (1u64 << 62) - 3;
        while out.len() < PRIME_COUNT {
            if is_prime(n) {
                let sqrt_m1 = (2..)
                    .map(|g| pow_mod(g, (n - 1) / 4, n))
                    .find(|&r| mul_mod(r, r, n) == n - 1)
                    .expect("non-residue exists");
                out.push(GaussPrime { p: n, sqrt_m1 });
            }
            n -= 4;
        }
        out
    })
}

/// Monic gcd in `F_p[x]`, coefficients ascending. Inputs need not be trimmed.
pub(crate) fn poly_gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        // x <- x mod y
        let dy = y.len() - 1;
        let inv = inv_mod(y[dy], p);
        while x.len() > dy {
            let k = x.len() - 1 - dy;
            let c = mul_mod(x[x.len() - 1], inv, p);
            if c != 0 {
                for (j, yj) in y.iter().enumerate() {
                    x[k + j] = sub_mod(x[k + j], mul_mod(c, *yj, p), p);
                }
            }
            x.pop();
            trim(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    if let Some(&lc) = x.last() {
        let inv = inv_mod(lc, p);
        for c in x.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    x
}

/// Combine `x = a (mod m)` with `x = b (mod p)`; returns the residue mod `m*p`.
pub(crate) fn crt(a: &Integer, m: &Integer, b: u64, p: u64) -> Integer {
    // x = a + m * ((b - a) * m^{-1} mod p)
    let a_mod = residue(a, p);
    let m_mod = residue(m, p);
    let t = mul_mod(sub_mod(b, a_mod, p), inv_mod(m_mod, p), p);
    Integer::from(m * t) + a
}

fn residue(z: &Integer, p: u64) -> u64 {
    let pz = Integer::from(p);
    let mut r = Integer::from(z % &pz);
    if r.cmp0() == std::cmp::Ordering::Less {
        r += &pz;
    }
    r.to_u64().expect("residue fits")
}

/// Rational reconstruction of `u (mod m)` with `|num|, den <= sqrt(m/2)`.
pub(crate) fn rational_reconstruct(u: &Integer, m: &Integer) -> Option<Rational> {
    let bound = Integer::from(m >> 1u32).sqrt();
    let mut r1 = Integer::from(u % m);
    if r1.cmp0() == std::cmp::Ordering::Less {
        r1 += m;
    }
    let mut r0 = m.clone();
    let (mut s0, mut s1) = (Integer::new(), Integer::from(1));
    while r1 > bound {
        let (q, r2) = Integer::from(&r0).div_rem_floor(r1.clone());
        let s2 = Integer::from(&s0 - &q * &s1);
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.cmp0() == std::cmp::Ordering::Equal || Integer::from(s1.abs_ref()) > bound {
        return None;
    }
    if Integer::from(r1.gcd_ref(&s1)) != 1 {
        return None;
    }
    Some(Rational::from_gmp(rug::Rational::from((r1, s1))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_have_sqrt_minus_one() {
        for gp in gauss_primes().iter().take(8) {
            assert_eq!(gp.p % 4, 1);
            assert!(is_prime(gp.p));
            assert_eq!(mul_mod(gp.sqrt_m1, gp.sqrt_m1, gp.p), gp.p - 1);
        }
    }

    #[test]
    fn reconstructs_small_fraction() {
        let gp = gauss_primes()[0];
        let r = Rational::ratio(-22, 7);
        let u = r.mod_prime(gp.p).unwrap();
        let back = rational_reconstruct(&Integer::from(u), &Integer::from(gp.p)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn inverse_agrees_with_fermat() {
        let p = gauss_primes()[0].p;
        for a in [2u64, 3, 12345, p - 1, p / 3] {
            assert_eq!(inv_mod(a, p), pow_mod(a, p - 2, p));
        }
    }

    #[test]
    fn gcd_mod_small() {
        let p = 101;
        // (x+1)(x+2) and (x+1)(x+3)
        let a = [2, 3, 1];
        let b = [3, 4, 1];
        assert_eq!(poly_gcd_mod(&a, &b, p), vec![1, 1]);
    }
}
