//! Exact arithmetic over Q, Q(i), Q(i)[pi] and the field F = Q(i)(pi).
//!
//! `pi` is carried as a free indeterminate. Because pi is transcendental over
//! Q, every rank, degree and gcd computed over F agrees with the same
//! computation carried out at the true value of pi, so the whole analysis
//! pipeline stays exact.

mod field;
mod gaussian;
pub(crate) mod modular;
mod pipoly;
mod rational;

pub use field::FieldElement;
pub use gaussian::GaussianRational;
pub use pipoly::PiPoly;
pub use rational::Rational;

/// Parse `"3"`, `"-7/4"` as an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: num_bigint::BigInt = n.parse().ok()?;
    let d: num_bigint::BigInt = d.parse().ok()?;
    if d == num_bigint::BigInt::from(0) {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn g(re: Rational, im: Rational) -> FieldElement {
        FieldElement::from_gaussian(GaussianRational::new(re, im))
    }

    fn pp(cs: &[(i64, i64)]) -> PiPoly {
        PiPoly::from_coeffs(cs.iter().map(|&(a, b)| GaussianRational::from_ints(a, b)).collect())
    }

    fn two_i_pi() -> FieldElement {
        FieldElement::from_pipoly(PiPoly::monomial(GaussianRational::from_ints(0, 2), 1))
    }

    #[test]
    fn add_examples() {
        let x = FieldElement::new(pp(&[(1, 0), (0, 3)]), pp(&[(2, 0), (1, 0)])).unwrap();
        assert_eq!(&FieldElement::zero() + &x, x);
        let a = g(q(1, 2), q(1, 1));
        let b = g(q(1, 2), q(-1, 1));
        assert_eq!(&a + &b, FieldElement::one());
        // pi/(pi+1) + 1/(pi+1) = 1
        let pi1 = pp(&[(1, 0), (1, 0)]);
        let a = FieldElement::new(PiPoly::pi(), pi1.clone()).unwrap();
        let b = FieldElement::new(PiPoly::one(), pi1).unwrap();
        assert_eq!(&a + &b, FieldElement::one());
    }

    #[test]
    fn mul_examples() {
        let s = two_i_pi();
        let expect = FieldElement::from_pipoly(PiPoly::monomial(GaussianRational::from_int(-4), 2));
        assert_eq!(&s * &s, expect);

        // (3 pi^2 - i) / (pi + 2)
        let x = FieldElement::new(pp(&[(0, -1), (0, 0), (3, 0)]), pp(&[(2, 0), (1, 0)])).unwrap();
        assert_eq!(&x * &x.inv().unwrap(), FieldElement::one());

        let a = g(q(1, 2), q(1, 1));
        let b = g(q(1, 2), q(-1, 1));
        assert_eq!(&a * &b, g(q(5, 4), q(0, 1)));
    }

    #[test]
    fn inv_examples() {
        assert_eq!(FieldElement::one().inv().unwrap(), FieldElement::one());
        // inv(2 i pi) = -i / (2 pi) = (-i/2) / pi in canonical (monic) form
        let inv = two_i_pi().inv().unwrap();
        assert_eq!(inv.den(), &PiPoly::pi());
        assert_eq!(inv.num(), &PiPoly::constant(GaussianRational::new(q(0, 1), q(-1, 2))));
        assert!(matches!(
            FieldElement::zero().inv(),
            Err(crate::error::Error::DivisionByZero)
        ));
    }

    #[test]
    fn to_complex_examples() {
        let pi = 3.25;
        let v = two_i_pi().to_complex(pi).unwrap();
        assert_eq!(v, num_complex::Complex64::new(0.0, 6.5));
        assert_eq!(FieldElement::one().to_complex(pi).unwrap(), num_complex::Complex64::new(1.0, 0.0));
        let x = FieldElement::new(PiPoly::monomial(GaussianRational::one(), 2), PiPoly::pi()).unwrap();
        assert!(x.is_polynomial());
        assert!((x.to_complex(pi).unwrap().re - pi).abs() < 1e-14);
        // denominator vanishing at the evaluation point
        let bad = FieldElement::new(PiPoly::one(), pp(&[(-1, 0), (1, 0)])).unwrap();
        assert!(bad.to_complex(1.0).is_err());
    }

    fn random_elem(rng: &mut ChaCha8Rng) -> FieldElement {
        let mut poly = |deg: usize| {
            PiPoly::from_coeffs(
                (0..=deg)
                    .map(|_| {
                        GaussianRational::new(
                            q(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
                            q(rng.gen_range(-2..=2), 1),
                        )
                    })
                    .collect(),
            )
        };
        let num = poly(2);
        let mut den = poly(1);
        if den.is_zero() {
            den = PiPoly::one();
        }
        FieldElement::new(num, den).unwrap()
    }

    #[test]
    fn ring_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let a = random_elem(&mut rng);
            let b = random_elem(&mut rng);
            let c = random_elem(&mut rng);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            assert_eq!(&a + &b, &b + &a);
            assert_eq!(&a * &b, &b * &a);
            if !a.is_zero() {
                assert_eq!(&a * &a.inv().unwrap(), FieldElement::one());
            }
        }
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let a = random_elem(&mut rng);
            let c = a.canonicalize();
            assert_eq!(c, a);
            assert_eq!(c.canonicalize(), c);
            assert!(a.den().leading().unwrap().is_one());
            assert!(a.num().gcd(a.den()).is_one() || a.is_zero());
        }
    }

    #[test]
    fn harmonic_sentinel() {
        // H_100 summed forward in F versus a reverse fold over plain rationals
        let forward = (1..=100).fold(FieldElement::zero(), |acc, k| {
            &acc + &FieldElement::from_int(k).inv().unwrap()
        });
        let backward = (1..=100i64)
            .rev()
            .fold(q(0, 1), |acc, k| acc + q(1, k));
        assert_eq!(forward, FieldElement::from_gaussian(GaussianRational::from_rational(backward.clone())));
        assert_eq!(
            backward.denom().to_string(),
            "2788815009188499086581352357412492142272"
        );
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("-7/4"), Some(q(-7, 4)));
        assert_eq!(parse_rational(" 3 "), Some(q(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
