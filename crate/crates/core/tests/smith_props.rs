mod common;

use perioctrl::analyzer::constant_rank_test;
use perioctrl::polymatrix::UniPolyMatrix;
use perioctrl::smith::{determinant, smith_form, unimodular_inverse};
use perioctrl::unipoly::{Degree, UniPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

#[test]
fn smith_invariants_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let m = random_unipoly_matrix(&mut rng, 4, 3);
        let sd = smith_form(&m).unwrap();
        assert_eq!(sd.reconstruct().unwrap(), m, "case {case}");
        assert_eq!(determinant(&sd.u).unwrap().degree(), Degree::Finite(0));
        assert_eq!(determinant(&sd.v).unwrap().degree(), Degree::Finite(0));
        for w in sd.invariant_factors.windows(2) {
            assert!(w[1].divisible_by(&w[0]));
        }
        let kernel = sd.kernel();
        assert!(m.mul(&kernel).unwrap().is_zero());
        assert_eq!(kernel.cols(), m.cols() - sd.rank);
        assert_eq!(constant_rank_test(&kernel).rank, kernel.cols());
    }
}

#[test]
fn determinantal_divisors_match_minor_gcds() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..60 {
        let m = random_unipoly_matrix(&mut rng, 3, 2);
        let sd = smith_form(&m).unwrap();
        let mut prod = UniPoly::one();
        for j in 1..=m.rows().min(m.cols()) {
            let g = gcd_all(&minors(&m, j));
            if j <= sd.rank {
                prod = &prod * &sd.invariant_factors[j - 1];
                assert_eq!(prod, g, "j = {j}");
            } else {
                assert!(g.is_zero(), "rank {} but a nonzero {j}-minor", sd.rank);
            }
        }
    }
}

#[test]
fn determinant_is_multiplicative_through_smith() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let rows = (0..3)
            .map(|_| (0..3).map(|_| random_unipoly(&mut rng, 2)).collect())
            .collect();
        let m = UniPolyMatrix::from_rows(rows).unwrap();
        let sd = smith_form(&m).unwrap();
        let mut rhs = &determinant(&sd.u).unwrap() * &determinant(&sd.v).unwrap();
        for k in 0..3 {
            rhs = &rhs * sd.sigma.get(k, k);
        }
        assert_eq!(determinant(&m).unwrap(), rhs);
        assert_eq!(determinant(&m).unwrap(), laplace_det(&(0..3).map(|i| m.row(i).to_vec()).collect::<Vec<_>>()));
    }
}

#[test]
fn inverse_of_elementary_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let mut w = UniPolyMatrix::identity(n);
        for _ in 0..5 {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j {
                continue;
            }
            let mut e = UniPolyMatrix::identity(n);
            e.set(i, j, random_unipoly(&mut rng, 2));
            w = w.mul(&e).unwrap();
        }
        let inv = unimodular_inverse(&w).unwrap();
        assert_eq!(w.mul(&inv).unwrap(), UniPolyMatrix::identity(n));
        assert_eq!(inv.mul(&w).unwrap(), UniPolyMatrix::identity(n));
    }
}
