#![allow(dead_code)]

use perioctrl::exactfield::{FieldElement, GaussianRational, PiPoly};
use perioctrl::polymatrix::{MultiPoly, MultiPolyMatrix, UniPolyMatrix};
use perioctrl::unipoly::UniPoly;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gauss(rng: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let c = GaussianRational::from_ints(rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        if !c.is_zero() {
            return c;
        }
    }
}

/// Coefficient in F: a Gaussian integer, sometimes times pi.
fn field_coeff(rng: &mut ChaCha8Rng) -> FieldElement {
    let c = gauss(rng);
    let k = usize::from(rng.gen_bool(0.15));
    FieldElement::from_pipoly(PiPoly::monomial(c, k))
}

pub fn random_unipoly(rng: &mut ChaCha8Rng, max_deg: usize) -> UniPoly {
    if rng.gen_bool(0.25) {
        return UniPoly::zero();
    }
    let deg = rng.gen_range(0..=max_deg);
    UniPoly::from_coeffs(
        (0..=deg)
            .map(|_| if rng.gen_bool(0.6) { field_coeff(rng) } else { FieldElement::zero() })
            .collect(),
    )
}

pub fn random_unipoly_matrix(rng: &mut ChaCha8Rng, max_dim: usize, max_deg: usize) -> UniPolyMatrix {
    let m = rng.gen_range(1..=max_dim);
    let n = rng.gen_range(1..=max_dim);
    UniPolyMatrix::from_rows(
        (0..m)
            .map(|_| (0..n).map(|_| random_unipoly(rng, max_deg)).collect())
            .collect(),
    )
    .unwrap()
}

/// Sparse entry in `x1..xd, t`: up to three terms of total degree <= 3 with
/// coefficients in {-3..3} + i{-3..3}.
pub fn random_entry(rng: &mut ChaCha8Rng, d: usize) -> MultiPoly {
    let nvars = d + 1;
    let mut p = MultiPoly::zero(nvars);
    if rng.gen_bool(0.2) {
        return p;
    }
    for _ in 0..rng.gen_range(1..=3) {
        let total = rng.gen_range(0..=3u32);
        let mut e = vec![0u32; nvars];
        for _ in 0..total {
            e[rng.gen_range(0..nvars)] += 1;
        }
        p.add_term(e, &gauss(rng));
    }
    p
}

pub fn random_system(rng: &mut ChaCha8Rng) -> MultiPolyMatrix {
    let d = rng.gen_range(1..=2);
    let m = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=3);
    let rows = (0..m)
        .map(|_| (0..n).map(|_| random_entry(rng, d)).collect())
        .collect();
    MultiPolyMatrix::new(d, rows).unwrap()
}

/// Determinant by Laplace expansion along the first row (oracle only).
pub fn laplace_det(a: &[Vec<UniPoly>]) -> UniPoly {
    let n = a.len();
    if n == 0 {
        return UniPoly::one();
    }
    if n == 1 {
        return a[0][0].clone();
    }
    let mut acc = UniPoly::zero();
    for j in 0..n {
        if a[0][j].is_zero() {
            continue;
        }
        let sub: Vec<Vec<UniPoly>> = a[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = &a[0][j] * &laplace_det(&sub);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// All `j x j` minors of `m` by brute force.
pub fn minors(m: &UniPolyMatrix, j: usize) -> Vec<UniPoly> {
    let mut out = Vec::new();
    for rs in combinations(m.rows(), j) {
        for cs in combinations(m.cols(), j) {
            let sub: Vec<Vec<UniPoly>> = rs
                .iter()
                .map(|&r| cs.iter().map(|&c| m.get(r, c).clone()).collect())
                .collect();
            out.push(laplace_det(&sub));
        }
    }
    out
}

/// Monic gcd of a list; zero when every element is zero.
pub fn gcd_all(ps: &[UniPoly]) -> UniPoly {
    ps.iter().fold(UniPoly::zero(), |g, p| {
        if g.is_zero() && p.is_zero() {
            UniPoly::zero()
        } else {
            g.gcd(p).unwrap()
        }
    })
}
