//! Floating-point oracle for the exact verdicts: rank sampling in `t` and
//! rank drops at the roots of the invariant factors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::analyzer::{BoxReport, ControllabilityVerdict};
use crate::error::Result;
use crate::polymatrix::{numeric_eval, Frequency, MultiPolyMatrix};
use crate::unipoly::UniPoly;

/// Value substituted for pi in every floating evaluation. The rational seed
/// 245850922/78256779 rounds to this double.
pub const PI_APPROX: f64 = std::f64::consts::PI;

/// Bit pattern of [`PI_APPROX`], recorded in reports.
pub const PI_APPROX_BITS: u64 = 0x400921FB54442D18;

/// Number of pivots above `tol * max(max |entry|, 1)` under full pivoting.
pub fn numeric_rank(mat: &[Vec<Complex64>], tol: f64) -> usize {
    let mut a: Vec<Vec<Complex64>> = mat.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let threshold = tol * scale;
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best = (rank, rank, -1.0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, z) in row.iter().enumerate().skip(rank) {
                if z.norm() > best.2 {
                    best = (i, j, z.norm());
                }
            }
        }
        let (pi, pj, mag) = best;
        if mag <= threshold {
            break;
        }
        a.swap(rank, pi);
        for row in a.iter_mut() {
            row.swap(rank, pj);
        }
        let pivot_row = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let factor = row[rank] / pivot_row[rank];
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(rank) {
                *x -= factor * p;
            }
        }
        rank += 1;
    }
    rank
}

fn horner(cs: &[Complex64], z: Complex64) -> Complex64 {
    cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Roots of a polynomial with numerically evaluated coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Roots {
    #[serde(serialize_with = "ser_complex_vec")]
    pub roots: Vec<Complex64>,
    /// Every root has `|p(z)| <= 1e-10 * max |c_k| * max(1, |z|)^deg` for the
    /// monic square-free `p`.
    pub converged: bool,
}

/// Distinct complex roots of `p` (its square-free part), by simultaneous
/// Durand-Kerner iteration from a fixed circle followed by Newton polishing.
pub fn polynomial_roots(p: &UniPoly, pi_approx: f64) -> Result<Roots> {
    if p.coeffs().len() < 2 {
        return Ok(Roots {
            roots: Vec::new(),
            converged: true,
        });
    }
    let sq = p.squarefree_part()?;
    let raw = sq.to_complex_coeffs(pi_approx)?;
    let lead = *raw.last().expect("degree >= 1");
    let cs: Vec<Complex64> = raw.iter().map(|c| c / lead).collect();
    let n = cs.len() - 1;
    let radius = 1.0 + cs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius / seed.norm().powi(k as i32)).collect();
    for _ in 0..1000 {
        let mut shift = 0.0f64;
        for k in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    den *= z[k] - zj;
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(f64::EPSILON, 0.0);
            }
            let step = horner(&cs, z[k]) / den;
            z[k] -= step;
            shift = shift.max(step.norm() / (1.0 + z[k].norm()));
        }
        if shift < 1e-15 {
            break;
        }
    }
    let dcs: Vec<Complex64> = cs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let d = horner(&dcs, *zk);
            if d.norm() == 0.0 {
                break;
            }
            let step = horner(&cs, *zk) / d;
            if !step.is_finite() {
                break;
            }
            *zk -= step;
        }
    }
    let norm = cs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let converged = z
        .iter()
        .all(|&zk| horner(&cs, zk).norm() <= 1e-10 * norm * zk.norm().max(1.0).powi(n as i32));
    Ok(Roots { roots: z, converged })
}

fn ser_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_complex_vec<S: Serializer>(zs: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<[f64; 2]> = zs.iter().map(|z| [z.re, z.im]).collect();
    v.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankSample {
    #[serde(serialize_with = "ser_complex")]
    pub t: Complex64,
    pub numeric_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankSampleReport {
    pub frequency: Frequency,
    pub sampled_points: Vec<RankSample>,
    pub root_points: Vec<RankSample>,
    pub symbolic_rank: usize,
    pub roots_converged: bool,
    pub consistent: bool,
}

/// Samples `M(2*pi*i*v, t)` at seeded points of `[-10, 10]^2` away from the
/// invariant-factor roots and at those roots, and compares with `verdict`.
pub fn crosscheck_mode(
    m: &MultiPolyMatrix,
    f: &Frequency,
    verdict: &ControllabilityVerdict,
    n_samples: usize,
    seed: u64,
    tol: f64,
    pi_approx: f64,
) -> Result<RankSampleReport> {
    let mut roots = Vec::new();
    let mut roots_converged = true;
    for d in verdict.invariant_factors.iter().filter(|d| !d.is_unit()) {
        let r = polynomial_roots(d, pi_approx)?;
        roots_converged &= r.converged;
        roots.extend(r.roots);
    }
    let rank_at = |t: Complex64| -> Result<RankSample> {
        Ok(RankSample {
            t,
            numeric_rank: numeric_rank(&numeric_eval(m, f, t, pi_approx)?, tol),
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled_points = Vec::with_capacity(n_samples);
    while sampled_points.len() < n_samples {
        let t = Complex64::new(rng.gen_range(-10.0..=10.0), rng.gen_range(-10.0..=10.0));
        if roots.iter().any(|r| (r - t).norm() < 1e-6) {
            continue;
        }
        sampled_points.push(rank_at(t)?);
    }
    let root_points = roots.iter().map(|&t| rank_at(t)).collect::<Result<Vec<_>>>()?;
    let r = verdict.generic_rank;
    let consistent = sampled_points.iter().all(|s| s.numeric_rank == r)
        && root_points.iter().all(|s| s.numeric_rank < r)
        && verdict.controllable == root_points.is_empty();
    Ok(RankSampleReport {
        frequency: f.clone(),
        sampled_points,
        root_points,
        symbolic_rank: r,
        roots_converged,
        consistent,
    })
}

/// [`crosscheck_mode`] for every verdict of a box report, in report order.
pub fn crosscheck_box(
    m: &MultiPolyMatrix,
    report: &BoxReport,
    n_samples: usize,
    seed: u64,
    tol: f64,
    pi_approx: f64,
) -> Result<Vec<RankSampleReport>> {
    report
        .verdicts
        .par_iter()
        .map(|v| crosscheck_mode(m, &v.frequency, v, n_samples, seed, tol, pi_approx))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::analyze_mode;
    use crate::polymatrix::{parse_matrix, parse_output_poly, FrequencyLattice};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pi_constant() {
        assert_eq!(PI_APPROX.to_bits(), PI_APPROX_BITS);
        assert!((245850922.0 / 78256779.0 - PI_APPROX).abs() < 1e-15);
    }

    #[test]
    fn numeric_rank_examples() {
        assert_eq!(numeric_rank(&vec![vec![c(0.0, 0.0); 3]; 2], 1e-8), 0);
        let id: Vec<Vec<Complex64>> = (0..3)
            .map(|i| (0..3).map(|j| c((i == j) as u8 as f64, 0.0)).collect())
            .collect();
        assert_eq!(numeric_rank(&id, 1e-8), 3);
        let near = vec![vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0 + 1e-14, 0.0)]];
        assert_eq!(numeric_rank(&near, 1e-8), 1);
        assert_eq!(numeric_rank(&[], 1e-8), 0);
    }

    #[test]
    fn root_examples() {
        let r = polynomial_roots(&parse_output_poly("t + 4*pi^2").unwrap(), PI_APPROX).unwrap();
        assert!(r.converged);
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - c(-39.47841760435743, 0.0)).norm() < 1e-12);

        let mut r = polynomial_roots(&parse_output_poly("t^2 + 4*pi^2").unwrap(), PI_APPROX).unwrap();
        r.roots.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r.roots[0] - c(0.0, -2.0 * PI_APPROX)).norm() < 1e-12);
        assert!((r.roots[1] - c(0.0, 2.0 * PI_APPROX)).norm() < 1e-12);

        let r = polynomial_roots(&parse_output_poly("t - 1").unwrap(), PI_APPROX).unwrap();
        assert!((r.roots[0] - c(1.0, 0.0)).norm() < 1e-15);

        // repeated roots collapse to the square-free part
        let r = polynomial_roots(&parse_output_poly("(t - 2)^3*(t + i)").unwrap(), PI_APPROX).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!(r.converged);
    }

    #[test]
    fn roots_have_small_residuals() {
        for src in ["t^5 - 3*t^2 + pi*t - 1", "(t - pi)*(t - 2*pi)*(t - 3*pi)", "t^4 + i*t + 7"] {
            let p = parse_output_poly(src).unwrap();
            let r = polynomial_roots(&p, PI_APPROX).unwrap();
            let cs = p.to_complex_coeffs(PI_APPROX).unwrap();
            let norm = cs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert_eq!(r.roots.len(), cs.len() - 1);
            for z in &r.roots {
                assert!(horner(&cs, *z).norm() <= 1e-8 * (1.0 + norm), "{src}: {z}");
            }
        }
    }

    #[test]
    fn mode_examples() {
        let lat = FrequencyLattice::identity(1);
        let heat = parse_matrix("[[t - x1^2]]", 1).unwrap();
        let f = lat.frequency_from_mode(&[1]).unwrap();
        let v = analyze_mode(&heat, &f).unwrap();
        let r = crosscheck_mode(&heat, &f, &v, 50, 1, 1e-8, PI_APPROX).unwrap();
        assert!(r.consistent);
        assert_eq!(r.sampled_points.len(), 50);
        assert!(r.sampled_points.iter().all(|s| s.numeric_rank == 1));
        assert_eq!(r.root_points.len(), 1);
        assert_eq!(r.root_points[0].numeric_rank, 0);

        let tr = parse_matrix("[[t + x1, -1]]", 1).unwrap();
        let v = analyze_mode(&tr, &f).unwrap();
        let r = crosscheck_mode(&tr, &f, &v, 50, 1, 1e-8, PI_APPROX).unwrap();
        assert!(r.consistent && r.root_points.is_empty());

        let mut bad = analyze_mode(&heat, &f).unwrap();
        bad.controllable = true;
        assert!(!crosscheck_mode(&heat, &f, &bad, 10, 1, 1e-8, PI_APPROX).unwrap().consistent);
    }

    #[test]
    fn seeded_runs_repeat() {
        let m = parse_matrix("[[x1*t, t^2 - 1], [1, x1]]", 1).unwrap();
        let f = FrequencyLattice::identity(1).frequency_from_mode(&[2]).unwrap();
        let v = analyze_mode(&m, &f).unwrap();
        let a = crosscheck_mode(&m, &f, &v, 20, 9, 1e-8, PI_APPROX).unwrap();
        let b = crosscheck_mode(&m, &f, &v, 20, 9, 1e-8, PI_APPROX).unwrap();
        assert_eq!(a, b);
        assert!(a.consistent);
    }
}
