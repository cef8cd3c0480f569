//! Controllability decisions per spatial frequency.
//!
//! Two independent paths decide every mode: the rank/minor path
//! ([`constant_rank_test`]) and the Smith path ([`torsion_test`]). They share
//! nothing beyond polynomial arithmetic, so their agreement is checked on
//! every call.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactfield::{GaussianRational, Rational};
use crate::polymatrix::{
    substitute_frequency, Frequency, FrequencyLattice, MultiPoly, MultiPolyMatrix, UniPolyMatrix,
};
use crate::smith::{smith_form, SmithDecomposition};
use crate::unipoly::UniPoly;

/// A row `m` of `F[t]^n` outside the row module `<M_v>` together with a
/// nonzero `d` such that `d * m` lies inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionWitness {
    pub row: Vec<UniPoly>,
    pub annihilator: UniPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantRank {
    pub constant: bool,
    pub rank: usize,
    /// Monic gcd of all `rank x rank` minors (1 for the zero matrix).
    pub gcd_of_max_minors: UniPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControllabilityVerdict {
    pub frequency: Frequency,
    pub generic_rank: usize,
    pub invariant_factors: Vec<UniPoly>,
    pub constant_rank: bool,
    pub torsion_free: bool,
    pub controllable: bool,
    pub failure_factor: Option<UniPoly>,
    pub torsion_witness: Option<TorsionWitness>,
}

#[derive(Clone, Debug)]
pub struct BoxReport {
    pub lattice: FrequencyLattice,
    pub box_radius: u32,
    pub verdicts: Vec<ControllabilityVerdict>,
    pub overall_controllable_on_box: bool,
}

/// Result of treating `v` as indeterminates. A screening aid only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenericScreening {
    pub generic_rank: usize,
    /// Gcd of the maximal nonzero minors, primitive in `t`, in the variables
    /// `(pi, v1..vd, t)`.
    pub gcd: MultiPoly,
    /// `gcd` has positive degree in `t`.
    pub t_dependent: bool,
    /// Polynomial conditions on `v` (each rendered `p = 0`) that must all
    /// hold wherever the rank can drop; empty when `t_dependent`. They come
    /// from the t-free minors and from resultants of one minor of least
    /// positive t-degree against the others.
    pub exceptional_conditions: Vec<String>,
}

impl GenericScreening {
    pub fn gcd_string(&self) -> String {
        let names = screening_names(self.gcd.nvars() - 2, true);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        self.gcd.to_string_with(&refs)
    }

    pub fn summary(&self) -> String {
        if self.t_dependent {
            format!(
                "generic rank {}; minor gcd {} depends on t, so generic frequencies are not controllable",
                self.generic_rank,
                self.gcd_string()
            )
        } else if self.exceptional_conditions.is_empty() {
            format!("generic rank {}; no exceptional frequencies", self.generic_rank)
        } else {
            format!(
                "generic rank {}; rank can only drop where {}",
                self.generic_rank,
                self.exceptional_conditions.join(" and ")
            )
        }
    }
}

/// Minimal ring interface for fraction-free elimination.
trait Ring: Clone + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_(&self) -> bool;
    fn add_(&self, o: &Self) -> Self;
    fn sub_(&self, o: &Self) -> Self;
    fn mul_(&self, o: &Self) -> Self;
    fn div_exact_(&self, o: &Self) -> Self;
}

impl Ring for UniPoly {
    fn zero_like(&self) -> Self {
        UniPoly::zero()
    }
    fn one_like(&self) -> Self {
        UniPoly::one()
    }
    fn is_zero_(&self) -> bool {
        self.is_zero()
    }
    fn add_(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact_(&self, o: &Self) -> Self {
        let (q, r) = self.divmod(o).expect("nonzero divisor");
        debug_assert!(r.is_zero());
        q
    }
}

impl Ring for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.nvars())
    }
    fn one_like(&self) -> Self {
        MultiPoly::one(self.nvars())
    }
    fn is_zero_(&self) -> bool {
        self.is_zero()
    }
    fn add_(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact_(&self, o: &Self) -> Self {
        self.div_exact(o).expect("exact Bareiss division")
    }
}

/// Rank over the fraction field by Bareiss row reduction.
fn bareiss_rank<R: Ring>(rows: &[Vec<R>]) -> usize {
    let mut a = rows.to_vec();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let Some(one) = a.iter().flatten().next().map(R::one_like) else {
        return 0;
    };
    let mut prev = one;
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero_()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..m {
            for j in c + 1..n {
                let num = a[r][c].mul_(&a[i][j]).sub_(&a[i][c].mul_(&a[r][j]));
                a[i][j] = num.div_exact_(&prev);
            }
            a[i][c] = a[i][c].zero_like();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

/// Determinant by Bareiss elimination (square input).
fn bareiss_det<R: Ring>(rows: &[Vec<R>], zero: &R) -> R {
    let n = rows.len();
    if n == 0 {
        return zero.one_like();
    }
    let mut a = rows.to_vec();
    let mut prev = zero.one_like();
    let mut negate = false;
    for k in 0..n {
        if a[k][k].is_zero_() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero_()) else {
                return zero.clone();
            };
            a.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k].mul_(&a[i][j]).sub_(&a[i][k].mul_(&a[k][j]));
                a[i][j] = num.div_exact_(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if negate {
        zero.sub_(&det)
    } else {
        det
    }
}

/// Determinant by cofactor expansion along the first row.
fn laplace<R: Ring>(a: &[Vec<&R>], zero: &R) -> R {
    match a.len() {
        0 => zero.one_like(),
        1 => a[0][0].clone(),
        n => {
            let mut acc = zero.clone();
            for j in 0..n {
                if a[0][j].is_zero_() {
                    continue;
                }
                let sub: Vec<Vec<&R>> = a[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                    .collect();
                let term = a[0][j].mul_(&laplace(&sub, zero));
                acc = if j % 2 == 0 { acc.add_(&term) } else { acc.sub_(&term) };
            }
            acc
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Every `k x k` minor, visited lazily; `visit` returns `false` to stop.
fn for_each_minor<R: Ring>(rows: &[Vec<R>], k: usize, zero: &R, mut visit: impl FnMut(R) -> bool) {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    for rs in subsets(m, k) {
        for cs in subsets(n, k) {
            let sub: Vec<Vec<&R>> = rs.iter().map(|&i| cs.iter().map(|&j| &rows[i][j]).collect()).collect();
            if !visit(laplace(&sub, zero)) {
                return;
            }
        }
    }
}

fn uni_rows(mv: &UniPolyMatrix) -> Vec<Vec<UniPoly>> {
    (0..mv.rows()).map(|i| mv.row(i).to_vec()).collect()
}

/// Rank of `M_v` over `F(t)` and whether it is attained at every `t in C`.
pub fn constant_rank_test(mv: &UniPolyMatrix) -> ConstantRank {
    let rows = uni_rows(mv);
    let rank = bareiss_rank(&rows);
    if rank == 0 {
        return ConstantRank {
            constant: true,
            rank: 0,
            gcd_of_max_minors: UniPoly::one(),
        };
    }
    let mut g = UniPoly::zero();
    for_each_minor(&rows, rank, &UniPoly::zero(), |minor| {
        if !minor.is_zero() {
            g = g.gcd(&minor).expect("one operand nonzero");
        }
        !g.is_unit()
    });
    ConstantRank {
        constant: g.is_unit(),
        rank,
        gcd_of_max_minors: g,
    }
}

fn torsion_from_smith(sd: &SmithDecomposition) -> (bool, Option<TorsionWitness>) {
    match sd.torsion_pair() {
        None => (true, None),
        Some((row, annihilator)) => (false, Some(TorsionWitness { row, annihilator })),
    }
}

/// Whether `F[t]^{1 x n} / <M_v>` is torsion free, with a witness if not.
pub fn torsion_test(mv: &UniPolyMatrix) -> Result<(bool, Option<TorsionWitness>)> {
    Ok(torsion_from_smith(&smith_form(mv)?))
}

/// Exact check of a torsion witness: `row` is outside `<M_v>` and
/// `annihilator * row` is inside.
pub fn check_torsion_witness(mv: &UniPolyMatrix, w: &TorsionWitness) -> Result<bool> {
    let sd = smith_form(mv)?;
    let scaled: Vec<UniPoly> = w.row.iter().map(|x| &w.annihilator * x).collect();
    Ok(!w.annihilator.is_zero() && !sd.contains_row(&w.row)? && sd.contains_row(&scaled)?)
}

pub fn analyze_mode(m: &MultiPolyMatrix, f: &Frequency) -> Result<ControllabilityVerdict> {
    let mv = substitute_frequency(m, f)?;
    let cr = constant_rank_test(&mv);
    let sd = smith_form(&mv)?;
    let (torsion_free, torsion_witness) = torsion_from_smith(&sd);
    if cr.constant != torsion_free || cr.rank != sd.rank {
        return Err(Error::Inconsistent(format!(
            "mode {:?}: constant rank {} (r = {}) but torsion free {} (r = {})",
            f.mode, cr.constant, cr.rank, torsion_free, sd.rank
        )));
    }
    let failure_factor = if torsion_free {
        None
    } else {
        sd.invariant_factors.last().cloned()
    };
    Ok(ControllabilityVerdict {
        frequency: f.clone(),
        generic_rank: cr.rank,
        invariant_factors: sd.invariant_factors,
        constant_rank: cr.constant,
        torsion_free,
        controllable: torsion_free,
        failure_factor,
        torsion_witness,
    })
}

pub fn analyze_box(m: &MultiPolyMatrix, lattice: &FrequencyLattice, radius: u32) -> Result<BoxReport> {
    if lattice.dim() != m.d() {
        return Err(Error::Dimension(format!(
            "lattice dimension {} but system has d = {}",
            lattice.dim(),
            m.d()
        )));
    }
    let verdicts = lattice
        .box_frequencies(radius)
        .par_iter()
        .map(|f| analyze_mode(m, f))
        .collect::<Result<Vec<_>>>()?;
    let overall = verdicts.iter().all(|v| v.controllable);
    Ok(BoxReport {
        lattice: lattice.clone(),
        box_radius: radius,
        verdicts,
        overall_controllable_on_box: overall,
    })
}

fn screening_names(d: usize, with_t: bool) -> Vec<String> {
    let mut names = vec!["pi".to_string()];
    names.extend((1..=d).map(|k| format!("v{k}")));
    if with_t {
        names.push("t".into());
    }
    names
}

/// `x_k -> 2*i*pi*v_k` on a polynomial in `(x1..xd, t)`, giving one in
/// `(pi, v1..vd, t)`.
fn lift_to_v(p: &MultiPoly) -> MultiPoly {
    let nv = p.nvars();
    let mut out = MultiPoly::zero(nv + 1);
    for (e, c) in p.terms() {
        let deg: u32 = e[..nv - 1].iter().sum();
        let mut coef = c.clone();
        for _ in 0..deg {
            coef = &coef * &GaussianRational::new(Rational::zero(), Rational::from_i64(2));
        }
        let mut e2 = Vec::with_capacity(nv + 1);
        e2.push(deg);
        e2.extend_from_slice(e);
        out.add_term(e2, &coef);
    }
    out
}

/// Condition polynomial in `x` rendered as a normalized equation in `v`:
/// square-free, with common powers of pi and constant factors removed.
fn condition_string(c: &MultiPoly, d: usize) -> String {
    let mut g = c.clone();
    for k in 0..d {
        g = g.gcd(&c.derivative(k));
    }
    let sqfree = c.div_exact(&g).expect("gcd divides");
    let lifted = lift_to_v(&sqfree);
    let min_pi = lifted.terms().map(|(e, _)| e[0]).min().unwrap_or(0);
    // drop the trailing t slot (conditions are t-free) and the common pi power
    let stripped = MultiPoly::from_terms(
        d + 1,
        lifted.terms().map(|(e, c)| {
            let mut e2 = e[..d + 1].to_vec();
            e2[0] -= min_pi;
            (e2, c.clone())
        }),
    )
    .normalized_for_display();
    let names = screening_names(d, false);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    format!("{} = 0", stripped.to_string_with(&refs))
}

/// Resultant in the last variable via the Sylvester matrix.
fn resultant_t(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let k = a.nvars() - 1;
    let ca = a.coefficients_in(k);
    let cb = b.coefficients_in(k);
    let (da, db) = (ca.len() - 1, cb.len() - 1);
    let size = da + db;
    let zero = MultiPoly::zero(a.nvars());
    let mut rows = vec![vec![zero.clone(); size]; size];
    for i in 0..db {
        for (j, c) in ca.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..da {
        for (j, c) in cb.iter().rev().enumerate() {
            rows[db + i][i + j] = c.clone();
        }
    }
    bareiss_det(&rows, &zero)
}

/// Treat `v` as indeterminates: generic rank, the t-primitive gcd of the
/// maximal minors, and necessary conditions on `v` for a rank drop.
pub fn generic_frequency_analysis(m: &MultiPolyMatrix) -> GenericScreening {
    let d = m.d();
    let nv = d + 1;
    let rows = m.to_rows();
    let zero = MultiPoly::zero(nv);
    let rho = bareiss_rank(&rows);
    if rho == 0 {
        return GenericScreening {
            generic_rank: 0,
            gcd: MultiPoly::one(nv + 1),
            t_dependent: false,
            exceptional_conditions: Vec::new(),
        };
    }
    let mut minors = Vec::new();
    for_each_minor(&rows, rho, &zero, |p| {
        if !p.is_zero() {
            minors.push(p);
        }
        true
    });
    let full = minors.iter().fold(zero.clone(), |g, p| g.gcd(p));
    let prim = full.div_exact(&full.content_in(d)).expect("content divides");
    let t_dependent = prim.degree_in(d).unwrap_or(0) > 0;
    let gcd = lift_to_v(&prim).normalized_for_display();
    if t_dependent {
        return GenericScreening {
            generic_rank: rho,
            gcd,
            t_dependent,
            exceptional_conditions: Vec::new(),
        };
    }

    let mut conds: Vec<MultiPoly> = minors.iter().filter(|p| p.degree_in(d) == Some(0)).cloned().collect();
    if let Some(a) = minors
        .iter()
        .filter(|p| p.degree_in(d).unwrap_or(0) > 0)
        .min_by_key(|p| p.degree_in(d))
    {
        for b in minors.iter().filter(|p| p.degree_in(d).unwrap_or(0) > 0) {
            if std::ptr::eq(a, b) {
                continue;
            }
            conds.push(resultant_t(a, b));
        }
    }
    let conds: Vec<MultiPoly> = conds
        .into_iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.normalized())
        .collect();
    // a nonzero constant condition can never vanish
    if conds.iter().any(MultiPoly::is_constant) {
        return GenericScreening {
            generic_rank: rho,
            gcd,
            t_dependent,
            exceptional_conditions: Vec::new(),
        };
    }
    let mut kept: Vec<MultiPoly> = Vec::new();
    for (i, c) in conds.iter().enumerate() {
        let implied = conds.iter().enumerate().any(|(j, o)| {
            j != i && c.div_exact(o).is_some() && (o.div_exact(c).is_none() || j < i)
        });
        if !implied {
            kept.push(c.clone());
        }
    }
    GenericScreening {
        generic_rank: rho,
        gcd,
        t_dependent,
        exceptional_conditions: kept.iter().map(|c| condition_string(c, d)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatrix::{format_unipoly, parse_matrix, parse_output_poly};

    fn mat(rows: &[&[&str]]) -> UniPolyMatrix {
        UniPolyMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|s| parse_output_poly(s).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    fn mode(m: &MultiPolyMatrix, n: i64) -> ControllabilityVerdict {
        let f = FrequencyLattice::identity(1).frequency_from_mode(&[n]).unwrap();
        analyze_mode(m, &f).unwrap()
    }

    #[test]
    fn constant_rank_examples() {
        let cr = constant_rank_test(&mat(&[&["t + 4*pi^2"]]));
        assert_eq!((cr.constant, cr.rank), (false, 1));
        assert_eq!(format_unipoly(&cr.gcd_of_max_minors), "t + 4*pi^2");
        let cr = constant_rank_test(&mat(&[&["t + 2*i*pi", "-1"]]));
        assert_eq!((cr.constant, cr.rank, cr.gcd_of_max_minors.is_one()), (true, 1, true));
        let cr = constant_rank_test(&UniPolyMatrix::zeros(2, 3));
        assert_eq!((cr.constant, cr.rank, cr.gcd_of_max_minors.is_one()), (true, 0, true));
    }

    #[test]
    fn torsion_examples() {
        let (free, w) = torsion_test(&mat(&[&["t"]])).unwrap();
        assert!(!free);
        let w = w.unwrap();
        assert!(w.row[0].is_unit());
        assert_eq!(format_unipoly(&w.annihilator), "t");
        assert!(check_torsion_witness(&mat(&[&["t"]]), &w).unwrap());
        assert_eq!(torsion_test(&mat(&[&["t", "-1"]])).unwrap(), (true, None));
        assert_eq!(torsion_test(&UniPolyMatrix::identity(3)).unwrap(), (true, None));
    }

    #[test]
    fn canonical_systems() {
        let heat = parse_matrix("[[t - x1^2]]", 1).unwrap();
        for n in -2..=2 {
            let v = mode(&heat, n);
            assert!(!v.controllable);
            let expect = if n == 0 { "t".to_string() } else { format!("t + {}*pi^2", 4 * n * n) };
            assert_eq!(format_unipoly(v.failure_factor.as_ref().unwrap()), expect);
        }
        let tr = parse_matrix("[[t + x1, -1]]", 1).unwrap();
        assert!((-2..=2).all(|n| mode(&tr, n).controllable));
        let xt = parse_matrix("[[x1, t]]", 1).unwrap();
        assert!(mode(&xt, 1).controllable);
        assert!(!mode(&xt, 0).controllable);
    }

    #[test]
    fn box_report() {
        let heat = parse_matrix("[[t - x1^2]]", 1).unwrap();
        let r = analyze_box(&heat, &FrequencyLattice::identity(1), 1).unwrap();
        let modes: Vec<i64> = r.verdicts.iter().map(|v| v.frequency.mode[0]).collect();
        assert_eq!(modes, vec![-1, 0, 1]);
        assert!(!r.overall_controllable_on_box);
        let tr = parse_matrix("[[t + x1, -1]]", 1).unwrap();
        assert!(analyze_box(&tr, &FrequencyLattice::identity(1), 2).unwrap().overall_controllable_on_box);
        assert_eq!(analyze_box(&tr, &FrequencyLattice::identity(1), 0).unwrap().verdicts.len(), 1);
    }

    #[test]
    fn screening_examples() {
        let heat = generic_frequency_analysis(&parse_matrix("[[t - x1^2]]", 1).unwrap());
        assert_eq!(heat.generic_rank, 1);
        assert!(heat.t_dependent);
        assert_eq!(heat.gcd_string(), "t + 4*pi^2*v1^2");

        let xt = generic_frequency_analysis(&parse_matrix("[[x1, t]]", 1).unwrap());
        assert_eq!(xt.generic_rank, 1);
        assert!(!xt.t_dependent);
        assert_eq!(xt.gcd_string(), "1");
        assert_eq!(xt.exceptional_conditions, vec!["v1 = 0".to_string()]);

        let zero = generic_frequency_analysis(&parse_matrix("[[0, 0]]", 1).unwrap());
        assert_eq!((zero.generic_rank, zero.t_dependent), (0, false));
        assert!(zero.exceptional_conditions.is_empty());

        let tr = generic_frequency_analysis(&parse_matrix("[[t + x1, -1]]", 1).unwrap());
        assert!(tr.exceptional_conditions.is_empty());
    }

    #[test]
    fn screening_resultant_condition() {
        // minors x1*t - 1 and t + x2: common root iff x1*x2 + 1 = 0
        let m = parse_matrix("[[x1*t - 1, 0], [0, t + x2]]", 2).unwrap();
        let s = generic_frequency_analysis(&m);
        assert_eq!(s.generic_rank, 2);
        assert!(s.t_dependent);
        let m = parse_matrix("[[x1*t - 1, t + x2]]", 2).unwrap();
        let s = generic_frequency_analysis(&m);
        assert_eq!(s.generic_rank, 1);
        assert!(!s.t_dependent);
        assert_eq!(s.exceptional_conditions.len(), 1);
        assert!(s.exceptional_conditions[0].contains("v1*v2"), "{:?}", s.exceptional_conditions);
    }
}
