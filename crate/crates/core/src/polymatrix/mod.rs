//! System matrices `M(x1..xd, t)`, their parser and printer, the frequency
//! lattice, and the substitution `x_k -> 2*i*pi*v_k` that turns a system
//! matrix into one ODE matrix per spatial mode.

mod lattice;
mod multipoly;
pub mod parser;
mod unimatrix;

use std::fmt;

use num_complex::Complex64;

pub use lattice::{box_modes, Frequency, FrequencyLattice};
pub use multipoly::MultiPoly;
pub use unimatrix::UniPolyMatrix;

use crate::error::{Error, ParseError, Result};
use crate::exactfield::{FieldElement, GaussianRational, PiPoly, Rational};
use crate::unipoly::UniPoly;
use parser::Target;

/// Matrix of polynomials in `x1..xd, t`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPolyMatrix {
    d: usize,
    rows: usize,
    cols: usize,
    entries: Vec<MultiPoly>,
}

impl MultiPolyMatrix {
    pub fn new(d: usize, rows: Vec<Vec<MultiPoly>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::Dimension("system matrix needs at least one row and column".into()));
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        if rows.iter().flatten().any(|p| p.nvars() != d + 1) {
            return Err(Error::Dimension(format!("entries must be polynomials in x1..x{d}, t")));
        }
        Ok(MultiPolyMatrix {
            d,
            rows: m,
            cols: n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &MultiPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[MultiPoly] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<MultiPoly>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect()
    }
}

/// Bracketed form `[[e11, e12], [e21, e22]]`, re-parseable by [`parse_matrix`].
impl fmt::Display for MultiPolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_string_rows()
            .into_iter()
            .map(|r| format!("[{}]", r.join(", ")))
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

pub fn print_matrix(m: &MultiPolyMatrix) -> String {
    m.to_string()
}

/// Target for system input: polynomials in `x1..xd, t` over Q(i).
pub struct InputTarget {
    pub d: usize,
}

impl Target for InputTarget {
    type Value = MultiPoly;

    fn constant(&self, c: GaussianRational) -> MultiPoly {
        MultiPoly::constant(self.d + 1, c)
    }

    fn symbol(&self, name: &str) -> std::result::Result<MultiPoly, String> {
        if name == "t" {
            return Ok(MultiPoly::var(self.d + 1, self.d));
        }
        if name == "pi" {
            return Err("`pi` may not appear in input; it enters only through x_k -> 2*i*pi*v_k".into());
        }
        if let Some(idx) = name.strip_prefix('x') {
            if let Ok(k) = idx.parse::<usize>() {
                if k == 0 || k > self.d {
                    return Err(format!(
                        "variable index {k} in `{name}` is out of range: spatial dimension is d = {}",
                        self.d
                    ));
                }
                return Ok(MultiPoly::var(self.d + 1, k - 1));
            }
        }
        Err(format!("unknown symbol `{name}`; expected x1..x{}, t or i", self.d))
    }

    fn add(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
        &a + &b
    }

    fn sub(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
        &a - &b
    }

    fn mul(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
        &a * &b
    }

    fn neg(&self, a: MultiPoly) -> MultiPoly {
        -&a
    }

    fn pow(&self, a: MultiPoly, k: u32) -> MultiPoly {
        a.pow(k)
    }
}

/// Target for re-parsing reported polynomials: F[t] with the literal `pi`
/// and division by nonzero t-free expressions.
pub struct OutputTarget;

impl Target for OutputTarget {
    type Value = UniPoly;

    fn constant(&self, c: GaussianRational) -> UniPoly {
        UniPoly::constant(FieldElement::from_gaussian(c))
    }

    fn symbol(&self, name: &str) -> std::result::Result<UniPoly, String> {
        match name {
            "t" => Ok(UniPoly::t()),
            "pi" => Ok(UniPoly::constant(FieldElement::pi())),
            _ => Err(format!("unknown symbol `{name}`; expected t, pi or i")),
        }
    }

    fn add(&self, a: UniPoly, b: UniPoly) -> UniPoly {
        &a + &b
    }

    fn sub(&self, a: UniPoly, b: UniPoly) -> UniPoly {
        &a - &b
    }

    fn mul(&self, a: UniPoly, b: UniPoly) -> UniPoly {
        &a * &b
    }

    fn neg(&self, a: UniPoly) -> UniPoly {
        -&a
    }

    fn pow(&self, a: UniPoly, k: u32) -> UniPoly {
        a.pow(k)
    }

    fn allows_division(&self) -> bool {
        true
    }

    fn div(&self, a: UniPoly, b: UniPoly) -> std::result::Result<UniPoly, String> {
        if b.is_zero() {
            return Err("division by zero".into());
        }
        if b.coeffs().len() > 1 {
            return Err("divisor must not depend on t".into());
        }
        let inv = b.coeffs()[0].inv().map_err(|e| e.to_string())?;
        Ok(a.scale(&inv))
    }
}

/// Parse one entry in `x1..xd, t`.
pub fn parse_poly(src: &str, d: usize) -> std::result::Result<MultiPoly, ParseError> {
    parser::parse_with(src, &InputTarget { d })
}

/// Parse a matrix source: either the bracketed form `[[t - x1^2]]` or a JSON
/// array of arrays of entry strings.
pub fn parse_matrix(src: &str, d: usize) -> std::result::Result<MultiPolyMatrix, ParseError> {
    let is_json = src
        .chars()
        .find(|c| !c.is_whitespace() && *c != '[')
        .is_some_and(|c| c == '"');
    if is_json {
        let rows: Vec<Vec<String>> = serde_json::from_str(src)
            .map_err(|e| ParseError::new(e.line(), e.column(), e.to_string()))?;
        return parse_entries(&rows, d);
    }
    let target = InputTarget { d };
    let asts = parser::parse_matrix_ast(src, false)?;
    let rows = asts
        .iter()
        .map(|r| r.iter().map(|a| a.eval(&target)).collect::<std::result::Result<Vec<_>, _>>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    MultiPolyMatrix::new(d, rows).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Parse entry strings (as found in a config file). Error positions are
/// relative to the offending entry, which is named in the message.
pub fn parse_entries(rows: &[Vec<String>], d: usize) -> std::result::Result<MultiPolyMatrix, ParseError> {
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let mut r = Vec::with_capacity(row.len());
        for (j, s) in row.iter().enumerate() {
            let p = parse_poly(s, d).map_err(|e| {
                ParseError::new(e.line, e.column, format!("entry [{i}][{j}] `{s}`: {}", e.message))
            })?;
            r.push(p);
        }
        out.push(r);
    }
    MultiPolyMatrix::new(d, out).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

/// Parse a reported polynomial (invariant factor, Smith entry) back into F[t].
pub fn parse_output_poly(src: &str) -> std::result::Result<UniPoly, ParseError> {
    parser::parse_with(src, &OutputTarget)
}

/// Print an element of F[t] in the output grammar: a polynomial in `pi` and
/// `t`, wrapped as `(P)/(D)` over a common denominator when needed.
pub fn format_unipoly(p: &UniPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let den = p
        .coeffs()
        .iter()
        .fold(PiPoly::one(), |acc, c| acc.lcm(c.den()));
    let mut num = MultiPoly::zero(2);
    for (k, c) in p.coeffs().iter().enumerate() {
        let scaled = c.num() * &den.div_exact(c.den());
        for (j, g) in scaled.coeffs().iter().enumerate() {
            num.add_term(vec![j as u32, k as u32], g);
        }
    }
    let num_s = num.to_string_with(&["pi", "t"]);
    if den.is_one() {
        return num_s;
    }
    let den_poly = MultiPoly::from_terms(
        1,
        den.coeffs()
            .iter()
            .enumerate()
            .map(|(j, g)| (vec![j as u32], g.clone())),
    );
    format!("({num_s})/({})", den_poly.to_string_with(&["pi"]))
}

/// `x_k -> 2*i*pi*v_k`, exactly. Each t-coefficient of each entry becomes a
/// polynomial in pi.
pub fn substitute_frequency(m: &MultiPolyMatrix, f: &Frequency) -> Result<UniPolyMatrix> {
    if f.v.len() != m.d {
        return Err(Error::Dimension(format!(
            "frequency has {} components, system has d = {}",
            f.v.len(),
            m.d
        )));
    }
    let two_v: Vec<Rational> = f.v.iter().map(|v| v + v).collect();
    let mut out = UniPolyMatrix::zeros(m.rows, m.cols);
    for (idx, entry) in m.entries.iter().enumerate() {
        out.set(idx / m.cols, idx % m.cols, substitute_poly(entry, &two_v));
    }
    Ok(out)
}

fn substitute_poly(p: &MultiPoly, two_v: &[Rational]) -> UniPoly {
    let d = two_v.len();
    // table[e_t][E] accumulates the coefficient of pi^E t^{e_t}
    let mut table: Vec<Vec<GaussianRational>> = Vec::new();
    for (e, c) in p.terms() {
        let mut scale = Rational::one();
        let mut total = 0usize;
        for k in 0..d {
            for _ in 0..e[k] {
                scale *= &two_v[k];
            }
            total += e[k] as usize;
        }
        if scale.is_zero() {
            continue;
        }
        // i^total
        let unit = match total % 4 {
            0 => GaussianRational::one(),
            1 => GaussianRational::i(),
            2 => GaussianRational::from_int(-1),
            _ => GaussianRational::from_ints(0, -1),
        };
        let coef = &(c * &unit).scale(&scale);
        let et = e[d] as usize;
        if table.len() <= et {
            table.resize(et + 1, Vec::new());
        }
        let row = &mut table[et];
        if row.len() <= total {
            row.resize(total + 1, GaussianRational::zero());
        }
        row[total] += coef;
    }
    UniPoly::from_coeffs(
        table
            .into_iter()
            .map(|row| FieldElement::from_pipoly(PiPoly::from_coeffs(row)))
            .collect(),
    )
}

/// Floating evaluation of `M(2*pi*i*v, t)` computed directly from the
/// multivariate entries (independent of [`substitute_frequency`]).
pub fn numeric_eval(
    m: &MultiPolyMatrix,
    f: &Frequency,
    t: Complex64,
    pi_approx: f64,
) -> Result<Vec<Vec<Complex64>>> {
    if f.v.len() != m.d {
        return Err(Error::Dimension("frequency dimension mismatch".into()));
    }
    let mut point: Vec<Complex64> = f
        .v
        .iter()
        .map(|v| Complex64::new(0.0, 2.0 * pi_approx * v.to_f64()))
        .collect();
    point.push(t);
    (0..m.rows)
        .map(|i| m.row(i).iter().map(|p| p.eval_complex(&point)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn freq(v: Vec<Rational>) -> Frequency {
        Frequency { mode: vec![0; v.len()], v }
    }

    #[test]
    fn parse_examples() {
        let heat = parse_matrix("[[t - x1^2]]", 1).unwrap();
        assert_eq!((heat.rows(), heat.cols()), (1, 1));
        assert_eq!(heat.get(0, 0).to_string(), "t - x1^2");
        let tr = parse_matrix("[[t + x1, -1]]", 1).unwrap();
        assert_eq!((tr.rows(), tr.cols()), (1, 2));
        let sq = parse_matrix("[[x1, t], [t, x1]]", 1).unwrap();
        assert_eq!((sq.rows(), sq.cols()), (2, 2));
        let js = parse_matrix(r#"[["x1", "t"], ["t", "x1"]]"#, 1).unwrap();
        assert_eq!(js, sq);
    }

    #[test]
    fn parse_errors() {
        let e = parse_matrix("[[t + x9]]", 1).unwrap_err();
        assert!(e.message.contains("variable index 9"), "{e}");
        assert_eq!((e.line, e.column), (1, 7));
        assert!(parse_poly("x1^(1/2)", 1).is_err());
        assert!(parse_poly("pi*t", 1).is_err());
        let e = parse_entries(&[vec!["t".into(), "x1 +".into()]], 1).unwrap_err();
        assert!(e.message.contains("entry [0][1]"));
    }

    #[test]
    fn substitution_examples() {
        let heat = parse_matrix("[[t - x1^2]]", 1).unwrap();
        let s = substitute_frequency(&heat, &freq(vec![q(1, 1)])).unwrap();
        let four_pi2 = FieldElement::from_pipoly(PiPoly::monomial(GaussianRational::from_int(4), 2));
        let expect = UniPoly::from_coeffs(vec![four_pi2, FieldElement::one()]);
        assert_eq!(s.get(0, 0), &expect);
        assert_eq!(format_unipoly(s.get(0, 0)), "t + 4*pi^2");

        let s0 = substitute_frequency(&heat, &freq(vec![q(0, 1)])).unwrap();
        assert_eq!(s0.get(0, 0), &UniPoly::t());

        let m = parse_matrix("[[x1, t]]", 1).unwrap();
        let s = substitute_frequency(&m, &freq(vec![q(1, 2)])).unwrap();
        let i_pi = FieldElement::from_pipoly(PiPoly::monomial(GaussianRational::i(), 1));
        assert_eq!(s.get(0, 0), &UniPoly::constant(i_pi));
        assert_eq!(s.get(0, 1), &UniPoly::t());
    }

    #[test]
    fn numeric_examples() {
        let pi = std::f64::consts::PI;
        let heat = parse_matrix("[[t - x1^2]]", 1).unwrap();
        let z = numeric_eval(&heat, &freq(vec![q(1, 1)]), Complex64::new(0.0, 0.0), pi).unwrap();
        assert!((z[0][0] - Complex64::new(39.47841760435743, 0.0)).norm() < 1e-12);
        let m = parse_matrix("[[x1, t]]", 1).unwrap();
        let z = numeric_eval(&m, &freq(vec![q(0, 1)]), Complex64::new(0.0, 0.0), pi).unwrap();
        assert_eq!(z[0], vec![Complex64::new(0.0, 0.0); 2]);
        let zero = parse_matrix("[[0, 0]]", 1).unwrap();
        let z = numeric_eval(&zero, &freq(vec![q(3, 1)]), Complex64::new(1.0, 2.0), pi).unwrap();
        assert!(z[0].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn output_grammar_roundtrip() {
        let cases = ["t + 4*pi^2", "(t^2 - i*pi)/(pi + 1)", "1/2*i*t - 3/2", "(1 - 2*i)*pi*t^3 + 1"];
        for c in cases {
            let p = parse_output_poly(c).unwrap();
            let s = format_unipoly(&p);
            assert_eq!(parse_output_poly(&s).unwrap(), p, "{c} -> {s}");
        }
        assert_eq!(format_unipoly(&parse_output_poly("(t^2 - i*pi)/(pi + 1)").unwrap()), "(t^2 - i*pi)/(pi + 1)");
        assert!(parse_output_poly("1/t").is_err());
    }
}
