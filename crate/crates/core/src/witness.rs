//! Connecting trajectories for a controllable mode, built by patching latent
//! variables of an image representation with a smooth cutoff, plus an
//! independent finite-difference verifier.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analyzer::analyze_mode;
use crate::error::{Error, ParseError, Result};
use crate::exactfield::{GaussianRational, Rational};
use crate::polymatrix::parser::{parse_with, Target};
use crate::polymatrix::{substitute_frequency, Frequency, MultiPolyMatrix, UniPolyMatrix};
use crate::smith::kernel_representation;

/// Smooth function of `t`, closed under differentiation.
#[derive(Clone, Debug)]
pub struct ExprFunction(Arc<Node>);

#[derive(Debug)]
enum Node {
    Const(Complex64),
    T,
    Sum(Vec<ExprFunction>),
    Product(Vec<ExprFunction>),
    Pow(ExprFunction, u32),
    /// `exp(a*t + b)`
    Exp { a: Complex64, b: Complex64 },
    /// `f(s) * s^-k` with `s = a*t + b` and `f(s) = exp(-1/s)` for `s > 0`,
    /// zero otherwise. Smooth for every `k`.
    Bump { a: f64, b: f64, k: u32 },
    Quot(ExprFunction, ExprFunction),
}

impl ExprFunction {
    fn node(n: Node) -> Self {
        ExprFunction(Arc::new(n))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn real(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn t() -> Self {
        Self::node(Node::T)
    }

    pub fn exp_affine(a: Complex64, b: Complex64) -> Self {
        Self::node(Node::Exp { a, b })
    }

    /// The mollifier `exp(-1/s)` at `s = a*t + b`.
    pub fn mollifier(a: f64, b: f64) -> Self {
        Self::bump(a, b, 0)
    }

    fn bump(a: f64, b: f64, k: u32) -> Self {
        Self::node(Node::Bump { a, b, k })
    }

    pub fn pow(&self, k: u32) -> Self {
        match (k, self.as_const()) {
            (0, _) => Self::one(),
            (1, _) => self.clone(),
            (_, Some(c)) => Self::constant(c.powu(k)),
            _ => Self::node(Node::Pow(self.clone(), k)),
        }
    }

    /// `self / den`; `den` must not vanish where the quotient is evaluated.
    pub fn quot(&self, den: &ExprFunction) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        match den.as_const() {
            Some(c) => self * &Self::constant(c.inv()),
            None => Self::node(Node::Quot(self.clone(), den.clone())),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        &Self::constant(c) * self
    }

    fn as_const(&self) -> Option<Complex64> {
        match *self.0 {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(Complex64::new(0.0, 0.0))
    }

    /// `(a, b)` when the function is `a*t + b`.
    pub fn affine(&self) -> Option<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        match &*self.0 {
            Node::Const(c) => Some((zero, *c)),
            Node::T => Some((Complex64::new(1.0, 0.0), zero)),
            Node::Sum(fs) => fs.iter().try_fold((zero, zero), |(a, b), f| {
                let (fa, fb) = f.affine()?;
                Some((a + fa, b + fb))
            }),
            Node::Product(fs) => {
                let mut scale = Complex64::new(1.0, 0.0);
                let mut lin = None;
                for f in fs {
                    match f.as_const() {
                        Some(c) => scale *= c,
                        None if lin.is_none() => lin = Some(f.affine()?),
                        None => return None,
                    }
                }
                let (a, b) = lin.unwrap_or((zero, Complex64::new(1.0, 0.0)));
                Some((a * scale, b * scale))
            }
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        match &*self.0 {
            Node::Const(c) => *c,
            Node::T => Complex64::new(t, 0.0),
            Node::Sum(fs) => fs.iter().map(|f| f.eval(t)).sum(),
            Node::Product(fs) => fs.iter().map(|f| f.eval(t)).product(),
            Node::Pow(f, k) => f.eval(t).powu(*k),
            Node::Exp { a, b } => (a * t + b).exp(),
            Node::Bump { a, b, k } => {
                let s = a * t + b;
                if s <= 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new((-1.0 / s - *k as f64 * s.ln()).exp(), 0.0)
                }
            }
            Node::Quot(n, d) => n.eval(t) / d.eval(t),
        }
    }

    pub fn derivative(&self) -> ExprFunction {
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::T => Self::one(),
            Node::Sum(fs) => fs.iter().fold(Self::zero(), |acc, f| &acc + &f.derivative()),
            Node::Product(fs) => {
                let mut acc = Self::zero();
                for i in 0..fs.len() {
                    let di = fs[i].derivative();
                    if di.is_zero() {
                        continue;
                    }
                    let term = fs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .fold(di, |p, (_, f)| &p * f);
                    acc = &acc + &term;
                }
                acc
            }
            Node::Pow(f, k) => (&f.pow(k - 1) * &f.derivative()).scale(Complex64::new(*k as f64, 0.0)),
            Node::Exp { a, .. } => self.scale(*a),
            Node::Bump { a, b, k } => {
                let next = Self::bump(*a, *b, k + 2);
                let inner = if *k == 0 {
                    next
                } else {
                    &next - &Self::bump(*a, *b, k + 1).scale(Complex64::new(*k as f64, 0.0))
                };
                inner.scale(Complex64::new(*a, 0.0))
            }
            // (n/d)' = n'/d - (n/d) * d'/d keeps the denominator unsquared
            Node::Quot(n, d) => &n.derivative().quot(d) - &(self * &d.derivative().quot(d)),
        }
    }

    pub fn nth_derivative(&self, k: usize) -> ExprFunction {
        (0..k).fold(self.clone(), |f, _| f.derivative())
    }
}

impl Add for &ExprFunction {
    type Output = ExprFunction;

    fn add(self, rhs: &ExprFunction) -> ExprFunction {
        let mut parts: Vec<ExprFunction> = Vec::new();
        let mut c = Complex64::new(0.0, 0.0);
        for f in [self, rhs] {
            match &*f.0 {
                Node::Const(v) => c += v,
                Node::Sum(fs) => parts.extend(fs.iter().cloned()),
                _ => parts.push(f.clone()),
            }
        }
        if c != Complex64::new(0.0, 0.0) {
            parts.push(ExprFunction::constant(c));
        }
        match parts.len() {
            0 => ExprFunction::zero(),
            1 => parts.pop().expect("one part"),
            _ => ExprFunction::node(Node::Sum(parts)),
        }
    }
}

impl Sub for &ExprFunction {
    type Output = ExprFunction;

    fn sub(self, rhs: &ExprFunction) -> ExprFunction {
        self + &(-rhs)
    }
}

impl Neg for &ExprFunction {
    type Output = ExprFunction;

    fn neg(self) -> ExprFunction {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &ExprFunction {
    type Output = ExprFunction;

    fn mul(self, rhs: &ExprFunction) -> ExprFunction {
        let mut parts: Vec<ExprFunction> = Vec::new();
        let mut c = Complex64::new(1.0, 0.0);
        for f in [self, rhs] {
            match &*f.0 {
                Node::Const(v) => c *= v,
                Node::Product(fs) => parts.extend(fs.iter().cloned()),
                _ => parts.push(f.clone()),
            }
        }
        if c == Complex64::new(0.0, 0.0) {
            return ExprFunction::zero();
        }
        if c != Complex64::new(1.0, 0.0) || parts.is_empty() {
            parts.insert(0, ExprFunction::constant(c));
        }
        match parts.len() {
            1 => parts.pop().expect("one part"),
            _ => ExprFunction::node(Node::Product(parts)),
        }
    }
}

impl fmt::Display for ExprFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[ExprFunction], sep: &str| -> fmt::Result {
            write!(f, "(")?;
            for (k, g) in fs.iter().enumerate() {
                if k > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{g}")?;
            }
            write!(f, ")")
        };
        match &*self.0 {
            Node::Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Node::Const(c) => write!(f, "({} + {}*i)", c.re, c.im),
            Node::T => write!(f, "t"),
            Node::Sum(fs) => join(f, fs, " + "),
            Node::Product(fs) => join(f, fs, "*"),
            Node::Pow(g, k) => write!(f, "{g}^{k}"),
            Node::Exp { a, b } => write!(f, "exp(({a})*t + ({b}))"),
            Node::Bump { a, b, k } => write!(f, "bump{k}({a}*t + {b})"),
            Node::Quot(n, d) => write!(f, "{n}/{d}"),
        }
    }
}

/// `chi(t) = f(T - t) / (f(T - t) + f(t))`: 1 for `t <= 0`, 0 for `t >= T`.
pub fn build_cutoff(horizon: &Rational) -> Result<ExprFunction> {
    let big_t = horizon.to_f64();
    if big_t.is_nan() || big_t <= 0.0 {
        return Err(Error::config("time_horizon", "must be positive"));
    }
    let left = ExprFunction::mollifier(-1.0, big_t);
    let right = ExprFunction::mollifier(1.0, 0.0);
    Ok(left.quot(&(&left + &right)))
}

pub fn differentiate(g: &ExprFunction) -> ExprFunction {
    g.derivative()
}

/// Component `k` is `sum_j P[k][j](d/dt) l_j`, with pi evaluated at `pi_approx`.
pub fn apply_operator(p: &UniPolyMatrix, latent: &[ExprFunction], pi_approx: f64) -> Result<Vec<ExprFunction>> {
    if p.cols() != latent.len() {
        return Err(Error::Dimension(format!(
            "operator has {} columns, got {} latent functions",
            p.cols(),
            latent.len()
        )));
    }
    let mut derivs: Vec<Vec<ExprFunction>> = latent.iter().map(|l| vec![l.clone()]).collect();
    let mut out = Vec::with_capacity(p.rows());
    for i in 0..p.rows() {
        let mut acc = ExprFunction::zero();
        for (j, ds) in derivs.iter_mut().enumerate() {
            for (e, c) in p.get(i, j).coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                while ds.len() <= e {
                    let next = ds.last().expect("nonempty").derivative();
                    ds.push(next);
                }
                acc = &acc + &ds[e].scale(c.to_complex(pi_approx)?);
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// The signal of one spatial mode.
#[derive(Clone, Debug)]
pub struct ModeTrajectory {
    pub frequency: Frequency,
    pub components: Vec<ExprFunction>,
}

/// The patched trajectory `w` and the two trajectories it connects.
#[derive(Clone, Debug)]
pub struct Connection {
    pub w: ModeTrajectory,
    pub w1: ModeTrajectory,
    pub w2: ModeTrajectory,
    /// Image representation used for the construction, `M_v N = 0`.
    pub image: UniPolyMatrix,
}

/// Builds `w = N(d/dt)(chi l1 + (1 - chi) l2)` for a controllable mode.
pub fn connect(
    m: &MultiPolyMatrix,
    f: &Frequency,
    l1: &[ExprFunction],
    l2: &[ExprFunction],
    horizon: &Rational,
    pi_approx: f64,
) -> Result<Connection> {
    let verdict = analyze_mode(m, f)?;
    if !verdict.controllable {
        let factor = verdict
            .failure_factor
            .as_ref()
            .map(crate::polymatrix::format_unipoly)
            .unwrap_or_default();
        return Err(Error::NotControllable(format!("mode {:?}, invariant factor {factor}", f.mode)));
    }
    let image = kernel_representation(&substitute_frequency(m, f)?)?;
    let k = image.cols();
    if l1.len() != k || l2.len() != k {
        return Err(Error::Dimension(format!(
            "mode {:?} needs {k} latent functions, got {} and {}",
            f.mode,
            l1.len(),
            l2.len()
        )));
    }
    let chi = build_cutoff(horizon)?;
    let rest = &ExprFunction::one() - &chi;
    let patched: Vec<ExprFunction> = l1.iter().zip(l2).map(|(a, b)| &(&chi * a) + &(&rest * b)).collect();
    let traj = |ls: &[ExprFunction]| -> Result<ModeTrajectory> {
        Ok(ModeTrajectory {
            frequency: f.clone(),
            components: apply_operator(&image, ls, pi_approx)?,
        })
    };
    Ok(Connection {
        w: traj(&patched)?,
        w1: traj(l1)?,
        w2: traj(l2)?,
        image,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl GridSpec {
    /// 401 uniform points on `[-T, 2T]`.
    pub fn default_for(horizon: f64) -> Self {
        GridSpec {
            t_min: -horizon,
            t_max: 2.0 * horizon,
            points: 401,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.points < 2 {
            return vec![self.t_min; self.points];
        }
        let h = (self.t_max - self.t_min) / (self.points - 1) as f64;
        (0..self.points).map(|k| self.t_min + h * k as f64).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessTolerances {
    pub residual_tol: f64,
    pub match_tol: f64,
    pub fd_step: f64,
}

impl Default for WitnessTolerances {
    fn default() -> Self {
        WitnessTolerances {
            residual_tol: 1e-6,
            match_tol: 1e-10,
            fd_step: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub max_residual: f64,
    pub left_match_error: f64,
    pub right_match_error: f64,
    pub grid: GridSpec,
    pub tolerances: WitnessTolerances,
    pub pass: bool,
}

/// Fornberg weights for the `order`-th derivative at 0 from the given nodes.
fn fd_weights(nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Central stencil with fourth-order accuracy for the `order`-th derivative.
fn central_stencil(order: usize, h: f64) -> Vec<(f64, f64)> {
    let half = (order + 1) / 2 + 1;
    let offsets: Vec<f64> = (-(half as i64)..=half as i64).map(|k| k as f64 * h).collect();
    let w = fd_weights(&offsets, order);
    offsets.into_iter().zip(w).filter(|(_, w)| *w != 0.0).collect()
}

/// Applies `M(2*pi*i*v, d/dt)` to `w` by central finite differences and
/// compares `w` with `w1` on `t < 0` and with `w2` on `t > T`.
#[allow(clippy::too_many_arguments)]
pub fn verify_witness(
    m: &MultiPolyMatrix,
    f: &Frequency,
    w: &ModeTrajectory,
    w1: &ModeTrajectory,
    w2: &ModeTrajectory,
    horizon: f64,
    grid: &GridSpec,
    pi_approx: f64,
    tol: &WitnessTolerances,
) -> Result<WitnessReport> {
    let mv = substitute_frequency(m, f)?;
    let n = mv.cols();
    for traj in [w, w1, w2] {
        if traj.components.len() != n {
            return Err(Error::Dimension(format!(
                "trajectory has {} components, system has {n} columns",
                traj.components.len()
            )));
        }
    }
    let coeffs: Vec<Vec<Vec<Complex64>>> = (0..mv.rows())
        .map(|i| (0..n).map(|j| mv.get(i, j).to_complex_coeffs(pi_approx)).collect())
        .collect::<Result<_>>()?;
    let max_order = coeffs.iter().flatten().map(|c| c.len()).max().unwrap_or(0);
    let stencils: Vec<Vec<(f64, f64)>> = (0..max_order)
        .map(|e| if e == 0 { vec![(0.0, 1.0)] } else { central_stencil(e, tol.fd_step) })
        .collect();
    let ts = grid.points();
    let per_point: Vec<(f64, f64, f64)> = ts
        .par_iter()
        .map(|&t| {
            let mut derivs = vec![vec![Complex64::new(0.0, 0.0); max_order]; n];
            for (j, dj) in derivs.iter_mut().enumerate() {
                for (e, st) in stencils.iter().enumerate() {
                    dj[e] = st
                        .iter()
                        .map(|(off, wt)| w.components[j].eval(t + off) * wt)
                        .sum::<Complex64>();
                }
            }
            let residual = coeffs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(j, cs)| cs.iter().zip(&derivs[j]).map(|(c, d)| c * d).sum::<Complex64>())
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            let diff = |other: &ModeTrajectory| {
                (0..n)
                    .map(|j| (w.components[j].eval(t) - other.components[j].eval(t)).norm())
                    .fold(0.0, f64::max)
            };
            let left = if t < 0.0 { diff(w1) } else { 0.0 };
            let right = if t > horizon { diff(w2) } else { 0.0 };
            (residual, left, right)
        })
        .collect();
    let fold = |sel: fn(&(f64, f64, f64)) -> f64| {
        per_point.iter().map(sel).fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
    };
    let max_residual = fold(|p| p.0);
    let left_match_error = fold(|p| p.1);
    let right_match_error = fold(|p| p.2);
    let pass = max_residual <= tol.residual_tol
        && left_match_error <= tol.match_tol
        && right_match_error <= tol.match_tol;
    Ok(WitnessReport {
        max_residual,
        left_match_error,
        right_match_error,
        grid: grid.clone(),
        tolerances: *tol,
        pass,
    })
}

/// Samples of `w(x, t) = sum_v exp(2*pi*i*v.x) T_v(t)`.
#[derive(Clone, Debug)]
pub struct SpatialField {
    pub d: usize,
    pub components: usize,
    /// `(x, t, component, value)`
    pub samples: Vec<(Vec<f64>, f64, usize, Complex64)>,
}

pub fn synthesize_spatial(
    modes: &[ModeTrajectory],
    x_grid: &[Vec<f64>],
    t_grid: &[f64],
    pi_approx: f64,
) -> Result<SpatialField> {
    let Some(first) = modes.first() else {
        return Err(Error::Dimension("no modes to synthesize".into()));
    };
    let d = first.frequency.v.len();
    let ncomp = first.components.len();
    let mut seen = HashSet::new();
    for mode in modes {
        if mode.frequency.v.len() != d || mode.components.len() != ncomp {
            return Err(Error::Dimension("modes differ in dimension or component count".into()));
        }
        if !seen.insert(&mode.frequency.v) {
            return Err(Error::Dimension(format!("frequency {:?} appears twice", mode.frequency.mode)));
        }
    }
    if let Some(x) = x_grid.iter().find(|x| x.len() != d) {
        return Err(Error::Dimension(format!("grid point {x:?} is not in R^{d}")));
    }
    // signal values per mode, time and component
    let signals: Vec<Vec<Vec<Complex64>>> = modes
        .par_iter()
        .map(|mode| t_grid.iter().map(|&t| mode.components.iter().map(|c| c.eval(t)).collect()).collect())
        .collect();
    let freqs: Vec<Vec<f64>> = modes.iter().map(|m| m.frequency.v.iter().map(Rational::to_f64).collect()).collect();
    let samples = x_grid
        .par_iter()
        .flat_map_iter(|x| {
            let phases: Vec<Complex64> = freqs
                .iter()
                .map(|v| {
                    let dot: f64 = v.iter().zip(x).map(|(a, b)| a * b).sum();
                    Complex64::new(0.0, 2.0 * pi_approx * dot).exp()
                })
                .collect();
            let signals = &signals;
            t_grid.iter().enumerate().flat_map(move |(k, &t)| {
                let phases = phases.clone();
                (0..ncomp).map(move |c| {
                    let value = phases.iter().zip(signals).map(|(p, s)| p * s[k][c]).sum();
                    (x.clone(), t, c, value)
                })
            })
        })
        .collect();
    Ok(SpatialField {
        d,
        components: ncomp,
        samples,
    })
}

impl SpatialField {
    /// CSV with header `x_1,...,x_d,t,component_index,re,im`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let mut header: Vec<String> = (1..=self.d).map(|k| format!("x_{k}")).collect();
        header.extend(["t", "component_index", "re", "im"].map(String::from));
        writeln!(out, "{}", header.join(","))?;
        for (x, t, c, v) in &self.samples {
            for xi in x {
                write!(out, "{xi},")?;
            }
            writeln!(out, "{t},{c},{},{}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Parser target for latent functions: `t`, `i`, `pi`, `exp` of an affine
/// argument, `+ - * ^`, and division by constants.
struct LatentTarget {
    pi_approx: f64,
}

impl Target for LatentTarget {
    type Value = ExprFunction;

    fn constant(&self, c: GaussianRational) -> ExprFunction {
        ExprFunction::constant(c.to_complex())
    }

    fn symbol(&self, name: &str) -> std::result::Result<ExprFunction, String> {
        match name {
            "t" => Ok(ExprFunction::t()),
            "pi" => Ok(ExprFunction::real(self.pi_approx)),
            _ => Err(format!("unknown symbol `{name}`; expected t, pi or i")),
        }
    }

    fn add(&self, a: ExprFunction, b: ExprFunction) -> ExprFunction {
        &a + &b
    }

    fn sub(&self, a: ExprFunction, b: ExprFunction) -> ExprFunction {
        &a - &b
    }

    fn mul(&self, a: ExprFunction, b: ExprFunction) -> ExprFunction {
        &a * &b
    }

    fn neg(&self, a: ExprFunction) -> ExprFunction {
        -&a
    }

    fn pow(&self, a: ExprFunction, k: u32) -> ExprFunction {
        a.pow(k)
    }

    fn allows_division(&self) -> bool {
        true
    }

    fn div(&self, a: ExprFunction, b: ExprFunction) -> std::result::Result<ExprFunction, String> {
        match b.as_const() {
            Some(c) if c != Complex64::new(0.0, 0.0) => Ok(a.quot(&b)),
            Some(_) => Err("division by zero".into()),
            None => Err("divisor must be constant".into()),
        }
    }

    fn call(&self, name: &str, arg: ExprFunction) -> std::result::Result<ExprFunction, String> {
        if name != "exp" {
            return Err(format!("unknown function `{name}`; only exp is available"));
        }
        match arg.affine() {
            Some((a, b)) => Ok(ExprFunction::exp_affine(a, b)),
            None => Err("exp argument must be affine in t".into()),
        }
    }
}

/// Parses a latent function such as `exp(2*t) + t^2/3`.
pub fn parse_latent(src: &str, pi_approx: f64) -> std::result::Result<ExprFunction, ParseError> {
    parse_with(src, &LatentTarget { pi_approx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymatrix::{parse_matrix, parse_output_poly, FrequencyLattice};
    use crate::unipoly::UniPoly;

    const PI: f64 = std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn cutoff_plateaus_and_midpoint() {
        let chi = build_cutoff(&Rational::from_i64(2)).unwrap();
        assert_eq!(chi.eval(-1.0), Complex64::new(1.0, 0.0));
        assert_eq!(chi.eval(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(chi.eval(3.0), Complex64::new(0.0, 0.0));
        assert!(close(chi.eval(1.0), Complex64::new(0.5, 0.0), 1e-15));
        for k in 0..60 {
            let v = chi.eval(-0.5 + k as f64 * 0.05).re;
            assert!((0.0..=1.0).contains(&v));
        }
        let dchi = chi.derivative();
        assert_eq!(dchi.eval(-1.0).norm(), 0.0);
        assert_eq!(chi.nth_derivative(3).eval(2.5).norm(), 0.0);
        assert!(build_cutoff(&Rational::zero()).is_err());
    }

    #[test]
    fn derivative_examples() {
        let e = parse_latent("exp(3*t)", PI).unwrap();
        assert!(close(e.derivative().eval(0.4), Complex64::new(1.2f64.exp() * 3.0, 0.0), 1e-12));
        let sq = parse_latent("t^2", PI).unwrap();
        assert!(close(sq.derivative().eval(1.5), Complex64::new(3.0, 0.0), 1e-15));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let h = 1e-3;
        let fs = [
            parse_latent("t^3 - 2*t + exp(i*t)/3", PI).unwrap(),
            build_cutoff(&Rational::from_i64(1)).unwrap(),
            &build_cutoff(&Rational::ratio(1, 2)).unwrap() * &parse_latent("exp(t)", PI).unwrap(),
        ];
        for f in &fs {
            let df = f.derivative();
            let d3 = f.nth_derivative(3);
            for k in 0..40 {
                let t = -0.3 + 0.037 * k as f64;
                let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
                let local = [t - h, t, t + h].iter().map(|&s| d3.eval(s).norm()).fold(0.0, f64::max);
                let bound = 10.0 * h * h * local + 1e-10;
                assert!((df.eval(t) - fd).norm() <= bound, "{f} at {t}");
            }
        }
    }

    #[test]
    fn apply_operator_examples() {
        let e = parse_latent("exp(t)", PI).unwrap();
        let p = UniPolyMatrix::from_rows(vec![vec![parse_output_poly("t").unwrap()]]).unwrap();
        let out = apply_operator(&p, &[e.clone()], PI).unwrap();
        assert!(close(out[0].eval(0.7), e.eval(0.7), 1e-14));

        let id = UniPolyMatrix::identity(2);
        let ls = [e.clone(), parse_latent("t", PI).unwrap()];
        let out = apply_operator(&id, &ls, PI).unwrap();
        assert!(close(out[1].eval(2.0), Complex64::new(2.0, 0.0), 0.0));

        let p = UniPolyMatrix::from_rows(vec![vec![parse_output_poly("t^2").unwrap(), UniPoly::one()]]).unwrap();
        let out = apply_operator(&p, &[parse_latent("t^3", PI).unwrap(), parse_latent("-6*t", PI).unwrap()], PI).unwrap();
        for k in 0..20 {
            assert!(out[0].eval(k as f64 * 0.3 - 3.0).norm() <= 1e-12);
        }
        assert!(apply_operator(&p, &[e], PI).is_err());
    }

    fn transport() -> MultiPolyMatrix {
        parse_matrix("[[t + x1, -1]]", 1).unwrap()
    }

    #[test]
    fn transport_connection_verifies() {
        let lat = FrequencyLattice::identity(1);
        let horizon = Rational::from_i64(1);
        let zero = [ExprFunction::zero()];
        let ex = [parse_latent("exp(t)", PI).unwrap()];
        for n in -2..=2 {
            let f = lat.frequency_from_mode(&[n]).unwrap();
            let c = connect(&transport(), &f, &zero, &ex, &horizon, PI).unwrap();
            let grid = GridSpec::default_for(1.0);
            let tol = WitnessTolerances::default();
            let r = verify_witness(&transport(), &f, &c.w, &c.w1, &c.w2, 1.0, &grid, PI, &tol).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.left_match_error <= 1e-12 && r.right_match_error <= 1e-12);

            let mut bad = c.w.clone();
            bad.components[0] = &bad.components[0] + &ExprFunction::real(1e-3);
            let r = verify_witness(&transport(), &f, &bad, &c.w1, &c.w2, 1.0, &grid, PI, &tol).unwrap();
            assert!(!r.pass);
        }
    }

    #[test]
    fn equal_latents_give_equal_trajectories() {
        let f = FrequencyLattice::identity(1).frequency_from_mode(&[1]).unwrap();
        let l = [parse_latent("exp(-t) + t^2", PI).unwrap()];
        let c = connect(&transport(), &f, &l, &l, &Rational::from_i64(1), PI).unwrap();
        for k in 0..30 {
            let t = -1.0 + 0.1 * k as f64;
            for j in 0..2 {
                assert!(close(c.w.components[j].eval(t), c.w1.components[j].eval(t), 1e-12));
                assert!(close(c.w.components[j].eval(t), c.w2.components[j].eval(t), 1e-12));
            }
        }
    }

    #[test]
    fn heat_is_rejected() {
        let heat = parse_matrix("[[t - x1^2]]", 1).unwrap();
        let f = FrequencyLattice::identity(1).frequency_from_mode(&[1]).unwrap();
        let err = connect(&heat, &f, &[], &[], &Rational::from_i64(1), PI).unwrap_err();
        assert!(matches!(err, Error::NotControllable(_)));
    }

    #[test]
    fn zero_system_has_zero_residual() {
        let zero = parse_matrix("[[0, 0]]", 1).unwrap();
        let f = FrequencyLattice::identity(1).frequency_from_mode(&[0]).unwrap();
        let l1 = [ExprFunction::zero(), ExprFunction::zero()];
        let l2 = [parse_latent("exp(t)", PI).unwrap(), parse_latent("t", PI).unwrap()];
        let c = connect(&zero, &f, &l1, &l2, &Rational::from_i64(1), PI).unwrap();
        let grid = GridSpec::default_for(1.0);
        let r = verify_witness(&zero, &f, &c.w, &c.w1, &c.w2, 1.0, &grid, PI, &WitnessTolerances::default()).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn fornberg_weights() {
        let w = fd_weights(&[-1.0, 0.0, 1.0], 2);
        assert_eq!(w, vec![1.0, -2.0, 1.0]);
        let st = central_stencil(1, 1.0);
        let expect = [(-2.0, 1.0 / 12.0), (-1.0, -2.0 / 3.0), (1.0, 2.0 / 3.0), (2.0, -1.0 / 12.0)];
        for ((o, w), (eo, ew)) in st.iter().zip(expect) {
            assert_eq!(*o, eo);
            assert!((w - ew).abs() < 1e-15);
        }
    }

    fn mode(n: i64, comps: Vec<ExprFunction>) -> ModeTrajectory {
        ModeTrajectory {
            frequency: FrequencyLattice::identity(1).frequency_from_mode(&[n]).unwrap(),
            components: comps,
        }
    }

    #[test]
    fn spatial_synthesis() {
        let xs: Vec<Vec<f64>> = (0..7).map(|k| vec![k as f64 / 7.0]).collect();
        let ts = [0.0, 0.5];
        let f = synthesize_spatial(&[mode(0, vec![ExprFunction::real(2.0)])], &xs, &ts, PI).unwrap();
        assert!(f.samples.iter().all(|s| close(s.3, Complex64::new(2.0, 0.0), 1e-15)));

        let f = synthesize_spatial(&[mode(2, vec![ExprFunction::one()])], &xs, &ts, PI).unwrap();
        assert!(f.samples.iter().all(|s| (s.3.norm() - 1.0).abs() < 1e-14));

        let sig = parse_latent("(1 + 2*i)*exp(i*t)", PI).unwrap();
        let conj = parse_latent("(1 - 2*i)*exp(-i*t)", PI).unwrap();
        let f = synthesize_spatial(&[mode(1, vec![sig]), mode(-1, vec![conj])], &xs, &ts, PI).unwrap();
        assert!(f.samples.iter().all(|s| s.3.im.abs() <= 1e-12));

        let dup = [mode(1, vec![ExprFunction::one()]), mode(1, vec![ExprFunction::one()])];
        assert!(synthesize_spatial(&dup, &xs, &ts, PI).is_err());

        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x_1,t,component_index,re,im\n"));
        assert_eq!(text.lines().count(), 1 + 7 * 2);
    }

    #[test]
    fn latent_parse_errors() {
        assert!(parse_latent("exp(t^2)", PI).is_err());
        assert!(parse_latent("sin(t)", PI).is_err());
        assert!(parse_latent("1/t", PI).is_err());
        assert!(close(parse_latent("pi/2", PI).unwrap().eval(0.0), Complex64::new(PI / 2.0, 0.0), 1e-15));
    }
}
