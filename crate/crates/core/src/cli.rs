//! Command-line front end: config loading, the four subcommands, report files.
//!
//! Exit codes: 0 success, 1 usage / config / parse error, 2 some mode not
//! controllable, 3 a numeric check failed (crosscheck inconsistent or witness
//! verification failed), 4 internal inconsistency between the exact
//! decision paths.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analyzer::{
    analyze_box, analyze_mode, generic_frequency_analysis, ControllabilityVerdict, GenericScreening, TorsionWitness,
};
use crate::crosscheck::{crosscheck_mode, RankSampleReport, PI_APPROX, PI_APPROX_BITS};
use crate::error::{Error, Result};
use crate::exactfield::{parse_rational, Rational};
use crate::polymatrix::{
    format_unipoly, parse_entries, parse_matrix, parse_output_poly, substitute_frequency, Frequency,
    FrequencyLattice, MultiPolyMatrix, UniPolyMatrix,
};
use crate::smith::{determinant, smith_form};
use crate::unipoly::UniPoly;
use crate::witness::{
    connect, parse_latent, synthesize_spatial, verify_witness, ExprFunction, GridSpec, WitnessReport,
    WitnessTolerances,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONTROLLABLE: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

const CAVEAT: &str = "Results cover only the tested modes |n_k| <= B. They do not certify \
controllability for all frequencies; see the generic-frequency screening for the remaining modes.";

#[derive(Parser, Debug)]
#[command(name = "perioctrl", version, about = "Exact controllability analysis for spatially periodic PDE systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide controllability on every mode of the frequency box.
    Analyze(CommonArgs),
    /// Smith decomposition of one mode.
    Smith(CommonArgs),
    /// Build and verify a connecting trajectory for one mode.
    Witness(CommonArgs),
    /// Numeric rank sampling against the exact verdicts.
    Crosscheck(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Integer mode `n1,..,nd` (default: all zeros).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mode: Option<Vec<i64>>,
    #[arg(long = "box")]
    pub box_radius: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Cached verdict table from `analyze` (crosscheck only).
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum Number {
    Int(i64),
    Text(String),
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum MatrixSource {
    Entries(Vec<Vec<String>>),
    Text(String),
}

#[derive(Deserialize, Debug, Clone, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    residual_tol: Option<f64>,
    match_tol: Option<f64>,
    rank_tol: Option<f64>,
    fd_step: Option<f64>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
struct RawLatent {
    l1: Vec<String>,
    l2: Vec<String>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    d: usize,
    #[serde(rename = "A")]
    a: Option<Vec<Vec<Number>>>,
    matrix: MatrixSource,
    box_radius: Option<u32>,
    time_horizon: Option<Number>,
    seed: Option<u64>,
    samples: Option<usize>,
    tolerances: Option<RawTolerances>,
    latent: Option<RawLatent>,
    out: Option<String>,
}

/// Validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub d: usize,
    pub lattice: FrequencyLattice,
    pub system: MultiPolyMatrix,
    pub box_radius: u32,
    pub time_horizon: Rational,
    pub seed: u64,
    pub samples: usize,
    pub witness_tol: WitnessTolerances,
    pub rank_tol: f64,
    pub latent: Option<(Vec<String>, Vec<String>)>,
    pub out: PathBuf,
}

fn number(field: &str, n: &Number) -> Result<Rational> {
    match n {
        Number::Int(k) => Ok(Rational::from_i64(*k)),
        Number::Text(s) => parse_rational(s).ok_or_else(|| Error::config(field, format!("`{s}` is not a rational"))),
    }
}

fn positive(field: &str, v: Option<f64>, default: f64) -> Result<f64> {
    let v = v.unwrap_or(default);
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(field, "must be positive"))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        if raw.d == 0 {
            return Err(Error::config("d", "must be at least 1"));
        }
        let lattice = match &raw.a {
            None => FrequencyLattice::identity(raw.d),
            Some(rows) => {
                if rows.len() != raw.d || rows.iter().any(|r| r.len() != raw.d) {
                    return Err(Error::config("A", format!("must be a {0}x{0} matrix", raw.d)));
                }
                let a = rows
                    .iter()
                    .map(|r| r.iter().map(|x| number("A", x)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                FrequencyLattice::new(a).map_err(|e| Error::config("A", e.to_string()))?
            }
        };
        let system = match &raw.matrix {
            MatrixSource::Entries(rows) => parse_entries(rows, raw.d),
            MatrixSource::Text(s) => parse_matrix(s, raw.d),
        }
        .map_err(|e| Error::config("matrix", e.to_string()))?;
        let time_horizon = match &raw.time_horizon {
            None => Rational::one(),
            Some(n) => number("time_horizon", n)?,
        };
        if time_horizon.is_negative() || time_horizon.is_zero() {
            return Err(Error::config("time_horizon", "must be positive"));
        }
        let tol = raw.tolerances.clone().unwrap_or_default();
        let defaults = WitnessTolerances::default();
        let witness_tol = WitnessTolerances {
            residual_tol: positive("tolerances.residual_tol", tol.residual_tol, defaults.residual_tol)?,
            match_tol: positive("tolerances.match_tol", tol.match_tol, defaults.match_tol)?,
            fd_step: positive("tolerances.fd_step", tol.fd_step, defaults.fd_step)?,
        };
        let samples = raw.samples.unwrap_or(50);
        if samples == 0 {
            return Err(Error::config("samples", "must be at least 1"));
        }
        Ok(RunConfig {
            d: raw.d,
            lattice,
            system,
            box_radius: raw.box_radius.unwrap_or(1),
            time_horizon,
            seed: raw.seed.unwrap_or(1),
            samples,
            witness_tol,
            rank_tol: positive("tolerances.rank_tol", tol.rank_tol, 1e-8)?,
            latent: raw.latent.map(|l| (l.l1, l.l2)),
            out: PathBuf::from(raw.out.unwrap_or_else(|| "out".into())),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn apply(&mut self, args: &CommonArgs) -> Result<()> {
        if let Some(b) = args.box_radius {
            self.box_radius = b;
        }
        if let Some(s) = args.seed {
            self.seed = s;
        }
        if let Some(n) = args.samples {
            if n == 0 {
                return Err(Error::config("samples", "must be at least 1"));
            }
            self.samples = n;
        }
        if let Some(o) = &args.out {
            self.out = o.clone();
        }
        Ok(())
    }

    fn frequency(&self, mode: Option<&[i64]>) -> Result<Frequency> {
        let zeros = vec![0; self.d];
        let n = mode.unwrap_or(&zeros);
        if n.len() != self.d {
            return Err(Error::config("mode", format!("expected {} components, got {}", self.d, n.len())));
        }
        self.lattice.frequency_from_mode(n)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct WitnessRow {
    pub row: Vec<String>,
    pub annihilator: String,
}

/// One row of the verdict table.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct VerdictRow {
    pub n: Vec<i64>,
    pub v: Vec<String>,
    pub generic_rank: usize,
    pub invariant_factors: Vec<String>,
    pub constant_rank: bool,
    pub torsion_free: bool,
    pub controllable: bool,
    pub verdict: String,
    pub failure_factor: Option<String>,
    pub torsion_witness: Option<WitnessRow>,
}

impl VerdictRow {
    pub fn from_verdict(v: &ControllabilityVerdict) -> Self {
        VerdictRow {
            n: v.frequency.mode.clone(),
            v: v.frequency.v.iter().map(Rational::to_string).collect(),
            generic_rank: v.generic_rank,
            invariant_factors: v.invariant_factors.iter().map(format_unipoly).collect(),
            constant_rank: v.constant_rank,
            torsion_free: v.torsion_free,
            controllable: v.controllable,
            verdict: if v.controllable { "controllable" } else { "NOT controllable" }.into(),
            failure_factor: v.failure_factor.as_ref().map(format_unipoly),
            torsion_witness: v.torsion_witness.as_ref().map(|w| WitnessRow {
                row: w.row.iter().map(format_unipoly).collect(),
                annihilator: format_unipoly(&w.annihilator),
            }),
        }
    }

    /// Rebuilds the verdict by re-parsing the polynomial strings.
    pub fn to_verdict(&self, lattice: &FrequencyLattice) -> Result<ControllabilityVerdict> {
        let parse = |s: &String| parse_output_poly(s).map_err(|e| Error::config("verdicts", e.to_string()));
        let polys = |xs: &[String]| xs.iter().map(parse).collect::<Result<Vec<UniPoly>>>();
        Ok(ControllabilityVerdict {
            frequency: lattice.frequency_from_mode(&self.n)?,
            generic_rank: self.generic_rank,
            invariant_factors: polys(&self.invariant_factors)?,
            constant_rank: self.constant_rank,
            torsion_free: self.torsion_free,
            controllable: self.controllable,
            failure_factor: self.failure_factor.as_ref().map(parse).transpose()?,
            torsion_witness: match &self.torsion_witness {
                None => None,
                Some(w) => Some(TorsionWitness {
                    row: polys(&w.row)?,
                    annihilator: parse(&w.annihilator)?,
                }),
            },
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ScreeningBlock {
    pub generic_rank: usize,
    pub gcd: String,
    pub t_dependent: bool,
    pub exceptional_conditions: Vec<String>,
    pub summary: String,
}

impl From<&GenericScreening> for ScreeningBlock {
    fn from(s: &GenericScreening) -> Self {
        ScreeningBlock {
            generic_rank: s.generic_rank,
            gcd: s.gcd_string(),
            t_dependent: s.t_dependent,
            exceptional_conditions: s.exceptional_conditions.clone(),
            summary: s.summary(),
        }
    }
}

/// `verdicts.json` written by `analyze`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct AnalyzeReport {
    pub d: usize,
    pub matrix: Vec<Vec<String>>,
    pub box_radius: u32,
    pub modes: Vec<VerdictRow>,
    pub overall_controllable_on_box: bool,
    pub screening: ScreeningBlock,
    pub caveat: String,
}

/// `smith.json` written by `smith`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct SmithReport {
    pub n: Vec<i64>,
    pub v: Vec<String>,
    pub m_v: Vec<Vec<String>>,
    pub u: Vec<Vec<String>>,
    pub sigma: Vec<Vec<String>>,
    #[serde(rename = "V")]
    pub v_matrix: Vec<Vec<String>>,
    pub invariant_factors: Vec<String>,
    pub rank: usize,
    pub det_u: String,
    pub det_v: String,
    pub reconstruction_ok: bool,
}

/// `witness.json` written by `witness`.
#[derive(Serialize, Debug, Clone)]
pub struct WitnessFile {
    pub n: Vec<i64>,
    pub v: Vec<String>,
    pub time_horizon: String,
    pub image_representation: Vec<Vec<String>>,
    pub latent_l1: Vec<String>,
    pub latent_l2: Vec<String>,
    pub pi_approx_bits: String,
    pub csv: String,
    pub report: WitnessReport,
}

/// `crosscheck.json` written by `crosscheck`.
#[derive(Serialize, Debug, Clone)]
pub struct CrosscheckFile {
    pub seed: u64,
    pub samples: usize,
    pub rank_tol: f64,
    pub pi_approx_bits: String,
    pub modes: Vec<RankSampleReport>,
    pub all_consistent: bool,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(path)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotControllable(_) => EXIT_NOT_CONTROLLABLE,
        Error::Inconsistent(_) | Error::NotUnimodular(_) | Error::ZeroGcd | Error::DivisionByZero => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

fn matrix_rows(m: &UniPolyMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(format_unipoly).collect()).collect()
}

fn table(rows: &[Vec<String>]) -> String {
    rows.iter().map(|r| format!("  [{}]", r.join(", "))).collect::<Vec<_>>().join("\n")
}

pub fn analyze_text(report: &AnalyzeReport) -> String {
    let mut s = String::new();
    s.push_str(&format!("system (d = {}):\n{}\n", report.d, table(&report.matrix)));
    s.push_str(&format!("box radius {}: {} modes\n", report.box_radius, report.modes.len()));
    for row in &report.modes {
        s.push_str(&format!(
            "  n = {:?}  v = [{}]  r_v = {}  factors = [{}]  {}\n",
            row.n,
            row.v.join(", "),
            row.generic_rank,
            row.invariant_factors.join(", "),
            row.verdict
        ));
    }
    s.push_str(&format!(
        "controllable on tested modes: {}\n",
        if report.overall_controllable_on_box { "yes" } else { "no" }
    ));
    s.push_str(&format!("generic screening: {}\n", report.screening.summary));
    s.push_str(&format!("note: {}\n", report.caveat));
    s
}

fn cmd_analyze(cfg: &RunConfig) -> Result<i32> {
    let report = analyze_box(&cfg.system, &cfg.lattice, cfg.box_radius)?;
    let screening = generic_frequency_analysis(&cfg.system);
    let out = AnalyzeReport {
        d: cfg.d,
        matrix: cfg.system.to_string_rows(),
        box_radius: cfg.box_radius,
        modes: report.verdicts.iter().map(VerdictRow::from_verdict).collect(),
        overall_controllable_on_box: report.overall_controllable_on_box,
        screening: ScreeningBlock::from(&screening),
        caveat: CAVEAT.into(),
    };
    write_json(&cfg.out, "verdicts.json", &out)?;
    let text = analyze_text(&out);
    fs::write(cfg.out.join("summary.txt"), &text)?;
    print!("{text}");
    Ok(if out.overall_controllable_on_box { EXIT_OK } else { EXIT_NOT_CONTROLLABLE })
}

fn cmd_smith(cfg: &RunConfig, mode: Option<&[i64]>) -> Result<i32> {
    let f = cfg.frequency(mode)?;
    let mv = substitute_frequency(&cfg.system, &f)?;
    let sd = smith_form(&mv)?;
    let ok = sd.reconstruct()? == mv;
    let report = SmithReport {
        n: f.mode.clone(),
        v: f.v.iter().map(Rational::to_string).collect(),
        m_v: matrix_rows(&mv),
        u: matrix_rows(&sd.u),
        sigma: matrix_rows(&sd.sigma),
        v_matrix: matrix_rows(&sd.v),
        invariant_factors: sd.invariant_factors.iter().map(format_unipoly).collect(),
        rank: sd.rank,
        det_u: format_unipoly(&determinant(&sd.u)?),
        det_v: format_unipoly(&determinant(&sd.v)?),
        reconstruction_ok: ok,
    };
    write_json(&cfg.out, "smith.json", &report)?;
    println!("mode n = {:?}, v = [{}]", report.n, report.v.join(", "));
    println!("M_v =\n{}", table(&report.m_v));
    println!("U =\n{}", table(&report.u));
    println!("Sigma =\n{}", table(&report.sigma));
    println!("V =\n{}", table(&report.v_matrix));
    println!("rank r = {}", report.rank);
    println!("invariant factors: [{}]", report.invariant_factors.join(", "));
    println!("U * Sigma * V == M_v: {}", if ok { "yes" } else { "NO" });
    Ok(if ok { EXIT_OK } else { EXIT_INTERNAL })
}

fn cmd_witness(cfg: &RunConfig, mode: Option<&[i64]>) -> Result<i32> {
    let f = cfg.frequency(mode)?;
    let verdict = analyze_mode(&cfg.system, &f)?;
    if !verdict.controllable {
        let factor = verdict.failure_factor.as_ref().map(format_unipoly).unwrap_or_default();
        return Err(Error::NotControllable(format!("mode {:?} (invariant factor {factor})", f.mode)));
    }
    let k = cfg.system.cols() - verdict.generic_rank;
    let (l1_src, l2_src) = match &cfg.latent {
        Some((a, b)) => (a.clone(), b.clone()),
        None => (vec!["0".to_string(); k], vec!["exp(t)".to_string(); k]),
    };
    let parse_all = |field: &str, xs: &[String]| -> Result<Vec<ExprFunction>> {
        if xs.len() != k {
            return Err(Error::config(field, format!("mode needs {k} latent functions, got {}", xs.len())));
        }
        xs.iter()
            .map(|s| parse_latent(s, PI_APPROX).map_err(|e| Error::config(field, format!("`{s}`: {e}"))))
            .collect()
    };
    let l1 = parse_all("latent.l1", &l1_src)?;
    let l2 = parse_all("latent.l2", &l2_src)?;
    let conn = connect(&cfg.system, &f, &l1, &l2, &cfg.time_horizon, PI_APPROX)?;
    let horizon = cfg.time_horizon.to_f64();
    let grid = GridSpec::default_for(horizon);
    let report = verify_witness(
        &cfg.system,
        &f,
        &conn.w,
        &conn.w1,
        &conn.w2,
        horizon,
        &grid,
        PI_APPROX,
        &cfg.witness_tol,
    )?;
    let x_grid = spatial_grid(cfg.d, 4);
    let field = synthesize_spatial(std::slice::from_ref(&conn.w), &x_grid, &grid.points(), PI_APPROX)?;
    fs::create_dir_all(&cfg.out)?;
    let csv = cfg.out.join("witness.csv");
    field.write_csv(std::io::BufWriter::new(fs::File::create(&csv)?))?;
    let file = WitnessFile {
        n: f.mode.clone(),
        v: f.v.iter().map(Rational::to_string).collect(),
        time_horizon: cfg.time_horizon.to_string(),
        image_representation: matrix_rows(&conn.image),
        latent_l1: l1_src,
        latent_l2: l2_src,
        pi_approx_bits: format!("{PI_APPROX_BITS:#018x}"),
        csv: csv.display().to_string(),
        report: report.clone(),
    };
    write_json(&cfg.out, "witness.json", &file)?;
    println!("mode n = {:?}: image representation N =\n{}", f.mode, table(&file.image_representation));
    println!(
        "max residual {:.3e} (tol {:.1e}), left match {:.3e}, right match {:.3e} (tol {:.1e})",
        report.max_residual,
        cfg.witness_tol.residual_tol,
        report.left_match_error,
        report.right_match_error,
        cfg.witness_tol.match_tol
    );
    println!("witness {}", if report.pass { "PASS" } else { "FAIL" });
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

/// `per_axis^d` points of `[0, 1)^d`.
fn spatial_grid(d: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p: Vec<f64>| {
                (0..per_axis).map(move |k| {
                    let mut q = p.clone();
                    q.push(k as f64 / per_axis as f64);
                    q
                })
            })
            .collect();
    }
    out
}

fn cmd_crosscheck(cfg: &RunConfig, cached: Option<&Path>) -> Result<i32> {
    let verdicts: Vec<ControllabilityVerdict> = match cached {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::config("verdicts", format!("{}: {e}", path.display())))?;
            let report: AnalyzeReport =
                serde_json::from_str(&text).map_err(|e| Error::config("verdicts", e.to_string()))?;
            report
                .modes
                .iter()
                .map(|r| r.to_verdict(&cfg.lattice))
                .collect::<Result<_>>()?
        }
        None => analyze_box(&cfg.system, &cfg.lattice, cfg.box_radius)?.verdicts,
    };
    use rayon::prelude::*;
    let modes = verdicts
        .par_iter()
        .map(|v| crosscheck_mode(&cfg.system, &v.frequency, v, cfg.samples, cfg.seed, cfg.rank_tol, PI_APPROX))
        .collect::<Result<Vec<_>>>()?;
    let all = modes.iter().all(|m| m.consistent);
    for m in &modes {
        println!(
            "n = {:?}: rank {} at {} samples, {} root point(s): {}",
            m.frequency.mode,
            m.symbolic_rank,
            m.sampled_points.len(),
            m.root_points.len(),
            if m.consistent { "consistent" } else { "INCONSISTENT" }
        );
    }
    let file = CrosscheckFile {
        seed: cfg.seed,
        samples: cfg.samples,
        rank_tol: cfg.rank_tol,
        pi_approx_bits: format!("{PI_APPROX_BITS:#018x}"),
        modes,
        all_consistent: all,
    };
    write_json(&cfg.out, "crosscheck.json", &file)?;
    Ok(if all { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let args = match &cli.command {
        Command::Analyze(a) | Command::Smith(a) | Command::Witness(a) | Command::Crosscheck(a) => a,
    };
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.apply(args)?;
    let mode = args.mode.as_deref();
    match &cli.command {
        Command::Analyze(_) => cmd_analyze(&cfg),
        Command::Smith(_) => cmd_smith(&cfg, mode),
        Command::Witness(_) => cmd_witness(&cfg, mode),
        Command::Crosscheck(_) => cmd_crosscheck(&cfg, args.verdicts.as_deref()),
    }
}

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Applies `PERIOCTRL_THREADS` to the global thread pool.
pub fn init_threads() {
    if let Some(n) = std::env::var("PERIOCTRL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}
