//! The `bifree` command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bipartite::{conjugate_field, fisher_numeric, semicircular_density, DensityGrid, FieldConfig, GridError, GridSpec};
use crate::bnclattice::{self, BNCPartition, ChiSeq, LatticeError};
use crate::cumulant::{self, cumulant_chi, CumulantError, CumulantSpec, MomentFunctional};
use crate::derivation::{bifree_dq, conjugate_check, DerivationError, QuotientKind};
use crate::gaussfam::{
    self, default_eps_seq, entropy_closed, entropy_dimension, entropy_dimension_limit, entropy_quadrature, fisher,
    fisher_perturbed, gaussian_moment, round_sig, Covariance, ExtReal, FockModel, GaussError, QuadConfig,
};
use crate::ncalg::{AlgebraError, AlgebraMode, Letter, NCPolynomial, Side, Word};
use crate::selftest;

#[derive(Debug, Parser)]
#[command(name = "bifree", version, about = "Bi-free probability toolkit")]
pub struct Cli {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Allow --out to replace an existing file.
    #[arg(long, global = true)]
    pub force: bool,
    /// Suppress warnings.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate BNC(χ) and report μ(0_χ, 1_χ).
    Lattice {
        /// Side labels, e.g. `lrlr`.
        #[arg(long)]
        chi: String,
    },
    /// Bi-free cumulants of a functional.
    Cumulants {
        #[command(flatten)]
        input: FunctionalInput,
        /// With --args: the χ of a single cumulant.
        #[arg(long, requires = "args")]
        chi: Option<String>,
        /// Words fed to the cumulant, one per position of χ.
        #[arg(long, num_args = 1.., requires = "chi")]
        args: Vec<String>,
        /// Otherwise: every letter pattern up to this length, as a cumulant spec.
        #[arg(long, conflicts_with = "chi")]
        max_len: Option<usize>,
    },
    /// Moments of a functional.
    Moments {
        #[command(flatten)]
        input: FunctionalInput,
        #[arg(long, num_args = 1..)]
        word: Vec<String>,
        /// Otherwise: all words up to this degree, as a moment table.
        #[arg(long, conflicts_with = "word")]
        max_degree: Option<usize>,
    },
    /// Apply a bi-free difference quotient to a polynomial literal.
    Dq {
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Free)]
        mode: ModeArg,
        /// Number of left variables; inferred from the input when absent.
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(allow_hyphen_values = true)]
        poly: String,
    },
    /// Check that ξ is the conjugate variable for a quotient up to a degree.
    ConjugateCheck {
        #[command(flatten)]
        input: FunctionalInput,
        #[command(flatten)]
        kind: KindArgs,
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
    },
    /// Bi-free Gaussian families.
    Gaussian {
        #[command(subcommand)]
        op: GaussianOp,
    },
    /// Commuting pairs given by a density on a grid.
    Bipartite {
        #[command(subcommand)]
        op: BipartiteOp,
    },
    /// Run the golden examples.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Free,
    Bipartite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Args)]
pub struct KindArgs {
    #[arg(long, value_enum, default_value_t = SideArg::Left)]
    pub side: SideArg,
    #[arg(long)]
    pub flipped: bool,
    #[arg(long, default_value_t = 1)]
    pub index: u32,
}

impl KindArgs {
    fn kind(&self) -> QuotientKind {
        match (self.side, self.flipped) {
            (SideArg::Left, false) => QuotientKind::left(self.index),
            (SideArg::Right, false) => QuotientKind::right(self.index),
            (SideArg::Left, true) => QuotientKind::flipped_left(self.index),
            (SideArg::Right, true) => QuotientKind::flipped_right(self.index),
        }
    }
}

#[derive(Debug, Args)]
pub struct FunctionalInput {
    /// Cumulant spec JSON.
    #[arg(long, conflicts_with = "table")]
    pub spec: Option<PathBuf>,
    /// Moment table JSON.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Algebra mode used with --spec.
    #[arg(long, value_enum, default_value_t = ModeArg::Free)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct CovInput {
    /// Covariance JSON `{"n", "m", "matrix"}`.
    #[arg(long, conflicts_with = "matrix")]
    pub cov: Option<PathBuf>,
    /// Inline matrix, e.g. `[[1,0.5],[0.5,1]]`.
    #[arg(long)]
    pub matrix: Option<String>,
    /// Left variables for --matrix; defaults to half the size rounded up.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Replace A by A + tI first.
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntropyMethod {
    Closed,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DimensionMethod {
    Closed,
    Limit,
}

#[derive(Debug, Subcommand)]
pub enum GaussianOp {
    Fisher {
        #[command(flatten)]
        cov: CovInput,
    },
    Entropy {
        #[command(flatten)]
        cov: CovInput,
        #[arg(long, value_enum, default_value_t = EntropyMethod::Closed)]
        method: EntropyMethod,
        #[arg(long)]
        quad_tol: Option<f64>,
    },
    Dimension {
        #[command(flatten)]
        cov: CovInput,
        #[arg(long, value_enum, default_value_t = DimensionMethod::Closed)]
        method: DimensionMethod,
    },
    Moments {
        #[command(flatten)]
        cov: CovInput,
        /// Words such as `X1 Y1 X1 Y1`.
        #[arg(long, num_args = 1..)]
        pattern: Vec<String>,
        /// Otherwise: all words up to this length.
        #[arg(long, conflicts_with = "pattern")]
        max_len: Option<usize>,
        /// Also evaluate in the Fock model truncated at this depth.
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct GridInput {
    /// Density grid JSON.
    #[arg(long, conflicts_with = "c")]
    pub grid: Option<PathBuf>,
    /// Use the semicircular pair with this correlation instead.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Nodes per axis for --c.
    #[arg(long, default_value_t = 512)]
    pub nodes: usize,
    /// Kernel width; defaults to the grid spacing.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub richardson: bool,
}

#[derive(Debug, Subcommand)]
pub enum BipartiteOp {
    Fisher {
        #[command(flatten)]
        grid: GridInput,
    },
    Conjugate {
        #[command(flatten)]
        grid: GridInput,
    },
    MakeSemicircular {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
    },
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    NonConvergence(String),
    /// A selftest item failed; the report is already printed.
    Failed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Failed => 1,
        }
    }
}

macro_rules! validation_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Validation(e.to_string())
            }
        }
    )*};
}

validation_from!(AlgebraError, LatticeError, CumulantError, DerivationError, GridError, std::io::Error, serde_json::Error);

impl From<GaussError> for CliError {
    fn from(e: GaussError) -> Self {
        match e {
            GaussError::NonConvergent(_) => CliError::NonConvergence(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

/// What a subcommand produced, in each supported format.
struct Report {
    json: Value,
    text: String,
    csv: Option<String>,
    warnings: Vec<String>,
}

impl Report {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Report { json, text: text.into(), csv: None, warnings: Vec::new() }
    }

    fn csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    fn render(&self, format: Format) -> Result<String, CliError> {
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&self.json)? + "\n",
            Format::Text => self.text.clone(),
            Format::Csv => self.csv.clone().ok_or_else(|| CliError::Validation("CSV output is not available here".into()))?,
        })
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Validation(m) => eprintln!("error: {}", m),
                CliError::NonConvergence(m) => eprintln!("error: {}", m),
                CliError::Failed => {}
            }
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(p) = &cli.out {
        if p.exists() && !cli.force {
            return Err(CliError::Validation(format!("{} exists; pass --force to overwrite", p.display())));
        }
    }
    let mut failed = false;
    let report = match &cli.command {
        Command::Lattice { chi } => lattice(chi)?,
        Command::Cumulants { input, chi, args, max_len } => cumulants(input, chi.as_deref(), args, *max_len)?,
        Command::Moments { input, word, max_degree } => moments(input, word, *max_degree)?,
        Command::Dq { kind, mode, n, m, poly } => dq(kind, *mode, *n, *m, poly)?,
        Command::ConjugateCheck { input, kind, xi, max_degree } => conjugate(input, kind, xi, *max_degree)?,
        Command::Gaussian { op } => gaussian(op)?,
        Command::Bipartite { op } => {
            if let BipartiteOp::MakeSemicircular { .. } = op {
                if cli.format == Format::Csv {
                    return Err(CliError::Validation("grids are written as JSON".into()));
                }
            }
            bipartite(op)?
        }
        Command::Selftest => {
            let items = selftest::run();
            failed = !selftest::all_passed(&items);
            let mut text = String::new();
            let mut csv = String::from("item,passed,detail\n");
            for i in &items {
                let _ = writeln!(text, "{} {}: {}", if i.passed { "PASS" } else { "FAIL" }, i.name, i.detail);
                let _ = writeln!(csv, "{},{},{}", csv_field(i.name), i.passed, csv_field(&i.detail));
            }
            Report::new(json!({ "passed": !failed, "items": items }), text).csv(csv)
        }
    };
    if !cli.quiet {
        for w in &report.warnings {
            eprintln!("warning: {}", w);
        }
    }
    // grids go out as their own JSON document whatever the format
    let body = match &cli.command {
        Command::Bipartite { op: BipartiteOp::MakeSemicircular { .. } } => serde_json::to_string(&report.json)? + "\n",
        _ => report.render(cli.format)?,
    };
    match &cli.out {
        Some(p) => write_out(p, &body)?,
        None => print!("{}", body),
    }
    if failed {
        return Err(CliError::Failed);
    }
    Ok(())
}

fn write_out(p: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(p, body).map_err(|e| CliError::Validation(format!("{}: {}", p.display(), e)))
}

fn read(p: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(p).map_err(|e| CliError::Validation(format!("{}: {}", p.display(), e)))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn num(x: f64) -> Value {
    serde_json::to_value(ExtReal::Finite(x)).expect("serializable")
}

fn fmt_num(x: f64) -> String {
    ExtReal::Finite(x).to_string()
}

fn lattice(chi: &str) -> Result<Report, CliError> {
    let chi = ChiSeq::parse(chi)?;
    let elems = bnclattice::enumerate_bnc(&chi)?;
    let mu = bnclattice::mobius_to_top(&BNCPartition::zero(&chi));
    let mut text = format!("count {}\nmobius_0_to_1 {}\n", elems.len(), mu);
    let mut csv = String::from("index,partition\n");
    for (i, p) in elems.iter().enumerate() {
        let _ = writeln!(text, "{}", p);
        let _ = writeln!(csv, "{},{}", i, csv_field(&p.to_string()));
    }
    let parts: Vec<_> = elems.iter().map(|p| p.blocks_one_based()).collect();
    let chi_str: String = chi.labels().iter().map(|s| if *s == Side::Left { 'l' } else { 'r' }).collect();
    Ok(Report::new(json!({ "chi": chi_str, "count": elems.len(), "partitions": parts, "mobius_0_to_1": mu }), text).csv(csv))
}

fn mode_of(m: ModeArg, n: u32, k: u32) -> AlgebraMode {
    match m {
        ModeArg::Free => AlgebraMode::free(n, k),
        ModeArg::Bipartite => AlgebraMode::bipartite(n, k),
    }
}

fn functional(input: &FunctionalInput) -> Result<MomentFunctional, CliError> {
    match (&input.spec, &input.table) {
        (Some(p), None) => {
            let spec = CumulantSpec::from_json(&read(p)?)?;
            let mode = mode_of(input.mode, spec.n, spec.m);
            Ok(MomentFunctional::from_cumulants(mode, spec)?)
        }
        (None, Some(p)) => Ok(MomentFunctional::from_table_json(&read(p)?)?),
        _ => Err(CliError::Validation("give exactly one of --spec or --table".into())),
    }
}

fn cumulants(input: &FunctionalInput, chi: Option<&str>, args: &[String], max_len: Option<usize>) -> Result<Report, CliError> {
    let phi = functional(input)?;
    if let Some(chi) = chi {
        let chi = ChiSeq::parse(chi)?;
        let words = args.iter().map(|a| Word::parse(a)).collect::<Result<Vec<_>, _>>()?;
        let k = cumulant_chi(&phi, &chi, &words)?;
        let json = json!({ "args": args, "value": k.to_string() });
        return Ok(Report::new(json, format!("{}\n", k)));
    }
    let len = max_len.ok_or_else(|| CliError::Validation("give --chi with --args, or --max-len".into()))?;
    let spec = CumulantSpec::from_functional(&phi, &phi.mode().variables(), len)?;
    let mut text = String::new();
    let mut csv = String::from("pattern,value\n");
    for (p, v) in spec.entries() {
        let w = Word::new(p.clone());
        let _ = writeln!(text, "{}\t{}", w, v);
        let _ = writeln!(csv, "{},{}", w, v);
    }
    Ok(Report::new(spec.to_json(), text).csv(csv))
}

fn moments(input: &FunctionalInput, word: &[String], max_degree: Option<usize>) -> Result<Report, CliError> {
    let phi = functional(input)?;
    let words = if !word.is_empty() {
        word.iter().map(|w| Word::parse(w)).collect::<Result<Vec<_>, _>>()?
    } else {
        let d = max_degree.ok_or_else(|| CliError::Validation("give --word or --max-degree".into()))?;
        crate::derivation::test_words(phi.mode(), d)
    };
    let json = cumulant::table_json(&phi, &words)?;
    let mut text = String::new();
    let mut csv = String::from("word,value\n");
    for e in json["moments"].as_array().expect("table has moments") {
        let (w, v) = (e["word"].as_str().unwrap_or(""), e["value"].as_str().unwrap_or(""));
        let _ = writeln!(text, "{}\t{}", if w.is_empty() { "1" } else { w }, v);
        let _ = writeln!(csv, "{},{}", w, v);
    }
    Ok(Report::new(json, text).csv(csv))
}

/// Largest left and right variable indices in `p`.
fn arities(p: &NCPolynomial) -> (u32, u32) {
    let (mut n, mut m) = (0, 0);
    for (w, _) in p.terms() {
        for l in w.letters().iter().filter(|l| l.is_variable()) {
            match l.side {
                Side::Left => n = n.max(l.index),
                Side::Right => m = m.max(l.index),
            }
        }
    }
    (n, m)
}

fn dq(kind: &KindArgs, mode: ModeArg, n: Option<u32>, m: Option<u32>, poly: &str) -> Result<Report, CliError> {
    let p: NCPolynomial = poly.parse()?;
    let k = kind.kind();
    let (mut pn, mut pm) = arities(&p);
    match kind.side {
        SideArg::Left => pn = pn.max(kind.index),
        SideArg::Right => pm = pm.max(kind.index),
    }
    let mode = mode_of(mode, n.unwrap_or(pn), m.unwrap_or(pm));
    let t = bifree_dq(&p, &k, &mode)?;
    let json = json!({ "quotient": k.to_string(), "input": p.to_string(), "result": t.to_string() });
    Ok(Report::new(json, format!("{}\n", t)))
}

fn conjugate(input: &FunctionalInput, kind: &KindArgs, xi: &str, max_degree: usize) -> Result<Report, CliError> {
    let phi = functional(input)?;
    let xi: NCPolynomial = xi.parse()?;
    let r = conjugate_check(&phi, &kind.kind(), &xi, max_degree)?;
    let text = match &r.first_failure {
        None => format!("pass ({} words)\n", r.checks.len()),
        Some(f) => format!("fail at {}: φ(Zξ) = {}, (φ⊗φ)(∂Z) = {}\n", f.word, f.lhs, f.rhs),
    };
    let mut csv = String::from("word,lhs,rhs,passed\n");
    for c in &r.checks {
        let _ = writeln!(csv, "{},{},{},{}", c.word, c.lhs, c.rhs, c.passed);
    }
    let mut json = serde_json::to_value(&r)?;
    json["passed"] = json!(r.passed());
    Ok(Report::new(json, text).csv(csv))
}

fn covariance(c: &CovInput) -> Result<Covariance, CliError> {
    let cov = match (&c.cov, &c.matrix) {
        (Some(p), None) => Covariance::from_json(&read(p)?)?,
        (None, Some(s)) => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(s)?;
            let size = rows.len();
            let n = c.n.unwrap_or_else(|| c.m.map_or((size + 1) / 2, |m| size.saturating_sub(m)));
            let m = c.m.unwrap_or(size.saturating_sub(n));
            Covariance::from_rows(n, m, &rows)?
        }
        _ => return Err(CliError::Validation("give exactly one of --cov or --matrix".into())),
    };
    match c.t {
        Some(t) => Ok(cov.perturbed(t)?),
        None => Ok(cov),
    }
}

fn ext_report(key: &str, v: ExtReal) -> Report {
    Report::new(json!({ key: v }), format!("{}\n", v)).csv(format!("{}\n{}\n", key, v))
}

fn gaussian(op: &GaussianOp) -> Result<Report, CliError> {
    match op {
        GaussianOp::Fisher { cov } => Ok(ext_report("fisher", fisher(&covariance(cov)?))),
        GaussianOp::Entropy { cov, method, quad_tol } => {
            let a = covariance(cov)?;
            match method {
                EntropyMethod::Closed => Ok(ext_report("entropy", entropy_closed(&a))),
                EntropyMethod::Quadrature => {
                    let mut cfg = QuadConfig::default();
                    if let Some(t) = quad_tol {
                        cfg.tol = *t;
                    }
                    let e = entropy_quadrature(|t| fisher_perturbed(&a, t).map_or(f64::NAN, |f| f.to_f64()), a.size(), &cfg)?;
                    let json = json!({ "entropy": num(e.value), "error": num(e.error) });
                    Ok(Report::new(json, format!("{}\n", fmt_num(e.value)))
                        .csv(format!("entropy,error\n{},{}\n", fmt_num(e.value), fmt_num(e.error))))
                }
            }
        }
        GaussianOp::Dimension { cov, method } => {
            let a = covariance(cov)?;
            match method {
                DimensionMethod::Closed => {
                    let d = entropy_dimension(&a)?;
                    Ok(Report::new(json!({ "dimension": d }), format!("{}\n", d)).csv(format!("dimension\n{}\n", d)))
                }
                DimensionMethod::Limit => {
                    let e = entropy_dimension_limit(
                        |t| fisher_perturbed(&a, t).map_or(f64::NAN, |f| f.to_f64()),
                        a.size(),
                        &default_eps_seq(),
                    )?;
                    let json = json!({ "dimension": num(e.value), "error": num(e.error) });
                    Ok(Report::new(json, format!("{}\n", fmt_num(e.value)))
                        .csv(format!("dimension,error\n{},{}\n", fmt_num(e.value), fmt_num(e.error))))
                }
            }
        }
        GaussianOp::Moments { cov, pattern, max_len, depth } => {
            let a = covariance(cov)?;
            let words = if !pattern.is_empty() {
                pattern.iter().map(|p| Word::parse(p)).collect::<Result<Vec<_>, _>>()?
            } else {
                let len = max_len.ok_or_else(|| CliError::Validation("give --pattern or --max-len".into()))?;
                let vars: Vec<Letter> = AlgebraMode::free(a.n() as u32, a.m() as u32).variables();
                cumulant::words_up_to(&vars, len)
            };
            let model = depth.map(|d| FockModel::new(&a, d));
            let mut rows = Vec::new();
            let mut text = String::new();
            let mut csv = String::from(if model.is_some() { "pattern,value,fock\n" } else { "pattern,value\n" });
            for w in &words {
                if w.letters().iter().any(|l| !l.is_variable()) {
                    return Err(CliError::Validation(format!("pattern `{}` has a symbol letter", w)));
                }
                let pat: Vec<(Side, u32)> = w.letters().iter().map(|l| (l.side, l.index)).collect();
                let v = gaussian_moment(&a, &pat)?;
                let label = if w.is_empty() { "1".to_string() } else { w.to_string() };
                let mut row = json!({ "pattern": w.to_string(), "value": num(v) });
                let _ = write!(text, "{}\t{}", label, fmt_num(v));
                let _ = write!(csv, "{},{}", w, fmt_num(v));
                if let Some(f) = &model {
                    let fv = gaussfam::fock_moment(f, &pat)?;
                    row["fock"] = num(fv);
                    let _ = write!(text, "\t{}", fmt_num(fv));
                    let _ = write!(csv, ",{}", fmt_num(fv));
                }
                text.push('\n');
                csv.push('\n');
                rows.push(row);
            }
            Ok(Report::new(json!({ "moments": rows }), text).csv(csv))
        }
    }
}

fn density(g: &GridInput) -> Result<(DensityGrid, Option<f64>), CliError> {
    match (&g.grid, g.c) {
        (Some(p), None) => Ok((DensityGrid::from_json(&read(p)?)?, None)),
        (None, Some(c)) => Ok((semicircular_density(c, GridSpec::square(-2.0, 2.0, g.nodes))?, Some(c))),
        _ => Err(CliError::Validation("give exactly one of --grid or --c".into())),
    }
}

fn field_config(g: &GridInput) -> FieldConfig {
    FieldConfig { eps: g.eps, richardson: g.richardson, ..FieldConfig::default() }
}

fn bipartite(op: &BipartiteOp) -> Result<Report, CliError> {
    match op {
        BipartiteOp::Fisher { grid } => {
            let (g, c) = density(grid)?;
            let est = fisher_numeric(&g, &field_config(grid))?;
            if !est.value.is_finite() {
                return Err(CliError::NonConvergence("Fisher information is not finite on this grid".into()));
            }
            let mut json = json!({ "fisher": num(est.value), "warnings": est.warnings });
            let mut csv = format!("fisher\n{}\n", fmt_num(est.value));
            if let Some(c) = c {
                let exact = 2.0 / (1.0 - c * c);
                json["exact"] = num(exact);
                json["relative_error"] = num((est.value - exact) / exact);
                csv = format!("fisher,exact\n{},{}\n", fmt_num(est.value), fmt_num(exact));
            }
            let mut r = Report::new(json, format!("{}\n", fmt_num(est.value))).csv(csv);
            r.warnings = est.warnings;
            Ok(r)
        }
        BipartiteOp::Conjugate { grid } => {
            let (g, _) = density(grid)?;
            let f = conjugate_field(&g, &field_config(grid))?;
            let s = *g.spec();
            let mut csv = String::from("x,y,density,xi_l,xi_r,masked\n");
            for j in 0..s.ny {
                for i in 0..s.nx {
                    let k = j * s.nx + i;
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{},{}",
                        fmt_num(s.x(i)),
                        fmt_num(s.y(j)),
                        fmt_num(g.at(i, j)),
                        fmt_num(f.xi_l[k]),
                        fmt_num(f.xi_r[k]),
                        f.mask[k]
                    );
                }
            }
            let round = |v: &[f64]| v.iter().map(|x| round_sig(*x, 12)).collect::<Vec<_>>();
            let json = json!({
                "grid": s,
                "xi_l": round(&f.xi_l),
                "xi_r": round(&f.xi_r),
                "mask": f.mask,
                "warnings": f.warnings,
            });
            let mut r = Report::new(json, csv.clone()).csv(csv);
            r.warnings = f.warnings;
            Ok(r)
        }
        BipartiteOp::MakeSemicircular { c, nodes } => {
            let g = semicircular_density(*c, GridSpec::square(-2.0, 2.0, *nodes))?;
            Ok(Report::new(g.to_json(), String::new()))
        }
    }
}
