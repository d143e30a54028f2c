//! Command-line front end. Every subcommand produces one JSON report.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bcl::{
    bcl_compression_from_biisometry, bcl_from_biisometry, bcl_from_json, bcl_from_symbol, bcl_to_json, biisometry_from_bcl, pair_equivalence,
    witness_residual, BclDoc, BclPair, Equivalence, DEFAULT_WORD_LEN,
};
use crate::error::{Error, Result};
use crate::lattice::{
    self, commutant_dimension, direct_integral_factor, staircase_bcl_residual, staircase_from_json,
    staircase_restriction_biisometry, staircase_to_zset, zset_from_json, Staircase, ZSet, ZSetDoc,
};
use crate::linalg::{self, eigenvalue_gap, op_norm, CMat, Tolerance, C64};
use crate::model::{
    bishift_test, build_model_biisometry, characteristic_function, double_report, kernel_capture_depth,
    unitarity_gap, Model,
};
use crate::report::{emit_report, Report};
use crate::symbol::{
    example_left_inverse_with, shifted_example_left_inverse, shifted_example_symbol, symbol_from_json, InnerScalar,
    OpSymbol,
};
use crate::window::{biisometry_from_json, biisometry_to_json, BiIsometry, BiIsometryDoc};
use crate::wold::{cnu_part_of_contraction, default_depth, four_space_decomposition, reducing_defect, wold_single};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

const SEED_VAR: &str = "BIISO_SEED";
const DEFAULT_SEED: u64 = 42;

/// `BIISO_SEED` when set and numeric, else 42.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_VAR).ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_SEED)
}

#[derive(Debug, Parser)]
#[command(name = "biiso", version, about = "Bi-isometry models, BCL triples and lattice examples", arg_required_else_help = true)]
pub struct Cli {
    /// Top grade of the truncation window.
    #[arg(long = "n", global = true, default_value_t = 16, value_parser = clap::value_parser!(i64).range(4..))]
    pub n: i64,
    /// Boundary samples.
    #[arg(long = "k", global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(8..))]
    pub k: u64,
    #[arg(long, global = true)]
    pub eq_tol: Option<f64>,
    #[arg(long, global = true)]
    pub rank_tol: Option<f64>,
    /// Report destination (stdout when absent).
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Bi-isometry document.
    #[arg(long, conflicts_with = "symbol")]
    pub bi: Option<PathBuf>,
    /// Symbol document; its model is used.
    #[arg(long)]
    pub symbol: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Wold decomposition of one isometry of a pair, plus the four-space split.
    Wold {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
        which: u8,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Build the model of a symbol and recover its coefficients.
    Model {
        #[arg(long)]
        symbol: PathBuf,
    },
    /// Characteristic-function coefficients of a supplied pair.
    Charfn {
        #[arg(long)]
        bi: PathBuf,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
    },
    Bcl {
        #[command(subcommand)]
        action: BclCommand,
    },
    /// Bi-shift test on the model of a symbol.
    Bishift {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, default_value_t = 40)]
        n_max: usize,
        /// Also write the decay sequences as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Doubly commuting / constant isometry / pivotal isometry verdicts.
    Double {
        #[command(flatten)]
        source: Source,
    },
    Lattice {
        #[command(subcommand)]
        action: LatticeCommand,
    },
    /// Golden checks for the shifted example and the lattice examples.
    PaperExamples,
}

#[derive(Debug, Clone, Subcommand)]
pub enum BclCommand {
    Extract {
        #[arg(long)]
        bi: PathBuf,
    },
    Build {
        #[arg(long)]
        pair: PathBuf,
    },
    FromSymbol {
        #[arg(long)]
        symbol: PathBuf,
    },
    Roundtrip {
        #[arg(long)]
        pair: PathBuf,
    },
    Equiv {
        #[arg(long = "pair", num_args = 1, required = true)]
        pairs: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_WORD_LEN)]
        word_len: usize,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum LatticeCommand {
    Period {
        #[arg(long)]
        zset: PathBuf,
    },
    Classify {
        #[arg(long = "zset", num_args = 1, required = true)]
        zsets: Vec<PathBuf>,
    },
    Staircase {
        #[arg(long)]
        staircase: PathBuf,
        #[arg(long, default_value_t = 6)]
        radius: i64,
    },
    Restrict {
        #[arg(long)]
        staircase: PathBuf,
        #[arg(long, default_value_t = 6)]
        width: i64,
        #[arg(long, default_value_t = 6)]
        depth: i64,
    },
    Fiber {
        #[arg(long)]
        zset: PathBuf,
        /// `ζ = exp(iθ)`.
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    Commutant {
        #[arg(long, conflicts_with = "pair")]
        zset: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true, requires = "zset")]
        theta: Option<f64>,
        #[arg(long)]
        pair: Option<PathBuf>,
    },
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub n: i64,
    pub k: usize,
    pub tol: Tolerance,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl RunConfig {
    pub fn echo(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "eq_tol": self.tol.eq_tol,
            "rank_tol": self.tol.rank_tol,
            "seed": self.seed,
            "inputs": inputs(&self.command).iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Parses `argv` (including the program name).
pub fn parse_config<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let mut tol = Tolerance::default();
    if let Some(t) = cli.eq_tol {
        tol.eq_tol = t;
    }
    if let Some(t) = cli.rank_tol {
        tol.rank_tol = t;
    }
    let seed = seed_from_env();
    Ok(RunConfig { command: cli.command, n: cli.n, k: cli.k as usize, tol, output: cli.output, seed })
}

fn inputs(c: &Command) -> Vec<PathBuf> {
    let src = |s: &Source| s.bi.iter().chain(s.symbol.iter()).cloned().collect::<Vec<_>>();
    match c {
        Command::Wold { source, .. } | Command::Double { source } => src(source),
        Command::Model { symbol } | Command::Bishift { symbol, .. } => vec![symbol.clone()],
        Command::Charfn { bi, .. } => vec![bi.clone()],
        Command::Bcl { action } => match action {
            BclCommand::Extract { bi } => vec![bi.clone()],
            BclCommand::Build { pair } | BclCommand::Roundtrip { pair } => vec![pair.clone()],
            BclCommand::FromSymbol { symbol } => vec![symbol.clone()],
            BclCommand::Equiv { pairs, .. } => pairs.clone(),
        },
        Command::Lattice { action } => match action {
            LatticeCommand::Period { zset } | LatticeCommand::Fiber { zset, .. } => vec![zset.clone()],
            LatticeCommand::Classify { zsets } => zsets.clone(),
            LatticeCommand::Staircase { staircase, .. } | LatticeCommand::Restrict { staircase, .. } => {
                vec![staircase.clone()]
            }
            LatticeCommand::Commutant { zset, pair, .. } => zset.iter().chain(pair.iter()).cloned().collect(),
        },
        Command::PaperExamples => Vec::new(),
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Wold { .. } => "wold".into(),
        Command::Model { .. } => "model".into(),
        Command::Charfn { .. } => "charfn".into(),
        Command::Bcl { action } => format!(
            "bcl {}",
            match action {
                BclCommand::Extract { .. } => "extract",
                BclCommand::Build { .. } => "build",
                BclCommand::FromSymbol { .. } => "from-symbol",
                BclCommand::Roundtrip { .. } => "roundtrip",
                BclCommand::Equiv { .. } => "equiv",
            }
        ),
        Command::Bishift { .. } => "bishift".into(),
        Command::Double { .. } => "double".into(),
        Command::Lattice { action } => format!(
            "lattice {}",
            match action {
                LatticeCommand::Period { .. } => "period",
                LatticeCommand::Classify { .. } => "classify",
                LatticeCommand::Staircase { .. } => "staircase",
                LatticeCommand::Restrict { .. } => "restrict",
                LatticeCommand::Fiber { .. } => "fiber",
                LatticeCommand::Commutant { .. } => "commutant",
            }
        ),
        Command::PaperExamples => "paper-examples".into(),
    }
}

/// Outcome of one run: exit status and the report text (empty on input
/// errors, which go to `error`).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: i32,
    pub report: String,
    pub error: Option<String>,
}

pub fn run(config: &RunConfig) -> RunOutcome {
    let mut report = Report::new();
    match dispatch(config, &mut report) {
        Ok(()) => {
            let text = emit_report(&command_name(&config.command), config.echo(), &report);
            RunOutcome { status: if report.passed() { EXIT_OK } else { EXIT_VERIFY }, report: text, error: None }
        }
        Err(e) => {
            let status = match e {
                Error::Verification(_) | Error::NotIsometric(_) => EXIT_VERIFY,
                _ => EXIT_INPUT,
            };
            RunOutcome { status, report: String::new(), error: Some(e.to_string()) }
        }
    }
}

/// Parses, runs and writes the report. Returns the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_config(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    let out = run(&config);
    if let Some(err) = &out.error {
        eprintln!("error: {err}");
        return out.status;
    }
    match &config.output {
        Some(p) => {
            if let Err(e) = fs::write(p, &out.report) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{}", out.report),
    }
    out.status
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn mat_json(m: &CMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

fn load_model(path: &Path, config: &RunConfig) -> Result<(OpSymbol, Model)> {
    let theta = symbol_from_json(&read(path)?)?;
    let model = build_model_biisometry(&theta, config.n, config.k)?;
    Ok((theta, model))
}

fn load_source(src: &Source, config: &RunConfig) -> Result<BiIsometry> {
    match (&src.bi, &src.symbol) {
        (Some(b), None) => biisometry_from_json(&read(b)?, config.tol),
        (None, Some(s)) => Ok(load_model(s, config)?.1.biiso),
        _ => Err(Error::InvalidInput("give exactly one of --bi and --symbol".into())),
    }
}

fn load_pair(path: &Path) -> Result<BclPair> {
    bcl_from_json(&read(path)?)
}

fn load_zset(path: &Path) -> Result<ZSet> {
    zset_from_json(&read(path)?)
}

fn pair_json(b: &BclPair) -> Result<Value> {
    Ok(serde_json::to_value(BclDoc::try_from(b)?)?)
}

fn biiso_residuals(report: &mut Report, w: &BiIsometry) -> Result<()> {
    let chk = w.check()?;
    report.residual("isometry_defect_w0", chk.isometry_defect_w0, 1e-9);
    report.residual("isometry_defect_w1", chk.isometry_defect_w1, 1e-9);
    report.residual("commutation_residual", chk.commutation_residual, 1e-9);
    Ok(())
}

fn equivalence_json(report: &mut Report, key: &str, a: &BclPair, b: &BclPair, word_len: usize, tol: Tolerance) -> Result<bool> {
    let verdict = pair_equivalence(a, b, word_len, tol)?;
    let mut v = json!({ "verdict": verdict.label() });
    let ok = match &verdict {
        Equivalence::Equivalent(x) => {
            v["witness_residual"] = json!(witness_residual(a, b, x));
            true
        }
        Equivalence::Inequivalent(reason) => {
            v["reason"] = json!(reason);
            false
        }
        Equivalence::Undecided => false,
    };
    report.set(key, v);
    Ok(ok)
}

fn dispatch(config: &RunConfig, report: &mut Report) -> Result<()> {
    let tol = config.tol;
    match &config.command {
        Command::Wold { source, which, depth } => {
            let w = load_source(source, config)?;
            let v = if *which == 0 { &w.w0 } else { &w.w1 };
            let d = depth.unwrap_or_else(|| default_depth(&w.interior));
            let r = wold_single(v, &w.interior, d, tol)?;
            let j = w.interior_inclusion();
            report.set(
                "dims",
                json!({
                    "interior": w.interior.len(),
                    "wandering": r.wandering.ncols(),
                    "shift_part": r.shift_part.ncols(),
                    "unitary_part": r.unitary_part.ncols(),
                }),
            );
            report.set("depth_used", r.depth_used);
            report.residual("completeness_defect", r.completeness_defect(&(&j * j.adjoint())), 1e-8);
            let fs = four_space_decomposition(&w, default_depth(&w.interior), tol)?;
            let [a, b, c, d] = fs.dims();
            report.set("four_space_dims", json!({ "k00": a, "k01": b, "k10": c, "k11": d }));
            let mut red = 0.0f64;
            for blk in fs.blocks() {
                red = red.max(reducing_defect(&w, blk)?);
            }
            report.residual("four_space_reducing_defect", red, 1e-8);
        }
        Command::Model { symbol } => {
            let (theta, m) = load_model(symbol, config)?;
            model_report(report, &theta, &m, tol)?;
        }
        Command::Charfn { bi, k_max } => {
            let w = biisometry_from_json(&read(bi)?, tol)?;
            let k_max = (*k_max).min(w.interior.grade_span().saturating_sub(2));
            let coeffs = characteristic_function(&w, k_max, tol)?;
            report.set("wandering_dim", coeffs.first().map_or(0, |c| c.nrows()));
            report.set("coefficients", Value::Array(coeffs.iter().map(mat_json).collect()));
            biiso_residuals(report, &w)?;
        }
        Command::Bcl { action } => bcl_command(action, config, report)?,
        Command::Bishift { symbol, n_max, csv } => {
            let (theta, m) = load_model(symbol, config)?;
            let r = bishift_test(&m.biiso, &theta, *n_max, config.k, tol)?;
            report.set("decay_w0", r.decay_w0.clone());
            report.set("decay_w1", r.decay_w1.clone());
            report.set("inner", r.inner);
            report.set("inner_defect", r.inner_defect);
            report.set("constant_certificate", r.certificate.is_some());
            report.set("is_bishift", r.is_bishift);
            if let Some(p) = csv {
                fs::write(p, r.decay_csv())?;
            }
        }
        Command::Double { source } => {
            let w = load_source(source, config)?;
            let r = double_report(&w, 8, tol)?;
            report.set("doubly_commuting", r.doubly_commuting);
            report.set("commutation_residual", r.commutation_residual);
            report.set("constant_isometry", r.constant_isometry);
            report.set("nonconstant_mass", r.nonconstant_mass);
            report.set("swapped_pivotal_isometry", r.swapped_pivotal_isometry);
            report.set("swapped_pivotal_defect", r.swapped_pivotal_defect);
            report.set("pivotal_isometry", r.pivotal_isometry);
            report.set("pivotal_defect", r.pivotal_defect);
            report.check("verdicts_agree", r.agree(), true);
        }
        Command::Lattice { action } => lattice_command(action, report)?,
        Command::PaperExamples => paper_examples(config, report)?,
    }
    Ok(())
}

/// Residuals, dimensions, round trip and purity verdicts of a model.
pub fn model_report(report: &mut Report, theta: &OpSymbol, m: &Model, tol: Tolerance) -> Result<()> {
    let w = &m.biiso;
    let chk = w.check()?;
    report.set(
        "residuals",
        json!({
            "isometry_defect_w0": chk.isometry_defect_w0,
            "isometry_defect_w1": chk.isometry_defect_w1,
            "commutation_residual": chk.commutation_residual,
        }),
    );
    if chk.max() > 1e-9 {
        report.fail(format!("model residual {:.3e} exceeds 1e-9", chk.max()));
    }
    report.set(
        "dims",
        json!({
            "fiber": m.spaces.fiber_dim,
            "window": w.dim(),
            "interior": w.interior.len(),
            "defect_rank": m.spaces.defect_rank,
            "series_len": m.spaces.series_len,
            "samples": m.spaces.k_used,
        }),
    );
    let k_max = 8usize.min(w.interior.grade_span().saturating_sub(2));
    let got = characteristic_function(w, k_max, tol)?;
    let mut err = 0.0f64;
    for (k, g) in got.iter().enumerate() {
        let want = m.coefficients.get(k).cloned().unwrap_or_else(|| CMat::zeros(g.nrows(), g.ncols()));
        err = err.max(op_norm(&(g - want)));
    }
    report.residual("roundtrip_error", err, 1e-8);

    let theta0 = theta.eval(C64::new(0.0, 0.0))?;
    let constant_unitary = theta.series(theta.tail_length(1e-13).0.max(2)).iter().skip(1).all(|c| op_norm(c) <= 1e-12)
        && linalg::unitary_residual(&theta0) <= 1e-9;
    let w1_unitary = unitarity_gap(&w.w1, &w.interior)? <= 1e-8;
    let (unitary_part, _) = cnu_part_of_contraction(&theta0, tol)?;
    let theta0_cnu = unitary_part.ncols() == 0;
    let fs = four_space_decomposition(w, default_depth(&w.interior), tol)?;
    let [_, k01, _, k11] = fs.dims();
    let one_pure = k01 + k11 == 0;
    report.set(
        "verdicts",
        json!({
            "w1_unitary": w1_unitary,
            "constant_unitary_symbol": constant_unitary,
            "one_pure": one_pure,
            "theta0_cnu": theta0_cnu,
        }),
    );
    if w1_unitary != constant_unitary {
        report.fail("W1 unitarity disagrees with the symbol being a constant unitary");
    }
    if one_pure != theta0_cnu {
        report.fail("purity of W1 disagrees with Θ(0) being completely nonunitary");
    }
    Ok(())
}

fn bcl_command(action: &BclCommand, config: &RunConfig, report: &mut Report) -> Result<()> {
    let tol = config.tol;
    match action {
        BclCommand::Extract { bi } => {
            let w = biisometry_from_json(&read(bi)?, tol)?;
            let ex = bcl_from_biisometry(&w, tol)?;
            let (e, f) = ex.pair.split();
            report.set("dims", json!({ "e": e, "f": f }));
            report.residual("decomposition_residual", ex.decomposition_residual, 1e-8);
            report.residual("unitary_defect", ex.pair.unitary_defect, 1e-8);
            report.set("pair", pair_json(&ex.pair)?);
        }
        BclCommand::Build { pair } => {
            let b = load_pair(pair)?;
            let w = biisometry_from_bcl(&b, config.n)?;
            biiso_residuals(report, &w)?;
            report.set("biisometry", serde_json::to_value(BiIsometryDoc::from_biisometry(&w))?);
        }
        BclCommand::FromSymbol { symbol } => {
            let theta = symbol_from_json(&read(symbol)?)?;
            let n = config.n.max(kernel_capture_depth(&theta));
            let m = build_model_biisometry(&theta, n, config.k)?;
            report.set("n_used", n);
            let direct = bcl_from_symbol(&m, tol)?;
            report.set("pair", pair_json(&direct)?);
            if m.spaces.defect_rank == 0 {
                report.residual("unitary_defect", direct.unitary_defect, 1e-8);
                let ex = bcl_from_biisometry(&m.biiso, tol)?;
                report.residual("decomposition_residual", ex.decomposition_residual, 1e-8);
                if !equivalence_json(report, "extraction_route", &direct, &ex.pair, DEFAULT_WORD_LEN, tol)? {
                    report.fail("symbol route and extraction route are not certified equivalent");
                }
            } else {
                // infinite-dimensional defect space: both routes give the same compression
                report.set("unitary_defect", direct.unitary_defect);
                let ex = bcl_compression_from_biisometry(&m.biiso, tol)?;
                let diff = if ex.pair.dim() == direct.dim() { op_norm(&(&ex.pair.u - &direct.u)) } else { f64::INFINITY };
                report.residual("compression_mismatch", diff, 1e-8);
            }
        }
        BclCommand::Roundtrip { pair } => {
            let b = load_pair(pair)?;
            let w = biisometry_from_bcl(&b, config.n)?;
            biiso_residuals(report, &w)?;
            let ex = bcl_from_biisometry(&w, tol)?;
            report.residual("decomposition_residual", ex.decomposition_residual, 1e-8);
            if !equivalence_json(report, "equivalence", &b, &ex.pair, DEFAULT_WORD_LEN, tol)? {
                report.fail("round trip is not certified equivalent");
            }
        }
        BclCommand::Equiv { pairs, word_len } => {
            if pairs.len() != 2 {
                return Err(Error::InvalidInput(format!("equiv takes two --pair files, got {}", pairs.len())));
            }
            let a = load_pair(&pairs[0])?;
            let b = load_pair(&pairs[1])?;
            equivalence_json(report, "equivalence", &a, &b, *word_len, tol)?;
        }
    }
    Ok(())
}

fn lattice_command(action: &LatticeCommand, report: &mut Report) -> Result<()> {
    match action {
        LatticeCommand::Period { zset } => {
            let a = load_zset(zset)?;
            report.set("minimal_period", a.minimal_period());
            report.set("irreducible", a.is_irreducible());
        }
        LatticeCommand::Classify { zsets } => {
            if zsets.len() != 2 {
                return Err(Error::InvalidInput(format!("classify takes two --zset files, got {}", zsets.len())));
            }
            let a = load_zset(&zsets[0])?;
            let b = load_zset(&zsets[1])?;
            let shift = a.translate_equivalent(&b);
            report.set("equivalent", shift.is_some());
            report.set("shift", shift);
            report.set("periods", json!([a.minimal_period(), b.minimal_period()]));
        }
        LatticeCommand::Staircase { staircase, radius } => {
            let g = staircase_from_json(&read(staircase)?)?;
            let a = staircase_to_zset(&g);
            report.set("a_gamma", serde_json::to_value(ZSetDoc::from(&a))?);
            let c = g.anchor_index();
            let pts: Vec<Value> = (c - radius..=c + radius).map(|n| json!([n, g.gamma(n).0, g.gamma(n).1])).collect();
            report.set("boundary", pts);
            report.set("minimal_period", a.minimal_period());
        }
        LatticeCommand::Restrict { staircase, width, depth } => {
            let g = staircase_from_json(&read(staircase)?)?;
            let w = staircase_restriction_biisometry(&g, *width, *depth)?;
            biiso_residuals(report, &w)?;
            report.set("dims", json!({ "window": w.dim(), "interior": w.interior.len() }));
            report.residual("boundary_pair_residual", staircase_bcl_residual(&g, *width, *depth, 2)?, 1e-8);
        }
        LatticeCommand::Fiber { zset, theta } => {
            let a = load_zset(zset)?;
            let (u, p) = direct_integral_factor(&a, C64::from_polar(1.0, *theta))?;
            report.set("u0", mat_json(&u));
            report.set("p0", mat_json(&p));
            report.residual("unitary_defect", lattice::factor_unitarity_defect(&u), 1e-12);
            report.set("commutant_dimension", commutant_dimension(&u, &p));
        }
        LatticeCommand::Commutant { zset, theta, pair } => {
            let (u, p) = match (zset, pair) {
                (Some(z), None) => {
                    let a = load_zset(z)?;
                    direct_integral_factor(&a, C64::from_polar(1.0, theta.unwrap_or(0.0)))?
                }
                (None, Some(pp)) => {
                    let b = load_pair(pp)?;
                    (b.u, b.p)
                }
                _ => return Err(Error::InvalidInput("give exactly one of --zset and --pair".into())),
            };
            let d = commutant_dimension(&u, &p);
            report.set("commutant_dimension", d);
            report.set("irreducible", d == 1);
        }
    }
    Ok(())
}

/// Blaschke factor with `φ(0) = 1/2`.
pub fn half_blaschke() -> InnerScalar {
    InnerScalar::new(vec![C64::new(-0.5, 0.0)], C64::new(1.0, 0.0)).expect("zero inside the disk")
}

/// Largest `‖Ω(z)Θ(z) − I‖` on the leading `lead × lead` block over `m`
/// points of modulus `r`.
pub fn left_inverse_residual(dim: usize, lead: usize, r: f64, m: usize, eta_printed: bool) -> Result<f64> {
    let phi = half_blaschke();
    let theta = shifted_example_symbol(dim, &phi)?;
    let phi0 = phi.eval(C64::new(0.0, 0.0));
    let mut worst = 0.0f64;
    for j in 0..m {
        let z = C64::from_polar(r, 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / m as f64);
        let omega = if eta_printed {
            let eta = C64::new(0.8, 0.0) / z * (C64::new(1.0, 0.0) - phi.eval(z) / phi0);
            example_left_inverse_with(dim, phi0, eta)
        } else {
            shifted_example_left_inverse(dim, &phi, z)?
        };
        let prod = omega * theta.eval(z)?;
        let d = prod.view((0, 0), (lead, lead)) - CMat::identity(lead, lead);
        worst = worst.max(op_norm(&d.into_owned()));
    }
    Ok(worst)
}

fn paper_examples(config: &RunConfig, report: &mut Report) -> Result<()> {
    let tol = config.tol;
    // shifted example
    let phi = half_blaschke();
    report.residual("example_phi0_error", (phi.eval(C64::new(0.0, 0.0)) - 0.5).norm(), 1e-14);
    report.residual("example_left_inverse_residual", left_inverse_residual(16, 12, 0.9, 32, false)?, 1e-8);
    let printed = left_inverse_residual(16, 12, 0.9, 32, true)?;
    report.set("example_printed_eta_residual", printed);
    let theta0 = shifted_example_symbol(8, &phi)?.eval(C64::new(0.0, 0.0))?;
    let gap = eigenvalue_gap(&theta0, C64::new(0.3, 0.0));
    report.residual("example_eigenvalue_gap", gap, 1e-10);
    let small = shifted_example_symbol(4, &phi)?;
    let m = build_model_biisometry(&small, 6, config.k)?;
    let b = bishift_test(&m.biiso, &small, 50, config.k, tol)?;
    report.check("example_is_bishift", b.is_bishift, true);

    // lattice facts
    let quadrant = staircase_to_zset(&Staircase::quadrant());
    let cross = staircase_to_zset(&Staircase::cross());
    report.check("quadrant_steps_negative", quadrant.set_eq(&ZSet::below(0)), true);
    report.check("cross_steps_naturals", cross.set_eq(&ZSet::from(0)), true);
    let two = ZSet::multiples(2, 0)?;
    report.check("period_two", two.minimal_period() == Some(2), true);
    report.check("two_vs_two_plus_one", two.translate_equivalent(&ZSet::multiples(2, 1)?) == Some(1), true);
    report.check("two_vs_three", two.translate_equivalent(&ZSet::multiples(3, 0)?).is_none(), true);
    let mut worst = 0.0f64;
    for g in [Staircase::quadrant(), Staircase::cross()] {
        worst = worst.max(staircase_bcl_residual(&g, 6, 6, 2)?);
    }
    report.residual("staircase_boundary_pair_residual", worst, 1e-8);

    // direct integral fibers for period two
    let mut max_witness = 0.0f64;
    let mut all_irreducible = true;
    for j in 0..8 {
        let zeta = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / 8.0);
        let (u, p) = direct_integral_factor(&two, zeta)?;
        all_irreducible &= commutant_dimension(&u, &p) == 1;
        let r = fiber_vs_rotated_shift(&u, &p, zeta, config.n, config.k, tol)?;
        max_witness = max_witness.max(r);
    }
    report.check("fibers_irreducible", all_irreducible, true);
    report.residual("fiber_witness_residual", max_witness, 1e-8);
    let (u4, p4) = lattice::direct_integral_factor_with_period(&two, 4, C64::from_polar(1.0, 0.3))?;
    report.check("period_four_reducible", commutant_dimension(&u4, &p4) > 1, true);
    Ok(())
}

/// Witness residual between the pair of `(U₀(ζ), P₀)` (read back from its
/// bi-isometry) and the pair of the model of `Θ(z) = ζ̄ z`, which is
/// `(ζS, S)`. Infinite when no witness is found.
pub fn fiber_vs_rotated_shift(u: &CMat, p: &CMat, zeta: C64, n: i64, k: usize, tol: Tolerance) -> Result<f64> {
    let fiber = BclPair::new(u.clone(), p.clone())?;
    let a = bcl_from_biisometry(&biisometry_from_bcl(&fiber, n)?, tol)?.pair;
    let theta = OpSymbol::from_coefficients(&[CMat::zeros(1, 1), CMat::from_element(1, 1, zeta.conj())])?;
    let m = build_model_biisometry(&theta, n, k)?;
    let b = bcl_from_biisometry(&m.biiso, tol)?.pair;
    Ok(match pair_equivalence(&a, &b, DEFAULT_WORD_LEN, tol)? {
        Equivalence::Equivalent(x) => witness_residual(&a, &b, &x),
        _ => f64::INFINITY,
    })
}

/// Document forms used by the examples and tests.
pub fn pair_document(b: &BclPair) -> Result<String> {
    bcl_to_json(b)
}

pub fn biisometry_document(w: &BiIsometry) -> String {
    biisometry_to_json(w)
}
