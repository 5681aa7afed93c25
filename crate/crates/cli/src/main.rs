//! `ppgmres`: solves, interior eigensolves, polynomial inspection, the
//! interval estimate and matrix generation from the command line.

mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ppgmres_core::analysis::{
    estimate_improvement, sample_polynomial, sample_real_axis, write_samples_csv, Grid, IntervalSpectrum,
};
use ppgmres_core::drivers::{build_polynomial, pp_arnoldi_interior, pp_gmres, PolySpec};
use ppgmres_core::krylov::{restarted_gmres_with, GmresOptions, SolveReport, REPORT_SCHEMA};
use ppgmres_core::operators::{write_matrix_market, LinearOperator};
use ppgmres_core::rng::{stream, streams, unit_normal_vector};
use ppgmres_core::stability::StabilityConfig;

use config::{parse_grid, parse_pair, parse_range, FileConfig, MatrixArgs, PolyArgs};

#[derive(Debug, Parser)]
#[command(name = "ppgmres", version, about)]
struct Cli {
    /// TOML file with `matrix`, `out_dir` and `[solve]`, `[eig]`, `[poly]` tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for reports.
    #[arg(long, global = true, env = "PPGMRES_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Base name of the report files (defaults to the command name).
    #[arg(long, global = true)]
    name: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PP(d)-GMRES(m) on A x = b with a random unit right-hand side.
    Solve(SolveArgs),
    /// Eigenvalues nearest a target by Arnoldi on the polynomial.
    Eig(EigArgs),
    /// Build a polynomial and dump its roots, pof values and samples.
    Poly(PolyCmdArgs),
    /// Convergence estimate for a spectrum in [u, v] ∪ [a, b].
    Estimate(EstimateArgs),
    /// Write a preset matrix in Matrix Market format.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[command(flatten)]
    poly: PolyArgs,
    /// Restart length.
    #[arg(long)]
    m: Option<usize>,
    /// Relative residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_mvp: Option<u64>,
    #[arg(long)]
    max_cycles: Option<usize>,
    /// Seed of the polynomial start vector.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed of the right-hand side.
    #[arg(long)]
    rhs_seed: Option<u64>,
    /// Track the true residual and run the correction phase if it lags.
    #[arg(long)]
    verify: bool,
}

#[derive(Debug, Args)]
struct EigArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[command(flatten)]
    poly: PolyArgs,
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    #[arg(long)]
    nev: Option<usize>,
    /// Subspace size and vectors kept at restart, as m,k.
    #[arg(long, value_parser = parse_pair)]
    arnoldi: Option<(usize, usize)>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_cycles: Option<usize>,
    #[arg(long)]
    max_mvp: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Harmonic Rayleigh–Ritz for the values of A.
    #[arg(long)]
    harmonic: bool,
}

#[derive(Debug, Args)]
struct PolyCmdArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[command(flatten)]
    poly: PolyArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Shift the matrix by σ before building the polynomial.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<f64>,
    /// Sample φ on the real axis, lo:hi:step.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    sample: Option<(f64, f64, f64)>,
    /// Sample φ on a complex grid, xlo:xhi:nx,ylo:yhi:ny.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: Option<Grid>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct EstimateArgs {
    #[arg(long)]
    u: f64,
    #[arg(long)]
    v: f64,
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: usize,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Preset name.
    #[arg(long)]
    matrix: String,
    #[arg(long, default_value_t = 1)]
    matrix_seed: u64,
    /// Output file; defaults to <out-dir>/<preset>.mtx.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failures split by exit code.
enum Failure {
    /// Bad flags, config file or parameters: exit 2.
    Config(anyhow::Error),
    /// The run itself failed: exit 1.
    Run(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(_) => 1,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Run(e) => e,
        }
    }
}

fn classify(e: anyhow::Error) -> Failure {
    use ppgmres_core::Error;
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidArgument(_) | Error::Dimension { .. } | Error::Parse { .. } | Error::Unsupported(_)) => {
            Failure::Config(e)
        }
        Some(_) => Failure::Run(e),
        // unreadable files and the like
        None => Failure::Config(e),
    }
}

struct Output {
    dir: PathBuf,
    name: String,
}

impl Output {
    fn path(&self, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{ext}", self.name))
    }

    fn json(&self, value: &impl Serialize) -> anyhow::Result<PathBuf> {
        let path = self.path("json");
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn csv(&self, suffix: &str, write: impl FnOnce(BufWriter<File>) -> std::io::Result<()>) -> anyhow::Result<()> {
        let path = self.dir.join(format!("{}{suffix}.csv", self.name));
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write(BufWriter::new(f)).with_context(|| format!("writing {}", path.display()))
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    schema: u32,
    command: &'a str,
    status: &'static str,
    exit_code: u8,
    error: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (file, file_error) = match FileConfig::load(cli.config.as_deref()) {
        Ok(f) => (f, None),
        Err(e) => (FileConfig::default(), Some(e)),
    };
    let command = match &cli.command {
        Command::Solve(_) => "solve",
        Command::Eig(_) => "eig",
        Command::Poly(_) => "poly",
        Command::Estimate(_) => "estimate",
        Command::Gen(_) => "gen",
    };
    let out = Output {
        dir: cli.out_dir.clone().or(file.out_dir.clone()).unwrap_or_else(|| PathBuf::from(".")),
        name: cli.name.clone().unwrap_or_else(|| command.to_string()),
    };
    if let Err(e) = std::fs::create_dir_all(&out.dir) {
        eprintln!("error: cannot create {}: {e}", out.dir.display());
        return ExitCode::from(2);
    }
    let result = match file_error {
        Some(e) => Err(Failure::Config(e)),
        None => match &cli.command {
            Command::Solve(a) => solve(a, &file, &out),
            Command::Eig(a) => eig(a, &file, &out),
            Command::Poly(a) => poly(a, &file, &out),
            Command::Estimate(a) => estimate(a, &out),
            Command::Gen(a) => gen(a, &out),
        },
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            let report = ErrorReport {
                schema: REPORT_SCHEMA,
                command,
                status: "error",
                exit_code: f.code(),
                error: format!("{:#}", f.error()),
            };
            if let Err(e) = out.json(&report) {
                eprintln!("error: could not write the error report: {e:#}");
            }
            ExitCode::from(f.code())
        }
    }
}

fn solve(a: &SolveArgs, file: &FileConfig, out: &Output) -> Result<u8, Failure> {
    let (name, op) = a.matrix.load(file).map_err(classify)?;
    let mut cfg = file.solve.clone().unwrap_or_default();
    a.poly.apply(&mut cfg.poly);
    if let Some(m) = a.m {
        cfg.m = m;
    }
    if let Some(t) = a.tol {
        cfg.tol = t;
    }
    if let Some(v) = a.max_mvp {
        cfg.max_mvp = v;
    }
    if let Some(v) = a.max_cycles {
        cfg.max_cycles = v;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.verify_true_residual |= a.verify;
    cfg.validate().map_err(|e| Failure::Config(e.into()))?;
    let rhs_seed = a.rhs_seed.or(file.rhs_seed).unwrap_or(1);
    let b = unit_normal_vector(&mut stream(rhs_seed, streams::RHS), op.dim());

    let report = if cfg.poly.d == 1 {
        // degree one is plain GMRES
        let opts = GmresOptions {
            max_cycles: cfg.max_cycles,
            ..GmresOptions::new(cfg.m, cfg.tol, cfg.max_mvp)
        };
        let (_, mut r) = restarted_gmres_with(&op, &b, &opts, None).map_err(|e| classify(e.into()))?;
        r.seed = Some(cfg.seed);
        r
    } else {
        pp_gmres(&op, &b, &cfg).map_err(|e| classify(e.into()))?.1
    };
    write_solve(out, &report).map_err(Failure::Run)?;
    println!("{}", summary(&name, &report));
    Ok(if report.converged { 0 } else { 1 })
}

fn write_solve(out: &Output, report: &SolveReport) -> anyhow::Result<()> {
    out.json(report)?;
    out.csv("", |w| report.write_csv(w))
}

fn summary(name: &str, r: &SolveReport) -> String {
    let true_res = r
        .final_true_residual
        .map_or_else(|| "n/a".to_string(), |t| format!("{t:.3e}"));
    format!(
        "{name}: degree {} added_copies {} matvecs {} cycles {} converged {} true_residual {true_res} seed {}",
        r.degree,
        r.added_copies,
        r.matvecs,
        r.cycles,
        r.converged,
        r.seed.map_or_else(|| "-".into(), |s| s.to_string())
    )
}

fn eig(a: &EigArgs, file: &FileConfig, out: &Output) -> Result<u8, Failure> {
    let (name, op) = a.matrix.load(file).map_err(classify)?;
    let mut cfg = file.eig.clone().unwrap_or_default();
    a.poly.apply(&mut cfg.poly);
    if let Some(s) = a.sigma {
        cfg.sigma = s;
    }
    if let Some(n) = a.nev {
        cfg.nev = n;
    }
    if let Some((m, k)) = a.arnoldi {
        cfg.m = m;
        cfg.k = k;
    }
    if let Some(t) = a.tol {
        cfg.tol = t;
    }
    if let Some(v) = a.max_cycles {
        cfg.max_cycles = v;
    }
    if let Some(v) = a.max_mvp {
        cfg.max_mvp = v;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.harmonic |= a.harmonic;
    let r = pp_arnoldi_interior(&op, &cfg).map_err(|e| classify(e.into()))?;
    out.json(&r).map_err(Failure::Run)?;
    let lo = r.values.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let hi = r.values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    println!(
        "{name}: sigma {} degree {} values {} in [{lo:.6}, {hi:.6}] cycles {} matvecs {} converged {} seed {}",
        r.sigma,
        r.degree,
        r.values.len(),
        r.cycles,
        r.matvecs,
        r.converged,
        r.seed
    );
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if r.converged { 0 } else { 1 })
}

#[derive(Serialize)]
struct PolyReport<'a> {
    schema: u32,
    matrix: &'a str,
    seed: u64,
    sigma: f64,
    spec: &'a PolySpec,
    degree: usize,
    eta: Option<f64>,
    removed: &'a [ppgmres_core::Complex64],
    added_copies: usize,
    matvecs: u64,
    /// Roots in the root-list form; absent for Methods 3 and 4.
    polynomial: Option<ppgmres_core::polyprec::PolynomialDump>,
    pof: Option<&'a ppgmres_core::polyprec::PofReport>,
    notes: &'a [String],
}

fn poly(a: &PolyCmdArgs, file: &FileConfig, out: &Output) -> Result<u8, Failure> {
    let (name, op) = a.matrix.load(file).map_err(classify)?;
    let mut spec = file.poly.clone().unwrap_or(PolySpec {
        stability: StabilityConfig::off(),
        ..PolySpec::default()
    });
    a.poly.apply(&mut spec);
    spec.stability.validate().map_err(|e| Failure::Config(e.into()))?;
    let seed = a.seed.unwrap_or(1);
    let sigma = a.sigma.unwrap_or(0.0);
    let shifted = ppgmres_core::operators::Shifted::new(&op, sigma);
    let build = build_polynomial(&shifted, &spec, seed).map_err(|e| classify(e.into()))?;
    let report = PolyReport {
        schema: REPORT_SCHEMA,
        matrix: &name,
        seed,
        sigma,
        spec: &spec,
        degree: build.poly.degree(),
        eta: build.eta,
        removed: &build.removed,
        added_copies: build.added_copies,
        matvecs: build.matvecs,
        polynomial: build.dump(),
        pof: build.pof(),
        notes: &build.notes,
    };
    out.json(&report).map_err(Failure::Run)?;
    let p = build.poly.as_dyn();
    if let Some((lo, hi, step)) = a.sample {
        let s = sample_real_axis(p, lo, hi, step).map_err(|e| Failure::Config(e.into()))?;
        out.csv("_real", |w| write_samples_csv(&s, w)).map_err(Failure::Run)?;
    }
    if let Some(g) = &a.grid {
        let s = sample_polynomial(p, g);
        out.csv("_grid", |w| write_samples_csv(&s, w)).map_err(Failure::Run)?;
    }
    let spline = build
        .spline
        .as_ref()
        .map_or("n/a", |v| if v.pass { "pass" } else { "fail" });
    println!(
        "{name}: degree {} added_copies {} spline {spline} seed {seed}",
        report.degree, report.added_copies
    );
    Ok(0)
}

fn estimate(a: &EstimateArgs, out: &Output) -> Result<u8, Failure> {
    let spec = IntervalSpectrum::new(a.u, a.v, a.a, a.b).map_err(|e| Failure::Config(e.into()))?;
    let e = estimate_improvement(spec, a.d, a.m).map_err(|e| Failure::Config(e.into()))?;
    out.json(&e).map_err(Failure::Run)?;
    println!(
        "delta {:.6e} branch {:?} per_cycle_gmres {:.6e} per_cycle_ppgmres {:.6e} speedup {:.3}",
        e.delta, e.branch, e.per_cycle_gmres, e.per_cycle_ppgmres, e.speedup_matvecs
    );
    Ok(0)
}

fn gen(a: &GenArgs, out: &Output) -> Result<u8, Failure> {
    let op = config::open_matrix(&a.matrix, a.matrix_seed).map_err(classify)?;
    let path = a.output.clone().unwrap_or_else(|| {
        let stem = a.matrix.replace([':', '/'], "_");
        out.dir.join(format!("{stem}.mtx"))
    });
    write_matrix_market(&path, op.matrix()).map_err(|e| Failure::Run(e.into()))?;
    println!("{}: n {} nnz {} -> {}", a.matrix, op.dim(), op.matrix().nnz(), path.display());
    Ok(0)
}
