//! `heisolv`: analyse dissipative second-order operators on Heisenberg groups.
//!
//! Exit codes: 0 when a verdict or output was produced, 2 for input and I/O
//! errors, 3 for numerical failures (including failed verification rows),
//! 4 for internal errors.

mod input;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heisolv_core::classify::{classify, ClassifyOptions};
use heisolv_core::kernel::kernel_hat;
use heisolv_core::lab::{self, Grid, GridFunction};
use heisolv_core::report::{self, CheckRow, CheckStatus, SpecEcho};
use heisolv_core::spectral::structural_report;
use heisolv_core::symplectic::{conjugate_a, hamilton_from_a, random_real_symplectic};
use heisolv_core::{Error, ErrorKind, OperatorSpec, C64};
use input::{SpecArgs, TolArgs};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "heisolv", version, about = "Local solvability and Gaussian kernels for operators on Heisenberg groups")]
struct Cli {
    /// Worker threads for parallel quadrature (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reference mode: single thread, byte-stable output.
    #[arg(long, global = true)]
    reference: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
    Bin,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    spec: SpecArgs,
    #[command(flatten)]
    tol: TolArgs,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: structure, kernel checks and the solvability verdict.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 50)]
        kmax: usize,
        #[arg(long, default_value_t = 10)]
        mmax: u32,
        /// Floating-point diophantine scan even for rational data.
        #[arg(long)]
        no_exact: bool,
        /// Central frequency for the kernel checks.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Sample the kernel on a grid (Fourier side by default).
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        mu: f64,
        /// Points per axis (power of two).
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Side length (default: self-dual, √grid).
        #[arg(long)]
        extent: Option<f64>,
        /// Sample the space-side kernel instead of its transform.
        #[arg(long)]
        space: bool,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run an invariant suite and print a pass/fail table.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Twisted convolution of two grid files, or the semigroup check.
    Convolve {
        #[command(flatten)]
        common: Common,
        /// Check Γ_t ×_μ Γ_s = Γ_{t+s} and the contraction bound.
        #[arg(long)]
        semigroup: bool,
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        #[arg(long, default_value_t = 0.1)]
        s: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long)]
        extent: Option<f64>,
        /// Random test functions for the contraction bound.
        #[arg(long, default_value_t = 10)]
        tests: usize,
        /// Input grid files (binary format) for a plain convolution.
        #[arg(long)]
        f: Option<PathBuf>,
        #[arg(long)]
        g: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Structure,
    Kernel,
    Classify,
    Lab,
    All,
}

enum Failure {
    Core(Error),
    Checks(usize),
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(e.into())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes(v: &serde_json::Value) -> Result<Vec<u8>, Error> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn classify_options(common: &Common, fixture: Option<&str>) -> ClassifyOptions {
    ClassifyOptions {
        tol: common.tol.resolve(),
        // The strip rule without (R) is proved only for this example.
        strip_without_r: fixture == Some("example_2_3"),
        ..ClassifyOptions::default()
    }
}

fn grid_for(n: usize, m: usize, extent: Option<f64>) -> Result<Grid, Error> {
    Grid::new(n, extent.unwrap_or((m as f64).sqrt()), m)
}

fn write_grid(f: &GridFunction, format: Format, out: &Option<PathBuf>) -> Result<(), Error> {
    let mut buf = Vec::new();
    match format {
        Format::Bin => lab::io::write_binary(f, &mut buf)?,
        _ => lab::io::write_csv(f, &mut buf)?,
    }
    emit(out, &buf)
}

fn analyze(common: &Common, kmax: usize, mmax: u32, no_exact: bool, mu: f64, format: Format) -> Result<(), Failure> {
    let r = common.spec.resolve()?;
    let opts = ClassifyOptions { k_max: kmax, m_max: mmax, exact: !no_exact, ..classify_options(common, r.fixture.as_deref()) };
    let echo = SpecEcho::new(&r.spec, r.expr.clone(), r.fixture.clone());
    let rep = report::analyze(&r.spec, echo, &opts, mu, common.seed);
    let doc = report::report_to_json(&rep)?;
    match format {
        Format::Json => emit(&common.out, &json_bytes(&doc)?)?,
        _ => {
            let v = &rep.verdict;
            let q = &v.certificate.quantities;
            let mut s = String::from("field,value\n");
            s += &format!("status,{:?}\n", v.status);
            s += &format!("tag,{}\n", v.certificate.tag.clone().unwrap_or_default());
            s += &format!("nu,{}\n", q.nu.map(|x| x.to_string()).unwrap_or_default());
            s += &format!("flags,{}\n", v.flags.join(";"));
            emit(&common.out, s.as_bytes())?;
        }
    }
    Ok(())
}

fn kernel(common: &Common, t: f64, mu: f64, m: usize, extent: Option<f64>, space: bool, format: Format) -> Result<(), Failure> {
    let r = common.spec.resolve()?;
    let tol = common.tol.resolve();
    let s = hamilton_from_a(&r.spec.a)?;
    let grid = grid_for(r.spec.n, m, extent)?;
    let kh = kernel_hat(&s, mu, C64::new(t, 0.0), &tol)?;
    let f = if space { lab::checks::kernel_on_grid(&kh, grid)?.0 } else { GridFunction::from_fn(grid, |w| kh.eval_real(w)) };
    write_grid(&f, format, &common.out)?;
    Ok(())
}

fn classify_checks(spec: &OperatorSpec, opts: &ClassifyOptions) -> Vec<CheckRow> {
    const SUITE: &str = "classify";
    let base = classify(spec, opts);
    let mut rows = vec![CheckRow::flag(SUITE, "verdict", true, format!("{:?} {}", base.status, base.certificate.tag.clone().unwrap_or_default()))];
    let nu0 = base.certificate.quantities.nu;
    let mut same = true;
    let mut dnu = 0.0f64;
    for seed in 0..5 {
        let t = random_real_symplectic(spec.n, seed);
        let conj = OperatorSpec { a: conjugate_a(&spec.a, &t), ..spec.clone() };
        let v = classify(&conj, opts);
        same &= v.status == base.status && v.certificate.tag == base.certificate.tag;
        if let (Some(a), Some(b)) = (nu0, v.certificate.quantities.nu) {
            dnu = dnu.max((a - b).abs());
        }
    }
    rows.push(CheckRow::flag(SUITE, "verdict invariant under 5 symplectic conjugations", same, ""));
    rows.push(CheckRow::at_most(SUITE, "ν drift under conjugation", dnu, 1e-8));
    let scaled = OperatorSpec { a: &spec.a * C64::new(2.5, 0.0), alpha: spec.alpha * 2.5, ..spec.clone() };
    let v = classify(&scaled, opts);
    rows.push(CheckRow::flag(
        SUITE,
        "verdict invariant under scaling by 2.5",
        v.status == base.status && v.certificate.tag == base.certificate.tag,
        "",
    ));
    rows
}

fn lab_checks(spec: &OperatorSpec, common: &Common, mu: f64) -> Result<Vec<CheckRow>, Error> {
    const SUITE: &str = "lab";
    if spec.n != 1 {
        return Ok(vec![CheckRow::skip(SUITE, "semigroup law", "grid quadrature runs for n = 1")]);
    }
    let s = hamilton_from_a(&spec.a)?;
    let grid = grid_for(1, 64, None)?;
    match lab::semigroup_check(&s, mu, 0.1, 0.1, grid, 10, common.seed, &common.tol.resolve()) {
        Ok(c) => Ok(vec![
            CheckRow::at_most(SUITE, "semigroup law Γ_t×Γ_s = Γ_{t+s}", c.err_semigroup, 1e-3).with_detail(c.kernel_source),
            CheckRow::at_most(SUITE, "contraction slack", c.err_contraction, 1e-6),
        ]),
        Err(e) => Ok(vec![CheckRow::skip(SUITE, "semigroup law", e.to_string())]),
    }
}

fn verify(common: &Common, suite: Suite, mu: f64, format: Format) -> Result<(), Failure> {
    let r = common.spec.resolve()?;
    let opts = classify_options(common, r.fixture.as_deref());
    let mut rows = Vec::new();
    let want = |s: Suite| suite == s || suite == Suite::All;
    let structure = structural_report(&r.spec, &opts.tol);
    if want(Suite::Structure) || want(Suite::Kernel) {
        match &structure {
            Ok((st, rep)) => {
                if want(Suite::Structure) {
                    rows.extend(report::structure_checks(rep, &opts.tol));
                }
                if want(Suite::Kernel) {
                    rows.extend(report::kernel_checks(st, mu, common.seed, &opts.tol));
                }
            }
            Err(e) => rows.push(CheckRow::flag("structure", "spectral structure", false, e.to_string())),
        }
    }
    if want(Suite::Classify) {
        rows.extend(classify_checks(&r.spec, &opts));
    }
    if want(Suite::Lab) {
        rows.extend(lab_checks(&r.spec, common, mu)?);
    }
    let failed = rows.iter().filter(|r| r.status == CheckStatus::Fail).count();
    let bytes = match format {
        Format::Json => json_bytes(&serde_json::to_value(&rows)?)?,
        _ => {
            let mut s = String::from("suite,check,status,value,threshold,detail\n");
            for r in &rows {
                let num = |x: Option<f64>| x.map(|v| format!("{v:.3e}")).unwrap_or_default();
                let status = serde_json::to_value(r.status)?.as_str().unwrap_or("").to_string();
                s += &format!("{},\"{}\",{},{},{},\"{}\"\n", r.suite, r.name, status, num(r.value), num(r.threshold), r.detail.replace('"', "'"));
            }
            s.into_bytes()
        }
    };
    emit(&common.out, &bytes)?;
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn convolve(
    common: &Common,
    semigroup: bool,
    t: f64,
    s_time: f64,
    mu: f64,
    m: usize,
    extent: Option<f64>,
    tests: usize,
    f: &Option<PathBuf>,
    g: &Option<PathBuf>,
    format: Format,
) -> Result<(), Failure> {
    if semigroup {
        let r = common.spec.resolve()?;
        let s = hamilton_from_a(&r.spec.a)?;
        let grid = grid_for(r.spec.n, m, extent)?;
        let c = lab::semigroup_check(&s, mu, t, s_time, grid, tests, common.seed, &common.tol.resolve())?;
        emit(&common.out, &json_bytes(&serde_json::to_value(&c)?)?)?;
        return Ok(());
    }
    let (Some(f), Some(g)) = (f, g) else {
        return Err(Error::Schema("convolve needs --semigroup or both --f and --g".into()).into());
    };
    let load = |p: &Path| lab::io::load_binary(p);
    let out = lab::twisted_convolve(&load(f)?, &load(g)?, mu)?;
    write_grid(&out, format, &common.out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = if cli.reference { Some(1) } else { cli.threads };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Numeric(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Analyze { common, kmax, mmax, no_exact, mu, format } => analyze(common, *kmax, *mmax, *no_exact, *mu, *format),
        Command::Kernel { common, t, mu, grid, extent, space, format } => kernel(common, *t, *mu, *grid, *extent, *space, *format),
        Command::Verify { common, suite, mu, format } => verify(common, *suite, *mu, *format),
        Command::Convolve { common, semigroup, t, s, mu, grid, extent, tests, f, g, format } => {
            convolve(common, *semigroup, *t, *s, *mu, *grid, *extent, *tests, f, g, *format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Core(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Numeric => 3,
            })
        }
        Ok(Err(Failure::Checks(n))) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(3)
        }
        Err(_) => {
            eprintln!("internal error");
            ExitCode::from(4)
        }
    }
}
