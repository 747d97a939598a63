//! Command-line front end: evaluation commands, verification suites and tabulation.
//!
//! `run` returns the process exit code: 0 when everything evaluated and every check passed, 1 when a
//! check failed or a value could not be computed, 2 for usage errors and invalid parameters.

pub mod input;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::double_sine::{s2, s2_route, strip_integral, Periods, Route};
use crate::error::{Error, Result};
use crate::hamiltonian::{apply_h_gen, apply_h_s, AnalyticTestFunction};
use crate::params::{
    classify_regime, delta_hat, delta_measure, eta, eta_hat, kernel_k, mu_half, mu_hat_multi, mu_multi, mu_scalar, SystemParams,
};
use crate::quadrature::QuadratureSpec;
use crate::transform::{forward_f, forward_t, rescaled_u};
use crate::wavefunction::{psi, WaveFunctionRequest};
use input::{load_params, load_test_function, parse_complex, parse_complexes, parse_pair, parse_reals, ParamFile};
use report::{write_reports, OutputFormat, SuiteRun, SCHEMA};
use suites::{HamCheck, SuiteOptions, TransformCheck};

#[derive(Parser, Debug)]
#[command(name = "ruij", version, about = "Hyperbolic Ruijsenaars wave functions, transforms and their verification")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub output: OutputFormat,
    /// Seed for probe points.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Parameters as a JSON file or inline JSON: {"n":2,"omega1":1,"omega2":[2,0],"g":0.8}.
    #[arg(long, global = true)]
    pub params: Option<String>,
    /// Tolerance override for every check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Double sine function.
    S2(S2Args),
    /// Measures, kernel and eta.
    Measure(MeasureArgs),
    /// Wave function values.
    Wavefn(WavefnArgs),
    /// Difference operators and their checks.
    Ham(HamArgs),
    /// Spectral transforms and their checks.
    Transform(TransformArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Tabulate a function along a segment, as CSV.
    Tabulate(TabulateArgs),
}

#[derive(Args, Debug)]
pub struct S2Args {
    #[command(subcommand)]
    pub action: S2Action,
}

#[derive(Subcommand, Debug)]
pub enum S2Action {
    /// S2(z | w1, w2) at each `--z re,im`.
    Eval {
        #[arg(long, required = true, allow_hyphen_values = true)]
        z: Vec<String>,
        /// Periods as `re:im`; default from --params, else (1, 1).
        #[arg(long, allow_hyphen_values = true)]
        omega1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        omega2: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Mu,
    MuMulti,
    MuHalf,
    Kernel,
    Delta,
    Eta,
    MuHat,
    DeltaHat,
    EtaHat,
}

impl MeasureKind {
    fn scalar(self) -> bool {
        matches!(self, MeasureKind::Mu | MeasureKind::Kernel)
    }
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[arg(long, value_enum)]
    pub kind: MeasureKind,
    /// Comma list of `re` or `re:im`; scalar kinds take one entry, the others n.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub x: Vec<String>,
}

#[derive(Args, Debug)]
pub struct WavefnArgs {
    #[command(subcommand)]
    pub action: WavefnAction,
}

#[derive(Subcommand, Debug)]
pub enum WavefnAction {
    /// Psi_lambda(x); the free closed form is used when it applies.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        lam: String,
        #[arg(long, required = true, allow_hyphen_values = true)]
        x: Vec<String>,
        /// Relative quadrature tolerance.
        #[arg(long, default_value_t = 1e-9)]
        rel_tol: f64,
    },
}

#[derive(Args, Debug)]
pub struct HamArgs {
    #[command(subcommand)]
    pub action: HamAction,
}

#[derive(Subcommand, Debug)]
pub enum HamAction {
    /// H_s f(x), or the generating operator H(lambda) f(x) with --lambda.
    Apply {
        /// Test function as JSON file or inline JSON.
        #[arg(long)]
        f: String,
        #[arg(long, required = true, allow_hyphen_values = true)]
        x: Vec<String>,
        #[arg(long, conflicts_with = "lambda")]
        s: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    Verify {
        #[arg(long, value_enum)]
        check: HamCheck,
    },
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[command(subcommand)]
    pub action: TransformAction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransformKind {
    /// T phi
    T,
    /// F phi, with the regime weight
    F,
    /// rescaled U phi
    U,
}

#[derive(Subcommand, Debug)]
pub enum TransformAction {
    /// Transform of a test function at spectral points.
    Eval {
        #[arg(long, value_enum, default_value = "t")]
        kind: TransformKind,
        #[arg(long)]
        f: String,
        /// Spectral points, each a comma list of n reals.
        #[arg(long, required = true, allow_hyphen_values = true)]
        lam: Vec<String>,
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
    },
    Verify {
        #[arg(long, value_enum)]
        check: TransformCheck,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Suite, group (`s2`, `acceptance`) or `all`.
    #[arg(long, default_value = "s2")]
    pub suite: String,
    /// List the suites and exit.
    #[arg(long)]
    pub list: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TabulateKind {
    S2,
    Mu,
    #[value(name = "K")]
    K,
    Delta,
    Eta,
    Psi,
}

#[derive(Args, Debug)]
pub struct TabulateArgs {
    #[arg(long, value_enum)]
    pub kind: TabulateKind,
    /// Start point: one entry for s2, mu, K; n entries otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub from: String,
    #[arg(long, allow_hyphen_values = true)]
    pub to: String,
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// Spectral point for psi.
    #[arg(long, allow_hyphen_values = true)]
    pub lam: Option<String>,
}

/// One evaluated value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub input: Vec<[f64; 2]>,
    pub value: Option<[f64; 2]>,
    pub error_estimate: Option<f64>,
    /// `ok`, `pole`, `zero` or `error: ...`.
    pub flag: String,
}

impl Row {
    fn new(input: &[Complex64], out: Result<(Complex64, f64)>) -> Self {
        let input = input.iter().map(|z| [z.re, z.im]).collect();
        match out {
            Ok((v, e)) => Row { input, value: Some([v.re, v.im]), error_estimate: Some(e), flag: "ok".into() },
            Err(err) => {
                let flag = match err {
                    Error::PoleOfS2(_) => "pole".to_string(),
                    Error::ZeroOfS2(_) => "zero".to_string(),
                    e => format!("error: {e}"),
                };
                Row { input, value: None, error_estimate: None, flag }
            }
        }
    }

    /// Marks an exact zero of S2, which evaluates to 0 rather than failing.
    fn mark_zero(mut self) -> Self {
        if self.value == Some([0.0, 0.0]) {
            self.flag = "zero".into();
        }
        self
    }

    fn ok(&self) -> bool {
        self.flag == "ok" || self.flag == "zero"
    }
}

#[derive(Clone, Debug, Serialize)]
struct Evaluation {
    schema: u32,
    command: String,
    params: Value,
    rows: Vec<Row>,
}

fn usage(e: &Error) -> bool {
    matches!(e, Error::Input(_) | Error::InvalidPeriods(_) | Error::InvalidCoupling(_) | Error::ShapeMismatch { .. } | Error::UnsupportedN(_) | Error::InvalidTestFunction(_) | Error::InvalidQuadrature(_))
}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if usage(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn params_or(cli: &Cli, default: Option<SystemParams>) -> Result<SystemParams> {
    match (&cli.params, default) {
        (Some(a), _) => load_params(a),
        (None, Some(p)) => Ok(p),
        (None, None) => Err(Error::Input("--params is required for this command".into())),
    }
}

fn pj(p: &SystemParams) -> Value {
    serde_json::to_value(ParamFile::from_params(p)).unwrap_or(Value::Null)
}

fn io(e: std::io::Error) -> Error {
    Error::Input(format!("write failed: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(format!("write failed: {e}"))
}

fn write_rows(out: &mut dyn Write, format: OutputFormat, command: &str, params: Value, rows: Vec<Row>) -> Result<i32> {
    let code = if rows.iter().all(Row::ok) { 0 } else { 1 };
    match format {
        OutputFormat::Json => {
            let ev = Evaluation { schema: SCHEMA, command: command.to_string(), params, rows };
            serde_json::to_writer_pretty(&mut *out, &ev).map_err(|e| Error::Input(e.to_string()))?;
            writeln!(out).map_err(io)?;
        }
        OutputFormat::Csv => write_rows_csv(out, &rows)?,
        OutputFormat::Pretty => {
            for r in &rows {
                let inp: Vec<String> = r.input.iter().map(|z| format!("{}{:+}i", z[0], z[1])).collect();
                match r.value {
                    Some(v) => writeln!(out, "({})  ->  {:.15e} {:+.15e}i  (err {:.1e})", inp.join(", "), v[0], v[1], r.error_estimate.unwrap_or(0.0)),
                    None => writeln!(out, "({})  ->  {}", inp.join(", "), r.flag),
                }
                .map_err(io)?;
            }
        }
    }
    Ok(code)
}

/// Header `x1_re,x1_im,...,value_re,value_im,error_estimate,flag`.
fn write_rows_csv(out: &mut dyn Write, rows: &[Row]) -> Result<()> {
    let dim = rows.first().map_or(0, |r| r.input.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=dim).flat_map(|j| [format!("x{j}_re"), format!("x{j}_im")]).collect();
    header.extend(["value_re", "value_im", "error_estimate", "flag"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    let num = |v: Option<f64>| v.map(|t| format!("{t:e}")).unwrap_or_default();
    for r in rows {
        let mut rec: Vec<String> = r.input.iter().flat_map(|z| [format!("{:e}", z[0]), format!("{:e}", z[1])]).collect();
        rec.push(num(r.value.map(|v| v[0])));
        rec.push(num(r.value.map(|v| v[1])));
        rec.push(num(r.error_estimate));
        rec.push(r.flag.clone());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    if let Some(t) = cli.tol {
        if !(t >= 0.0) {
            return Err(Error::Input(format!("--tol must be non-negative, got {t}")));
        }
    }
    let opts = SuiteOptions { seed: cli.seed, tolerance: cli.tol };
    match &cli.command {
        Command::S2(a) => match &a.action {
            S2Action::Eval { z, omega1, omega2 } => s2_eval(cli, z, omega1.as_deref(), omega2.as_deref(), out),
        },
        Command::Measure(a) => measure(cli, a, out),
        Command::Wavefn(a) => match &a.action {
            WavefnAction::Eval { lam, x, rel_tol } => wavefn_eval(cli, lam, x, *rel_tol, out),
        },
        Command::Ham(a) => match &a.action {
            HamAction::Apply { f, x, s, lambda } => ham_apply(cli, f, x, *s, *lambda, out),
            HamAction::Verify { check } => reports(cli, &format!("ham/{check:?}").to_lowercase(), suites::run_ham_check(*check, &opts), out),
        },
        Command::Transform(a) => match &a.action {
            TransformAction::Eval { kind, f, lam, rel_tol } => transform_eval(cli, *kind, f, lam, *rel_tol, out),
            TransformAction::Verify { check, n } => {
                let r = suites::run_transform_check(*check, *n, &opts)?;
                reports(cli, &format!("transform/{check:?}/n{n}").to_lowercase(), r, out)
            }
        },
        Command::Verify(a) => {
            if a.list {
                for s in suites::SUITES {
                    writeln!(out, "{:<20} {}", s.name, s.about).map_err(io)?;
                }
                for (g, members) in suites::GROUPS {
                    writeln!(out, "{:<20} group: {}", g, members.join(", ")).map_err(io)?;
                }
                return Ok(0);
            }
            let r = suites::run_named(&a.suite, &opts)?;
            reports(cli, &a.suite, r, out)
        }
        Command::Tabulate(a) => tabulate(cli, a, out),
    }
}

fn reports(cli: &Cli, name: &str, r: Vec<report::VerificationReport>, out: &mut dyn Write) -> Result<i32> {
    let run = SuiteRun::new(name, cli.seed, r);
    write_reports(out, &run, cli.output)?;
    Ok(if run.pass { 0 } else { 1 })
}

/// S2 with the spread between continuation routes as error estimate; in the strip the integral's own
/// estimate is added.
fn s2_with_error(z: Complex64, w: &Periods) -> Result<(Complex64, f64)> {
    let v = s2(z, w)?;
    let mut err = 0.0f64;
    for route in [Route::FirstPeriod, Route::SecondPeriod] {
        if let Ok(u) = s2_route(z, w, route) {
            err = err.max((u - v).norm());
        }
    }
    if z.re > 0.0 && z.re < w.sum().re {
        if let Ok((_, e)) = strip_integral(z, w, &QuadratureSpec::with_tol(1e-13, 1e-15)) {
            err = err.max(e * v.norm());
        }
    }
    Ok((v, err))
}

fn s2_eval(cli: &Cli, zs: &[String], omega1: Option<&str>, omega2: Option<&str>, out: &mut dyn Write) -> Result<i32> {
    let base = match &cli.params {
        Some(a) => load_params(a)?.omega,
        None => Periods::real(1.0, 1.0)?,
    };
    let w1 = omega1.map(parse_complex).transpose()?.unwrap_or(base.omega1);
    let w2 = omega2.map(parse_complex).transpose()?.unwrap_or(base.omega2);
    let w = Periods::new(w1, w2)?;
    let pts: Vec<Complex64> = zs.iter().map(|s| parse_pair(s)).collect::<Result<_>>()?;
    let rows = pts.iter().map(|&z| Row::new(&[z], s2_with_error(z, &w)).mark_zero()).collect();
    let pars = json!({ "omega1": [w1.re, w1.im], "omega2": [w2.re, w2.im] });
    write_rows(out, cli.output, "s2 eval", pars, rows)
}

fn measure_value(kind: MeasureKind, x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    if kind.scalar() && x.len() != 1 {
        return Err(Error::ShapeMismatch { expected: 1, got: x.len() });
    }
    match kind {
        MeasureKind::Mu => mu_scalar(x[0], p),
        MeasureKind::Kernel => kernel_k(x[0], p),
        MeasureKind::MuMulti => mu_multi(x, p),
        MeasureKind::MuHalf => mu_half(x, p),
        MeasureKind::Delta => delta_measure(x, p),
        MeasureKind::Eta => eta(x, p),
        MeasureKind::MuHat => mu_hat_multi(x, p),
        MeasureKind::DeltaHat => delta_hat(x, p),
        MeasureKind::EtaHat => eta_hat(x, p),
    }
}

fn measure(cli: &Cli, a: &MeasureArgs, out: &mut dyn Write) -> Result<i32> {
    let p = params_or(cli, None)?;
    let mut rows = vec![];
    for s in &a.x {
        let x = parse_complexes(s)?;
        if !a.kind.scalar() && x.len() != p.n {
            return Err(Error::ShapeMismatch { expected: p.n, got: x.len() });
        }
        rows.push(Row::new(&x, measure_value(a.kind, &x, &p).map(|v| (v, 0.0))));
    }
    let mut pars = pj(&p);
    pars["regime"] = json!(format!("{:?}", classify_regime(&p).tag));
    write_rows(out, cli.output, &format!("measure {:?}", a.kind).to_lowercase(), pars, rows)
}

fn wavefn_eval(cli: &Cli, lam: &str, xs: &[String], rel_tol: f64, out: &mut dyn Write) -> Result<i32> {
    let p = params_or(cli, None)?;
    let lambda = parse_reals(lam)?;
    if lambda.len() != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: lambda.len() });
    }
    let spec = QuadratureSpec::with_tol(rel_tol, 1e-14);
    spec.validate()?;
    let mut rows = vec![];
    for s in xs {
        let x = parse_complexes(s)?;
        if x.len() != p.n {
            return Err(Error::ShapeMismatch { expected: p.n, got: x.len() });
        }
        let req = WaveFunctionRequest { lambda: lambda.clone(), x: x.clone(), params: p, spec: spec.clone() };
        rows.push(Row::new(&x, psi(&req).map(|r| (r.value, r.error_estimate))));
    }
    let mut pars = pj(&p);
    pars["lambda"] = json!(lambda);
    write_rows(out, cli.output, "wavefn eval", pars, rows)
}

fn ham_apply(cli: &Cli, f: &str, xs: &[String], s: Option<usize>, lambda: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let p = params_or(cli, None)?;
    let phi: AnalyticTestFunction = load_test_function(f)?;
    let func = |x: &[Complex64]| Ok(phi.eval(x));
    let mut rows = vec![];
    for arg in xs {
        let x = parse_complexes(arg)?;
        if x.len() != p.n {
            return Err(Error::ShapeMismatch { expected: p.n, got: x.len() });
        }
        let v = match lambda {
            Some(l) => apply_h_gen(l, &func, &x, &p),
            None => apply_h_s(s.unwrap_or(1), &func, &x, &p),
        };
        rows.push(Row::new(&x, v.map(|v| (v, 0.0))));
    }
    write_rows(out, cli.output, "ham apply", pj(&p), rows)
}

fn transform_eval(cli: &Cli, kind: TransformKind, f: &str, lams: &[String], rel_tol: f64, out: &mut dyn Write) -> Result<i32> {
    let p = params_or(cli, None)?;
    let phi = load_test_function(f)?;
    let spec = QuadratureSpec::with_tol(rel_tol, 1e-13);
    spec.validate()?;
    let mut rows = vec![];
    for arg in lams {
        let lam = parse_reals(arg)?;
        if lam.len() != p.n {
            return Err(Error::ShapeMismatch { expected: p.n, got: lam.len() });
        }
        let v = match kind {
            TransformKind::T => forward_t(&phi, &lam, &p, &spec),
            TransformKind::F => forward_f(&phi, &lam, &p, &spec),
            TransformKind::U => rescaled_u(&phi, &lam, &p, &spec),
        };
        let lc: Vec<Complex64> = lam.iter().map(|&t| Complex64::new(t, 0.0)).collect();
        rows.push(Row::new(&lc, v.map(|r| (r.value, r.error_estimate))));
    }
    write_rows(out, cli.output, &format!("transform eval {kind:?}").to_lowercase(), pj(&p), rows)
}

fn tabulate(cli: &Cli, a: &TabulateArgs, out: &mut dyn Write) -> Result<i32> {
    let p = match a.kind {
        TabulateKind::S2 => params_or(cli, Some(SystemParams::real(1, 1.0, 1.0, 0.5)?))?,
        _ => params_or(cli, None)?,
    };
    let from = parse_complexes(&a.from)?;
    let to = parse_complexes(&a.to)?;
    let dim = if matches!(a.kind, TabulateKind::S2 | TabulateKind::Mu | TabulateKind::K) { 1 } else { p.n };
    for v in [&from, &to] {
        if v.len() != dim {
            return Err(Error::ShapeMismatch { expected: dim, got: v.len() });
        }
    }
    if a.points < 2 {
        return Err(Error::Input("--points must be at least 2".into()));
    }
    let lam = match (a.kind, &a.lam) {
        (TabulateKind::Psi, Some(l)) => parse_reals(l)?,
        (TabulateKind::Psi, None) => return Err(Error::Input("--lam is required for psi".into())),
        _ => vec![],
    };
    if a.kind == TabulateKind::Psi && lam.len() != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: lam.len() });
    }
    let spec = QuadratureSpec::with_tol(1e-9, 1e-14);
    let rows = (0..a.points)
        .map(|i| {
            let t = i as f64 / (a.points - 1) as f64;
            let x: Vec<Complex64> = from.iter().zip(&to).map(|(u, v)| u + (v - u) * t).collect();
            let val = match a.kind {
                TabulateKind::S2 => s2_with_error(x[0], &p.omega),
                TabulateKind::Mu => mu_scalar(x[0], &p).map(|v| (v, 0.0)),
                TabulateKind::K => kernel_k(x[0], &p).map(|v| (v, 0.0)),
                TabulateKind::Delta => delta_measure(&x, &p).map(|v| (v, 0.0)),
                TabulateKind::Eta => eta(&x, &p).map(|v| (v, 0.0)),
                TabulateKind::Psi => {
                    let req = WaveFunctionRequest { lambda: lam.clone(), x: x.clone(), params: p, spec: spec.clone() };
                    psi(&req).map(|r| (r.value, r.error_estimate))
                }
            };
            let row = Row::new(&x, val);
            if a.kind == TabulateKind::S2 {
                row.mark_zero()
            } else {
                row
            }
        })
        .collect::<Vec<_>>();
    // poles are part of a table, not a failure
    write_rows_csv(out, &rows)?;
    Ok(if rows.iter().all(|r| r.ok() || r.flag == "pole") { 0 } else { 1 })
}
