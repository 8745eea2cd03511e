//! `uvreg` command-line driver: single points, sweeps and the check suite.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kernels::{
    kernel_i, kernel_i_asymptotic, kernel_i_derivative, kernel_j, kernel_j0_exact, kernel_j_derivative,
    kernel_j_oracle, kernel_parts, DEFAULT_SEED,
};
use crate::model::{pt_binding_energy, pt_mass, pt_self_energy};
use crate::quad::QuadConfig;
use crate::second::{iterate_at, mass2, mass2_coefficient, IterationResult, SecondOptions};
use crate::zeroth::{
    alpha_constant, e0_weak, lambda_opt, lambda_opt_weak, mass0_coefficient, zeroth,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_ARGS: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const CSV_HEADER: [&str; 18] = [
    "g", "lambda", "e0", "k0", "k0_asym", "a_re", "a_im", "b_re", "b_im", "e2_re", "e2_im", "e2_analytic",
    "e2_singular", "ratio", "w_half", "mass0", "mass2", "error",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Parser)]
#[command(name = "uvreg", version, about = "Self-consistent UV cutoff and second-iteration energies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Coupling constant.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Width of the trial state; minimized when absent.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub g_min: f64,
    #[arg(long, global = true, default_value_t = 1e-1)]
    pub g_max: f64,
    #[arg(long, global = true, default_value_t = 10)]
    pub points: usize,
    #[arg(long, global = true, value_enum, default_value_t = Scale::Log)]
    pub scale: Scale,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Seed of the Monte-Carlo oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for sweeps; 0 picks the core count.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Variational energy, optimal width and mass.
    E0,
    /// Full second iteration at one coupling.
    E2,
    /// Second iteration over a grid of couplings.
    Sweep,
    /// Oracle and identity checks.
    Check {
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
    },
    /// Tabulate the kernels at the given momenta.
    Kernels {
        #[arg(required = true, allow_negative_numbers = true)]
        k: Vec<f64>,
    },
    /// Zeroth, second-iteration and perturbative masses.
    Mass,
    /// Perturbative self-energy with a sharp cutoff.
    Pt {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        momentum: f64,
        /// Sharp cutoff; the self-consistent one when absent.
        #[arg(long, allow_negative_numbers = true)]
        cutoff: Option<f64>,
    },
}

/// One sweep record; `None` marks a value lost to a per-row failure.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub g: Option<f64>,
    pub lambda: Option<f64>,
    pub e0: Option<f64>,
    pub k0: Option<f64>,
    pub k0_asym: Option<f64>,
    pub a_re: Option<f64>,
    pub a_im: Option<f64>,
    pub b_re: Option<f64>,
    pub b_im: Option<f64>,
    pub e2_re: Option<f64>,
    pub e2_im: Option<f64>,
    pub e2_analytic: Option<f64>,
    pub e2_singular: Option<f64>,
    pub ratio: Option<f64>,
    pub w_half: Option<f64>,
    pub mass0: Option<f64>,
    pub mass2: Option<f64>,
    pub error: String,
}

impl From<&IterationResult> for SweepRow {
    fn from(r: &IterationResult) -> Self {
        SweepRow {
            g: Some(r.params.g),
            lambda: Some(r.params.lambda),
            e0: Some(r.e0),
            k0: Some(r.k0.k0),
            k0_asym: Some(r.k0.k0_asymptotic),
            a_re: Some(r.a.re),
            a_im: Some(r.a.im),
            b_re: Some(r.b.re),
            b_im: Some(r.b.im),
            e2_re: Some(r.e2.re),
            e2_im: Some(r.e2.im),
            e2_analytic: Some(r.e2_analytic),
            e2_singular: Some(r.e2_singular),
            ratio: Some(r.e2.re / r.e2_analytic),
            w_half: Some(r.transition_half_rate),
            mass0: Some(r.mass0),
            mass2: Some(r.mass2),
            error: String::new(),
        }
    }
}

impl SweepRow {
    fn failed(g: f64, lambda: Option<f64>, e: &Error) -> Self {
        SweepRow {
            g: Some(g),
            lambda,
            error: e.to_string(),
            ..Default::default()
        }
    }

    fn values(&self) -> [Option<f64>; 17] {
        [
            self.g, self.lambda, self.e0, self.k0, self.k0_asym, self.a_re, self.a_im, self.b_re, self.b_im,
            self.e2_re, self.e2_im, self.e2_analytic, self.e2_singular, self.ratio, self.w_half, self.mass0,
            self.mass2,
        ]
    }

    /// CSV fields in header order, 17 significant digits.
    pub fn csv_fields(&self) -> Vec<String> {
        let mut v: Vec<String> = self.values().iter().map(|x| x.map(fmt_num).unwrap_or_default()).collect();
        v.push(self.error.clone());
        v
    }
}

/// 17 significant digits; negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Couplings of a sweep, ascending.
pub fn sweep_grid(g_min: f64, g_max: f64, points: usize, scale: Scale) -> Result<Vec<f64>, String> {
    if !(g_min > 0.0 && g_min < g_max && g_max < 1.0) {
        return Err(format!("sweep needs 0 < g-min < g-max < 1, got {g_min}..{g_max}"));
    }
    if points < 2 {
        return Err(format!("sweep needs at least 2 points, got {points}"));
    }
    let n = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let t = i as f64 / n;
            if i == 0 {
                return g_min;
            }
            if i + 1 == points {
                return g_max;
            }
            match scale {
                Scale::Linear => g_min + t * (g_max - g_min),
                Scale::Log => (g_min.ln() + t * (g_max.ln() - g_min.ln())).exp(),
            }
        })
        .collect())
}

fn iterate_row(g: f64, lambda: Option<f64>, opts: &SecondOptions) -> Result<IterationResult, Error> {
    let l = match lambda {
        Some(l) => l,
        None => lambda_opt(g)?,
    };
    iterate_at(g, l, opts)
}

/// Rows of a sweep in grid order, computed on `jobs` threads.
pub fn sweep_rows(grid: &[f64], lambda: Option<f64>, opts: &SecondOptions, jobs: usize) -> Vec<SweepRow> {
    use rayon::prelude::*;
    let work = || {
        grid.par_iter()
            .map(|&g| match iterate_row(g, lambda, opts) {
                Ok(r) => SweepRow::from(&r),
                Err(e) => SweepRow::failed(g, lambda, &e),
            })
            .collect::<Vec<_>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record(r.csv_fields()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

/// A JSON array with one object per line.
pub fn rows_to_json(rows: &[SweepRow]) -> String {
    let mut s = String::from("[\n");
    for (i, r) in rows.iter().enumerate() {
        s.push_str(&serde_json::to_string(r).expect("plain data serializes"));
        s.push_str(if i + 1 < rows.len() { ",\n" } else { "\n" });
    }
    s.push_str("]\n");
    s
}

pub fn rows_from_json(s: &str) -> serde_json::Result<Vec<SweepRow>> {
    serde_json::from_str(s)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_ARGS,
        _ => EXIT_CONVERGENCE,
    }
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            msg: e.to_string(),
        }
    }
}

fn args_error(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_ARGS,
        msg: msg.into(),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, body: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: EXIT_IO,
        msg: format!("write failed: {e}"),
    };
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure {
            code: EXIT_IO,
            msg: format!("cannot write {}: {e}", p.display()),
        }),
        None => out.write_all(body.as_bytes()).map_err(io),
    }
}

fn text_table(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "{k:<width$}  {v}");
    }
    s
}

fn json_object(pairs: &[(&str, String)]) -> String {
    let map: serde_json::Map<String, serde_json::Value> = pairs
        .iter()
        .map(|(k, v)| {
            let val = v
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map(serde_json::Value::Number)
                .unwrap_or_else(|| serde_json::Value::String(v.clone()));
            (k.to_string(), val)
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&map).expect("plain data serializes");
    s.push('\n');
    s
}

fn report(pairs: &[(&str, String)], format: Format) -> String {
    match format {
        Format::Json => json_object(pairs),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(pairs.iter().map(|(k, _)| *k)).expect("in-memory write");
            w.write_record(pairs.iter().map(|(_, v)| v.as_str())).expect("in-memory write");
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
        Format::Text => text_table(pairs),
    }
}

fn require_g(cli: &Cli) -> Result<f64, Failure> {
    cli.g.ok_or_else(|| args_error("--g is required"))
}

fn quad(cli: &Cli) -> Result<QuadConfig, Failure> {
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        return Err(args_error(format!("--tol must lie in (0, 1), got {}", cli.tol)));
    }
    Ok(QuadConfig::with_rel_tol(cli.tol))
}

fn cmd_e0(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let g = cli.g.unwrap_or(0.0);
    let z = zeroth(g, cli.lambda)?;
    let pairs = [
        ("g", fmt_num(g)),
        ("lambda", fmt_num(z.lambda_opt)),
        ("e0_weak", fmt_num(z.e0_weak)),
        ("e0_full", fmt_num(z.e0_full)),
        ("mass0", fmt_num(z.mass0)),
    ];
    emit(out, cli.out.as_deref(), &report(&pairs, cli.format.unwrap_or(Format::Text)))
}

fn cmd_e2(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let g = require_g(cli)?;
    let opts = SecondOptions::with_quad(quad(cli)?);
    let r = iterate_row(g, cli.lambda, &opts)?;
    let body = match cli.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&r).expect("plain data serializes");
            s.push('\n');
            s
        }
        Format::Csv => rows_to_csv(&[SweepRow::from(&r)]),
        Format::Text => {
            let row = SweepRow::from(&r);
            let pairs: Vec<(&str, String)> =
                CSV_HEADER.iter().copied().zip(row.csv_fields()).filter(|(k, _)| *k != "error").collect();
            text_table(&pairs)
        }
    };
    emit(out, cli.out.as_deref(), &body)
}

fn cmd_sweep(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let grid = sweep_grid(cli.g_min, cli.g_max, cli.points, cli.scale).map_err(args_error)?;
    let opts = SecondOptions::with_quad(quad(cli)?);
    let rows = sweep_rows(&grid, cli.lambda, &opts, cli.jobs);
    let body = match cli.format.unwrap_or(Format::Csv) {
        Format::Json => rows_to_json(&rows),
        _ => rows_to_csv(&rows),
    };
    emit(out, cli.out.as_deref(), &body)
}

/// One line of the check suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &str, measured: f64, expected: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        measured,
        expected,
        tolerance,
        pass: (measured - expected).abs() <= tolerance,
    }
}

fn central_difference(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// The oracle and identity checks; `Full` runs the Monte-Carlo oracle with 10^7 samples.
pub fn run_checks(level: Level, seed: u64, cfg: &QuadConfig) -> Result<Vec<CheckOutcome>, Error> {
    let lambda = lambda_opt_weak();
    let mut v = Vec::new();
    v.push(check("alpha constant", alpha_constant(), 0.736559, 1e-4));
    v.push(check("weak-coupling width", lambda_opt(1e-6)?, lambda, 1e-6 * lambda));
    for l in [1.0, lambda, 7.5] {
        let lhs = kernel_i(0.0, l)?.to_f64();
        let rhs = e0_weak(1.0, l);
        v.push(check(&format!("kernel anchor at lambda={l:.4}"), lhs, rhs, 1e-8 * rhs.abs()));
    }
    for k in [0.5, 3.0, 12.0] {
        let fd = central_difference(|k| kernel_i(k, lambda).map(|s| s.to_f64()).unwrap_or(f64::NAN), k, 1e-3);
        let an = kernel_i_derivative(k, lambda)?.to_f64();
        v.push(check(&format!("I' finite difference at k={k}"), an, fd, 1e-6 * fd.abs().max(1e-3)));
        let fdj = central_difference(|k| kernel_j(k, lambda), k, 1e-3);
        let anj = kernel_j_derivative(k, lambda);
        v.push(check(&format!("J' finite difference at k={k}"), anj, fdj, 1e-6 * fdj.abs().max(1e-6)));
    }
    let g = 1e-3;
    let l = lambda_opt(g)?;
    let r = iterate_at(g, l, &SecondOptions::with_quad(*cfg))?;
    v.push(check("cutoff residual", r.k0.residual, 0.0, 1e-10));
    v.push(check("decay width", -r.e2.im, r.transition_half_rate, 1e-2 * r.transition_half_rate));
    v.push(check("pt cutoff identity", r.e2_singular, pt_self_energy(0.0, r.k0.k0, g, cfg)?, 0.0));
    let samples = match level {
        Level::Fast => 200_000,
        Level::Full => 10_000_000,
    };
    let mc = kernel_j_oracle(0.0, lambda, samples, seed)?;
    v.push(check("J0 Monte-Carlo oracle", mc.value, kernel_j0_exact(lambda), 3.0 * mc.std_error));
    Ok(v)
}

fn cmd_check(cli: &Cli, level: Level, out: &mut dyn Write) -> Result<bool, Failure> {
    let outcomes = run_checks(level, cli.seed, &quad(cli)?)?;
    let all = outcomes.iter().all(|c| c.pass);
    let body = match cli.format.unwrap_or(Format::Text) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcomes).expect("plain data serializes");
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::new();
            for c in &outcomes {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    s,
                    "{tag} {:<32} measured={} expected={} tol={:.1e}",
                    c.name,
                    fmt_num(c.measured),
                    fmt_num(c.expected),
                    c.tolerance
                );
            }
            s
        }
    };
    emit(out, cli.out.as_deref(), &body)?;
    Ok(all)
}

fn cmd_kernels(cli: &Cli, ks: &[f64], out: &mut dyn Write) -> Result<(), Failure> {
    if let Some(k) = ks.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
        return Err(args_error(format!("momenta must be finite and non-negative, got {k}")));
    }
    let lambda = cli.lambda.unwrap_or_else(lambda_opt_weak);
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(args_error(format!("width must be positive, got {lambda}")));
    }
    let header = ["k", "i1_dot_k", "i2", "i3", "i", "di", "j", "i_asym"];
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for &k in ks {
        let p = kernel_parts(k, lambda)?;
        let di = if k > 0.0 { kernel_i_derivative(k, lambda)?.to_string() } else { "0".into() };
        let asym = if k > 0.0 { kernel_i_asymptotic(k, lambda)?.to_string() } else { String::new() };
        w.write_record([
            fmt_num(k),
            p.i1_dot_k.to_string(),
            p.i2.to_string(),
            p.i3.to_string(),
            p.total.to_string(),
            di,
            fmt_num(kernel_j(k, lambda)),
            asym,
        ])
        .expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv");
    emit(out, cli.out.as_deref(), &body)
}

fn cmd_mass(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let g = require_g(cli)?;
    let z = zeroth(g, cli.lambda)?;
    let m2 = mass2(g, z.lambda_opt)?;
    let pairs = [
        ("g", fmt_num(g)),
        ("lambda", fmt_num(z.lambda_opt)),
        ("mass0", fmt_num(z.mass0)),
        ("mass0_coefficient", fmt_num(mass0_coefficient())),
        ("mass2", fmt_num(m2.mass)),
        ("mass2_first_order", fmt_num(m2.mass_first_order)),
        ("mass2_coefficient", fmt_num(m2.coefficient)),
        ("mass2_coefficient_limit", fmt_num(mass2_coefficient(f64::INFINITY))),
        ("pt_mass", fmt_num(pt_mass(g))),
    ];
    emit(out, cli.out.as_deref(), &report(&pairs, cli.format.unwrap_or(Format::Text)))
}

fn cmd_pt(cli: &Cli, momentum: f64, cutoff: Option<f64>, out: &mut dyn Write) -> Result<(), Failure> {
    let g = require_g(cli)?;
    let k = match cutoff {
        Some(k) => k,
        None => {
            let l = match cli.lambda {
                Some(l) => l,
                None => lambda_opt(g)?,
            };
            crate::second::cutoff_k0(g, l)?.k0
        }
    };
    let sigma = pt_self_energy(momentum, k, g, &quad(cli)?)?;
    let pairs = [
        ("g", fmt_num(g)),
        ("momentum", fmt_num(momentum)),
        ("cutoff", fmt_num(k)),
        ("self_energy", fmt_num(sigma)),
        ("binding_energy", fmt_num(pt_binding_energy(k, g))),
        ("pt_mass", fmt_num(pt_mass(g))),
    ];
    emit(out, cli.out.as_deref(), &report(&pairs, cli.format.unwrap_or(Format::Text)))
}

/// Parse `args` (program name first) and run; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGS } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::E0 => cmd_e0(&cli, out).map(|_| true),
        Command::E2 => cmd_e2(&cli, out).map(|_| true),
        Command::Sweep => cmd_sweep(&cli, out).map(|_| true),
        Command::Check { level } => cmd_check(&cli, *level, out),
        Command::Kernels { k } => cmd_kernels(&cli, k, out).map(|_| true),
        Command::Mass => cmd_mass(&cli, out).map(|_| true),
        Command::Pt { momentum, cutoff } => cmd_pt(&cli, *momentum, *cutoff, out).map(|_| true),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}
