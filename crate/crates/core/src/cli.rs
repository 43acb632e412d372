//! Command-line front end: `optimal`, `sweep`, `verify`, `oracle`, `simulate`.
//!
//! Exit codes: 0 success, 1 check failure, 2 usage or domain error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::ensemble::{make_ensemble, MirrorEnsemble};
use crate::naimark::{simulate_network, strategy_unitary};
use crate::operators::{check_helstrom, CertificateReport, Operator2, DEFAULT_CERT_TOL};
use crate::oracle::sandwich;
use crate::strategy::{optimal_povm, srm_success, two_element_povm, StrategyResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const CSV_COLUMNS: [&str; 7] = [
    "theta",
    "p",
    "regime",
    "a",
    "p_success",
    "p_success_srm",
    "certificate_ok",
];

#[derive(Debug, Parser)]
#[command(
    name = "mirror-discrim",
    version,
    about = "Minimum-error discrimination of three mirror-symmetric qubit states"
)]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Interpret every angle argument in degrees.
    #[arg(long, global = true)]
    pub degrees: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyStrategy {
    /// The closed-form optimum for the point.
    Optimal,
    /// The ψ₁/ψ₂ discriminator (`π̂₃ = 0`) regardless of regime.
    TwoElement,
}

#[derive(Debug, Args)]
pub struct Point {
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub p: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form optimal measurement at one point.
    Optimal(Point),
    /// Grid over (theta, p) written as CSV.
    Sweep(SweepArgs),
    /// Helstrom certificate of the closed-form measurement.
    Verify {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = DEFAULT_CERT_TOL)]
        tol: f64,
        /// Measurement to certify.
        #[arg(long, value_enum, default_value_t = VerifyStrategy::Optimal)]
        strategy: VerifyStrategy,
    },
    /// Primal/dual brute-force sandwich around the closed form.
    Oracle {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 1e-3)]
        resolution: f64,
    },
    /// Seeded shot simulation of the optical network.
    Simulate {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    /// key=value file supplying any of the sweep settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_p: Option<usize>,
    /// Comma-separated subset of the CSV columns, in output order.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
}

/// A validated rectangular grid. Angles are radians.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub theta_min: f64,
    pub theta_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub n_theta: usize,
    pub n_p: usize,
    pub columns: Vec<String>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            theta_min: 0.0,
            theta_max: std::f64::consts::FRAC_PI_2,
            p_min: 0.0,
            p_max: 0.5,
            n_theta: 50,
            n_p: 50,
            columns: CSV_COLUMNS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        Self::usage(e.to_string())
    }
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let in_theta = |t: f64| (0.0..=half_pi).contains(&t);
        let in_p = |p: f64| (0.0..=0.5).contains(&p);
        if !in_theta(self.theta_min) || !in_theta(self.theta_max) || self.theta_min > self.theta_max
        {
            return Err(CliError::usage(format!(
                "theta range [{}, {}] must lie in [0, π/2] with min <= max",
                self.theta_min, self.theta_max
            )));
        }
        if !in_p(self.p_min) || !in_p(self.p_max) || self.p_min > self.p_max {
            return Err(CliError::usage(format!(
                "p range [{}, {}] must lie in [0, 1/2] with min <= max",
                self.p_min, self.p_max
            )));
        }
        if self.n_theta < 2 || self.n_p < 2 {
            return Err(CliError::usage("grid counts must be at least 2"));
        }
        if self.columns.is_empty() {
            return Err(CliError::usage("no output columns selected"));
        }
        for c in &self.columns {
            if !CSV_COLUMNS.contains(&c.as_str()) {
                return Err(CliError::usage(format!("unknown column {c:?}")));
            }
        }
        Ok(())
    }

    /// Grid points in θ-major order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.n_theta * self.n_p);
        for i in 0..self.n_theta {
            let theta = linspace(self.theta_min, self.theta_max, self.n_theta, i);
            for k in 0..self.n_p {
                pts.push((theta, linspace(self.p_min, self.p_max, self.n_p, k)));
            }
        }
        pts
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::usage(format!("config key {key}: cannot parse {v:?}")))
}

/// Defaults, then the config file, then explicit flags.
pub fn resolve_sweep(args: &SweepArgs, degrees: bool) -> Result<SweepSpec, CliError> {
    let mut spec = SweepSpec::default();
    let mut degrees = degrees;
    let mut cfg_theta = (None, None);
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        for (k, v) in parse_config(&text)? {
            match k.as_str() {
                "theta_min" => cfg_theta.0 = Some(parse_value::<f64>(&k, &v)?),
                "theta_max" => cfg_theta.1 = Some(parse_value::<f64>(&k, &v)?),
                "p_min" => spec.p_min = parse_value(&k, &v)?,
                "p_max" => spec.p_max = parse_value(&k, &v)?,
                "n_theta" => spec.n_theta = parse_value(&k, &v)?,
                "n_p" => spec.n_p = parse_value(&k, &v)?,
                "columns" => spec.columns = v.split(',').map(|s| s.trim().to_string()).collect(),
                "degrees" => degrees |= parse_value::<bool>(&k, &v)?,
                other => return Err(CliError::usage(format!("unknown config key {other:?}"))),
            }
        }
    }
    let to_rad = |t: f64| if degrees { t.to_radians() } else { t };
    if let Some(t) = args.theta_min.or(cfg_theta.0) {
        spec.theta_min = to_rad(t);
    }
    if let Some(t) = args.theta_max.or(cfg_theta.1) {
        spec.theta_max = to_rad(t);
    }
    spec.p_min = args.p_min.unwrap_or(spec.p_min);
    spec.p_max = args.p_max.unwrap_or(spec.p_max);
    spec.n_theta = args.n_theta.unwrap_or(spec.n_theta);
    spec.n_p = args.n_p.unwrap_or(spec.n_p);
    if let Some(cols) = &args.columns {
        spec.columns = cols.clone();
    }
    spec.validate()?;
    Ok(spec)
}

/// `%.12g`: twelve significant digits, trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// One sweep row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub p: f64,
    pub regime: String,
    pub a: Option<f64>,
    pub p_success: f64,
    pub p_success_srm: f64,
    pub certificate_ok: bool,
}

pub fn evaluate_point(theta: f64, p: f64) -> crate::Result<SweepRow> {
    let e = make_ensemble(theta, p)?;
    let strat = optimal_povm(&e)?;
    let cert = check_helstrom(&e, &strat.povm, DEFAULT_CERT_TOL)?;
    Ok(SweepRow {
        theta,
        p,
        regime: strat.regime.tag.to_string(),
        a: strat.a,
        p_success: strat.success,
        p_success_srm: srm_success(&e)?,
        certificate_ok: cert.passed,
    })
}

impl SweepRow {
    fn field(&self, column: &str) -> String {
        match column {
            "theta" => fmt_sig(self.theta),
            "p" => fmt_sig(self.p),
            "regime" => self.regime.clone(),
            "a" => self.a.map(fmt_sig).unwrap_or_default(),
            "p_success" => fmt_sig(self.p_success),
            "p_success_srm" => fmt_sig(self.p_success_srm),
            "certificate_ok" => self.certificate_ok.to_string(),
            _ => unreachable!("columns are validated"),
        }
    }
}

pub fn sweep_rows(spec: &SweepSpec) -> crate::Result<Vec<SweepRow>> {
    spec.points()
        .par_iter()
        .map(|&(theta, p)| evaluate_point(theta, p))
        .collect()
}

pub fn render_csv(rows: &[SweepRow], columns: &[String]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for r in rows {
        let fields: Vec<String> = columns.iter().map(|c| r.field(c)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn operator_json(o: &Operator2) -> serde_json::Value {
    json!([[o.a11, o.a12], [o.a12, o.a22]])
}

fn certificate_json(c: &CertificateReport) -> serde_json::Value {
    json!({
        "passed": c.passed,
        "tolerance": c.tolerance,
        "max_equality_residual": c.max_residual(),
        "equality_residuals": c.equality_residuals,
        "min_eigenvalues": c.min_eigenvalues,
    })
}

fn strategy_json(
    e: &MirrorEnsemble,
    s: &StrategyResult,
    cert: &CertificateReport,
) -> serde_json::Value {
    json!({
        "theta": e.theta(),
        "p": e.p(),
        "regime": s.regime.tag.as_str(),
        "boundary_p": s.regime.boundary_p,
        "a": s.a,
        "degenerate": s.degenerate,
        "povm": s.povm.elements().iter().map(operator_json).collect::<Vec<_>>(),
        "p_success": s.success,
        "certificate": certificate_json(cert),
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialise");
    s.push('\n');
    s
}

fn point_ensemble(pt: &Point, degrees: bool) -> Result<MirrorEnsemble, CliError> {
    let theta = if degrees {
        pt.theta.to_radians()
    } else {
        pt.theta
    };
    Ok(make_ensemble(theta, pt.p)?)
}

fn json_only(format: Option<Format>, cmd: &str) -> Result<(), CliError> {
    match format {
        Some(Format::Csv) => Err(CliError::usage(format!(
            "`{cmd}` only supports --format json"
        ))),
        _ => Ok(()),
    }
}

/// Output text and exit code of a parsed invocation.
pub fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    match &cli.command {
        Command::Optimal(pt) => {
            let e = point_ensemble(pt, cli.degrees)?;
            let s = optimal_povm(&e)?;
            let cert = check_helstrom(&e, &s.povm, DEFAULT_CERT_TOL)?;
            let code = if cert.passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => pretty(&strategy_json(&e, &s, &cert)),
                Format::Csv => {
                    let row = evaluate_point(e.theta(), e.p())?;
                    let cols: Vec<String> = CSV_COLUMNS.iter().map(|s| s.to_string()).collect();
                    render_csv(&[row], &cols)
                }
            };
            Ok((text, code))
        }
        Command::Sweep(args) => {
            let spec = resolve_sweep(args, cli.degrees)?;
            let rows = sweep_rows(&spec)?;
            let code = if rows.iter().all(|r| r.certificate_ok) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => render_csv(&rows, &spec.columns),
                Format::Json => pretty(&serde_json::to_value(&rows).expect("rows serialise")),
            };
            Ok((text, code))
        }
        Command::Verify {
            point,
            tol,
            strategy,
        } => {
            json_only(cli.format, "verify")?;
            let e = point_ensemble(point, cli.degrees)?;
            let s = optimal_povm(&e)?;
            let povm = match strategy {
                VerifyStrategy::Optimal => s.povm.clone(),
                VerifyStrategy::TwoElement => two_element_povm(),
            };
            let cert = check_helstrom(&e, &povm, *tol)?;
            let code = if cert.passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            let mut v = certificate_json(&cert);
            v["theta"] = json!(e.theta());
            v["p"] = json!(e.p());
            v["regime"] = json!(s.regime.tag.as_str());
            v["strategy"] = json!(match strategy {
                VerifyStrategy::Optimal => "optimal",
                VerifyStrategy::TwoElement => "two-element",
            });
            Ok((pretty(&v), code))
        }
        Command::Oracle { point, resolution } => {
            json_only(cli.format, "oracle")?;
            let e = point_ensemble(point, cli.degrees)?;
            let s = sandwich(&e, *resolution)?;
            let code = if s.inside { EXIT_OK } else { EXIT_CHECK_FAILED };
            let mut v = serde_json::to_value(&s).expect("sandwich serialises");
            v["theta"] = json!(e.theta());
            v["p"] = json!(e.p());
            Ok((pretty(&v), code))
        }
        Command::Simulate { point, shots, seed } => {
            json_only(cli.format, "simulate")?;
            let e = point_ensemble(point, cli.degrees)?;
            let s = optimal_povm(&e)?;
            let u = strategy_unitary(&s)?;
            let r = simulate_network(&u, &e, *shots, *seed)?;
            let v = json!({
                "theta": e.theta(),
                "p": e.p(),
                "a": u.a,
                "shots": shots,
                "seed": seed,
                "detector_counts": r.overall.counts,
                "detector_expected": r.overall.expected,
                "detector_sigma_deviation": r.overall.max_sigma_deviation,
                "per_state": r.per_state,
                "correct": r.correct,
                "empirical_success": r.empirical_success,
                "expected_success": r.expected_success,
                "closed_form_success": s.success,
                "success_sigma_deviation": r.success_sigma_deviation,
            });
            Ok((pretty(&v), EXIT_OK))
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(format!("stdout: {e}"))),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    let result = execute(&cli)
        .and_then(|(text, code)| emit(cli.out.as_deref(), &text, stdout).map(|_| code));
    match result {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(stderr, "error: {}", err.message);
            err.code
        }
    }
}
