//! Command-line front end: configuration (flags over a `key=value` file over
//! defaults), the `eval`, `scan`, `divisor` and `selftest` commands, and
//! JSON / CSV output.
//!
//! Output is a pure function of the configuration: grid points are evaluated
//! in parallel but written in grid order, and no timing or host data is
//! recorded unless `--timing` is given.

use crate::cauchy::{ContourMap, Numerics};
use crate::corrections::CorrectionBreakdown;
use crate::error::{Error, Result};
use crate::fredholm::{fredholm_det, KernelVariant};
use crate::monodromy::{params_from_pair, MonodromyParams};
use crate::registry::{all_required_pass, run_registry, IdentityResult};
use crate::tau::{divisor_scan, dlogtau, dlogtau_with, DivisorHit, Region, TauDerivative};
use crate::C64;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for invalid input.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status for numerical failure (including failed self-tests).
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// `det` and `∂_t log τ` with all components at one `t`.
    Eval,
    /// One record per grid point of a region, one JSON object per line.
    Scan,
    /// Zeros of the determinant inside a region.
    Divisor,
    /// Run the identity registry.
    Selftest,
}

/// Evaluate the Painlevé II tau-function as a Fredholm determinant.
#[derive(Debug, Parser)]
#[command(name = "pii-tau", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

/// Flags shared by all commands; unset flags fall back to the config file, then to defaults.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Flags {
    /// Stokes multiplier s₁, e.g. "0+2i".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub s1: Option<String>,
    /// Stokes multiplier s₃, e.g. "0+1i".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub s3: Option<String>,
    /// Point t for `eval`, e.g. "2" or "1.5+0.5i".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Rectangle "re0,re1,im0,im1" for `scan` and `divisor`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub region: Option<String>,
    /// Grid size "n,m" (points along Re t, Im t).
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Quadrature nodes per contour.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Shift ε of the auxiliary lines.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Contour map scale L.
    #[arg(long, global = true)]
    pub scale: Option<f64>,
    /// Contour map: sinh or rational.
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// Kernel form: left-shift or right-shift.
    #[arg(long, global = true)]
    pub variant: Option<String>,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Only run registry cases whose name contains this string.
    #[arg(long = "selftest-filter", global = true)]
    pub selftest_filter: Option<String>,
    /// Configuration file with `key=value` lines (keys as the long flags).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Record wall-clock time per record (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
}

/// Validated configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub s1: Option<C64>,
    pub s3: Option<C64>,
    pub t: Option<C64>,
    pub region: Option<Region>,
    pub grid: (usize, usize),
    pub numerics: Numerics,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub selftest_filter: Option<String>,
    pub timing: bool,
}

/// Parses `"a+bi"`, `"a-bi"`, `"a"`, `"bi"`, `"i"`, `"-i"` (spaces ignored).
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || Error::InvalidArgument(format!("cannot parse complex number {s:?} (expected a+bi)"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return Ok(C64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0));
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let v = match split {
        Some(k) => C64::new(body[..k].parse::<f64>().map_err(|_| bad())?, num(&body[k..])?),
        None => C64::new(0.0, num(body)?),
    };
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

fn parse_list<T: std::str::FromStr>(s: &str, n: usize, what: &str) -> Result<Vec<T>> {
    let v: Vec<T> = s
        .split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse {what} {s:?}")))?;
    if v.len() != n {
        return Err(Error::InvalidArgument(format!("{what} needs {n} comma-separated values, got {s:?}")));
    }
    Ok(v)
}

pub fn parse_region(s: &str) -> Result<Region> {
    let v = parse_list::<f64>(s, 4, "region")?;
    let r = Region { re0: v[0], re1: v[1], im0: v[2], im1: v[3] };
    r.validate()?;
    Ok(r)
}

pub fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let v = parse_list::<usize>(s, 2, "grid")?;
    if v[0] == 0 || v[1] == 0 {
        return Err(Error::InvalidArgument(format!("grid {s:?} must be positive")));
    }
    Ok((v[0], v[1]))
}

pub fn parse_map(s: &str) -> Result<ContourMap> {
    match s {
        "sinh" => Ok(ContourMap::Sinh),
        "rational" => Ok(ContourMap::Rational),
        _ => Err(Error::InvalidArgument(format!("unknown map {s:?} (sinh, rational)"))),
    }
}

pub fn parse_variant(s: &str) -> Result<KernelVariant> {
    match s {
        "left-shift" => Ok(KernelVariant::LeftShift),
        "right-shift" => Ok(KernelVariant::RightShift),
        _ => Err(Error::InvalidArgument(format!("unknown kernel variant {s:?} (left-shift, right-shift)"))),
    }
}

/// Fill unset flags from `key=value` lines (`#` starts a comment).
pub fn apply_config_text(flags: &mut Flags, text: &str) -> Result<()> {
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key=value", k + 1)))?;
        let (key, value) = (key.trim(), value.trim().to_string());
        let num = |v: &str| v.parse::<f64>().map_err(|_| Error::InvalidConfig(format!("line {}: bad number {v:?}", k + 1)));
        match key {
            "s1" => flags.s1 = flags.s1.take().or(Some(value)),
            "s3" => flags.s3 = flags.s3.take().or(Some(value)),
            "t" => flags.t = flags.t.take().or(Some(value)),
            "region" => flags.region = flags.region.take().or(Some(value)),
            "grid" => flags.grid = flags.grid.take().or(Some(value)),
            "map" => flags.map = flags.map.take().or(Some(value)),
            "variant" => flags.variant = flags.variant.take().or(Some(value)),
            "selftest-filter" => flags.selftest_filter = flags.selftest_filter.take().or(Some(value)),
            "nodes" => {
                let n = value.parse::<usize>().map_err(|_| Error::InvalidConfig(format!("line {}: bad node count", k + 1)))?;
                flags.nodes = flags.nodes.or(Some(n));
            }
            "eps" => flags.eps = flags.eps.or(Some(num(&value)?)),
            "scale" => flags.scale = flags.scale.or(Some(num(&value)?)),
            "format" => {
                let f = Format::from_str(&value, true).map_err(|_| Error::InvalidConfig(format!("line {}: bad format", k + 1)))?;
                flags.format = flags.format.or(Some(f));
            }
            "out" => flags.out = flags.out.take().or(Some(PathBuf::from(value))),
            _ => return Err(Error::InvalidConfig(format!("line {}: unknown key {key:?}", k + 1))),
        }
    }
    Ok(())
}

/// Resolve flags (and the config file they name) into a validated configuration.
pub fn resolve(command: Command, mut flags: Flags) -> Result<RunConfig> {
    if let Some(path) = flags.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        apply_config_text(&mut flags, &text)?;
    }
    let opt_c = |s: &Option<String>| s.as_deref().map(parse_complex).transpose();
    let mut numerics = Numerics::default();
    if let Some(n) = flags.nodes {
        numerics.n_nodes = n;
    }
    if let Some(e) = flags.eps {
        numerics.eps = e;
    }
    if let Some(l) = flags.scale {
        numerics.scale = l;
    }
    if let Some(m) = &flags.map {
        numerics.map = parse_map(m)?;
    }
    if let Some(v) = &flags.variant {
        numerics.variant = parse_variant(v)?;
    }
    numerics.validate()?;
    let cfg = RunConfig {
        command,
        s1: opt_c(&flags.s1)?,
        s3: opt_c(&flags.s3)?,
        t: opt_c(&flags.t)?,
        region: flags.region.as_deref().map(parse_region).transpose()?,
        grid: flags.grid.as_deref().map(parse_grid).transpose()?.unwrap_or((10, 10)),
        numerics,
        format: flags.format.unwrap_or(Format::Json),
        out: flags.out,
        selftest_filter: flags.selftest_filter,
        timing: flags.timing,
    };
    let need = |ok: bool, what: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("{what} is required for this command")))
        }
    };
    match command {
        Command::Eval => {
            need(cfg.s1.is_some() && cfg.s3.is_some(), "--s1/--s3")?;
            need(cfg.t.is_some(), "--t")?;
        }
        Command::Scan | Command::Divisor => {
            need(cfg.s1.is_some() && cfg.s3.is_some(), "--s1/--s3")?;
            need(cfg.region.is_some(), "--region")?;
        }
        Command::Selftest => {}
    }
    Ok(cfg)
}

/// A complex number as `{re, im}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

/// Components of `∂_t log τ` in an output record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DlogtauRecord {
    pub ddt_log_det: Cx,
    pub ddt_log_det_fd: Cx,
    pub closed_form: Cx,
    pub calf: Cx,
    pub f_tilde_integral: Cx,
    pub bc_integral: Cx,
    pub double_cauchy: Cx,
    pub calf_est_error: Option<f64>,
    pub total: Cx,
}

impl DlogtauRecord {
    fn new(d: &TauDerivative) -> Self {
        let c: &CorrectionBreakdown = &d.corrections;
        Self {
            ddt_log_det: d.ddt_log_det.into(),
            ddt_log_det_fd: d.ddt_log_det_fd.into(),
            closed_form: d.closed_form.into(),
            calf: d.calf.into(),
            f_tilde_integral: c.f_tilde_integral.into(),
            bc_integral: c.bc_integral.into(),
            double_cauchy: c.double_cauchy.into(),
            calf_est_error: c.est_error.is_finite().then_some(c.est_error),
            total: d.total.into(),
        }
    }
}

/// Stokes data echoed in every record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesRecord {
    pub s1: Cx,
    pub s2: Cx,
    pub s3: Cx,
    pub nu: Cx,
}

impl StokesRecord {
    fn new(mp: &MonodromyParams) -> Self {
        Self { s1: mp.stokes.s1.into(), s2: mp.stokes.s2.into(), s3: mp.stokes.s3.into(), nu: mp.nu.into() }
    }
}

/// Per-`t` output record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub t: Cx,
    pub det: Option<Cx>,
    pub log_abs_det: Option<f64>,
    pub arg_det: Option<f64>,
    /// `|det(n) − det(2n)|` (only for `eval`).
    pub det_est_error: Option<f64>,
    pub dlogtau: Option<DlogtauRecord>,
    pub kernel_norm: Option<f64>,
    pub n_nodes: usize,
    pub numerics: Numerics,
    pub stokes: StokesRecord,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// A confirmed zero in the `divisor` output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HitRecord {
    pub t_root: Cx,
    pub abs_det: f64,
    pub winding: i64,
    pub residual: f64,
    pub iterations: usize,
}

impl From<DivisorHit> for HitRecord {
    fn from(h: DivisorHit) -> Self {
        HitRecord { t_root: h.t_root.into(), abs_det: h.abs_det, winding: h.winding, residual: h.residual, iterations: h.iterations }
    }
}

/// Result document of `divisor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivisorReport {
    pub region: Region,
    pub grid: (usize, usize),
    pub numerics: Numerics,
    pub stokes: StokesRecord,
    pub hits: Vec<HitRecord>,
    pub failed_points: usize,
    pub min_abs_det: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Result document of `selftest`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub results: Vec<IdentityResult>,
}

fn blank_record(t: C64, mp: &MonodromyParams, numerics: &Numerics) -> OutputRecord {
    OutputRecord {
        t: t.into(),
        det: None,
        log_abs_det: None,
        arg_det: None,
        det_est_error: None,
        dlogtau: None,
        kernel_norm: None,
        n_nodes: numerics.n_nodes,
        numerics: *numerics,
        stokes: StokesRecord::new(mp),
        error: None,
        elapsed_ms: None,
    }
}

/// Full record at one `t`. `careful` adds the node-doubling error estimates.
pub fn evaluate_point(t: C64, mp: &MonodromyParams, numerics: &Numerics, careful: bool) -> (OutputRecord, Option<Error>) {
    let mut rec = blank_record(t, mp, numerics);
    let det = match fredholm_det(t, mp, numerics, careful) {
        Ok(d) => d,
        Err(e) => {
            rec.error = Some(e.to_string());
            return (rec, Some(e));
        }
    };
    rec.det = Some(det.det.into());
    rec.log_abs_det = Some(det.log_det.re);
    rec.arg_det = Some(det.det.arg());
    rec.det_est_error = careful.then_some(det.est_error);
    let d = if careful { dlogtau(t, mp, numerics) } else { dlogtau_with(t, mp, numerics, false) };
    match d {
        Ok(d) => {
            rec.kernel_norm = Some(d.kernel_norm);
            rec.dlogtau = Some(DlogtauRecord::new(&d));
            (rec, None)
        }
        Err(e) => {
            rec.error = Some(e.to_string());
            (rec, Some(e))
        }
    }
}

fn csv_header() -> &'static str {
    "t_re,t_im,det_re,det_im,log_abs_det,arg_det,ddt_log_det_re,ddt_log_det_im,closed_form_re,closed_form_im,calf_re,calf_im,total_re,total_im,kernel_norm,n_nodes,scale,eps,map,variant,error"
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn csv_row(r: &OutputRecord) -> String {
    let d = r.dlogtau;
    let pair = |c: Option<Cx>| match c {
        Some(c) => format!("{},{}", c.re, c.im),
        None => ",".into(),
    };
    let num = &r.numerics;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.t.re,
        r.t.im,
        pair(r.det),
        opt(r.log_abs_det),
        opt(r.arg_det),
        pair(d.map(|d| d.ddt_log_det)),
        pair(d.map(|d| d.closed_form)),
        pair(d.map(|d| d.calf)),
        pair(d.map(|d| d.total)),
        opt(r.kernel_norm),
        r.n_nodes,
        num.scale,
        num.eps,
        serde_json::to_value(num.map).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
            + ","
            + &serde_json::to_value(num.variant).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        r.error.as_deref().map(csv_quote).unwrap_or_default(),
    )
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidConfig(format!("cannot write output: {e}"))
}

fn json_line<T: Serialize>(w: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string(v).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    writeln!(w, "{s}").map_err(io_err)
}

fn params(cfg: &RunConfig) -> Result<MonodromyParams> {
    params_from_pair(cfg.s1.unwrap_or_default(), cfg.s3.unwrap_or_default())
}

/// Execute a configuration, writing to `w`. Returns the exit status.
pub fn execute(cfg: &RunConfig, w: &mut dyn Write) -> Result<i32> {
    match cfg.command {
        Command::Eval => run_eval(cfg, w),
        Command::Scan => run_scan(cfg, w),
        Command::Divisor => run_divisor(cfg, w),
        Command::Selftest => run_selftest(cfg, w),
    }
}

fn run_eval(cfg: &RunConfig, w: &mut dyn Write) -> Result<i32> {
    let mp = params(cfg)?;
    let t = cfg.t.expect("validated");
    if t.norm() == 0.0 {
        return Err(Error::InvalidArgument("t = 0 is excluded".into()));
    }
    let start = Instant::now();
    let (mut rec, err) = evaluate_point(t, &mp, &cfg.numerics, true);
    if let Some(e) = err {
        if e.is_validation() {
            return Err(e);
        }
    }
    if cfg.timing {
        rec.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    match cfg.format {
        Format::Json => {
            let s = serde_json::to_string_pretty(&rec).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(w, "{s}").map_err(io_err)?;
        }
        Format::Csv => {
            writeln!(w, "{}", csv_header()).map_err(io_err)?;
            writeln!(w, "{}", csv_row(&rec)).map_err(io_err)?;
        }
    }
    Ok(if rec.error.is_some() { EXIT_NUMERICAL } else { EXIT_OK })
}

fn run_scan(cfg: &RunConfig, w: &mut dyn Write) -> Result<i32> {
    let mp = params(cfg)?;
    let region = cfg.region.expect("validated");
    let (nx, ny) = cfg.grid;
    if cfg.format == Format::Csv {
        writeln!(w, "{}", csv_header()).map_err(io_err)?;
    }
    let mut failed = false;
    // One row of the grid at a time: parallel inside the row, written in order.
    let points = region.grid(nx, ny);
    for row in points.chunks(nx) {
        let recs: Vec<OutputRecord> = row
            .par_iter()
            .map(|&t| {
                let start = Instant::now();
                let (mut r, _) = evaluate_point(t, &mp, &cfg.numerics, false);
                if cfg.timing {
                    r.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                }
                r
            })
            .collect();
        for r in &recs {
            failed |= r.error.is_some();
            match cfg.format {
                Format::Json => json_line(w, r)?,
                Format::Csv => writeln!(w, "{}", csv_row(r)).map_err(io_err)?,
            }
        }
        w.flush().map_err(io_err)?;
    }
    Ok(if failed { EXIT_NUMERICAL } else { EXIT_OK })
}

fn run_divisor(cfg: &RunConfig, w: &mut dyn Write) -> Result<i32> {
    let mp = params(cfg)?;
    let region = cfg.region.expect("validated");
    let (nx, ny) = cfg.grid;
    let start = Instant::now();
    let scan = divisor_scan(&region, nx, ny, &mp, &cfg.numerics)?;
    let report = DivisorReport {
        region,
        grid: cfg.grid,
        numerics: cfg.numerics,
        stokes: StokesRecord::new(&mp),
        failed_points: scan.samples.iter().filter(|s| s.det.is_none()).count(),
        min_abs_det: scan.samples.iter().filter_map(|s| s.det.map(|d| d.norm())).reduce(f64::min),
        hits: scan.hits.into_iter().map(HitRecord::from).collect(),
        elapsed_ms: cfg.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    match cfg.format {
        Format::Json => {
            let s = serde_json::to_string_pretty(&report).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(w, "{s}").map_err(io_err)?;
        }
        Format::Csv => {
            writeln!(w, "t_re,t_im,abs_det,winding,iterations,n_nodes,scale,eps").map_err(io_err)?;
            for h in &report.hits {
                let n = &report.numerics;
                writeln!(w, "{},{},{},{},{},{},{},{}", h.t_root.re, h.t_root.im, h.abs_det, h.winding, h.iterations, n.n_nodes, n.scale, n.eps)
                    .map_err(io_err)?;
            }
        }
    }
    Ok(if report.failed_points > 0 { EXIT_NUMERICAL } else { EXIT_OK })
}

fn run_selftest(cfg: &RunConfig, w: &mut dyn Write) -> Result<i32> {
    let results = run_registry(cfg.selftest_filter.as_deref());
    if results.is_empty() {
        return Err(Error::InvalidArgument(format!("no registry case matches {:?}", cfg.selftest_filter)));
    }
    let report = SelftestReport { passed: all_required_pass(&results), results };
    match cfg.format {
        Format::Json => {
            let s = serde_json::to_string_pretty(&report).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(w, "{s}").map_err(io_err)?;
        }
        Format::Csv => {
            writeln!(w, "name,status,residual,tolerance,samples,advisory,statement").map_err(io_err)?;
            for r in &report.results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                writeln!(w, "{},{},{:e},{:e},{},{},{}", r.name, status, r.residual, r.tolerance, r.samples, r.advisory, csv_quote(&r.statement))
                    .map_err(io_err)?;
            }
        }
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_NUMERICAL })
}

fn exit_for(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

/// Entry point used by the binary: parse, resolve, execute; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve(cli.command, cli.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_for(&e);
        }
    };
    let result = match &cfg.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => {
                let mut w = std::io::BufWriter::new(f);
                execute(&cfg, &mut w).and_then(|c| w.flush().map(|_| c).map_err(io_err))
            }
            Err(e) => Err(Error::InvalidConfig(format!("cannot create {}: {e}", path.display()))),
        },
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            execute(&cfg, &mut lock)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        let c = |re, im| C64::new(re, im);
        assert_eq!(parse_complex("0+2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
        assert_eq!(parse_complex("1.5 - 0.25i").unwrap(), c(1.5, -0.25));
        assert_eq!(parse_complex("1e-3+2E-1i").unwrap(), c(1e-3, 0.2));
        assert_eq!(parse_complex("-1-i").unwrap(), c(-1.0, -1.0));
        for bad in ["", "a+bi", "1+2", "i2", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn region_and_grid_parsing() {
        let r = parse_region("1,2,0.5,1").unwrap();
        assert_eq!((r.re0, r.re1, r.im0, r.im1), (1.0, 2.0, 0.5, 1.0));
        assert!(parse_region("1,2,3").is_err());
        assert!(parse_region("-1,1,-1,1").is_err());
        assert_eq!(parse_grid("3,4").unwrap(), (3, 4));
        assert!(parse_grid("0,4").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let mut flags = Flags { nodes: Some(64), ..Default::default() };
        apply_config_text(&mut flags, "# comment\nnodes = 128\neps=0.2\ns1=0+2i\ns3 = i\nt=2\n").unwrap();
        let cfg = resolve(Command::Eval, flags).unwrap();
        assert_eq!(cfg.numerics.n_nodes, 64);
        assert_eq!(cfg.numerics.eps, 0.2);
        assert_eq!(cfg.t, Some(C64::new(2.0, 0.0)));
        assert!(apply_config_text(&mut Flags::default(), "bogus=1").is_err());
    }

    #[test]
    fn missing_inputs_are_validation_errors() {
        let e = resolve(Command::Eval, Flags::default()).unwrap_err();
        assert!(e.is_validation());
        let flags = Flags { nodes: Some(4), ..Default::default() };
        assert!(resolve(Command::Selftest, flags).unwrap_err().is_validation());
    }
}
