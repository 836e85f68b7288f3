//! The `parcave` command line front end.
//!
//! Exit codes: 0 on success, 1 when a checked assertion fails, 2 on usage or
//! input errors. Reports go to stdout as JSON; curves go to CSV.

mod svg;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::concavity::{check_s_concave_samples, DEFAULT_TOL_EXACT, DEFAULT_TOL_GRID};
use crate::counterexamples::{run_named, CATALOG};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::hopf_lax::{functional_volume, h_t, GammaPolicy, PowerCost};
use crate::interval_set::IntervalUnion;
use crate::measure1d::Density1D;
use crate::parallel_volume::VolumeCurve;
use crate::variance_inequality::{bl_check, bl_check_log, corollary_check};

pub use svg::{emit_svg, render_svg};

pub const SCHEMA: u32 = 1;
pub const TOL_ENV: &str = "PARCAVE_TOL";
/// Default slack tolerance for `blcheck`.
pub const DEFAULT_TOL_SLACK: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "parcave", version, about = "Parallel volumes, s-concavity checks and Hopf-Lax evolutions")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample V(t) = μ(A + t[-1,1]) and its derivatives as CSV.
    Pvolume(PvolumeArgs),
    /// Check s-concavity of a two-column t,V CSV.
    CheckConcavity(CheckArgs),
    /// Functional volume F(t) = ∫ h_t for a builtin or tabulated f.
    Hopflax(HopflaxArgs),
    /// Both sides of the variance inequality.
    Blcheck(BlArgs),
    /// Run a catalog entry.
    Counterexample(CounterexampleArgs),
}

#[derive(Debug, Args)]
pub struct PvolumeArgs {
    /// Set literal, e.g. `[0,1]u[2,3]`.
    #[arg(long, allow_hyphen_values = true)]
    pub set: String,
    /// Measure literal: `lebesgue`, `uniform:C:a:b`, `power:gamma:p:a:b`, `gauss:mu:sigma`.
    #[arg(long, default_value = "lebesgue", allow_hyphen_values = true)]
    pub measure: String,
    #[arg(long, default_value_t = 0.0)]
    pub tmin: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Report the derivative ordering of V^s at each breakpoint.
    #[arg(long, requires = "out", allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HopflaxArgs {
    /// Builtin (`gauss`, `laplace`, `bump`, `hat`) or a z,value CSV.
    #[arg(long, default_value = "gauss")]
    pub f: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub gamma: f64,
    /// Cost exponent; `inf` selects the indicator cost.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tmin: f64,
    #[arg(long, default_value_t = 2.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    pub zmin: f64,
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    pub zmax: f64,
    #[arg(long, default_value_t = 2001)]
    pub n: usize,
    /// Accept any γ <= 0, outside the range where concavity of F is known.
    #[arg(long)]
    pub unverified: bool,
    #[arg(long)]
    pub tol: Option<f64>,
    /// CSV destination for t,F; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Dump h_t at this time as z,value CSV to `--ht-out`.
    #[arg(long, requires = "ht_out")]
    pub emit_ht: Option<f64>,
    #[arg(long, requires = "emit_ht")]
    pub ht_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BlArgs {
    /// Builtin (`quadratic`, `quadratic-plus-one`, `one-plus-square`, `cosh`,
    /// `quartic`, `constant`) or a z,value CSV.
    #[arg(long, default_value = "quadratic-plus-one")]
    pub phi: String,
    #[arg(long, default_value_t = -0.25, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Override of s (defaults to γ/(1+γ)).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// γ = 0 with the quadratic cost.
    #[arg(long, conflicts_with = "corollary")]
    pub log_mode: bool,
    /// Weighted Brascamp-Lieb-type form at t = 0.
    #[arg(long)]
    pub corollary: bool,
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    pub zmin: f64,
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    pub zmax: f64,
    #[arg(long, default_value_t = 8001)]
    pub n: usize,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    /// One of half-one, asymmetric-body, ball-plus-point, connected-2d,
    /// localization-jump, positive-suites.
    pub name: String,
    /// Parameter override `key=value`; repeatable.
    #[arg(long = "param")]
    pub params: Vec<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cases: Option<usize>,
    #[arg(long)]
    pub emit_curve: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&config, &mut out) {
        Ok(passed) => {
            if passed {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Runs a parsed command, writing reports to `out`. Returns whether every
/// checked assertion held.
pub fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<bool> {
    match &config.command {
        Command::Pvolume(a) => pvolume(a, out),
        Command::CheckConcavity(a) => check_concavity(a, out),
        Command::Hopflax(a) => hopflax(a, out),
        Command::Blcheck(a) => blcheck(a, out),
        Command::Counterexample(a) => counterexample(a, out),
    }
}

/// `flag`, else `PARCAVE_TOL`, else `default`.
fn tolerance(flag: Option<f64>, default: f64) -> Result<f64> {
    let tol = match flag {
        Some(t) => t,
        None => match std::env::var(TOL_ENV) {
            Ok(v) => v
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("{TOL_ENV} is not a number: {v}")))?,
            Err(_) => default,
        },
    };
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be finite and non-negative, got {tol}")));
    }
    Ok(tol)
}

fn t_grid(tmin: f64, tmax: f64, steps: usize) -> Result<Vec<f64>> {
    if !(tmin >= 0.0 && tmax > tmin && tmax.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 <= tmin < tmax, got [{tmin}, {tmax}]")));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("steps must be at least 2, got {steps}")));
    }
    Ok((0..steps)
        .map(|i| tmin + (tmax - tmin) * i as f64 / (steps - 1) as f64)
        .collect())
}

fn check_domain(zmin: f64, zmax: f64, n: usize) -> Result<()> {
    if !(zmin < zmax && zmin.is_finite() && zmax.is_finite()) || n < 3 {
        return Err(Error::InvalidArgument(format!("bad grid [{zmin}, {zmax}] with {n} nodes")));
    }
    Ok(())
}

fn cost(p: f64) -> Result<PowerCost> {
    if p == f64::INFINITY {
        Ok(PowerCost::indicator())
    } else {
        PowerCost::new(p)
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn write_csv(path: Option<&Path>, out: &mut dyn Write, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<()> {
    let sink: Box<dyn Write + '_> = match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(out),
    };
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.map(fmt_num).unwrap_or_default()))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn curve_rows(curve: &[(f64, f64)]) -> Vec<Vec<Option<f64>>> {
    curve.iter().map(|&(t, v)| vec![Some(t), Some(v)]).collect()
}

/// Reads the first two columns of a CSV with a header row.
pub fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let field = |k: usize| -> Result<f64> {
            rec.get(k)
                .ok_or_else(|| Error::Parse(format!("row {}: expected two columns", line + 2)))?
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("row {}: not a number", line + 2)))
        };
        xs.push(field(0)?);
        ys.push(field(1)?);
    }
    Ok((xs, ys))
}

/// Reads a z,value CSV on a uniform grid.
pub fn read_grid(path: &Path) -> Result<GridFunction> {
    let (zs, vs) = read_two_columns(path)?;
    if zs.len() < 2 {
        return Err(Error::InsufficientData(zs.len()));
    }
    let (lo, hi) = (zs[0], zs[zs.len() - 1]);
    let dz = (hi - lo) / (zs.len() - 1) as f64;
    for (i, z) in zs.iter().enumerate() {
        if (z - (lo + i as f64 * dz)).abs() > 1e-6 * dz.abs() {
            return Err(Error::InvalidArgument(format!("grid in {} is not uniform at row {}", path.display(), i + 2)));
        }
    }
    GridFunction::new(lo, hi, vs)
}

fn builtin_or_csv(name: &str, zmin: f64, zmax: f64, n: usize, builtin: fn(&str) -> Option<fn(f64) -> f64>) -> Result<GridFunction> {
    match builtin(name) {
        Some(f) => {
            check_domain(zmin, zmax, n)?;
            GridFunction::from_fn(zmin, zmax, n, f)
        }
        None if Path::new(name).is_file() => read_grid(Path::new(name)),
        None => Err(Error::InvalidArgument(format!("`{name}` is neither a builtin nor a readable file"))),
    }
}

fn density_builtin(name: &str) -> Option<fn(f64) -> f64> {
    Some(match name {
        "gauss" => |z: f64| (-0.5 * z * z).exp(),
        "laplace" => |z: f64| (-z.abs()).exp(),
        "bump" => |z: f64| (1.0 - z * z).max(0.0),
        "hat" => |z: f64| (1.0 - z.abs()).max(0.0),
        _ => return None,
    })
}

fn potential_builtin(name: &str) -> Option<fn(f64) -> f64> {
    Some(match name {
        "quadratic" => |z: f64| 0.5 * z * z,
        "quadratic-plus-one" => |z: f64| 0.5 * z * z + 1.0,
        "one-plus-square" => |z: f64| 1.0 + z * z,
        "cosh" => f64::cosh,
        "quartic" => |z: f64| 0.5 * z * z + 0.01 * z.powi(4),
        "constant" => |_| 1.0,
        _ => return None,
    })
}

fn envelope(command: &str, payload: impl Serialize, verdict: Option<bool>) -> Result<Value> {
    let mut map = Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("command".into(), json!(command));
    match serde_json::to_value(payload).map_err(|e| Error::Io(e.to_string()))? {
        Value::Object(o) => map.extend(o),
        other => {
            map.insert("result".into(), other);
        }
    }
    if let Some(ok) = verdict {
        map.insert("verdict".into(), json!(if ok { "pass" } else { "fail" }));
    }
    Ok(Value::Object(map))
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn pvolume(a: &PvolumeArgs, out: &mut dyn Write) -> Result<bool> {
    let set: IntervalUnion = a.set.parse()?;
    let measure: Density1D = a.measure.parse()?;
    let ts = t_grid(a.tmin, a.tmax, a.steps)?;
    if let Some(s) = a.s {
        if s.is_nan() {
            return Err(Error::InvalidArgument("s is NaN".into()));
        }
    }
    let curve = VolumeCurve::new(set, measure);
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let v = curve.eval(t)?;
        let left = if t > 0.0 { Some(curve.derivative_left(t)?) } else { None };
        let right = curve.derivative_right(t)?;
        let second = match curve.second_derivative(t) {
            _ if t == 0.0 => None,
            Ok(x) => Some(x),
            Err(Error::OneSidedOnly(_)) => None,
            Err(e) => return Err(e),
        };
        rows.push(vec![Some(t), Some(v), left, Some(right), second]);
    }
    write_csv(
        a.out.as_deref(),
        out,
        &["t", "V", "V_left_deriv", "V_right_deriv", "V_second_deriv"],
        &rows,
    )?;
    if let Some(path) = &a.svg {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[0].unwrap_or(0.0), r[1].unwrap_or(0.0))).collect();
        emit_svg(&pts, path)?;
    }
    let Some(path) = &a.out else {
        return Ok(true);
    };
    let mut summary = json!({
        "set": curve.set().to_string(),
        "measure": curve.measure().to_string(),
        "breakpoints": curve.breakpoints(),
        "rows": rows.len(),
        "csv": path.display().to_string(),
    });
    let mut verdict = None;
    if let Some(s) = a.s {
        let junctions = curve.junction_check(s)?;
        verdict = Some(junctions.iter().all(|j| j.holds));
        summary["s"] = json!(s);
        summary["junctions"] = serde_json::to_value(&junctions).map_err(|e| Error::Io(e.to_string()))?;
    }
    print_json(out, &envelope("pvolume", summary, verdict)?)?;
    Ok(verdict.unwrap_or(true))
}

fn check_concavity(a: &CheckArgs, out: &mut dyn Write) -> Result<bool> {
    let tol = tolerance(a.tol, DEFAULT_TOL_EXACT)?;
    let (ts, vs) = read_two_columns(&a.csv)?;
    let report = check_s_concave_samples(&ts, &vs, a.s, tol)?;
    let passed = report.passed();
    print_json(out, &envelope("check-concavity", &report, None)?)?;
    Ok(passed)
}

fn hopflax(a: &HopflaxArgs, out: &mut dyn Write) -> Result<bool> {
    let tol = tolerance(a.tol, DEFAULT_TOL_GRID)?;
    let f = builtin_or_csv(&a.f, a.zmin, a.zmax, a.n, density_builtin)?;
    let v = cost(a.p)?;
    let ts = t_grid(a.tmin, a.tmax, a.steps)?;
    let policy = if a.unverified { GammaPolicy::Unverified } else { GammaPolicy::TheoremRange };
    let curve = functional_volume(&f, a.gamma, &v, &ts, policy)?;
    write_csv(a.out.as_deref(), out, &["t", "F"], &curve_rows(&curve))?;
    if let Some(path) = &a.svg {
        emit_svg(&curve, path)?;
    }
    if let (Some(t), Some(path)) = (a.emit_ht, &a.ht_out) {
        let h = h_t(&f, a.gamma, &v, t, policy)?;
        let rows: Vec<Vec<Option<f64>>> = h.nodes().zip(h.values()).map(|(z, &x)| vec![Some(z), Some(x)]).collect();
        write_csv(Some(path), out, &["z", "value"], &rows)?;
    }
    let fs: Vec<f64> = curve.iter().map(|c| c.1).collect();
    let report = if ts.len() >= 3 {
        Some(check_s_concave_samples(&ts, &fs, 1.0, tol)?)
    } else {
        None
    };
    let passed = report.as_ref().map_or(true, |r| r.passed());
    if let Some(path) = &a.out {
        let summary = json!({
            "f": a.f,
            "gamma": a.gamma,
            "p": if a.p.is_finite() { json!(a.p) } else { json!("inf") },
            "csv": path.display().to_string(),
            "curve": curve,
            "concavity": report,
        });
        print_json(out, &envelope("hopflax", summary, report.as_ref().map(|_| passed))?)?;
    }
    Ok(passed)
}

fn blcheck(a: &BlArgs, out: &mut dyn Write) -> Result<bool> {
    let tol = tolerance(a.tol, DEFAULT_TOL_SLACK)?;
    let phi = builtin_or_csv(&a.phi, a.zmin, a.zmax, a.n, potential_builtin)?;
    let result = if a.log_mode {
        bl_check_log(&phi, a.t)?
    } else if a.corollary {
        corollary_check(&phi, &cost(a.p)?, a.gamma)?
    } else {
        bl_check(&phi, &cost(a.p)?, a.gamma, a.t, a.s)?
    };
    let passed = result.slack >= -tol;
    print_json(out, &envelope("blcheck", &result, Some(passed))?)?;
    Ok(passed)
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut params = BTreeMap::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("parameter `{p}` is not key=value")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("parameter `{p}` has a non-numeric value")))?;
        params.insert(k.trim().to_string(), v);
    }
    Ok(params)
}

fn counterexample(a: &CounterexampleArgs, out: &mut dyn Write) -> Result<bool> {
    if !CATALOG.contains(&a.name.as_str()) {
        return Err(Error::InvalidArgument(format!(
            "unknown counterexample `{}`; expected one of {}",
            a.name,
            CATALOG.join(", ")
        )));
    }
    let mut params = parse_params(&a.params)?;
    if let Some(seed) = a.seed {
        params.insert("seed".into(), seed as f64);
    }
    if let Some(cases) = a.cases {
        params.insert("cases".into(), cases as f64);
    }
    let outcome = run_named(&a.name, &params)?;
    let passed = outcome.passed();
    if let Some(curve) = outcome.curve() {
        if let Some(path) = &a.emit_curve {
            write_csv(Some(path), out, &["t", "value"], &curve_rows(curve))?;
        }
        if let Some(path) = &a.svg {
            emit_svg(curve, path)?;
        }
    }
    let verdict = match &outcome {
        crate::counterexamples::NamedOutcome::Suites(_) => Some(passed),
        crate::counterexamples::NamedOutcome::Single(_) => None,
    };
    print_json(out, &envelope("counterexample", &outcome, verdict)?)?;
    Ok(passed)
}
