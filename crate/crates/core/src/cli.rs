//! Command-line front end. One job per invocation; every report echoes the
//! fully resolved request, so feeding a report back through `--json`
//! reproduces it byte for byte.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::density::{approximate_with_bounds, error_bounds, DEFAULT_GRID};
use crate::error::{Error, ErrorKind, Result};
use crate::geometry::{is_tn_tuple, EndpointTuple, DEFAULT_TN_TOL};
use crate::pell::construct_pair;
use crate::trace::{trace_preimage, write_csv, write_svg};

pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_TRACE_BASE: &str = "trace";
pub const THREADS_ENV: &str = "TWOARC_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Certify a tuple as a T_n-tuple.
    Check,
    /// Snap a tuple to the nearest T_n-tuple.
    Approx,
    /// Build the Pell pair (T, U) of a certified tuple.
    Construct,
    /// Trace the preimage T^{-1}([-1, 1]) and export CSV/SVG.
    Trace,
    /// Constants of the O(1/n) approximation bound.
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Acceptance tolerance of the lattice test.
    pub tn: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tn: DEFAULT_TN_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct JobRequest {
    pub command: Command,
    pub tuple: [Complex64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    /// Report file, or for `trace` the base path of the CSV/SVG exports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl JobRequest {
    /// Fills command defaults, drops fields the command ignores and checks
    /// that the required ones are present.
    pub fn resolved(mut self) -> Result<Self> {
        let cmd = self.command;
        for (i, z) in self.tuple.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Input(format!("tuple entry {} is not finite", i + 1)));
            }
        }
        let tol = self.tolerances.tn;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::Input(format!("tolerance {tol} must be positive and finite")));
        }
        if cmd == Command::Bounds {
            self.n = None;
        } else if self.n.is_none() {
            return Err(Error::Input(format!("`{}` needs --n", cmd.name())));
        }
        self.grid = match cmd {
            Command::Approx | Command::Bounds => Some(self.grid.unwrap_or(DEFAULT_GRID)),
            _ => None,
        };
        if let Some(g) = self.grid {
            if g < 2 {
                return Err(Error::Input(format!("grid {g} must be at least 2")));
            }
        }
        if cmd == Command::Trace {
            self.samples = Some(self.samples.unwrap_or(DEFAULT_SAMPLES));
            self.out = Some(self.out.unwrap_or_else(|| DEFAULT_TRACE_BASE.to_string()));
        } else {
            self.samples = None;
        }
        Ok(self)
    }
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Approx => "approx",
            Command::Construct => "construct",
            Command::Trace => "trace",
            Command::Bounds => "bounds",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "twoarc", version, about = "Two-arc inverse polynomial images")]
struct Args {
    /// Job to run; may be omitted when --json supplies it.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Four endpoints, e.g. "[-1,0] [-0.5,0] [0.5,0] [1,0]".
    #[arg(long, allow_hyphen_values = true)]
    tuple: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    /// Lattice acceptance tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Levels sampled on [-1, 1] by `trace`.
    #[arg(long)]
    samples: Option<usize>,
    /// Grid size for the extrema search of `approx` and `bounds`.
    #[arg(long)]
    grid: Option<usize>,
    /// Report file (CSV/SVG base path for `trace`); stdout otherwise.
    #[arg(long)]
    out: Option<String>,
    /// Request or earlier report to run; explicit flags override its fields.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// What the process should print and return.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Input => 1,
        ErrorKind::Domain => 2,
        ErrorKind::Numeric => 3,
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Input => "input",
        ErrorKind::Domain => "domain",
        ErrorKind::Numeric => "numeric",
    }
}

/// Parses `[re,im]` groups; a JSON array of pairs works too.
pub fn parse_tuple(text: &str) -> Result<[Complex64; 4]> {
    let mut groups = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '[' => start = Some(i + 1),
            ']' => {
                if let Some(s) = start.take() {
                    groups.push(&text[s..i]);
                }
            }
            _ => {}
        }
    }
    if groups.len() != 4 {
        return Err(Error::Input(format!(
            "expected 4 [re,im] pairs, found {}",
            groups.len()
        )));
    }
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (slot, g) in out.iter_mut().zip(&groups) {
        let parts: Vec<&str> = g.split(',').map(str::trim).collect();
        let parsed: Vec<f64> = parts.iter().filter_map(|p| p.parse().ok()).collect();
        if parts.len() != 2 || parsed.len() != 2 {
            return Err(Error::Input(format!("cannot read `[{g}]` as [re,im]")));
        }
        *slot = Complex64::new(parsed[0], parsed[1]);
    }
    Ok(out)
}

/// Reads a request, or the request echoed inside a report.
pub fn request_from_json(text: &str) -> Result<JobRequest> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Input(format!("JSON: {e}")))?;
    let inner = match value {
        Value::Object(mut map) if map.contains_key("request") => map.remove("request").unwrap_or(Value::Null),
        other => other,
    };
    serde_json::from_value(inner).map_err(|e| Error::Input(format!("request: {e}")))
}

fn build_request(args: Args) -> Result<JobRequest> {
    let base = match &args.json {
        Some(path) => {
            let text =
                fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
            Some(request_from_json(&text)?)
        }
        None => None,
    };
    let command = args
        .command
        .or(base.as_ref().map(|b| b.command))
        .ok_or_else(|| Error::Input("no command given".into()))?;
    let tuple = match (&args.tuple, &base) {
        (Some(s), _) => parse_tuple(s)?,
        (None, Some(b)) => b.tuple,
        (None, None) => return Err(Error::Input("--tuple is required".into())),
    };
    let mut req = base.unwrap_or(JobRequest {
        command,
        tuple,
        n: None,
        tolerances: Tolerances::default(),
        samples: None,
        grid: None,
        out: None,
    });
    req.command = command;
    req.tuple = tuple;
    req.n = args.n.or(req.n);
    if let Some(tol) = args.tol {
        req.tolerances.tn = tol;
    }
    req.samples = args.samples.or(req.samples);
    req.grid = args.grid.or(req.grid);
    req.out = args.out.or(req.out);
    req.resolved()
}

#[derive(Serialize)]
struct TraceSummary {
    csv: String,
    svg: String,
    #[serde(rename = "pellResidual")]
    pell_residual: f64,
    levels: usize,
    #[serde(rename = "flaggedLevels")]
    flagged_levels: usize,
    #[serde(rename = "componentCount")]
    component_count: usize,
    #[serde(rename = "endpointEstimates")]
    endpoint_estimates: Vec<Complex64>,
}

#[derive(Serialize)]
struct ApproxResult {
    #[serde(rename = "aTilde2")]
    a_tilde2: Complex64,
    #[serde(rename = "aTilde3")]
    a_tilde3: Complex64,
    m: i64,
    #[serde(rename = "mPrime")]
    m_prime: i64,
    #[serde(rename = "nAtLeastN")]
    n_at_least_big_n: bool,
    #[serde(rename = "N")]
    big_n: u64,
    certificate: crate::geometry::TupleCertificate,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Runs a resolved request and returns the `result` part of the report.
pub fn execute(req: &JobRequest) -> Result<Value> {
    let tuple = EndpointTuple::new(req.tuple)?;
    let tol = req.tolerances.tn;
    let n = req.n.unwrap_or(0);
    match req.command {
        Command::Check => Ok(to_value(&is_tn_tuple(&tuple, n, tol)?)),
        Command::Approx => {
            let (ap, rep) = approximate_with_bounds(&tuple, n, req.grid.unwrap_or(DEFAULT_GRID))?;
            let snapped = ap.snapped_tuple()?;
            let mut certificate = is_tn_tuple(&snapped, n, tol)?;
            certificate.bound_certified = ap.certificate.bound_certified;
            Ok(to_value(&ApproxResult {
                a_tilde2: ap.a_tilde2,
                a_tilde3: ap.a_tilde3,
                m: ap.m,
                m_prime: ap.m_prime,
                n_at_least_big_n: n as u64 >= rep.big_n,
                big_n: rep.big_n,
                certificate,
            }))
        }
        Command::Construct => {
            let cert = is_tn_tuple(&tuple, n, tol)?;
            Ok(to_value(&construct_pair(&tuple, &cert)?))
        }
        Command::Trace => {
            let cert = is_tn_tuple(&tuple, n, tol)?;
            let pair = construct_pair(&tuple, &cert)?;
            let tr = trace_preimage(&pair, req.samples.unwrap_or(DEFAULT_SAMPLES))?;
            let base = req.out.clone().unwrap_or_else(|| DEFAULT_TRACE_BASE.to_string());
            let csv = format!("{base}.csv");
            let svg = format!("{base}.svg");
            let mut buf = Vec::new();
            write_csv(&tr, &mut buf).map_err(io_error)?;
            write_atomic(Path::new(&csv), &buf)?;
            buf.clear();
            write_svg(&tr, &mut buf).map_err(io_error)?;
            write_atomic(Path::new(&svg), &buf)?;
            Ok(to_value(&TraceSummary {
                csv,
                svg,
                pell_residual: pair.pell_residual,
                levels: tr.points.len(),
                flagged_levels: tr.points.iter().filter(|l| l.flagged).count(),
                component_count: tr.component_count,
                endpoint_estimates: tr.endpoint_estimates,
            }))
        }
        Command::Bounds => Ok(to_value(&error_bounds(&tuple, req.grid.unwrap_or(DEFAULT_GRID))?)),
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Input(format!("I/O: {e}"))
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Input(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_error)
}

fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

fn failure(request: Option<&JobRequest>, err: &Error) -> Outcome {
    let kind = err.kind();
    let mut obj = serde_json::Map::new();
    if let Some(r) = request {
        obj.insert("request".into(), to_value(r));
    }
    obj.insert(
        "error".into(),
        serde_json::json!({
            "kind": kind_name(kind),
            "code": exit_code(kind),
            "message": err.to_string(),
        }),
    );
    Outcome {
        code: exit_code(kind),
        stdout: render(&Value::Object(obj)),
        stderr: format!("twoarc: {err}\n"),
    }
}

/// Applies `TWOARC_THREADS` to the global rayon pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Input(format!("{THREADS_ENV}={raw} is not a positive integer")))?;
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses arguments (including the program name) and runs one job.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion) {
                return Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                };
            }
            let msg = e.render().to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ")
                .to_string();
            return failure(None, &Error::Input(first));
        }
    };
    if let Err(e) = configure_threads() {
        return failure(None, &e);
    }
    match build_request(args) {
        Ok(req) => run_resolved(req),
        Err(e) => failure(None, &e),
    }
}

/// Runs a request built by other means, such as a foreign caller.
pub fn run_request(req: JobRequest) -> Outcome {
    match req.resolved() {
        Ok(req) => run_resolved(req),
        Err(e) => failure(None, &e),
    }
}

fn run_resolved(req: JobRequest) -> Outcome {
    let result = match execute(&req) {
        Ok(v) => v,
        Err(e) => return failure(Some(&req), &e),
    };
    let text = render(&serde_json::json!({ "request": to_value(&req), "result": result }));
    match (&req.out, req.command) {
        (Some(path), c) if c != Command::Trace => match write_atomic(Path::new(path), text.as_bytes()) {
            Ok(()) => Outcome {
                code: 0,
                stdout: String::new(),
                stderr: String::new(),
            },
            Err(e) => failure(Some(&req), &e),
        },
        _ => Outcome {
            code: 0,
            stdout: text,
            stderr: String::new(),
        },
    }
}
