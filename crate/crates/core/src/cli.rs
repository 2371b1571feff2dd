//! The `lcw` command line.
//!
//! [`run`] parses arguments and returns the exit code with the text for stdout and
//! stderr, so the binary is a thin shell around it and tests call it directly.
//!
//! Exit codes: 0 passes (or success), 2 input error, 3 math error, 4 positivity failure
//! of a perturbation, 10 fails the necessary condition, 11 inconclusive.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bivector::{bianchi_project, ricci_contract};
use crate::catalog::{self, CatalogEntry, EntryData};
use crate::error::Error;
use crate::json;
use crate::metric::{parse_metric, MetricDef};
use crate::obstruction::{
    auto_test, cotton_york_test, eigenflag_test, eigenflag_test_reexamined, weyl_report,
    EigenflagConfig, ObstructionReport, Verdict,
};
use crate::perturb::{
    prescribe_cotton_york, prescribe_curvature, CottonPrescription, CurvaturePrescription,
    Perturbation,
};
use crate::tensors::{orthonormal_frame, Array4, TensorSnapshot};
use crate::weyl_space::{dimension_report, phi_map, random_weyl, EigenflagParams};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MATH: i32 = 3;
pub const EXIT_POSITIVITY: i32 = 4;
pub const EXIT_FAIL: i32 = 10;
pub const EXIT_INCONCLUSIVE: i32 = 11;

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// A point given as `a,b,c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Point)
}

#[derive(Debug, Parser)]
#[command(
    name = "lcw",
    version,
    about = "Curvature tensors, Weyl and Cotton-York obstructions, and local perturbations of Riemannian metrics"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Relative tolerance of the obstruction tests.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Evaluation point `a,b,c`; defaults to the entry's base point or the origin.
    #[arg(long, global = true, value_parser = parse_point, allow_hyphen_values = true)]
    point: Option<Point>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog entries, or describe one.
    Catalog {
        name: Option<String>,
        /// Print only the metric file of the entry.
        #[arg(long, requires = "name")]
        export: bool,
    },
    /// Tensors of a metric at a point.
    Tensors {
        /// Metric file path or catalog name.
        #[arg(long)]
        metric: String,
        /// Comma-separated tensor names; all when omitted.
        #[arg(long, value_delimiter = ',')]
        which: Vec<String>,
    },
    /// Necessary condition for a limiting Carleman weight at a point.
    Check {
        #[arg(long)]
        metric: String,
        #[arg(long, value_enum, default_value_t = TestArg::Auto)]
        test: TestArg,
        /// Multi-start count of the eigenflag search.
        #[arg(long, default_value_t = 64)]
        starts: usize,
    },
    /// Bump the metric near a point so that its curvature (dim >= 4) or Cotton-York
    /// tensor (dim 3) at the point takes a target value.
    Perturb {
        #[arg(long)]
        metric: String,
        /// `current`, `random`, or a JSON file holding `riemann` or `cotton_york`
        /// components at the point in the metric's coordinates.
        #[arg(long, default_value = "random")]
        target: String,
        /// Size of the random shift, measured in an orthonormal frame.
        #[arg(long, default_value_t = 0.05)]
        scale: f64,
        /// Coordinate radius of the bump.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        /// Where to write the new metric file; embedded in the report when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Weyl tensors and the eigenflag subset in dimension n.
    WeylSpace {
        #[arg(long)]
        dim: usize,
        #[arg(value_enum)]
        action: WeylAction,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestArg {
    Auto,
    Eigenflag,
    CottonYork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeylAction {
    Dims,
    Sample,
    Phi,
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() || matches!(e, Error::Dimension(_)) {
            EXIT_INPUT
        } else {
            EXIT_MATH
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

/// Document plus exit code of a successful command.
struct Reply {
    code: i32,
    doc: Value,
    /// Raw text appended after the document (metric files).
    raw: Option<String>,
}

impl Reply {
    fn ok(doc: Value) -> Self {
        Reply {
            code: EXIT_PASS,
            doc,
            raw: None,
        }
    }
}

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::PassesNecessary => EXIT_PASS,
        Verdict::FailsNecessary => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Run the command line `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.exit_code() == 0 {
                EXIT_PASS
            } else {
                EXIT_INPUT
            };
            let text = e.render().to_string();
            return if code == EXIT_PASS {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(reply) => {
            let mut stdout = match cli.format {
                Format::Json => json::to_string(&reply.doc),
                Format::Table => render_table(&reply.doc),
            };
            if let Some(raw) = reply.raw {
                if matches!(reply.doc, Value::Null) {
                    stdout = raw;
                } else {
                    stdout.push_str(&raw);
                }
            }
            Outcome {
                code: reply.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => Outcome {
            code: f.code,
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message),
        },
    }
}

fn dispatch(cli: &Cli) -> Result<Reply, Failure> {
    if !(cli.tol > 0.0 && cli.tol < 1.0) {
        return Err(input(format!("--tol must lie in (0, 1), got {}", cli.tol)));
    }
    match &cli.command {
        Command::Catalog { name, export } => cmd_catalog(name.as_deref(), *export),
        Command::Tensors { metric, which } => cmd_tensors(cli, metric, which),
        Command::Check {
            metric,
            test,
            starts,
        } => cmd_check(cli, metric, *test, *starts),
        Command::Perturb {
            metric,
            target,
            scale,
            radius,
            output,
        } => cmd_perturb(cli, metric, target, *scale, *radius, output.as_deref()),
        Command::WeylSpace { dim, action } => cmd_weyl_space(cli, *dim, *action),
    }
}

/// A metric source: catalog entry or parsed file.
enum Source {
    Entry(CatalogEntry),
    File(MetricDef),
}

fn load(source: &str) -> Result<Source, Failure> {
    let base = source.split(':').next().unwrap_or(source);
    if catalog::list_catalog().contains(&base) {
        return Ok(Source::Entry(catalog::entry(source)?));
    }
    let path = Path::new(source);
    if !path.is_file() {
        return Err(input(format!(
            "`{source}` is neither a catalog entry nor a readable file"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{source}: {e}")))?;
    let m = parse_metric(&text)?;
    let m = if m.name.is_empty() {
        m.with_name(
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        )
    } else {
        m
    };
    Ok(Source::File(m))
}

/// Coordinate metric and evaluation point.
fn metric_and_point(cli: &Cli, source: Source) -> Result<(MetricDef, Vec<f64>), Failure> {
    let (m, default) = match source {
        Source::Entry(e) => match e.data {
            EntryData::Metric(m) => (m, e.base_point),
            EntryData::Algebraic(_) => {
                return Err(input(format!("{} has no coordinate metric", e.name)))
            }
        },
        Source::File(m) => {
            let n = m.dim();
            (m, vec![0.0; n])
        }
    };
    let p = cli.point.as_ref().map_or(default, |p| p.0.clone());
    if p.len() != m.dim() {
        return Err(input(format!(
            "point has {} coordinates, metric has dimension {}",
            p.len(),
            m.dim()
        )));
    }
    Ok((m, p))
}

fn cmd_catalog(name: Option<&str>, export: bool) -> Result<Reply, Failure> {
    let Some(name) = name else {
        let mut entries = Vec::new();
        for n in catalog::list_catalog() {
            let e = catalog::entry(n)?;
            let expected = catalog::expected_truth(n)?;
            entries.push(json!({
                "name": e.name,
                "dim": e.dim,
                "kind": match e.data { EntryData::Metric(_) => "metric", EntryData::Algebraic(_) => "algebraic" },
                "thurston": catalog::THURSTON.contains(&n),
                "expected_check_exit": expected.check_exit,
                "description": e.description,
            }));
        }
        return Ok(Reply::ok(json!({ "entries": entries })));
    };
    let e = catalog::entry(name)?;
    if export {
        return Ok(Reply {
            code: EXIT_PASS,
            doc: Value::Null,
            raw: Some(e.metric_file()?),
        });
    }
    let mut doc = json!({
        "name": e.name,
        "dim": e.dim,
        "description": e.description,
        "base_point": json::vec(&e.base_point),
        "domain": e.domain.iter().map(|&(a, b)| json!([json::num(a), json::num(b)])).collect::<Vec<_>>(),
        "expected": catalog::expected_truth(name)?.to_json(),
    });
    if let Ok(text) = e.metric_file() {
        doc["metric_file"] = json!(text);
    }
    Ok(Reply::ok(doc))
}

fn cmd_tensors(cli: &Cli, source: &str, which: &[String]) -> Result<Reply, Failure> {
    let which: Vec<&str> = which.iter().map(String::as_str).collect();
    let source = load(source)?;
    if let Source::Entry(CatalogEntry {
        data: EntryData::Algebraic(a),
        ..
    }) = &source
    {
        let keys: &[&str] = if which.is_empty() {
            &["riemann", "ricci", "scalar", "schouten", "weyl", "operator"]
        } else {
            &which
        };
        return Ok(Reply::ok(a.to_json(keys)?));
    }
    let (m, p) = metric_and_point(cli, source)?;
    let snap = TensorSnapshot::compute(&m, &p)?;
    Ok(Reply::ok(snap.to_json(&which)?))
}

fn eigenflag_config(cli: &Cli, starts: usize) -> EigenflagConfig {
    EigenflagConfig {
        tol_rel: cli.tol,
        starts,
        seed: cli.seed,
        ..EigenflagConfig::default()
    }
}

fn report_reply(report: ObstructionReport, metric: &str) -> Reply {
    let mut doc = report.to_json();
    doc["metric"] = json!(metric);
    Reply {
        code: verdict_code(report.verdict),
        doc,
        raw: None,
    }
}

fn cmd_check(cli: &Cli, source_name: &str, test: TestArg, starts: usize) -> Result<Reply, Failure> {
    if starts == 0 {
        return Err(input("--starts must be positive"));
    }
    let cfg = eigenflag_config(cli, starts);
    let source = load(source_name)?;
    if let Source::Entry(CatalogEntry {
        data: EntryData::Algebraic(a),
        ..
    }) = &source
    {
        if test == TestArg::CottonYork {
            return Err(input("the Cotton-York test needs a dimension-3 metric"));
        }
        let report = eigenflag_test(&a.weyl_operator()?, &cfg)?;
        return Ok(report_reply(report, source_name));
    }
    let (m, p) = metric_and_point(cli, source)?;
    let report = match test {
        TestArg::Auto => auto_test(&m, &p, &cfg)?,
        TestArg::CottonYork => {
            if m.dim() != 3 {
                return Err(input(format!(
                    "the Cotton-York test needs dimension 3, got {}",
                    m.dim()
                )));
            }
            cotton_york_test(&m, &p, cfg.tol_rel)?
        }
        TestArg::Eigenflag => {
            if m.dim() < 4 {
                return Err(input(format!(
                    "the eigenflag test needs dimension >= 4, got {}",
                    m.dim()
                )));
            }
            weyl_report(&TensorSnapshot::compute(&m, &p)?, &cfg)?
        }
    };
    Ok(report_reply(report, source_name))
}

/// Flat list of numbers from a nested JSON array of the given shape.
fn numbers(v: &Value, shape: &[usize], out: &mut Vec<f64>) -> Result<(), Failure> {
    match shape {
        [] => {
            out.push(
                v.as_f64()
                    .ok_or_else(|| input("target entries must be numbers"))?,
            );
            Ok(())
        }
        [n, rest @ ..] => {
            let arr = v
                .as_array()
                .filter(|a| a.len() == *n)
                .ok_or_else(|| input(format!("target must be nested arrays of length {n}")))?;
            arr.iter().try_for_each(|x| numbers(x, rest, out))
        }
    }
}

/// Target components from a JSON file: either a bare array or an object with `key`.
/// A target file: a bare nested array or an object keyed by tensor name.
#[derive(Deserialize)]
#[serde(untagged)]
enum TargetDoc {
    Keyed {
        cotton_york: Option<Value>,
        riemann: Option<Value>,
    },
    Bare(Value),
}

fn target_from_file(path: &str, key: &str, shape: &[usize]) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{path}: {e}")))?;
    let doc: TargetDoc =
        serde_json::from_str(&text).map_err(|e| input(format!("{path}: invalid JSON: {e}")))?;
    let v = match doc {
        TargetDoc::Keyed {
            cotton_york,
            riemann,
        } => if key == "riemann" {
            riemann
        } else {
            cotton_york
        }
        .ok_or_else(|| input(format!("{path}: expected a `{key}` field")))?,
        TargetDoc::Bare(v) => v,
    };
    let mut out = Vec::new();
    numbers(&v, shape, &mut out)?;
    Ok(out)
}

fn cmd_perturb(
    cli: &Cli,
    source: &str,
    target: &str,
    scale: f64,
    radius: f64,
    output: Option<&Path>,
) -> Result<Reply, Failure> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(input("--radius must be positive"));
    }
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(input("--scale must be non-negative"));
    }
    let (m, p) = metric_and_point(cli, load(source)?)?;
    let n = m.dim();
    if n < 3 {
        return Err(input(format!("perturbations need dimension >= 3, got {n}")));
    }
    let base = TensorSnapshot::compute(&m, &p)?;
    let e = orthonormal_frame(&base.g)
        .ok_or_else(|| Failure::from(Error::NotPositiveDefinite("metric at the point".into())))?;
    let f = e.clone().try_inverse().expect("frame is invertible");
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);

    let result = if n == 3 {
        let cy0 = base.cotton_york.clone().expect("dimension 3");
        let goal = match target {
            "current" => cy0,
            "random" => {
                let a = DMatrix::from_fn(3, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
                let s = (&a + a.transpose()) * 0.5;
                let s = &s - DMatrix::identity(3, 3) * (s.trace() / 3.0);
                let s = &s / s.norm();
                // Frame components S become coordinate components Fᵀ S F.
                cy0 + f.transpose() * s * &f * scale
            }
            path => DMatrix::from_row_slice(3, 3, &target_from_file(path, "cotton_york", &[3, 3])?),
        };
        prescribe_cotton_york(&CottonPrescription {
            metric: m.clone(),
            point: p.clone(),
            target: goal,
            radius,
        })
    } else {
        let goal = match target {
            "current" => base.riemann.clone(),
            "random" => {
                let w = random_weyl(n, &mut rng)?.to_tensor();
                let w = w.scaled(1.0 / w.norm());
                let pulled = Array4::from_fn(n, |[i, j, k, l]| {
                    let mut acc = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            for c in 0..n {
                                for d in 0..n {
                                    acc += f[(a, i)]
                                        * f[(b, j)]
                                        * f[(c, k)]
                                        * f[(d, l)]
                                        * w[[a, b, c, d]];
                                }
                            }
                        }
                    }
                    acc
                });
                Array4::from_fn(n, |idx| base.riemann[idx] + scale * pulled[idx])
            }
            path => {
                let data = target_from_file(path, "riemann", &[n, n, n, n])?;
                Array4::from_fn(n, |[i, j, k, l]| data[((i * n + j) * n + k) * n + l])
            }
        };
        prescribe_curvature(&CurvaturePrescription {
            metric: m.clone(),
            point: p.clone(),
            target: goal,
            radius,
        })
    };
    let out = result.map_err(|e| match e {
        Error::NotPositiveDefinite(msg) => Failure {
            code: EXIT_POSITIVITY,
            message: format!("perturbed metric is not positive definite: {msg}"),
        },
        Error::SymmetryViolation(_) | Error::ConstraintViolation(_) => {
            input(format!("invalid target: {e}"))
        }
        other => other.into(),
    })?;
    perturb_reply(&m, &p, radius, n, &out, output)
}

fn perturb_reply(
    m: &MetricDef,
    p: &[f64],
    radius: f64,
    n: usize,
    out: &Perturbation,
    output: Option<&Path>,
) -> Result<Reply, Failure> {
    let text = out.metric.to_file_string();
    let mut doc = json!({
        "mode": if n == 3 { "cotton_york" } else { "curvature" },
        "dim": n,
        "point": json::vec(p),
        "radius": json::num(radius),
        "identity": out.metric == *m,
        "target_norm": json::num(out.target_norm),
        "shift_norm": json::num(out.shift_norm),
        "achieved_error": json::num(out.achieved_error),
        "relative_error": json::num(out.achieved_error / out.target_norm.max(f64::MIN_POSITIVE)),
        "bump_norm": json::num(out.bump_norm),
        "norm_order": if n == 3 { 3 } else { 2 },
        "norm_ratio": json::num(out.norm_ratio),
        "min_eigenvalue": json::num(out.min_eigenvalue),
        "christoffel_at_p": json::num(out.christoffel_at_p),
    });
    match output {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| input(format!("{}: {e}", path.display())))?;
            doc["output"] = json!(path.display().to_string());
        }
        None => doc["metric_file"] = json!(text),
    }
    Ok(Reply::ok(doc))
}

fn cmd_weyl_space(cli: &Cli, n: usize, action: WeylAction) -> Result<Reply, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let cfg = eigenflag_config(cli, EigenflagConfig::default().starts);
    match action {
        WeylAction::Dims => Ok(Reply::ok(dimension_report(n)?.to_json())),
        WeylAction::Sample => {
            if !(4..=6).contains(&n) {
                return Err(input(format!("weyl-space covers 4 <= n <= 6, got {n}")));
            }
            let op = random_weyl(n, &mut rng)?;
            let report = eigenflag_test_reexamined(&op, &cfg)?;
            let code = verdict_code(report.verdict);
            Ok(Reply {
                code,
                doc: json!({
                    "n": n,
                    "seed": cli.seed,
                    "operator": op.to_json(),
                    "verdict": report.passes(),
                    "report": report.to_json(),
                }),
                raw: None,
            })
        }
        WeylAction::Phi => {
            let params = EigenflagParams::random(n, &mut rng)?;
            let op = phi_map(&params)?;
            let report = eigenflag_test(&op, &cfg)?;
            let code = verdict_code(report.verdict);
            Ok(Reply {
                code,
                doc: json!({
                    "n": n,
                    "seed": cli.seed,
                    "lambdas": json::vec(&params.lambdas),
                    "witness": json::vec(&params.witness()),
                    "bianchi_norm": json::num(bianchi_project(&op).norm()),
                    "ricci_norm": json::num(ricci_contract(&op).norm()),
                    "operator": op.to_json(),
                    "verdict": report.passes(),
                    "report": report.to_json(),
                }),
                raw: None,
            })
        }
    }
}

/// Number with 6 significant digits.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

fn is_numeric_row(v: &Value) -> bool {
    v.as_array().is_some_and(|a| a.iter().all(Value::is_number))
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(x) => x.as_f64().map_or_else(|| x.to_string(), fmt6),
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn row_text(row: &[Value]) -> String {
    row.iter()
        .map(|x| format!("{:>13}", scalar_text(x)))
        .collect::<String>()
}

fn render_value(out: &mut String, label: &str, v: &Value, indent: usize) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            if !label.is_empty() {
                let _ = writeln!(out, "{pad}{label}:");
            }
            render_object(out, map, if label.is_empty() { indent } else { indent + 2 });
        }
        Value::Array(items) if items.is_empty() => {
            let _ = writeln!(out, "{pad}{label}: []");
        }
        Value::Array(items) if items.iter().all(Value::is_number) => {
            let _ = writeln!(out, "{pad}{label}:{}", row_text(items));
        }
        Value::Array(items) if items.iter().all(is_numeric_row) => {
            let _ = writeln!(out, "{pad}{label}:");
            for row in items {
                let _ = writeln!(out, "{pad}  {}", row_text(row.as_array().expect("row")));
            }
        }
        Value::Array(items) if items.iter().all(Value::is_string) => {
            let joined: Vec<String> = items.iter().map(scalar_text).collect();
            let _ = writeln!(out, "{pad}{label}: {}", joined.join("; "));
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{label}:");
            for (i, item) in items.iter().enumerate() {
                render_value(out, &format!("[{i}]"), item, indent + 2);
            }
        }
        Value::String(s) if s.contains('\n') => {
            let _ = writeln!(out, "{pad}{label}:");
            for line in s.lines() {
                let _ = writeln!(out, "{pad}  {line}");
            }
        }
        scalar => {
            let _ = writeln!(out, "{pad}{label}: {}", scalar_text(scalar));
        }
    }
}

fn render_object(out: &mut String, map: &Map<String, Value>, indent: usize) {
    for (k, v) in map {
        render_value(out, k, v, indent);
    }
}

/// Human-readable rendering of a JSON document with 6 significant digits.
pub fn render_table(doc: &Value) -> String {
    let mut out = String::new();
    render_value(&mut out, "", doc, 0);
    out
}
