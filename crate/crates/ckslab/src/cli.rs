//! Command-line front end: `transform`, `verify`, `characterize` and
//! `measure` subcommands over the library, with flat key-value run
//! configuration, seeded reproducibility, and line-delimited JSON reports
//! (optionally flattened to CSV).
//!
//! Every run resolves its configuration to a sorted `key=value` file that
//! is written alongside the results; re-running from that file reproduces
//! the report byte for byte on the same platform.
//!
//! Exit codes: 0 all checks pass; 2 a mathematical check failed; 3 input
//! error; 4 numerical non-convergence.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::analytic::{
    check_growth_condition, reconstruct_chaos, taylor_table, AnalyticFunction, BoundDirection,
    ContourSpec, RadiusPolicy, SampleCloud,
};
use crate::chaos::{
    norm_equivalence_experiment, random_chaos_vector, s_transform, SpaceModel,
};
use crate::growth::{
    check_convexity_class, check_equivalence, check_u_condition, parse_growth_spec,
    ConditionReport, ConvexityClass, Grid, GrowthFunction, UCondition, CONDITION_TOL,
};
use crate::measures::{
    boundedness_probe, check_omega_bound, integrability_estimate, omega_test_function,
    pseudo_positivity_probe, ComponentMeasure, ConvergenceVerdict, GeneralizedFunction,
    PositivityVerdict, ProductMeasureModel, PseudoPositiveOperator,
};
use crate::transforms::{
    dual_legendre, bound_check_grid, l_function, legendre, verify_l_upper_bound, verify_l_lower_bound,
    verify_l_sqrt_bound, verify_dual_legendre_identity, weight_sequence,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_INPUT_ERROR: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    fn input(msg: impl Into<String>) -> CliError {
        CliError {
            message: msg.into(),
            exit_code: EXIT_INPUT_ERROR,
        }
    }

    fn numeric(msg: impl Into<String>) -> CliError {
        CliError {
            message: msg.into(),
            exit_code: EXIT_NO_CONVERGENCE,
        }
    }
}

impl From<crate::growth::GrowthError> for CliError {
    fn from(e: crate::growth::GrowthError) -> CliError {
        CliError::input(e.to_string())
    }
}

impl From<crate::transforms::TransformError> for CliError {
    fn from(e: crate::transforms::TransformError) -> CliError {
        use crate::transforms::TransformError::*;
        match e {
            Divergent { .. } | TruncationFailure { .. } => CliError::numeric(e.to_string()),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<crate::chaos::ChaosError> for CliError {
    fn from(e: crate::chaos::ChaosError) -> CliError {
        use crate::chaos::ChaosError::*;
        match e {
            Transform(t) => CliError::from(t),
            Precondition(_) | InvalidSpace(_) | SpaceMismatch | IndexOutOfRange(_)
            | Serialization(_) => CliError::input(e.to_string()),
        }
    }
}

impl From<crate::analytic::AnalyticError> for CliError {
    fn from(e: crate::analytic::AnalyticError) -> CliError {
        use crate::analytic::AnalyticError::*;
        match e {
            EvaluatorFailure { .. } => CliError::numeric(e.to_string()),
            Transform(t) => CliError::from(t),
            Chaos(c) => CliError::from(c),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<crate::measures::MeasureError> for CliError {
    fn from(e: crate::measures::MeasureError) -> CliError {
        use crate::measures::MeasureError::*;
        match e {
            Transform(t) => CliError::from(t),
            Chaos(c) => CliError::from(c),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::input(format!("io: {e}"))
    }
}

/// Flat key-value run configuration mirroring the command-line flags.
/// Fully serializable; a run re-executed from its emitted config
/// reproduces all outputs.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    map: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parse `command --key value --flag ...` argument lists. A leading
    /// `--config FILE` loads the file first; remaining flags override it.
    pub fn from_args(args: &[String]) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        let mut i = 0;
        let mut command: Option<String> = None;
        while i < args.len() {
            let a = &args[i];
            if let Some(key) = a.strip_prefix("--") {
                let has_value = i + 1 < args.len() && !args[i + 1].starts_with("--");
                if key == "config" {
                    if !has_value {
                        return Err(CliError::input("--config needs a file path"));
                    }
                    cfg.load_file(&args[i + 1])?;
                    i += 2;
                    continue;
                }
                if has_value {
                    cfg.map.insert(key.to_string(), args[i + 1].clone());
                    i += 2;
                } else {
                    cfg.map.insert(key.to_string(), "true".to_string());
                    i += 1;
                }
            } else {
                if command.is_some() {
                    return Err(CliError::input(format!("unexpected argument `{a}`")));
                }
                command = Some(a.clone());
                i += 1;
            }
        }
        if let Some(c) = command {
            cfg.map.insert("command".into(), c);
        }
        if !cfg.map.contains_key("command") {
            return Err(CliError::input(
                "no command given; expected one of transform, verify, characterize, measure",
            ));
        }
        Ok(cfg)
    }

    pub fn load_file(&mut self, path: &str) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {path}: {e}")))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::input(format!("config {path} line {}: expected key=value", lineno + 1))
            })?;
            self.map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.map.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn get_or(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::input(format!("--{key}: `{s}` is not a number"))),
        }
    }

    pub fn get_f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.get_f64(key)?.unwrap_or(default))
    }

    pub fn get_usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.get(key) {
            None => Ok(default),
            // scientific notation like 1e5 is accepted for counts
            Some(s) => s
                .parse::<usize>()
                .or_else(|_| s.parse::<f64>().map(|v| v as usize))
                .map_err(|_| CliError::input(format!("--{key}: `{s}` is not a count"))),
        }
    }

    pub fn get_u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| CliError::input(format!("--{key}: `{s}` is not a seed"))),
        }
    }

    pub fn get_bool(&self, key: &str) -> bool {
        matches!(self.get(key), Some("true") | Some("1") | Some("yes"))
    }

    /// Sorted `key=value` lines, the on-disk form.
    pub fn resolved_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.map {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    fn lambda_list(&self) -> Result<Vec<f64>, CliError> {
        let raw = self.get_or("lambda", "2");
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::input(format!("--lambda: `{s}` is not a number")))
            })
            .collect()
    }

    fn space(&self) -> Result<SpaceModel, CliError> {
        let mut lambda = self.lambda_list()?;
        let d = self.get_usize_or("d", lambda.len())?;
        if lambda.len() == 1 && d > 1 {
            lambda = vec![lambda[0]; d];
        }
        if lambda.len() != d {
            return Err(CliError::input(format!(
                "--d {d} does not match {} eigenvalues",
                lambda.len()
            )));
        }
        Ok(SpaceModel::new(lambda)?)
    }

    fn growth(&self, key: &str, default: &str) -> Result<GrowthFunction, CliError> {
        Ok(parse_growth_spec(&self.get_or(key, default))?)
    }
}

/// `a:b:step` inclusive linear grid.
fn parse_linear_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!("grid `{text}`: expected start:stop:step")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::input(format!("grid `{text}`: bad start")))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::input(format!("grid `{text}`: bad stop")))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| CliError::input(format!("grid `{text}`: bad step")))?;
    if !(step > 0.0 && b >= a) {
        return Err(CliError::input(format!("grid `{text}`: needs stop >= start, step > 0")));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| a + step * i as f64).collect())
}

/// `rmin:rmax:n` geometric grid.
fn parse_geometric_grid(text: &str) -> Result<Grid, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!("grid `{text}`: expected rmin:rmax:n")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::input("bad rmin"))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::input("bad rmax"))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::input("bad point count"))?;
    Ok(Grid::geometric(a, b, n)?)
}

struct Report {
    rows: Vec<Value>,
    checks_passed: usize,
    checks_failed: usize,
}

impl Report {
    fn new() -> Report {
        Report {
            rows: Vec::new(),
            checks_passed: 0,
            checks_failed: 0,
        }
    }

    fn push(&mut self, kind: &str, mut value: Value) {
        if let Value::Object(map) = &mut value {
            map.insert("kind".into(), Value::String(kind.into()));
        }
        self.rows.push(value);
    }

    fn check(&mut self, ok: bool) {
        if ok {
            self.checks_passed += 1;
        } else {
            self.checks_failed += 1;
        }
    }

    fn push_condition(&mut self, report: &ConditionReport) -> Result<(), CliError> {
        let ok = report.holds();
        self.check(ok);
        self.push(
            "condition",
            serde_json::to_value(report).map_err(|e| CliError::input(e.to_string()))?,
        );
        Ok(())
    }

    fn jsonl(&self, command: &str) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let _ = writeln!(out, "{row}");
        }
        let summary = json!({
            "kind": "summary",
            "command": command,
            "rows": self.rows.len(),
            "checks_passed": self.checks_passed,
            "checks_failed": self.checks_failed,
        });
        let _ = writeln!(out, "{summary}");
        out
    }

    /// Flat CSV projection: one line per row, `kind` first, then the
    /// top-level scalar fields in key order.
    fn csv(&self) -> String {
        let mut out = String::from("kind,field,value\n");
        for row in &self.rows {
            if let Value::Object(map) = row {
                let kind = map
                    .get("kind")
                    .and_then(|v| v.as_str())
                    .unwrap_or("row")
                    .to_string();
                for (k, v) in map {
                    if k == "kind" {
                        continue;
                    }
                    match v {
                        Value::Number(n) => {
                            let _ = writeln!(out, "{kind},{k},{n}");
                        }
                        Value::String(s) => {
                            let _ = writeln!(out, "{kind},{k},{}", s.replace(',', ";"));
                        }
                        Value::Bool(b) => {
                            let _ = writeln!(out, "{kind},{k},{b}");
                        }
                        _ => {}
                    }
                }
            }
        }
        out
    }

    fn exit_code(&self) -> i32 {
        if self.checks_failed > 0 {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        }
    }
}

/// Entry point shared by the binary and the tests: parse, dispatch, write
/// outputs, return the process exit code.
pub fn run(args: &[String]) -> i32 {
    match run_inner(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code
        }
    }
}

fn run_inner(args: &[String]) -> Result<i32, CliError> {
    let cfg = RunConfig::from_args(args)?;
    let command = cfg.get("command").unwrap_or_default().to_string();
    let report = match command.as_str() {
        "transform" => cmd_transform(&cfg)?,
        "verify" => cmd_verify(&cfg)?,
        "characterize" => cmd_characterize(&cfg)?,
        "measure" => cmd_measure(&cfg)?,
        other => {
            return Err(CliError::input(format!(
                "unknown command `{other}`; expected transform, verify, characterize or measure"
            )))
        }
    };
    let format = cfg.get_or("format", "json");
    let body = match format.as_str() {
        "json" => report.jsonl(&command),
        "csv" => report.csv(),
        other => return Err(CliError::input(format!("unknown format `{other}`"))),
    };
    match cfg.get("out") {
        Some(prefix) => {
            let ext = if format == "csv" { "csv" } else { "jsonl" };
            let out_path = format!("{prefix}.{ext}");
            if let Some(parent) = Path::new(&out_path).parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)?;
                }
            }
            fs::write(&out_path, &body)?;
            fs::write(format!("{prefix}.config"), cfg.resolved_text())?;
        }
        None => print!("{body}"),
    }
    Ok(report.exit_code())
}

fn cmd_transform(cfg: &RunConfig) -> Result<Report, CliError> {
    let u = cfg.growth("fn", "exp")?;
    let tol = cfg.get_f64_or("tol", 1e-10)?;
    let mut report = Report::new();
    let mut any = false;
    if cfg.get_bool("legendre") {
        any = true;
        let ts = parse_linear_grid(&cfg.get_or("t", "0:10:0.5"))?;
        let mut values_log = Vec::with_capacity(ts.len());
        let mut argmins = Vec::with_capacity(ts.len());
        let mut evals = 0usize;
        for &t in &ts {
            let res = legendre(&u, t)?;
            values_log.push(res.log_value);
            argmins.push(res.argmin_r);
            evals += res.evals;
            let mut row = json!({
                "function": u.name(),
                "t": t,
                "log_value": res.log_value,
                "argmin_r": res.argmin_r,
            });
            if let Some(cf) = u.closed_form_legendre(t) {
                row["closed_form_log"] = json!(cf);
            }
            report.push("legendre", row);
        }
        report.push(
            "legendre_table",
            json!({
                "function": u.name(),
                "t_or_r_grid": ts,
                "values_log": values_log,
                "argmins": argmins,
                "diagnostics": { "objective_evaluations": evals },
            }),
        );
    }
    if cfg.get_bool("dual") {
        any = true;
        let rs = parse_linear_grid(&cfg.get_or("r", "0:10:0.5"))?;
        let mut values_log = Vec::with_capacity(rs.len());
        let mut argmaxes = Vec::with_capacity(rs.len());
        let mut evals = 0usize;
        for &r in &rs {
            let res = dual_legendre(&u, r)?;
            values_log.push(res.log_value);
            argmaxes.push(res.argmax_s);
            evals += res.evals;
            let mut row = json!({
                "function": u.name(),
                "r": r,
                "log_value": res.log_value,
                "argmax_s": res.argmax_s,
            });
            if let Some(cf) = u.closed_form_dual(r) {
                row["closed_form_log"] = json!(cf);
            }
            report.push("dual", row);
        }
        report.push(
            "dual_table",
            json!({
                "function": u.name(),
                "t_or_r_grid": rs,
                "values_log": values_log,
                "argmins": argmaxes,
                "diagnostics": { "objective_evaluations": evals },
            }),
        );
    }
    if cfg.get_bool("lfunction") {
        any = true;
        let rs = parse_linear_grid(&cfg.get_or("r", "0:10:0.5"))?;
        for r in rs {
            let res = l_function(&u, r, tol)?;
            report.push(
                "lfunction",
                json!({
                    "function": u.name(),
                    "r": r,
                    "log_value": res.log_value,
                    "truncation_degree": res.degree,
                }),
            );
        }
    }
    if cfg.get_bool("weights") {
        any = true;
        let n = cfg.get_usize_or("n", 20)?;
        let ws = weight_sequence(&u, n)?;
        for k in 0..=n {
            report.push(
                "weight",
                json!({
                    "function": u.name(),
                    "n": k,
                    "log_alpha": ws.log_alpha[k],
                    "alpha": ws.log_alpha[k].exp(),
                    "log_legendre": ws.log_legendre[k],
                }),
            );
        }
        report.push(
            "weight_diagnostic",
            json!({
                "function": u.name(),
                "root_decay_ok": ws.root_decay_diagnostic(),
            }),
        );
    }
    if !any {
        return Err(CliError::input(
            "transform: select at least one of --legendre, --dual, --lfunction, --weights",
        ));
    }
    Ok(report)
}

fn cmd_verify(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new();
    let mut any = false;
    if let Some(conds) = cfg.get("conditions") {
        any = true;
        let u = cfg.growth("fn", "exp")?;
        let grid = match cfg.get("grid") {
            Some(g) => parse_geometric_grid(g)?,
            None => Grid::default_growth(),
        };
        for c in conds.split(',') {
            let which = match c.trim() {
                "U0" => UCondition::U0,
                "U1" => UCondition::U1,
                "U2" => UCondition::U2,
                "U3" => UCondition::U3,
                other => return Err(CliError::input(format!("unknown condition `{other}`"))),
            };
            let rep = check_u_condition(&u, which, &grid, CONDITION_TOL)?;
            report.push_condition(&rep)?;
        }
    }
    if let Some(classes) = cfg.get("convexity") {
        any = true;
        let u = cfg.growth("fn", "exp")?;
        let grid = match cfg.get("grid") {
            Some(g) => parse_geometric_grid(g)?,
            None => Grid::default_growth(),
        };
        for c in classes.split(',') {
            let class = match c.trim() {
                "log-exp" => ConvexityClass::LogExp,
                other => match other.strip_prefix("log-x") {
                    Some(k) => ConvexityClass::LogXk(
                        k.parse()
                            .map_err(|_| CliError::input(format!("bad convexity class `{other}`")))?,
                    ),
                    None => return Err(CliError::input(format!("bad convexity class `{other}`"))),
                },
            };
            let rep = check_convexity_class(&u, class, &grid, CONDITION_TOL)?;
            report.push_condition(&rep)?;
        }
    }
    if let Some(which) = cfg.get("facts") {
        any = true;
        let u = cfg.growth("fn", "exp")?;
        let grid = match cfg.get("grid") {
            Some(g) => parse_geometric_grid(g)?,
            None => bound_check_grid(),
        };
        let a = cfg.get_f64_or("a", 2.0)?;
        let k = cfg.get_f64_or("k", 2.0)?;
        let selected: Vec<&str> = if which == "all" {
            vec!["l-upper", "l-lower", "l-sqrt", "dual-identity"]
        } else {
            which.split(',').map(|s| s.trim()).collect()
        };
        for f in selected {
            let rep = match f {
                "l-upper" => verify_l_upper_bound(&u, a, &grid)?,
                "l-lower" => verify_l_lower_bound(&u, k, &grid)?,
                "l-sqrt" => verify_l_sqrt_bound(&u, k, a, &grid)?,
                "dual-identity" => {
                    let ts: Vec<f64> = (0..40).map(|i| 0.1 * 1.16f64.powi(i)).collect();
                    verify_dual_legendre_identity(&u, &ts)?
                }
                other => {
                    return Err(CliError::input(format!(
                        "unknown bound `{other}`; expected l-upper, l-lower, l-sqrt or dual-identity"
                    )))
                }
            };
            report.push_condition(&rep)?;
        }
    }
    if let Some(other) = cfg.get("equivalent-to") {
        any = true;
        let u = cfg.growth("fn", "exp")?;
        let v = parse_growth_spec(other)?;
        let grid = match cfg.get("grid") {
            Some(g) => parse_geometric_grid(g)?,
            None => Grid::default_growth(),
        };
        let rep = check_equivalence(&u, &v, &grid)?;
        report.push_condition(&rep)?;
    }
    if cfg.get_bool("norm-equivalence") {
        any = true;
        let space = cfg.space()?;
        let u1 = cfg.growth("fn", "exp")?;
        let u2 = cfg.growth("fn2", &cfg.get_or("fn", "exp"))?;
        let p = cfg.get_f64_or("p", 1.0)?;
        let q = cfg.get_f64_or("q", 3.0)?;
        let samples = cfg.get_usize_or("samples", 100)?;
        let degrees = cfg.get_usize_or("degrees", 3)?;
        let seed = cfg.get_u64_or("seed", 0)?;
        let order = cfg.get_usize_or("gh-order", 32)?;
        let rep = norm_equivalence_experiment(
            &space, &u1, &u2, p, p, q, q, samples, degrees, degrees, seed, order,
        )?;
        report.check(rep.both_hold());
        report.push(
            "norm_equivalence",
            serde_json::to_value(&rep).map_err(|e| CliError::input(e.to_string()))?,
        );
    }
    if !any {
        return Err(CliError::input(
            "verify: select --conditions, --convexity, --facts, --equivalent-to or --norm-equivalence",
        ));
    }
    Ok(report)
}

/// Built-in polynomial fixture used by the characterize examples.
fn builtin_poly_fixture() -> &'static str {
    r#"{"terms": [
        {"idx_l": [], "idx_m": [], "re": 1.0, "im": 0.0},
        {"idx_l": [0], "idx_m": [], "re": 1.4142135623730951, "im": 0.0},
        {"idx_l": [0, 1], "idx_m": [1], "re": -0.75, "im": 0.5},
        {"idx_l": [1, 1], "idx_m": [0, 0], "re": 0.25, "im": -1.0}
    ]}"#
}

fn characterize_function(cfg: &RunConfig, space: &SpaceModel) -> Result<AnalyticFunction, CliError> {
    if let Some(path) = cfg.get("poly") {
        let text = if path == "builtin" {
            builtin_poly_fixture().to_string()
        } else {
            fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read polynomial {path}: {e}")))?
        };
        Ok(AnalyticFunction::from_polynomial_json(space.dim(), &text)?)
    } else {
        let caps = cfg.get_usize_or("degree", 3)?;
        let seed = cfg.get_u64_or("seed", 0)?;
        let phi = random_chaos_vector(space, caps, caps, seed);
        Ok(AnalyticFunction::from_s_transform(&phi))
    }
}

fn cmd_characterize(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new();
    let space = cfg.space()?;
    let caps = cfg.get_usize_or("degree", 3)?;
    let mut any = false;
    if cfg.get_bool("roundtrip") {
        any = true;
        let f = characterize_function(cfg, &space)?;
        let phi = reconstruct_chaos(&f, &space, caps, caps, RadiusPolicy::Fixed(1.0))?;
        // round trip: the S-transform of the reconstruction must agree
        // with F at fresh sample points
        let seed = cfg.get_u64_or("seed", 0)?;
        let cloud = SampleCloud::generate(space.dim(), 4, 1.0, seed.wrapping_add(1));
        let mut max_err = 0.0f64;
        for (xi, eta) in cloud.points.iter().take(24) {
            let a = f.eval(xi, eta);
            let b = s_transform(&phi, xi, eta);
            max_err = max_err.max((a - b).norm());
        }
        let ok = max_err <= cfg.get_f64_or("tol", 1e-8)?;
        report.check(ok);
        report.push(
            "roundtrip",
            json!({
                "max_abs_error": max_err,
                "degree_cap": caps,
                "kernels": phi.kernels().count(),
                "ok": ok,
            }),
        );
    }
    if cfg.get_bool("growth-cert") {
        any = true;
        let f = characterize_function(cfg, &space)?;
        let u1 = cfg.growth("fn", "exp")?;
        let u2 = cfg.growth("fn2", &cfg.get_or("fn", "exp"))?;
        let k1 = cfg.get_f64_or("k1", 1.0)?;
        let k2 = cfg.get_f64_or("k2", 1.0)?;
        let p1 = cfg.get_f64_or("p1", 1.0)?;
        let p2 = cfg.get_f64_or("p2", 1.0)?;
        let seed = cfg.get_u64_or("seed", 0)?;
        let cloud = SampleCloud::generate(space.dim(), 32, 8.0, seed);
        let claimed = cfg.get_f64("claimed-c")?;
        let cert = check_growth_condition(&f, &space, &u1, &u2, k1, k2, p1, p2, claimed, &cloud);
        report.check(cert.claim_holds());
        report.push(
            "growth_certificate",
            serde_json::to_value(&cert).map_err(|e| CliError::input(e.to_string()))?,
        );
    }
    if cfg.get_bool("kernel-bounds") {
        any = true;
        let f = characterize_function(cfg, &space)?;
        let u1 = cfg.growth("fn", "exp")?;
        let u2 = cfg.growth("fn2", &cfg.get_or("fn", "exp"))?;
        let k1 = cfg.get_f64_or("k1", 1.0)?;
        let k2 = cfg.get_f64_or("k2", 1.0)?;
        let p = cfg.get_f64_or("p", 1.0)?;
        let q = cfg.get_f64_or("q", 3.0)?;
        let seed = cfg.get_u64_or("seed", 0)?;
        let cloud = SampleCloud::generate(space.dim(), 32, 8.0, seed);
        let cert = check_growth_condition(&f, &space, &u1, &u2, k1, k2, p, p, None, &cloud);
        let spec = ContourSpec::new(1.0, 1.0, ContourSpec::default_nodes(caps))
            .map_err(CliError::from)?;
        let mut kernels = taylor_table(&f, caps, caps, spec)?;
        if let Some(inflate) = cfg.get("inflate") {
            let parts: Vec<&str> = inflate.split(',').collect();
            if parts.len() != 3 {
                return Err(CliError::input("--inflate expects l,m,factor"));
            }
            let l: usize = parts[0].parse().map_err(|_| CliError::input("bad l"))?;
            let m: usize = parts[1].parse().map_err(|_| CliError::input("bad m"))?;
            let factor: f64 = parts[2].parse().map_err(|_| CliError::input("bad factor"))?;
            if let Some(k) = kernels.get_mut(&(l, m)) {
                *k = k.scale(Complex64::new(factor, 0.0));
            }
        }
        let rep = crate::analytic::verify_kernel_bounds(
            &kernels,
            &space,
            cert.c_hat,
            k1,
            k2,
            p,
            p,
            q,
            q,
            &u1,
            &u2,
            BoundDirection::DualSide,
        )?;
        report.push_condition(&rep)?;
    }
    if !any {
        return Err(CliError::input(
            "characterize: select --roundtrip, --growth-cert or --kernel-bounds",
        ));
    }
    Ok(report)
}

fn cmd_measure(cfg: &RunConfig) -> Result<Report, CliError> {
    let mut report = Report::new();
    let space = cfg.space()?;
    let d = space.dim();
    let nu1 = ComponentMeasure::parse(&cfg.get_or("nu1", "gaussian:sigma=1"), d)?;
    let nu2 = ComponentMeasure::parse(&cfg.get_or("nu2", "gaussian:sigma=1"), d)?;
    let model = ProductMeasureModel::new(nu1, nu2, space.clone())?;
    let u1 = cfg.growth("fn", "exp")?;
    let u2 = cfg.growth("fn2", &cfg.get_or("fn", "exp"))?;
    let p = cfg.get_f64_or("p", 0.5)?;
    let n = cfg.get_usize_or("n", 100_000)?;
    let seed = cfg.get_u64_or("seed", 0)?;

    if cfg.get_bool("pseudo-positivity") {
        let cap = cfg.get_usize_or("cap", 4)?;
        let mut op = PseudoPositiveOperator::from_product_measure(&model, cap, n, seed)?;
        if let Some(idx) = cfg.get("negate-diagonal") {
            let gamma: Vec<usize> = if idx.is_empty() {
                Vec::new()
            } else {
                idx.split(',')
                    .map(|s| s.trim().parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::input("--negate-diagonal expects comma indices"))?
            };
            op.negate_diagonal(&gamma)?;
        }
        let rep = pseudo_positivity_probe(&op, cap / 2, cfg.get_usize_or("family", 10)?, seed)?;
        report.check(rep.verdict == PositivityVerdict::NoViolationFound);
        report.push(
            "pseudo_positivity",
            serde_json::to_value(&rep).map_err(|e| CliError::input(e.to_string()))?,
        );
    } else if cfg.get_bool("positivity") {
        let target = GeneralizedFunction::Measure {
            model: model.clone(),
            n_mc: n,
        };
        let rep = crate::measures::positivity_probe(
            &target,
            cfg.get_usize_or("cap", 2)?,
            cfg.get_usize_or("family", 8)?,
            seed,
        )?;
        report.check(rep.verdict == PositivityVerdict::NoViolationFound);
        report.push(
            "positivity",
            serde_json::to_value(&rep).map_err(|e| CliError::input(e.to_string()))?,
        );
    } else if cfg.get_bool("boundedness") {
        let rep = boundedness_probe(
            &model,
            &u1,
            &u2,
            p,
            p,
            cfg.get_usize_or("family", 20)?,
            cfg.get_usize_or("degree", 3)?,
            n,
            seed,
        )?;
        let ok = rep.integrability_verdict != ConvergenceVerdict::Converged
            || rep.within_integral_bound;
        report.check(ok);
        report.push(
            "boundedness",
            serde_json::to_value(&rep).map_err(|e| CliError::input(e.to_string()))?,
        );
    } else if cfg.get_bool("omega") {
        let q = cfg.get_f64_or("q", 1.0)?;
        let omega = omega_test_function(&u1, &u2, q, q, &space)?;
        let rep = check_omega_bound(
            &omega,
            &u1,
            &u2,
            cfg.get_usize_or("points", 1000)?,
            cfg.get_f64_or("scale", 3.0)?,
            seed,
        )?;
        report.push_condition(&rep)?;
    } else {
        // default: the integrability estimate
        let est = integrability_estimate(&model, &u1, &u2, p, p, n, seed)?;
        report.push(
            "integrability",
            json!({
                "integral": est.estimate,
                "ci": est.ci_half_width,
                "ci_level": est.ci_level,
                "verdict": est.verdict,
                "n": est.n_samples,
                "seed": est.seed,
                "running_means": est.running_means,
                "config": {
                    "nu1": cfg.get_or("nu1", "gaussian:sigma=1"),
                    "nu2": cfg.get_or("nu2", "gaussian:sigma=1"),
                    "fn": u1.name(),
                    "p": p,
                },
            }),
        );
        // An exact-oracle cross-check is reported when both factors admit one.
        let sigmas = |m: &ComponentMeasure| -> Option<Vec<f64>> {
            match &m.kind {
                crate::measures::MeasureKind::Gaussian { sigma } => Some(vec![*sigma; d]),
                crate::measures::MeasureKind::GaussianDiag { sigmas } => Some(sigmas.clone()),
                crate::measures::MeasureKind::PointMass { .. } => None,
                crate::measures::MeasureKind::StudentT { .. } => None,
            }
        };
        if u1.name() == "exp" && u2.name() == "exp" {
            if let (Some(s1), Some(s2)) = (sigmas(&model.nu1), sigmas(&model.nu2)) {
                let exact =
                    crate::measures::integrability_exact_gaussian(&s1, &s2, p, p, &space);
                let ok = if exact.is_finite() {
                    est.verdict == ConvergenceVerdict::Converged
                        && (est.estimate - exact).abs() <= est.ci_half_width.max(1e-12)
                } else {
                    est.verdict == ConvergenceVerdict::SuspectedDivergent
                };
                report.check(ok);
                report.push(
                    "integrability_oracle",
                    json!({ "exact": exact, "within_ci": ok }),
                );
            }
        }
    }
    Ok(report)
}
