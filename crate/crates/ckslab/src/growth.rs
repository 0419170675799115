//! Growth functions in overflow-safe log domain: the catalog of standard
//! examples, membership/convexity checkers on finite grids, and the
//! theta-correspondence.
//!
//! A growth function is a positive continuous `u` on `[0, inf)`. Everything
//! here stores and combines `log u` so that functions like `exp(exp(r) - 1)`
//! stay finite over the whole default grid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::second_divided_difference;

/// Evaluator for `r >= 0 -> log u(r)`.
pub type LogEvaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("unknown growth function `{0}`")]
    UnknownName(String),
    #[error("parameter `{name}` = {value} outside valid range {range}")]
    ParamOutOfRange {
        name: String,
        value: f64,
        range: String,
    },
    #[error("malformed growth spec `{0}`")]
    BadSpec(String),
    #[error("malformed grid: {0}")]
    BadGrid(String),
}

/// Membership conditions and convexity classes a function may claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GrowthProperty {
    U0,
    U1,
    U2,
    U3,
    LogExpConvex,
    LogX2Convex,
}

impl fmt::Display for GrowthProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GrowthProperty::U0 => "U0",
            GrowthProperty::U1 => "U1",
            GrowthProperty::U2 => "U2",
            GrowthProperty::U3 => "U3",
            GrowthProperty::LogExpConvex => "log-exp-convex",
            GrowthProperty::LogX2Convex => "log-x2-convex",
        };
        f.write_str(s)
    }
}

/// A positive function on `[0, inf)` held in log domain, with optional
/// closed-form transforms used as independent cross-checks.
#[derive(Clone)]
pub struct GrowthFunction {
    name: String,
    params: BTreeMap<String, f64>,
    log_u: LogEvaluator,
    claimed: BTreeSet<GrowthProperty>,
    closed_form_legendre: Option<LogEvaluator>,
    closed_form_dual: Option<LogEvaluator>,
}

impl fmt::Debug for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrowthFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("claimed", &self.claimed)
            .finish()
    }
}

impl GrowthFunction {
    pub fn from_log_fn(
        name: impl Into<String>,
        claimed: impl IntoIterator<Item = GrowthProperty>,
        log_u: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GrowthFunction {
            name: name.into(),
            params: BTreeMap::new(),
            log_u: Arc::new(log_u),
            claimed: claimed.into_iter().collect(),
            closed_form_legendre: None,
            closed_form_dual: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// `log u(r)`.
    pub fn log_u(&self, r: f64) -> f64 {
        (self.log_u)(r)
    }

    pub fn claims(&self, p: GrowthProperty) -> bool {
        self.claimed.contains(&p)
    }

    pub fn claimed_properties(&self) -> &BTreeSet<GrowthProperty> {
        &self.claimed
    }

    /// Closed-form `log l_u(t)` when the catalog knows one.
    pub fn closed_form_legendre(&self, t: f64) -> Option<f64> {
        self.closed_form_legendre.as_ref().map(|f| f(t))
    }

    /// Closed-form `log u*(r)` when the catalog knows one.
    pub fn closed_form_dual(&self, r: f64) -> Option<f64> {
        self.closed_form_dual.as_ref().map(|f| f(r))
    }

    /// The function `r -> u(c r)` for `c > 0`.
    pub fn scale_argument(&self, c: f64) -> GrowthFunction {
        assert!(c > 0.0, "argument scale must be positive");
        let inner = self.log_u.clone();
        GrowthFunction {
            name: format!("{}@scaled", self.name),
            params: self.params.clone(),
            log_u: Arc::new(move |r| inner(c * r)),
            claimed: BTreeSet::new(),
            closed_form_legendre: None,
            closed_form_dual: None,
        }
    }
}

/// `theta(s) = log u(s^2) / 2`, the correspondence used to translate the
/// U-conditions into conditions on a Young-type function.
pub fn theta_from_u(u: &GrowthFunction) -> impl Fn(f64) -> f64 + Send + Sync {
    let log_u = u.log_u.clone();
    move |s: f64| 0.5 * log_u(s * s)
}

/// Inverse of [`theta_from_u`]: `u(r) = exp(2 theta(sqrt(r)))`.
pub fn u_from_theta(theta: impl Fn(f64) -> f64 + Send + Sync + 'static) -> GrowthFunction {
    GrowthFunction::from_log_fn("from_theta", [], move |r: f64| 2.0 * theta(r.sqrt()))
}

/// Look up one of the catalog growth functions.
///
/// Known names: `exp`, `kondratiev` (param `beta` in `[0, 1)`), `bell`,
/// `bell_w`, `ouerdiane` (param `k` in `[1, 2]`).
pub fn catalog_lookup(
    name: &str,
    params: &BTreeMap<String, f64>,
) -> Result<GrowthFunction, GrowthError> {
    use GrowthProperty::*;
    match name {
        "exp" => {
            let mut g = GrowthFunction::from_log_fn(
                "exp",
                [U0, U1, U2, U3, LogExpConvex, LogX2Convex],
                |r: f64| r,
            );
            g.closed_form_legendre = Some(Arc::new(|t: f64| {
                if t == 0.0 {
                    0.0
                } else {
                    t - t * t.ln()
                }
            }));
            g.closed_form_dual = Some(Arc::new(|r: f64| r));
            Ok(g)
        }
        "kondratiev" => {
            let beta = *params.get("beta").unwrap_or(&0.0);
            if !(0.0..1.0).contains(&beta) {
                return Err(GrowthError::ParamOutOfRange {
                    name: "beta".into(),
                    value: beta,
                    range: "[0, 1)".into(),
                });
            }
            let mut g = GrowthFunction::from_log_fn(
                "kondratiev",
                [U0, U1, U2, U3, LogExpConvex, LogX2Convex],
                move |r: f64| (1.0 + beta) * r.powf(1.0 / (1.0 + beta)),
            );
            g.params.insert("beta".into(), beta);
            g.closed_form_legendre = Some(Arc::new(move |t: f64| {
                if t == 0.0 {
                    0.0
                } else {
                    (1.0 + beta) * (t - t * t.ln())
                }
            }));
            g.closed_form_dual =
                Some(Arc::new(move |r: f64| (1.0 - beta) * r.powf(1.0 / (1.0 - beta))));
            Ok(g)
        }
        "bell" => Ok(GrowthFunction::from_log_fn(
            "bell",
            [U0, U1, U3, LogExpConvex, LogX2Convex],
            |r: f64| r.exp_m1(),
        )),
        "bell_w" => {
            // exp(2 sqrt(r log sqrt(r))) is real only for r >= 1; the
            // function is extended by 1 on [0, 1), which keeps it
            // continuous (the exponent vanishes at r = 1).
            Ok(GrowthFunction::from_log_fn("bell_w", [U0, U1, U2], |r: f64| {
                if r <= 1.0 {
                    0.0
                } else {
                    (2.0 * r * r.ln()).sqrt()
                }
            }))
        }
        "ouerdiane" => {
            let k = *params.get("k").unwrap_or(&1.0);
            if !(1.0..=2.0).contains(&k) {
                return Err(GrowthError::ParamOutOfRange {
                    name: "k".into(),
                    value: k,
                    range: "[1, 2]".into(),
                });
            }
            let mut g = GrowthFunction::from_log_fn(
                "ouerdiane",
                [U0, U1, U2, U3, LogExpConvex, LogX2Convex],
                move |r: f64| r.powf(0.5 * k) / k,
            );
            g.params.insert("k".into(), k);
            Ok(g)
        }
        other => Err(GrowthError::UnknownName(other.into())),
    }
}

/// Parse the growth-function mini-language: `exp`, `kondratiev:beta=0.5`,
/// `bell`, `bell_w`, `ouerdiane:k=1.5`. Case-sensitive; parameters are
/// `name=decimal`, comma-separated.
pub fn parse_growth_spec(spec: &str) -> Result<GrowthFunction, GrowthError> {
    let mut parts = spec.splitn(2, ':');
    let name = parts.next().unwrap_or_default();
    let mut params = BTreeMap::new();
    if let Some(rest) = parts.next() {
        for kv in rest.split(',') {
            let mut it = kv.splitn(2, '=');
            let key = it.next().unwrap_or_default();
            let val = it
                .next()
                .ok_or_else(|| GrowthError::BadSpec(spec.into()))?
                .parse::<f64>()
                .map_err(|_| GrowthError::BadSpec(spec.into()))?;
            params.insert(key.to_string(), val);
        }
    }
    catalog_lookup(name, &params)
}

/// Evaluation grid over `[r_min, r_max]`.
#[derive(Debug, Clone, Serialize)]
pub struct Grid {
    pub points: Vec<f64>,
    pub spacing: GridSpacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridSpacing {
    Geometric,
    Linear,
}

impl Grid {
    pub fn geometric(r_min: f64, r_max: f64, n: usize) -> Result<Grid, GrowthError> {
        if !(r_min > 0.0 && r_max > r_min && n >= 2) {
            return Err(GrowthError::BadGrid(format!(
                "geometric grid needs 0 < r_min < r_max and n >= 2, got [{r_min}, {r_max}] x {n}"
            )));
        }
        let lo = r_min.ln();
        let h = (r_max.ln() - lo) / (n as f64 - 1.0);
        let points = (0..n).map(|i| (lo + h * i as f64).exp()).collect();
        Ok(Grid {
            points,
            spacing: GridSpacing::Geometric,
        })
    }

    pub fn linear(r_min: f64, r_max: f64, n: usize) -> Result<Grid, GrowthError> {
        if !(r_max > r_min && n >= 2) {
            return Err(GrowthError::BadGrid(format!(
                "linear grid needs r_min < r_max and n >= 2, got [{r_min}, {r_max}] x {n}"
            )));
        }
        let h = (r_max - r_min) / (n as f64 - 1.0);
        Ok(Grid {
            points: (0..n).map(|i| r_min + h * i as f64).collect(),
            spacing: GridSpacing::Linear,
        })
    }

    /// Geometric grid over `[1e-6, 1e6]` with 400 points, covering both the
    /// `r -> 0` and `r -> inf` regimes of all catalog functions.
    pub fn default_growth() -> Grid {
        Grid::geometric(1e-6, 1e6, 400).expect("default grid is valid")
    }

    pub fn r_min(&self) -> f64 {
        self.points[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Outcome of a grid-level condition check. Limit conditions cannot be
/// certified from finitely many samples, so `HoldsOnGrid` is the strongest
/// available verdict and `Inconclusive` is an honest answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    HoldsOnGrid,
    Fails,
    Inconclusive,
}

/// A point at which a checked inequality is violated beyond tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Witness {
    pub r: f64,
    pub margin: f64,
}

/// Report produced by every grid-level checker. `data` carries measured
/// quantities specific to the condition (estimated limits, constants,
/// thresholds) keyed by name.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub condition: String,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub grid_r_min: f64,
    pub grid_r_max: f64,
    pub grid_len: usize,
    pub grid_spacing: GridSpacing,
    /// Minimum slack of the inequality over the grid (negative: violated).
    pub margin: f64,
    pub data: BTreeMap<String, f64>,
    pub detail: String,
}

impl ConditionReport {
    fn new(condition: impl Into<String>, grid: &Grid) -> Self {
        ConditionReport {
            condition: condition.into(),
            verdict: Verdict::Inconclusive,
            witnesses: Vec::new(),
            grid_r_min: grid.r_min(),
            grid_r_max: grid.r_max(),
            grid_len: grid.len(),
            grid_spacing: grid.spacing,
            margin: f64::INFINITY,
            data: BTreeMap::new(),
            detail: String::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }
}

/// Default absolute tolerance for condition checks, scaled by local
/// function magnitude where convexity is involved.
pub const CONDITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UCondition {
    U0,
    U1,
    U2,
    U3,
}

impl fmt::Display for UCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            UCondition::U0 => "U0",
            UCondition::U1 => "U1",
            UCondition::U2 => "U2",
            UCondition::U3 => "U3",
        };
        f.write_str(s)
    }
}

/// Check one of the four U-conditions on a grid.
///
/// * U0: the grid minimum of `log u` lies in `[-tol, tol]`.
/// * U1: samples nondecreasing and `|log u(0)| <= tol`.
/// * U2: the tail of `log u(r) / r` is bounded; the last-point value is
///   reported as the estimated limit. A still-growing tail is inconclusive.
/// * U3: midpoint convexity of `t -> log u(t^2)` via second divided
///   differences.
pub fn check_u_condition(
    u: &GrowthFunction,
    which: UCondition,
    grid: &Grid,
    tol: f64,
) -> Result<ConditionReport, GrowthError> {
    if grid.is_empty() {
        return Err(GrowthError::BadGrid("empty grid".into()));
    }
    let mut report = ConditionReport::new(format!("{which}"), grid);
    match which {
        UCondition::U0 => {
            let mut min_v = f64::INFINITY;
            let mut min_r = grid.r_min();
            // The infimum is over r >= 0, so r = 0 participates.
            for &r in std::iter::once(&0.0).chain(grid.points.iter()) {
                let v = u.log_u(r);
                if v < min_v {
                    min_v = v;
                    min_r = r;
                }
            }
            report.data.insert("grid_min_log_u".into(), min_v);
            report.data.insert("argmin_r".into(), min_r);
            report.margin = min_v;
            if min_v < -tol {
                report.verdict = Verdict::Fails;
                report.witnesses.push(Witness { r: min_r, margin: min_v });
                report.detail = format!("log u dips to {min_v:.3e} below 0 at r = {min_r:.6e}");
            } else if min_v <= tol {
                report.verdict = Verdict::HoldsOnGrid;
                report.detail = format!("grid inf of log u is {min_v:.3e} at r = {min_r:.6e}");
            } else {
                report.verdict = Verdict::Inconclusive;
                report.detail = format!(
                    "grid inf of log u is {min_v:.3e} > tol; infimum 1 not reached on this grid"
                );
            }
        }
        UCondition::U1 => {
            let at0 = u.log_u(0.0);
            report.data.insert("log_u_at_0".into(), at0);
            let mut worst = f64::INFINITY;
            let mut prev = at0;
            let mut bad: Option<Witness> = None;
            for &r in &grid.points {
                let v = u.log_u(r);
                let slack = v - prev;
                if slack < worst {
                    worst = slack;
                }
                if slack < -tol && bad.is_none() {
                    bad = Some(Witness { r, margin: slack });
                }
                prev = v;
            }
            report.margin = worst.min(tol - at0.abs());
            if at0.abs() > tol {
                report.verdict = Verdict::Fails;
                report.witnesses.push(Witness { r: 0.0, margin: at0 });
                report.detail = format!("u(0) differs from 1: log u(0) = {at0:.3e}");
            } else if let Some(w) = bad {
                report.verdict = Verdict::Fails;
                report.detail = format!("decreasing step of {:.3e} at r = {:.6e}", w.margin, w.r);
                report.witnesses.push(w);
            } else {
                report.verdict = Verdict::HoldsOnGrid;
                report.detail = "nondecreasing on grid with u(0) = 1".into();
            }
        }
        UCondition::U2 => {
            let n = grid.len();
            let tail_start = n - (n / 4).max(2).min(n - 1);
            let ratios: Vec<(f64, f64)> = grid.points[tail_start..]
                .iter()
                .map(|&r| (r, u.log_u(r) / r))
                .collect();
            if ratios.iter().any(|p| !p.1.is_finite()) {
                report.verdict = Verdict::Inconclusive;
                report.detail =
                    "log u(r)/r exceeds f64 range on the tail; limit not representable".into();
                report.margin = f64::NEG_INFINITY;
                return Ok(report);
            }
            let last = ratios.last().unwrap().1;
            let max_ratio = ratios.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            let min_ratio = ratios.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            report.data.insert("estimated_limit".into(), last);
            report.data.insert("tail_max".into(), max_ratio);
            report.margin = max_ratio - last;
            let growing_tail = ratios.windows(2).all(|w| w[1].1 > w[0].1 + tol);
            let plateau = max_ratio - min_ratio <= 0.05 * max_ratio.abs().max(1.0);
            if plateau || !growing_tail {
                report.verdict = Verdict::HoldsOnGrid;
                report.detail = format!("tail ratio log u(r)/r settles near {last:.6e}");
            } else {
                report.verdict = Verdict::Inconclusive;
                report.detail = format!(
                    "log u(r)/r still growing at r_max ({min_ratio:.3e} -> {max_ratio:.3e}); \
                     limit cannot be bounded from this grid"
                );
            }
        }
        UCondition::U3 => {
            let f = |t: f64| u.log_u(t * t);
            let ts: Vec<f64> = grid.points.iter().map(|r| r.sqrt()).collect();
            fill_convexity_report(&mut report, &ts, &grid.points, &f, tol);
            report.condition = "U3".into();
        }
    }
    Ok(report)
}

/// Which convexity class to check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexityClass {
    /// `x -> log u(e^x)` convex on R.
    LogExp,
    /// `x -> log u(x^k)` convex on `[0, inf)`, `k > 0`.
    LogXk(f64),
}

/// Discrete convexity of the indicated substitution over the grid: second
/// divided differences must be `>= -tol * local scale`. For functions
/// convex only beyond some radius, `data["r0"]` reports the smallest grid
/// `r` above which no violation occurs.
pub fn check_convexity_class(
    u: &GrowthFunction,
    class: ConvexityClass,
    grid: &Grid,
    tol: f64,
) -> Result<ConditionReport, GrowthError> {
    if grid.len() < 3 {
        return Err(GrowthError::BadGrid("convexity needs at least 3 points".into()));
    }
    if let ConvexityClass::LogXk(k) = class {
        if k <= 0.0 {
            return Err(GrowthError::ParamOutOfRange {
                name: "k".into(),
                value: k,
                range: "(0, inf)".into(),
            });
        }
    }
    let mut report;
    match class {
        ConvexityClass::LogExp => {
            report = ConditionReport::new("log-exp-convex", grid);
            let f = |x: f64| u.log_u(x.exp());
            let xs: Vec<f64> = grid.points.iter().map(|r| r.ln()).collect();
            fill_convexity_report(&mut report, &xs, &grid.points, &f, tol);
            report.condition = "log-exp-convex".into();
        }
        ConvexityClass::LogXk(k) => {
            report = ConditionReport::new(format!("log-x{k}-convex"), grid);
            let f = |x: f64| u.log_u(x.powf(k));
            let xs: Vec<f64> = grid.points.iter().map(|r| r.powf(1.0 / k)).collect();
            fill_convexity_report(&mut report, &xs, &grid.points, &f, tol);
        }
    }
    Ok(report)
}

/// Shared body for the discrete convexity checks. Abscissas `xs` must be
/// strictly increasing and map 1:1 onto the grid points `rs`. Triples
/// whose values exceed f64 range are skipped and counted in the detail.
fn fill_convexity_report(
    report: &mut ConditionReport,
    xs: &[f64],
    rs: &[f64],
    f: &dyn Fn(f64) -> f64,
    tol: f64,
) {
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut worst = f64::INFINITY;
    let mut violations: Vec<(usize, f64)> = Vec::new();
    let mut skipped = 0usize;
    for i in 0..xs.len() - 2 {
        if !(vals[i].is_finite() && vals[i + 1].is_finite() && vals[i + 2].is_finite()) {
            skipped += 1;
            continue;
        }
        let d2 = second_divided_difference(
            xs[i], vals[i], xs[i + 1], vals[i + 1], xs[i + 2], vals[i + 2],
        );
        let scale = vals[i].abs().max(vals[i + 2].abs()).max(1.0);
        let slack = d2 + tol * scale;
        if slack < worst {
            worst = slack;
        }
        if d2 < -tol * scale {
            violations.push((i + 1, d2));
        }
    }
    let skip_note = if skipped > 0 {
        format!(" ({skipped} triples beyond f64 range skipped)")
    } else {
        String::new()
    };
    report.margin = worst;
    if violations.is_empty() {
        report.verdict = Verdict::HoldsOnGrid;
        report.detail = format!("second divided differences nonnegative over grid{skip_note}");
    } else {
        report.verdict = Verdict::Fails;
        for &(i, d2) in violations.iter().take(8) {
            report.witnesses.push(Witness {
                r: rs[i],
                margin: d2,
            });
        }
        let last_bad = violations.last().unwrap().0;
        if last_bad + 1 < xs.len() - 1 {
            let r0 = rs[last_bad + 1];
            report.data.insert("r0".into(), r0);
            report.detail = format!(
                "{} violations, all below r0 = {r0:.6e}; convex from there on{skip_note}",
                violations.len()
            );
        } else {
            report.detail =
                format!("{} violations up to the end of the grid{skip_note}", violations.len());
        }
    }
}

/// Grid search for the equivalence constants of the argument-scaling form
/// `a1 u(r) <= v(b1 r)` and `v(r) <= a2 u(b2 r)` for `r >= r0`.
///
/// A candidate scale `b` is accepted when the defect `log v(b r) - log u(r)`
/// is bounded below on the tail of the grid rather than plunging; the
/// sharpest admissible constants found are reported in `data`
/// (`a1`, `b1`, `a2`, `b2`, `r0`).
pub fn check_equivalence(
    u: &GrowthFunction,
    v: &GrowthFunction,
    grid: &Grid,
) -> Result<ConditionReport, GrowthError> {
    if grid.len() < 8 {
        return Err(GrowthError::BadGrid("equivalence search needs >= 8 points".into()));
    }
    let mut report = ConditionReport::new(
        format!("equivalence({}, {})", u.name(), v.name()),
        grid,
    );
    let dir1 = find_scaling(u, v, grid); // a1 u(r) <= v(b1 r)
    let dir2 = find_scaling(v, u, grid); // v(r) <= a2 u(b2 r)  <=>  (1/a2) v(r) <= u(b2 r)
    match (dir1, dir2) {
        (Some((log_a1, b1, r0a)), Some((log_inv_a2, b2, r0b))) => {
            let r0 = r0a.max(r0b);
            report.verdict = Verdict::HoldsOnGrid;
            report.data.insert("a1".into(), log_a1.exp());
            report.data.insert("b1".into(), b1);
            report.data.insert("a2".into(), (-log_inv_a2).exp());
            report.data.insert("b2".into(), b2);
            report.data.insert("r0".into(), r0);
            report.margin = 0.0;
            report.detail = format!(
                "a1 = {:.4e}, b1 = {b1}, a2 = {:.4e}, b2 = {b2}, r0 = {r0:.4e}",
                log_a1.exp(),
                (-log_inv_a2).exp()
            );
        }
        _ => {
            report.verdict = Verdict::Fails;
            let r = grid.r_max();
            let defect = v.log_u(r) - u.log_u(r);
            report.witnesses.push(Witness { r, margin: defect });
            report.margin = -defect.abs();
            report.detail = if dir1.is_none() {
                "no scale b1 <= 8 keeps v(b1 r)/u(r) bounded below on the tail".into()
            } else {
                "no scale b2 <= 8 keeps u(b2 r)/v(r) bounded below on the tail".into()
            };
        }
    }
    Ok(report)
}

/// Largest lower bound for `log g(b r) - log f(r)` on the tail of the grid
/// over candidate scales, or None when every candidate plunges to -inf.
/// Returns `(log_a, b, r0)` with `a f(r) <= g(b r)` for grid `r >= r0`.
fn find_scaling(f: &GrowthFunction, g: &GrowthFunction, grid: &Grid) -> Option<(f64, f64, f64)> {
    const SCALES: [f64; 7] = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0];
    let n = grid.len();
    let tail = n - n / 5; // last 20% of the grid diagnoses divergence
    let r0_index = n / 4; // constants are fitted from the 25% quantile up
    let r0 = grid.points[r0_index];
    for &b in &SCALES {
        let defect: Vec<f64> = grid.points[r0_index..]
            .iter()
            .map(|&r| g.log_u(b * r) - f.log_u(r))
            .collect();
        let tail_defect = &defect[tail.saturating_sub(r0_index)..];
        let plunging = tail_defect.len() >= 3
            && tail_defect.windows(2).all(|w| w[1] < w[0])
            && tail_defect.last().unwrap() + 3.0 < tail_defect[0];
        if plunging {
            continue;
        }
        let inf = defect.iter().fold(f64::INFINITY, |a, &x| a.min(x));
        if inf.is_finite() {
            return Some((inf, b, r0));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    fn cat(name: &str) -> GrowthFunction {
        catalog_lookup(name, &BTreeMap::new()).unwrap()
    }

    fn kondratiev(beta: f64) -> GrowthFunction {
        let mut p = BTreeMap::new();
        p.insert("beta".to_string(), beta);
        catalog_lookup("kondratiev", &p).unwrap()
    }

    #[test]
    fn catalog_values() {
        assert_abs_diff_eq!(cat("exp").log_u(1.0), 1.0);
        // (1 + 1/2) * 8^(2/3) = 1.5 * 4 = 6
        assert_abs_diff_eq!(kondratiev(0.5).log_u(8.0), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cat("bell").log_u(1.0), E - 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(cat("bell_w").log_u(0.5), 0.0);
        assert_abs_diff_eq!(cat("bell_w").log_u(E * E), (2.0 * E * E * 2.0).sqrt(), epsilon = 1e-12);
        let mut p = BTreeMap::new();
        p.insert("k".to_string(), 1.5);
        let o = catalog_lookup("ouerdiane", &p).unwrap();
        assert_abs_diff_eq!(o.log_u(4.0), 4.0f64.powf(0.75) / 1.5, epsilon = 1e-12);
    }

    #[test]
    fn catalog_rejects_bad_input() {
        assert!(matches!(
            catalog_lookup("nope", &BTreeMap::new()),
            Err(GrowthError::UnknownName(_))
        ));
        let mut p = BTreeMap::new();
        p.insert("beta".to_string(), 1.0);
        assert!(matches!(
            catalog_lookup("kondratiev", &p),
            Err(GrowthError::ParamOutOfRange { .. })
        ));
        let mut p = BTreeMap::new();
        p.insert("k".to_string(), 2.5);
        assert!(catalog_lookup("ouerdiane", &p).is_err());
    }

    #[test]
    fn spec_language_round_trip() {
        let g = parse_growth_spec("kondratiev:beta=0.5").unwrap();
        assert_eq!(g.params()["beta"], 0.5);
        assert!(parse_growth_spec("kondratiev:beta").is_err());
        assert!(parse_growth_spec("Exp").is_err()); // case-sensitive
        assert!(parse_growth_spec("ouerdiane:k=1.5").is_ok());
    }

    #[test]
    fn no_overflow_over_default_grid() {
        let grid = Grid::default_growth();
        for name in ["exp", "bell_w"] {
            let g = cat(name);
            for &r in &grid.points {
                assert!(g.log_u(r).is_finite(), "{name} at {r}");
            }
            assert!(g.log_u(0.0).is_finite());
        }
        for beta in [0.0, 0.25, 0.5, 0.75] {
            let g = kondratiev(beta);
            for &r in &grid.points {
                assert!(g.log_u(r).is_finite());
            }
        }
        // bell's log itself is exp(r) - 1, which leaves f64 range past
        // r ~ 709; it must stay finite below that and never go NaN.
        let bell = cat("bell");
        for &r in &grid.points {
            let v = bell.log_u(r);
            assert!(!v.is_nan());
            if r <= 700.0 {
                assert!(v.is_finite(), "bell at {r}");
            }
        }
    }

    #[test]
    fn u_conditions_for_exp() {
        let grid = Grid::default_growth();
        let g = cat("exp");
        let u0 = check_u_condition(&g, UCondition::U0, &grid, CONDITION_TOL).unwrap();
        assert!(u0.holds());
        assert_abs_diff_eq!(u0.data["grid_min_log_u"], 0.0);
        let u1 = check_u_condition(&g, UCondition::U1, &grid, CONDITION_TOL).unwrap();
        assert!(u1.holds());
        let u2 = check_u_condition(&g, UCondition::U2, &grid, CONDITION_TOL).unwrap();
        assert!(u2.holds());
        assert_abs_diff_eq!(u2.data["estimated_limit"], 1.0, epsilon = 1e-12);
        let u3 = check_u_condition(&g, UCondition::U3, &grid, CONDITION_TOL).unwrap();
        assert!(u3.holds());
    }

    #[test]
    fn u3_kondratiev_matches_direct_second_difference_oracle() {
        // Oracle: midpoint convexity of t -> 1.5 * t^(4/3) checked directly.
        let beta = 0.5;
        let psi = |t: f64| (1.0 + beta) * t.powf(4.0 / 3.0);
        let grid = Grid::default_growth();
        let ts: Vec<f64> = grid.points.iter().map(|r| r.sqrt()).collect();
        for w in ts.windows(3) {
            let d2 = second_divided_difference(w[0], psi(w[0]), w[1], psi(w[1]), w[2], psi(w[2]));
            assert!(d2 >= -1e-9 * psi(w[2]).max(1.0));
        }
        let rep =
            check_u_condition(&kondratiev(beta), UCondition::U3, &grid, CONDITION_TOL).unwrap();
        assert!(rep.holds());
    }

    #[test]
    fn claimed_conditions_pass_for_kondratiev_family() {
        let grid = Grid::default_growth();
        for beta in [0.0, 0.25, 0.5, 0.75] {
            let g = kondratiev(beta);
            for cond in [UCondition::U0, UCondition::U2, UCondition::U3] {
                let rep = check_u_condition(&g, cond, &grid, CONDITION_TOL).unwrap();
                assert!(rep.holds(), "beta={beta} {cond}: {}", rep.detail);
            }
        }
    }

    #[test]
    fn u2_inconclusive_for_bell() {
        // log u(r)/r = (e^r - 1)/r grows without bound; a finite grid can
        // only answer "inconclusive".
        let grid = Grid::geometric(1e-3, 50.0, 200).unwrap();
        let rep = check_u_condition(&cat("bell"), UCondition::U2, &grid, CONDITION_TOL).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn convexity_classes_for_exp() {
        let grid = Grid::default_growth();
        let g = cat("exp");
        assert!(check_convexity_class(&g, ConvexityClass::LogExp, &grid, CONDITION_TOL)
            .unwrap()
            .holds());
        assert!(check_convexity_class(&g, ConvexityClass::LogXk(2.0), &grid, CONDITION_TOL)
            .unwrap()
            .holds());
    }

    #[test]
    fn bell_w_convex_past_threshold() {
        // log w(t^2) = 2 t sqrt(log t) has an inflection at t = sqrt(e), so
        // violations must be confined to small r with a reported threshold.
        let grid = Grid::geometric(1e-2, 1e4, 400).unwrap();
        let rep = check_convexity_class(&cat("bell_w"), ConvexityClass::LogXk(2.0), &grid, 1e-9)
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        let r0 = rep.data["r0"];
        assert!(r0 > 1.0 && r0 < 50.0, "r0 = {r0}");
        let tail = Grid::geometric(r0 * 1.01, 1e4, 200).unwrap();
        let rep_tail =
            check_convexity_class(&cat("bell_w"), ConvexityClass::LogXk(2.0), &tail, 1e-9).unwrap();
        assert!(rep_tail.holds());
    }

    #[test]
    fn theta_round_trip_is_identity() {
        let grid = Grid::default_growth();
        for g in [cat("exp"), kondratiev(0.5), cat("bell")] {
            let theta = theta_from_u(&g);
            let back = u_from_theta(theta);
            for &r in &grid.points {
                let a = g.log_u(r);
                if !a.is_finite() {
                    continue;
                }
                let b = back.log_u(r);
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{} at {}", g.name(), r);
            }
        }
    }

    #[test]
    fn theta_of_exp_is_half_square() {
        let theta = theta_from_u(&cat("exp"));
        assert_abs_diff_eq!(theta(2.0), 2.0, epsilon = 1e-12); // s^2/2 at s=2
        let back = u_from_theta(|s: f64| 0.5 * s * s);
        assert_abs_diff_eq!(back.log_u(3.0), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn kondratiev_theta_closed_form() {
        let beta = 0.5;
        let theta = theta_from_u(&kondratiev(beta));
        for s in [0.3f64, 1.0, 4.0] {
            let expect = 0.5 * (1.0 + beta) * s.powf(2.0 / (1.0 + beta));
            assert_abs_diff_eq!(theta(s), expect, epsilon = 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn equivalence_identity_and_beta_zero() {
        let grid = Grid::default_growth();
        let rep = check_equivalence(&cat("exp"), &cat("exp"), &grid).unwrap();
        assert!(rep.holds());
        assert_abs_diff_eq!(rep.data["a1"], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.data["b1"], 1.0);
        let rep2 = check_equivalence(&cat("exp"), &kondratiev(0.0), &grid).unwrap();
        assert!(rep2.holds());
        assert_abs_diff_eq!(rep2.data["a1"], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn exp_not_equivalent_to_bell() {
        let grid = Grid::geometric(1e-3, 200.0, 300).unwrap();
        let rep = check_equivalence(&cat("exp"), &cat("bell"), &grid).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert!(!rep.witnesses.is_empty());
    }
}
