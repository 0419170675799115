//! Numerical Legendre transform `l_u(t) = inf_{r>0} u(r)/r^t`, the dual
//! transform `u*(r) = sup_{s>=0} exp(2 sqrt(rs))/u(s)`, the L-function
//! power series, weight sequences, and grid verification of the growth
//! inequalities that tie them together.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::growth::{ConditionReport, Grid, GrowthFunction, GrowthProperty, Verdict, Witness};
use crate::numerics::{log_factorial, logsumexp, minimize_expanding};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("transform diverges: {context}")]
    Divergent { context: String },
    #[error("series truncation failed after {degree} terms (partial log value {partial_log:.6e})")]
    TruncationFailure { partial_log: f64, degree: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Growth(#[from] crate::growth::GrowthError),
}

/// Golden-section tolerance in the log-radius variable.
const X_TOL: f64 = 1e-12;
/// Initial search bracket in `x = log r`.
const BRACKET: (f64, f64) = (-40.0, 40.0);
/// Maximum number of series terms for the L-function.
pub const L_FUNCTION_MAX_TERMS: usize = 400;

/// One Legendre evaluation: `log l_u(t)` with the minimizing radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LegendreResult {
    pub log_value: f64,
    pub argmin_r: f64,
    pub evals: usize,
    pub expansions: usize,
}

/// One dual-transform evaluation: `log u*(r)` with the maximizing point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DualResult {
    pub log_value: f64,
    pub argmax_s: f64,
    pub evals: usize,
    pub expansions: usize,
}

/// `log l_u(t) = inf_{r>0} (log u(r) - t log r)`, computed as a 1-D
/// minimization in `x = log r` over an adaptively expanded bracket.
///
/// For `t = 0` the infimum of `log u` itself is returned (with `r = 0`
/// admitted as a candidate by continuity), which is 0 under U0.
pub fn legendre(u: &GrowthFunction, t: f64) -> Result<LegendreResult, TransformError> {
    if t.is_nan() || t < 0.0 {
        return Err(TransformError::InvalidArgument(format!("t = {t} must be >= 0")));
    }
    let unimodal = u.claims(GrowthProperty::LogExpConvex);
    if t == 0.0 {
        let f = |x: f64| u.log_u(x.exp());
        let at_zero = u.log_u(0.0);
        let res = minimize_expanding(&f, BRACKET.0, BRACKET.1, X_TOL, unimodal).map_err(|e| {
            TransformError::Divergent {
                context: format!(
                    "inf of log {} escapes toward {}",
                    u.name(),
                    if e.toward_positive { "r = inf" } else { "r = 0" }
                ),
            }
        });
        return match res {
            Ok(m) if m.value <= at_zero => Ok(LegendreResult {
                log_value: m.value,
                argmin_r: m.x.exp(),
                evals: m.evals,
                expansions: m.expansions,
            }),
            Ok(m) => Ok(LegendreResult {
                log_value: at_zero,
                argmin_r: 0.0,
                evals: m.evals + 1,
                expansions: m.expansions,
            }),
            // When the objective keeps decreasing toward r = 0 the infimum
            // is the continuous limit u(0).
            Err(TransformError::Divergent { .. }) if at_zero.is_finite() => Ok(LegendreResult {
                log_value: at_zero,
                argmin_r: 0.0,
                evals: 0,
                expansions: 0,
            }),
            Err(e) => Err(e),
        };
    }
    let f = move |x: f64| u.log_u(x.exp()) - t * x;
    let m = minimize_expanding(&f, BRACKET.0, BRACKET.1, X_TOL, unimodal).map_err(|e| {
        TransformError::Divergent {
            context: format!(
                "l_{}({t}) unbounded below toward {}",
                u.name(),
                if e.toward_positive { "r = inf" } else { "r = 0" }
            ),
        }
    })?;
    Ok(LegendreResult {
        log_value: m.value,
        argmin_r: m.x.exp(),
        evals: m.evals,
        expansions: m.expansions,
    })
}

/// Convenience accessor for `log l_u(t)`.
pub fn legendre_log(u: &GrowthFunction, t: f64) -> Result<f64, TransformError> {
    legendre(u, t).map(|r| r.log_value)
}

/// `log u*(r) = sup_{s>=0} (2 sqrt(rs) - log u(s))`, the dual Legendre
/// transform, via the same bracketing machinery run on the negated
/// objective (with `s = 0` admitted as a candidate).
pub fn dual_legendre(u: &GrowthFunction, r: f64) -> Result<DualResult, TransformError> {
    if r.is_nan() || r < 0.0 {
        return Err(TransformError::InvalidArgument(format!("r = {r} must be >= 0")));
    }
    // U3 makes the objective concave in w = sqrt(s), hence unimodal in
    // y = log s as well.
    let unimodal = u.claims(GrowthProperty::U3) || u.claims(GrowthProperty::LogX2Convex);
    let two_sqrt_r = 2.0 * r.sqrt();
    let neg = move |y: f64| -(two_sqrt_r * (0.5 * y).exp() - u.log_u(y.exp()));
    let at_zero = -u.log_u(0.0); // s = 0 candidate
    let m = minimize_expanding(&neg, BRACKET.0, BRACKET.1, X_TOL, unimodal).map_err(|e| {
        if e.toward_positive {
            TransformError::Divergent {
                context: format!(
                    "u*_{}({r}) diverges: 2 sqrt(rs) outgrows log u(s) on the bracket",
                    u.name()
                ),
            }
        } else {
            // Escape toward s = 0 saturates at the continuous limit.
            TransformError::Divergent { context: String::new() }
        }
    });
    match m {
        Ok(m) => {
            if -m.value >= at_zero {
                Ok(DualResult {
                    log_value: -m.value,
                    argmax_s: m.x.exp(),
                    evals: m.evals,
                    expansions: m.expansions,
                })
            } else {
                Ok(DualResult {
                    log_value: at_zero,
                    argmax_s: 0.0,
                    evals: m.evals + 1,
                    expansions: m.expansions,
                })
            }
        }
        Err(TransformError::Divergent { context }) if context.is_empty() => Ok(DualResult {
            log_value: at_zero,
            argmax_s: 0.0,
            evals: 0,
            expansions: 0,
        }),
        Err(e) => Err(e),
    }
}

/// Wrap the numeric dual transform as a growth function of its own so it
/// can be fed back through the other transforms.
///
/// Any dual transform is automatically increasing with
/// `inf u* = u*(0) = 1/inf u`, and `log u*(w^2)` is convex in `w` as a
/// supremum of affine functions of `w`, so U0/U1/U3 are claimed whenever
/// the source claims U0.
pub fn dual_growth_function(u: &GrowthFunction) -> GrowthFunction {
    use GrowthProperty::*;
    let claims: Vec<GrowthProperty> = if u.claims(U0) {
        vec![U0, U1, U3, LogX2Convex]
    } else {
        vec![U1, U3, LogX2Convex]
    };
    let inner = u.clone();
    GrowthFunction::from_log_fn(format!("dual({})", u.name()), claims, move |r: f64| {
        dual_legendre(&inner, r)
            .map(|d| d.log_value)
            .unwrap_or(f64::INFINITY)
    })
}

/// Closed form for the Legendre transform of the dual,
/// `log l_{u*}(t) = 2t - log l_u(t) - 2t log t` (with `t^{2t} = 1` at 0).
/// Valid when `u` is (log, x^2)-convex and lies in the half-root class.
pub fn legendre_of_dual_closed_form(u: &GrowthFunction, t: f64) -> Result<f64, TransformError> {
    let base = legendre_log(u, t)?;
    if t == 0.0 {
        Ok(-base)
    } else {
        Ok(2.0 * t - base - 2.0 * t * t.ln())
    }
}

/// L-function evaluation: `log L_u(r)` with the truncation degree used.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LFunctionResult {
    pub log_value: f64,
    pub degree: usize,
}

/// Partial sums of `sum_n l_u(n) r^n` in the log domain, truncated once the
/// geometric tail bound certifies the remainder below `tol` times the
/// partial sum.
///
/// The certificate is sound because `t -> log l_u(t)` is concave (an
/// infimum of affine functions), so term ratios are nonincreasing.
pub fn l_function(u: &GrowthFunction, r: f64, tol: f64) -> Result<LFunctionResult, TransformError> {
    let log_r = if r > 0.0 {
        r.ln()
    } else if r == 0.0 {
        return Ok(LFunctionResult {
            log_value: legendre_log(u, 0.0)?,
            degree: 0,
        });
    } else {
        return Err(TransformError::InvalidArgument(format!("r = {r} must be >= 0")));
    };
    let mut log_sum = f64::NEG_INFINITY;
    let mut prev_term = f64::INFINITY;
    for n in 0..=L_FUNCTION_MAX_TERMS {
        let term = legendre_log(u, n as f64)? + n as f64 * log_r;
        log_sum = logsumexp(log_sum, term);
        if n > 0 {
            let log_q = term - prev_term;
            if log_q < 0.0 {
                // tail <= term * q / (1 - q)
                let log_tail = term + log_q - (-log_q.exp()).ln_1p();
                if log_tail <= tol.ln() + log_sum {
                    return Ok(LFunctionResult {
                        log_value: log_sum,
                        degree: n,
                    });
                }
            }
        }
        prev_term = term;
    }
    Err(TransformError::TruncationFailure {
        partial_log: log_sum,
        degree: L_FUNCTION_MAX_TERMS,
    })
}

/// L-function at a complex argument (needed by the omega test function),
/// summed with magnitudes rescaled by the dominant term. Same truncation
/// certificate as [`l_function`], applied to |z|.
pub fn l_function_complex(
    u: &GrowthFunction,
    z: Complex64,
    tol: f64,
) -> Result<(Complex64, usize), TransformError> {
    let radius = z.norm();
    if radius == 0.0 {
        let v = legendre_log(u, 0.0)?.exp();
        return Ok((Complex64::new(v, 0.0), 0));
    }
    // First pass on |z| fixes the degree and the magnitude scale.
    let on_radius = l_function(u, radius, tol)?;
    let degree = on_radius.degree;
    let scale = on_radius.log_value;
    let log_r = radius.ln();
    let phase = Complex64::new(z.re / radius, z.im / radius);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut phase_n = Complex64::new(1.0, 0.0);
    for n in 0..=degree {
        let log_mag = legendre_log(u, n as f64)? + n as f64 * log_r - scale;
        acc += phase_n * log_mag.exp();
        phase_n *= phase;
    }
    Ok((acc * scale.exp(), degree))
}

/// Weight sequence `alpha_u(n) = (l_u(n) n!)^{-1}` in log domain.
#[derive(Debug, Clone, Serialize)]
pub struct WeightSequence {
    pub max_degree: usize,
    pub log_alpha: Vec<f64>,
    pub log_legendre: Vec<f64>,
}

pub fn weight_sequence(u: &GrowthFunction, n_max: usize) -> Result<WeightSequence, TransformError> {
    let mut log_alpha = Vec::with_capacity(n_max + 1);
    let mut log_legendre = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let ll = legendre_log(u, n as f64)?;
        log_legendre.push(ll);
        log_alpha.push(-ll - log_factorial(n));
    }
    Ok(WeightSequence {
        max_degree: n_max,
        log_alpha,
        log_legendre,
    })
}

impl WeightSequence {
    /// Diagnostic for `l_u(n)^{1/n} -> 0`: the sequence `log l_u(n)/n`
    /// should be decreasing over the computed range.
    pub fn root_decay_diagnostic(&self) -> bool {
        let seq: Vec<f64> = self
            .log_legendre
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &v)| v / n as f64)
            .collect();
        seq.windows(2).all(|w| w[1] <= w[0] + 1e-12)
    }
}

/// Sampled Legendre values over a t-grid.
#[derive(Debug, Clone, Serialize)]
pub struct TransformTable {
    pub function: String,
    pub t_grid: Vec<f64>,
    pub log_legendre: Vec<f64>,
    pub argmin_r: Vec<f64>,
    pub total_evals: usize,
}

impl TransformTable {
    pub fn build(u: &GrowthFunction, t_grid: &[f64]) -> Result<TransformTable, TransformError> {
        let mut log_legendre = Vec::with_capacity(t_grid.len());
        let mut argmin_r = Vec::with_capacity(t_grid.len());
        let mut total_evals = 0;
        for &t in t_grid {
            let res = legendre(u, t)?;
            log_legendre.push(res.log_value);
            argmin_r.push(res.argmin_r);
            total_evals += res.evals;
        }
        Ok(TransformTable {
            function: u.name().to_string(),
            t_grid: t_grid.to_vec(),
            log_legendre,
            argmin_r,
            total_evals,
        })
    }
}

/// Default grid for the L-function bound checks. The upper end is kept at 30
/// because `L_u(r)` needs roughly `r` series terms for the exponential
/// catalog entries, and the series is capped at 400 terms.
pub fn bound_check_grid() -> Grid {
    Grid::geometric(1e-6, 30.0, 160).expect("valid grid")
}

const L_TOL: f64 = 1e-12;

/// Upper bound for the L-function: for (log, exp)-convex `u` and any `a > 1`,
/// `L_u(r) <= (e a / log a) u(a r)`, and `L_u` is itself (log, exp)-convex.
pub fn verify_l_upper_bound(
    u: &GrowthFunction,
    a: f64,
    grid: &Grid,
) -> Result<ConditionReport, TransformError> {
    if a <= 1.0 {
        return Err(TransformError::InvalidArgument(format!("a = {a} must be > 1")));
    }
    let log_const = (std::f64::consts::E * a / a.ln()).ln();
    let mut report = condition_skeleton(format!("l-upper-bound[a={a}]"), grid);
    let mut log_l_vals = Vec::with_capacity(grid.len());
    for &r in &grid.points {
        let lhs = l_function(u, r, L_TOL)?.log_value;
        log_l_vals.push(lhs);
        let rhs = log_const + u.log_u(a * r);
        record_inequality(&mut report, r, rhs - lhs);
    }
    // Discrete (log, exp)-convexity of L_u over the same grid.
    let xs: Vec<f64> = grid.points.iter().map(|r| r.ln()).collect();
    let mut convex_ok = true;
    for i in 0..xs.len() - 2 {
        let d2 = crate::numerics::second_divided_difference(
            xs[i],
            log_l_vals[i],
            xs[i + 1],
            log_l_vals[i + 1],
            xs[i + 2],
            log_l_vals[i + 2],
        );
        let scale = log_l_vals[i + 2].abs().max(1.0);
        if d2 < -1e-9 * scale {
            convex_ok = false;
            report.witnesses.push(Witness {
                r: grid.points[i + 1],
                margin: d2,
            });
        }
    }
    report.data.insert("log_bound_constant".into(), log_const);
    report
        .data
        .insert("l_function_convex".into(), if convex_ok { 1.0 } else { 0.0 });
    finalize_inequality(&mut report, convex_ok);
    Ok(report)
}

/// Lower-bound constant: for increasing (log, x^k)-convex `u` there is a constant C
/// with `u(r) <= C L_u(2^k r)`. The constant is measured, not asserted:
/// `C_hat = max_grid u(r)/L_u(2^k r)`.
pub fn verify_l_lower_bound(
    u: &GrowthFunction,
    k: f64,
    grid: &Grid,
) -> Result<ConditionReport, TransformError> {
    let scale = 2f64.powf(k);
    let mut report = condition_skeleton(format!("l-lower-bound[k={k}]"), grid);
    let mut log_c_hat = f64::NEG_INFINITY;
    let mut arg = 0.0;
    // r = 0 participates: u(0)/L(0) = u(0)/l_u(0).
    for &r in std::iter::once(&0.0).chain(grid.points.iter()) {
        let ratio = u.log_u(r) - l_function(u, scale * r, L_TOL)?.log_value;
        if ratio > log_c_hat {
            log_c_hat = ratio;
            arg = r;
        }
    }
    report.data.insert("c_hat".into(), log_c_hat.exp());
    report.data.insert("log_c_hat".into(), log_c_hat);
    report.data.insert("argmax_r".into(), arg);
    report.margin = if log_c_hat.is_finite() { 0.0 } else { f64::NEG_INFINITY };
    report.verdict = if log_c_hat.is_finite() {
        Verdict::HoldsOnGrid
    } else {
        Verdict::Fails
    };
    report.detail = format!("measured C = {:.6e} at r = {arg:.4e}", log_c_hat.exp());
    Ok(report)
}

/// Square-root bound: under the same hypotheses, for any `a > 1`,
/// `L_u(r) <= sqrt(l_u(0) e a / log a) u(a 2^{k+1} r)^{1/2}`.
pub fn verify_l_sqrt_bound(
    u: &GrowthFunction,
    k: f64,
    a: f64,
    grid: &Grid,
) -> Result<ConditionReport, TransformError> {
    if a <= 1.0 {
        return Err(TransformError::InvalidArgument(format!("a = {a} must be > 1")));
    }
    let log_l0 = legendre_log(u, 0.0)?;
    let half_log_const = 0.5 * (log_l0 + (std::f64::consts::E * a / a.ln()).ln());
    let arg_scale = a * 2f64.powf(k + 1.0);
    let mut report = condition_skeleton(format!("l-sqrt-bound[k={k},a={a}]"), grid);
    for &r in &grid.points {
        let lhs = l_function(u, r, L_TOL)?.log_value;
        let rhs = half_log_const + 0.5 * u.log_u(arg_scale * r);
        record_inequality(&mut report, r, rhs - lhs);
    }
    finalize_inequality(&mut report, true);
    Ok(report)
}

/// Two independent routes to `log l_{u*}(t)` must agree —
/// the numeric Legendre transform of the numeric dual, and the closed form
/// `2t - log l_u(t) - 2t log t`. The maximum relative discrepancy in the
/// log domain is reported in `data["max_rel_discrepancy"]`.
pub fn verify_dual_legendre_identity(
    u: &GrowthFunction,
    t_grid: &[f64],
) -> Result<ConditionReport, TransformError> {
    let dual = dual_growth_function(u);
    let pseudo_grid = Grid {
        points: t_grid.to_vec(),
        spacing: crate::growth::GridSpacing::Geometric,
    };
    let mut report = condition_skeleton(format!("dual-legendre-identity[{}]", u.name()), &pseudo_grid);
    let mut max_rel = 0.0f64;
    let mut worst_t = t_grid[0];
    for &t in t_grid {
        let numeric = legendre_log(&dual, t)?;
        let formula = legendre_of_dual_closed_form(u, t)?;
        let rel = (numeric - formula).abs() / formula.abs().max(1.0);
        if rel > max_rel {
            max_rel = rel;
            worst_t = t;
        }
    }
    report.data.insert("max_rel_discrepancy".into(), max_rel);
    report.data.insert("worst_t".into(), worst_t);
    report.margin = 1e-6 - max_rel;
    report.verdict = if max_rel <= 1e-6 {
        Verdict::HoldsOnGrid
    } else {
        Verdict::Fails
    };
    if report.verdict == Verdict::Fails {
        report.witnesses.push(Witness {
            r: worst_t,
            margin: max_rel,
        });
    }
    report.detail = format!("max relative log-domain discrepancy {max_rel:.3e} at t = {worst_t:.4}");
    Ok(report)
}

fn condition_skeleton(name: String, grid: &Grid) -> ConditionReport {
    ConditionReport {
        condition: name,
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

fn record_inequality(report: &mut ConditionReport, r: f64, slack: f64) {
    if slack < report.margin {
        report.margin = slack;
    }
    if slack < -1e-9 {
        report.witnesses.push(Witness { r, margin: slack });
    }
}

fn finalize_inequality(report: &mut ConditionReport, extra_ok: bool) {
    if report.witnesses.is_empty() && extra_ok {
        report.verdict = Verdict::HoldsOnGrid;
        report.detail = format!("holds with minimum log slack {:.4e}", report.margin);
    } else {
        report.verdict = Verdict::Fails;
        report.detail = format!(
            "{} violations, worst slack {:.4e}",
            report.witnesses.len(),
            report.margin
        );
    }
}

/// Cached Legendre values at integer degrees, shared by the chaos norms and
/// the omega evaluator so repeated lookups do not re-run the minimizer.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    values: Arc<Vec<f64>>,
    name: String,
}

impl LegendreTable {
    pub fn build(u: &GrowthFunction, n_max: usize) -> Result<LegendreTable, TransformError> {
        let mut values = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            values.push(legendre_log(u, n as f64)?);
        }
        Ok(LegendreTable {
            values: Arc::new(values),
            name: u.name().to_string(),
        })
    }

    pub fn log_legendre(&self, n: usize) -> f64 {
        self.values[n]
    }

    pub fn max_degree(&self) -> usize {
        self.values.len() - 1
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// `log L_u(r)` from the cached Legendre values; same truncation
    /// certificate as [`l_function`].
    pub fn l_function(&self, r: f64, tol: f64) -> Result<LFunctionResult, TransformError> {
        if r == 0.0 {
            return Ok(LFunctionResult {
                log_value: self.values[0],
                degree: 0,
            });
        }
        if r < 0.0 {
            return Err(TransformError::InvalidArgument(format!("r = {r} must be >= 0")));
        }
        let log_r = r.ln();
        let mut log_sum = f64::NEG_INFINITY;
        let mut prev_term = f64::INFINITY;
        for (n, &ll) in self.values.iter().enumerate() {
            let term = ll + n as f64 * log_r;
            log_sum = logsumexp(log_sum, term);
            if n > 0 {
                let log_q = term - prev_term;
                if log_q < 0.0 {
                    let log_tail = term + log_q - (-log_q.exp()).ln_1p();
                    if log_tail <= tol.ln() + log_sum {
                        return Ok(LFunctionResult {
                            log_value: log_sum,
                            degree: n,
                        });
                    }
                }
            }
            prev_term = term;
        }
        Err(TransformError::TruncationFailure {
            partial_log: log_sum,
            degree: self.max_degree(),
        })
    }

    /// `L_u(z)` at a complex argument, with magnitudes rescaled by the
    /// dominant term; the truncation degree is certified on `|z|`.
    pub fn l_function_complex(
        &self,
        z: Complex64,
        tol: f64,
    ) -> Result<(Complex64, usize), TransformError> {
        let radius = z.norm();
        if radius == 0.0 {
            return Ok((Complex64::new(self.values[0].exp(), 0.0), 0));
        }
        let on_radius = self.l_function(radius, tol)?;
        let degree = on_radius.degree;
        let scale = on_radius.log_value;
        let log_r = radius.ln();
        let phase = Complex64::new(z.re / radius, z.im / radius);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut phase_n = Complex64::new(1.0, 0.0);
        for (n, &ll) in self.values.iter().take(degree + 1).enumerate() {
            let log_mag = ll + n as f64 * log_r - scale;
            acc += phase_n * log_mag.exp();
            phase_n *= phase;
        }
        Ok((acc * scale.exp(), degree))
    }
}
