//! Constructive kernel extraction for entire functions of two vector
//! arguments: iterated Cauchy contour integrals on circles (trapezoidal
//! rule, spectrally accurate), the proof-optimal contour radius, growth
//! certificates, per-bidegree kernel-norm bounds, and the inverse
//! S-transform at desk scale.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaos::{multi_indices, multiplicity, ChaosError, ChaosVector, KernelTensor, SpaceModel};
use crate::growth::{ConditionReport, GrowthFunction, Verdict, Witness};
use crate::numerics::{log_factorial, minimize_expanding};
use crate::transforms::{legendre_log, TransformError};

#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("evaluator returned a non-finite value on the contour at radius {radius}")]
    EvaluatorFailure { radius: f64 },
    #[error("contour grid of {0} points exceeds the in-memory budget")]
    GridTooLarge(usize),
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

type Evaluator = Arc<dyn Fn(&[Complex64], &[Complex64]) -> Complex64 + Send + Sync>;

/// An entire function `F(xi, eta)` on `C^d x C^d`, given by an evaluator
/// plus an optional claimed growth profile. Analyticity is assumed, not
/// verified; evaluators must be safe for concurrent calls.
#[derive(Clone)]
pub struct AnalyticFunction {
    d: usize,
    eval: Evaluator,
    growth: Option<GrowthProfile>,
}

/// Claimed growth `|F(xi,eta)|^2 <= C u1(K1 |xi|^2_{p1}) u2(K2 |eta|^2_{p2})`,
/// with signed exponents so the same profile covers both the test-side and
/// dual-side conditions.
#[derive(Clone)]
pub struct GrowthProfile {
    pub c: f64,
    pub k1: f64,
    pub k2: f64,
    pub p1: f64,
    pub p2: f64,
    pub u1: GrowthFunction,
    pub u2: GrowthFunction,
}

impl AnalyticFunction {
    pub fn from_fn(
        d: usize,
        f: impl Fn(&[Complex64], &[Complex64]) -> Complex64 + Send + Sync + 'static,
    ) -> AnalyticFunction {
        AnalyticFunction {
            d,
            eval: Arc::new(f),
            growth: None,
        }
    }

    /// The S-transform of a chaos vector as an entire function.
    pub fn from_s_transform(phi: &ChaosVector) -> AnalyticFunction {
        let phi = phi.clone();
        AnalyticFunction {
            d: phi.space().dim(),
            eval: Arc::new(move |xi, eta| crate::chaos::s_transform(&phi, xi, eta)),
            growth: None,
        }
    }

    /// Plain monomial-list polynomial (the CLI interchange form): each term
    /// contributes `c * prod xi_{idx_l} * prod eta_{idx_m}`.
    pub fn from_polynomial(
        d: usize,
        terms: Vec<PolyTerm>,
    ) -> Result<AnalyticFunction, AnalyticError> {
        for t in &terms {
            if t.idx_l.iter().chain(&t.idx_m).any(|&j| j >= d) {
                return Err(AnalyticError::InvalidArgument(format!(
                    "term index exceeds dimension {d}"
                )));
            }
        }
        Ok(AnalyticFunction {
            d,
            eval: Arc::new(move |xi, eta| {
                terms
                    .iter()
                    .map(|t| {
                        let mut v = Complex64::new(t.re, t.im);
                        for &j in &t.idx_l {
                            v *= xi[j];
                        }
                        for &j in &t.idx_m {
                            v *= eta[j];
                        }
                        v
                    })
                    .sum()
            }),
            growth: None,
        })
    }

    pub fn from_polynomial_json(d: usize, text: &str) -> Result<AnalyticFunction, AnalyticError> {
        let poly: SerdePolynomial = serde_json::from_str(text)
            .map_err(|e| AnalyticError::InvalidArgument(format!("polynomial JSON: {e}")))?;
        Self::from_polynomial(d, poly.terms)
    }

    pub fn with_growth_profile(mut self, profile: GrowthProfile) -> AnalyticFunction {
        self.growth = Some(profile);
        self
    }

    pub fn growth_profile(&self) -> Option<&GrowthProfile> {
        self.growth.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn eval(&self, xi: &[Complex64], eta: &[Complex64]) -> Complex64 {
        (self.eval)(xi, eta)
    }

    /// The function with its argument blocks swapped:
    /// `swap(F)(xi, eta) = F(eta, xi)`.
    pub fn swap_blocks(&self) -> AnalyticFunction {
        let inner = self.eval.clone();
        AnalyticFunction {
            d: self.d,
            eval: Arc::new(move |xi, eta| inner(eta, xi)),
            growth: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTerm {
    pub idx_l: Vec<usize>,
    pub idx_m: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

#[derive(Deserialize)]
struct SerdePolynomial {
    terms: Vec<PolyTerm>,
}

/// Contour parameters: one radius per argument block and the node count
/// per circle. The trapezoidal rule recovers the coefficient of degree `k`
/// exactly for polynomials of per-variable degree `< nodes`.
#[derive(Debug, Clone, Copy)]
pub struct ContourSpec {
    pub radius_xi: f64,
    pub radius_eta: f64,
    pub nodes: usize,
}

impl ContourSpec {
    pub fn new(
        radius_xi: f64,
        radius_eta: f64,
        nodes: usize,
    ) -> Result<ContourSpec, AnalyticError> {
        if !(radius_xi > 0.0 && radius_eta > 0.0) {
            return Err(AnalyticError::InvalidArgument("radii must be positive".into()));
        }
        if nodes < 2 {
            return Err(AnalyticError::InvalidArgument("need at least 2 nodes".into()));
        }
        Ok(ContourSpec {
            radius_xi,
            radius_eta,
            nodes,
        })
    }

    /// Default node count for a degree cap: `4 (cap + 1)` nodes per circle.
    pub fn default_nodes(cap: usize) -> usize {
        4 * (cap + 1)
    }
}

/// Extract the degree-(l, m) coefficient tensor of `F` by iterated contour
/// integrals, one monomial at a time, with variables of zero degree pinned
/// at the origin. Coefficients are symmetrized by construction (the orbit
/// value is the monomial coefficient divided by the orbit multiplicity).
pub fn taylor_coeffs(
    f: &AnalyticFunction,
    l: usize,
    m: usize,
    spec: ContourSpec,
) -> Result<KernelTensor, AnalyticError> {
    let d = f.d;
    let needed = l.max(m) + 1;
    if spec.nodes < 2 * needed {
        return Err(AnalyticError::InvalidArgument(format!(
            "nodes = {} too few for bidegree ({l}, {m}); need >= {}",
            spec.nodes,
            2 * needed
        )));
    }
    let mut out = KernelTensor::zero(d, l, m);
    for alpha in multi_indices(d, l) {
        for beta in multi_indices(d, m) {
            let c = monomial_coefficient(f, &alpha, &beta, spec)?;
            let w = multiplicity(&alpha) * multiplicity(&beta);
            out.set_orbit(&alpha, &beta, c / w)?;
        }
    }
    Ok(out)
}

/// Cauchy coefficient of the monomial `xi^alpha eta^beta` via the
/// tensorized trapezoidal rule over the active variables only.
fn monomial_coefficient(
    f: &AnalyticFunction,
    alpha: &[usize],
    beta: &[usize],
    spec: ContourSpec,
) -> Result<Complex64, AnalyticError> {
    let d = f.d;
    let mut exp_xi = vec![0usize; d];
    let mut exp_eta = vec![0usize; d];
    for &j in alpha {
        exp_xi[j] += 1;
    }
    for &j in beta {
        exp_eta[j] += 1;
    }
    // Active variables as (block, var, exponent, radius).
    let mut active: Vec<(usize, usize, usize, f64)> = Vec::new();
    for (j, &e) in exp_xi.iter().enumerate() {
        if e > 0 {
            active.push((0, j, e, spec.radius_xi));
        }
    }
    for (j, &e) in exp_eta.iter().enumerate() {
        if e > 0 {
            active.push((1, j, e, spec.radius_eta));
        }
    }
    let n = spec.nodes;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut xi = vec![Complex64::new(0.0, 0.0); d];
    let mut eta = vec![Complex64::new(0.0, 0.0); d];
    if active.is_empty() {
        return Ok(f.eval(&xi, &eta));
    }
    let mut idx = vec![0usize; active.len()];
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut twist = Complex64::new(1.0, 0.0);
        for (pos, &(block, var, k, r)) in active.iter().enumerate() {
            let theta = step * idx[pos] as f64;
            let point = Complex64::from_polar(r, theta);
            if block == 0 {
                xi[var] = point;
            } else {
                eta[var] = point;
            }
            twist *= Complex64::from_polar(r.powi(k as i32).recip(), -(k as f64) * theta);
        }
        let v = f.eval(&xi, &eta);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(AnalyticError::EvaluatorFailure {
                radius: active[0].3,
            });
        }
        acc += v * twist;
        let mut carry = 0;
        loop {
            if carry == active.len() {
                let scale = (n as f64).powi(active.len() as i32);
                return Ok(acc / scale);
            }
            idx[carry] += 1;
            if idx[carry] < n {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
    }
}

/// All coefficient tensors with `l <= cap_l`, `m <= cap_m`, from a single
/// shared contour grid over all `2d` variables with an axis-by-axis
/// discrete Fourier transform. Exact for polynomials within the caps when
/// `nodes > cap`; spectrally accurate otherwise.
pub fn taylor_table(
    f: &AnalyticFunction,
    cap_l: usize,
    cap_m: usize,
    spec: ContourSpec,
) -> Result<BTreeMap<(usize, usize), KernelTensor>, AnalyticError> {
    let d = f.d;
    let axes = 2 * d;
    let n = spec.nodes;
    let cap = cap_l.max(cap_m);
    if spec.nodes <= cap {
        return Err(AnalyticError::InvalidArgument(format!(
            "nodes = {} must exceed the degree cap {cap}",
            spec.nodes
        )));
    }
    let total = n
        .checked_pow(axes as u32)
        .ok_or(AnalyticError::GridTooLarge(usize::MAX))?;
    if total > 8_000_000 {
        return Err(AnalyticError::GridTooLarge(total));
    }

    // Sample F over the full tensor grid. Axis j < d is xi_j, axis d + j
    // is eta_j; axis strides are n^axis.
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut xi = vec![Complex64::new(0.0, 0.0); d];
    let mut eta = vec![Complex64::new(0.0, 0.0); d];
    let mut idx = vec![0usize; axes];
    for (flat, slot) in values.iter_mut().enumerate() {
        let mut rem = flat;
        for (axis, i) in idx.iter_mut().enumerate() {
            *i = rem % n;
            rem /= n;
            let r = if axis < d { spec.radius_xi } else { spec.radius_eta };
            let p = Complex64::from_polar(r, step * *i as f64);
            if axis < d {
                xi[axis] = p;
            } else {
                eta[axis - d] = p;
            }
        }
        let v = f.eval(&xi, &eta);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(AnalyticError::EvaluatorFailure {
                radius: spec.radius_xi,
            });
        }
        *slot = v;
    }

    // Axis-by-axis partial DFT: replace each sampled axis of length n by a
    // coefficient line of length cap_axis + 1.
    let mut dims: Vec<usize> = vec![n; axes];
    for axis in 0..axes {
        let cap_axis = if axis < d { cap_l } else { cap_m };
        let r = if axis < d { spec.radius_xi } else { spec.radius_eta };
        let out_len = cap_axis + 1;
        let stride_before: usize = dims[..axis].iter().product();
        let stride_after: usize = dims[axis + 1..].iter().product();
        let mut next = vec![Complex64::new(0.0, 0.0); stride_before * out_len * stride_after];
        for hi in 0..stride_after {
            for lo in 0..stride_before {
                for k in 0..out_len {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for s in 0..n {
                        let src = lo + s * stride_before + hi * stride_before * n;
                        let phase = Complex64::from_polar(1.0, -(k as f64) * step * s as f64);
                        acc += values[src] * phase;
                    }
                    let dst = lo + k * stride_before + hi * stride_before * out_len;
                    next[dst] = acc / (n as f64 * r.powi(k as i32));
                }
            }
        }
        values = next;
        dims[axis] = out_len;
    }

    // Read the kernels off the coefficient hypercube.
    let mut out = BTreeMap::new();
    for l in 0..=cap_l {
        for m in 0..=cap_m {
            let mut k = KernelTensor::zero(d, l, m);
            for alpha in multi_indices(d, l) {
                for beta in multi_indices(d, m) {
                    let mut flat = 0usize;
                    let mut stride = 1usize;
                    let mut exp = vec![0usize; axes];
                    for &j in &alpha {
                        exp[j] += 1;
                    }
                    for &j in &beta {
                        exp[d + j] += 1;
                    }
                    for (axis, &e) in exp.iter().enumerate() {
                        flat += e * stride;
                        stride *= dims[axis];
                    }
                    let c = values[flat];
                    let w = multiplicity(&alpha) * multiplicity(&beta);
                    k.set_orbit(&alpha, &beta, c / w)?;
                }
            }
            out.insert((l, m), k);
        }
    }
    Ok(out)
}

/// The contour radius minimizing the Cauchy bound
/// `u*(K n^2 r^2)^{1/2} / r^n`, with the minimized bound value (including
/// the `1/n!` of the coefficient functional) reported as `log_bound`. At
/// the optimum this reproduces `K^{n/2} (n^n / n!) l_{u*}(n)^{1/2}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OptimalRadius {
    pub radius: f64,
    pub log_bound: f64,
}

pub fn optimal_radius(
    u_star: &GrowthFunction,
    k: f64,
    n: usize,
) -> Result<OptimalRadius, AnalyticError> {
    if n == 0 {
        return Err(AnalyticError::InvalidArgument("degree must be >= 1".into()));
    }
    if k <= 0.0 {
        return Err(AnalyticError::InvalidArgument("K must be positive".into()));
    }
    let nf = n as f64;
    let objective = move |x: f64| 0.5 * u_star.log_u(k * nf * nf * (2.0 * x).exp()) - nf * x;
    let unimodal = u_star.claims(crate::growth::GrowthProperty::LogExpConvex)
        || u_star.claims(crate::growth::GrowthProperty::U3);
    let m = minimize_expanding(&objective, -40.0, 40.0, 1e-12, unimodal).map_err(|_| {
        AnalyticError::InvalidArgument(format!(
            "Cauchy bound objective diverges for {} at degree {n}",
            u_star.name()
        ))
    })?;
    Ok(OptimalRadius {
        radius: m.x.exp(),
        log_bound: m.value - log_factorial(n),
    })
}

/// A cloud of complex sample points on which growth conditions are probed:
/// the origin, coordinate axis rays, and seeded random directions, each
/// swept over a geometric radius ladder.
pub struct SampleCloud {
    pub points: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

impl SampleCloud {
    pub fn generate(d: usize, n_random_dirs: usize, r_max: f64, seed: u64) -> SampleCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zero = vec![Complex64::new(0.0, 0.0); d];
        let mut dirs: Vec<(Vec<Complex64>, Vec<Complex64>)> = Vec::new();
        for j in 0..d {
            let mut e = zero.clone();
            e[j] = Complex64::new(1.0, 0.0);
            dirs.push((e.clone(), zero.clone()));
            dirs.push((zero.clone(), e.clone()));
            dirs.push((e.clone(), e));
        }
        for _ in 0..n_random_dirs {
            let sample = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
                let v: Vec<Complex64> = (0..d)
                    .map(|_| {
                        Complex64::new(
                            rng.sample::<f64, _>(rand_distr::StandardNormal),
                            rng.sample::<f64, _>(rand_distr::StandardNormal),
                        )
                    })
                    .collect();
                let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-12);
                v.into_iter().map(|c| c / n).collect()
            };
            let dx = sample(&mut rng);
            let dy = sample(&mut rng);
            dirs.push((dx, dy));
        }
        let mut radii = Vec::new();
        let mut r = r_max;
        while r > 1e-2 {
            radii.push(r);
            r *= 0.5;
        }
        let mut points = vec![(zero.clone(), zero)];
        for (dx, dy) in dirs {
            for &r in &radii {
                points.push((
                    dx.iter().map(|&c| c * r).collect(),
                    dy.iter().map(|&c| c * r).collect(),
                ));
            }
        }
        SampleCloud { points }
    }
}

/// Result of probing `|F|^2 <= C u1(K1 |xi|^2_{p1}) u2(K2 |eta|^2_{p2})`
/// over a sample cloud. `c_hat` is the smallest admissible constant on the
/// cloud (the max ratio); with a claimed `C`, every cloud point exceeding
/// it beyond tolerance is reported.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthCertificate {
    pub c_hat: f64,
    pub log_c_hat: f64,
    pub n_points: usize,
    /// Index of the maximizing cloud point.
    pub argmax_index: usize,
    pub claimed_c: Option<f64>,
    /// Cloud indices where the claimed C is exceeded, with the log excess.
    pub violations: Vec<(usize, f64)>,
}

impl GrowthCertificate {
    pub fn claim_holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Measure the growth constant of `F` against the factorized weight
/// `u1(K1 |xi|^2_{p1}) u2(K2 |eta|^2_{p2})`; signed `p_i` select the
/// test-side or dual-side norms.
#[allow(clippy::too_many_arguments)]
pub fn check_growth_condition(
    f: &AnalyticFunction,
    space: &SpaceModel,
    u1: &GrowthFunction,
    u2: &GrowthFunction,
    k1: f64,
    k2: f64,
    p1: f64,
    p2: f64,
    claimed_c: Option<f64>,
    cloud: &SampleCloud,
) -> GrowthCertificate {
    let mut log_c_hat = f64::NEG_INFINITY;
    let mut argmax = 0usize;
    let mut violations = Vec::new();
    let log_claimed = claimed_c.map(|c| c.ln());
    for (i, (xi, eta)) in cloud.points.iter().enumerate() {
        let v = f.eval(xi, eta);
        let log_ratio = 2.0 * v.norm().ln()
            - u1.log_u(k1 * space.weighted_norm_sq(xi, p1))
            - u2.log_u(k2 * space.weighted_norm_sq(eta, p2));
        if log_ratio > log_c_hat {
            log_c_hat = log_ratio;
            argmax = i;
        }
        if let Some(lc) = log_claimed {
            if log_ratio > lc + 1e-9 {
                violations.push((i, log_ratio - lc));
            }
        }
    }
    GrowthCertificate {
        c_hat: log_c_hat.exp(),
        log_c_hat,
        n_points: cloud.points.len(),
        argmax_index: argmax,
        claimed_c,
        violations,
    }
}

/// Which of the two kernel-bound directions to check: the dual-side bound
/// (kernels measured at `-q`, weights from the dual transforms, `q_i > p_i`)
/// or the test-side bound (kernels at `+q`, weights from the functions
/// themselves, `q_i < p_i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundDirection {
    DualSide,
    TestSide,
}

/// Check the per-bidegree kernel bound
/// `|k_{l,m}|^2 <= C (K1 e^2 hs_1)^l (K2 e^2 hs_2)^m l_{g1}(l) l_{g2}(m)`
/// for kernels extracted from a function with measured growth constant `C`.
///
/// `g1`, `g2` are the weight functions whose Legendre values appear on the
/// right (the dual transforms for [`BoundDirection::DualSide`], the
/// functions themselves for [`BoundDirection::TestSide`]); callers supply
/// them explicitly. `hs_i` is the embedding norm between the two levels
/// and must satisfy `K_i e^2 hs_i < 1`.
#[allow(clippy::too_many_arguments)]
pub fn verify_kernel_bounds(
    kernels: &BTreeMap<(usize, usize), KernelTensor>,
    space: &SpaceModel,
    c: f64,
    k1: f64,
    k2: f64,
    p1: f64,
    p2: f64,
    q1: f64,
    q2: f64,
    g1: &GrowthFunction,
    g2: &GrowthFunction,
    direction: BoundDirection,
) -> Result<ConditionReport, AnalyticError> {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    let (hs1, hs2, norm_p1, norm_p2) = match direction {
        BoundDirection::DualSide => {
            if !(q1 > p1 && q2 > p2) {
                return Err(AnalyticError::InvalidArgument(
                    "dual-side bound needs q_i > p_i".into(),
                ));
            }
            (
                space.hs_embedding_sq(q1, p1),
                space.hs_embedding_sq(q2, p2),
                -q1,
                -q2,
            )
        }
        BoundDirection::TestSide => {
            if !(q1 < p1 && q2 < p2) {
                return Err(AnalyticError::InvalidArgument(
                    "test-side bound needs q_i < p_i".into(),
                ));
            }
            (
                space.hs_embedding_sq(p1, q1),
                space.hs_embedding_sq(p2, q2),
                q1,
                q2,
            )
        }
    };
    for (i, (k, hs)) in [(k1, hs1), (k2, hs2)].iter().enumerate() {
        if k * e2 * hs >= 1.0 {
            return Err(AnalyticError::InvalidArgument(format!(
                "K{} e^2 hs = {:.4} must be < 1",
                i + 1,
                k * e2 * hs
            )));
        }
    }
    let mut report = ConditionReport {
        condition: format!("kernel-bounds[{direction:?}]"),
        verdict: Verdict::Inconclusive,
        witnesses: Vec::new(),
        grid_r_min: 0.0,
        grid_r_max: 0.0,
        grid_len: kernels.len(),
        grid_spacing: crate::growth::GridSpacing::Linear,
        margin: f64::INFINITY,
        data: BTreeMap::new(),
        detail: String::new(),
    };
    let log_c = c.ln();
    let log_rate1 = (k1 * e2 * hs1).ln();
    let log_rate2 = (k2 * e2 * hs2).ln();
    let mut worst: Option<(usize, usize, f64)> = None;
    for (&(l, m), kernel) in kernels {
        let lhs_sq = kernel.norm_sq_weighted(space, norm_p1, norm_p2);
        if lhs_sq == 0.0 {
            continue;
        }
        let rhs_log = log_c
            + l as f64 * log_rate1
            + m as f64 * log_rate2
            + legendre_log(g1, l as f64)?
            + legendre_log(g2, m as f64)?;
        let slack = rhs_log - lhs_sq.ln();
        if slack < report.margin {
            report.margin = slack;
            worst = Some((l, m, slack));
        }
        if slack < -1e-9 {
            report.witnesses.push(Witness {
                r: l as f64,
                margin: slack,
            });
            report.data.insert(format!("violation_l{l}_m{m}"), slack);
        }
    }
    if let Some((l, m, slack)) = worst {
        report.data.insert("worst_l".into(), l as f64);
        report.data.insert("worst_m".into(), m as f64);
        report.data.insert("worst_log_slack".into(), slack);
    }
    report.data.insert("hs1".into(), hs1);
    report.data.insert("hs2".into(), hs2);
    if report.witnesses.is_empty() {
        report.verdict = Verdict::HoldsOnGrid;
        report.detail = format!(
            "all {} occupied bidegrees within bound, min log slack {:.4e}",
            kernels.len(),
            report.margin
        );
    } else {
        report.verdict = Verdict::Fails;
        report.detail = format!(
            "{} bidegrees violate the bound; worst log slack {:.4e}",
            report.witnesses.len(),
            report.margin
        );
    }
    Ok(report)
}

/// How contour radii are chosen for [`reconstruct_chaos`].
#[derive(Debug, Clone, Copy)]
pub enum RadiusPolicy {
    /// One fixed radius for every variable (radius-independent for
    /// polynomials by Cauchy's theorem); the neutral default is 1.
    Fixed(f64),
    /// Per-bidegree proof-optimal radii from the claimed growth profile;
    /// falls back to 1 where the profile is absent.
    OptimalPerDegree,
}

/// Inverse S-transform at desk scale: extract the coefficient tensors of
/// `F` up to the caps and divide out the `2^{(l+m)/2}` S-transform
/// normalization, so that `s_transform(reconstruct_chaos(F)) ~ F` for
/// polynomial `F` within the caps.
pub fn reconstruct_chaos(
    f: &AnalyticFunction,
    space: &SpaceModel,
    cap_l: usize,
    cap_m: usize,
    policy: RadiusPolicy,
) -> Result<ChaosVector, AnalyticError> {
    if space.dim() != f.d {
        return Err(AnalyticError::InvalidArgument(format!(
            "space dimension {} does not match function dimension {}",
            space.dim(),
            f.d
        )));
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut phi = ChaosVector::new(space.clone());
    match policy {
        RadiusPolicy::Fixed(r) => {
            let spec = ContourSpec::new(r, r, ContourSpec::default_nodes(cap_l.max(cap_m)))?;
            let table = taylor_table(f, cap_l, cap_m, spec)?;
            for ((l, m), kernel) in table {
                let mut scaled = kernel.scale(Complex64::new(sqrt2.powi(-((l + m) as i32)), 0.0));
                scaled.prune(1e-14);
                if !scaled.is_zero() {
                    phi.insert_kernel(scaled)?;
                }
            }
        }
        RadiusPolicy::OptimalPerDegree => {
            for l in 0..=cap_l {
                for m in 0..=cap_m {
                    let spec = per_degree_spec(f, l, m)?;
                    let kernel = taylor_coeffs(f, l, m, spec)?;
                    let mut scaled =
                        kernel.scale(Complex64::new(sqrt2.powi(-((l + m) as i32)), 0.0));
                    scaled.prune(1e-14);
                    if !scaled.is_zero() {
                        phi.insert_kernel(scaled)?;
                    }
                }
            }
        }
    }
    Ok(phi)
}

fn per_degree_spec(f: &AnalyticFunction, l: usize, m: usize) -> Result<ContourSpec, AnalyticError> {
    let nodes = ContourSpec::default_nodes(l.max(m));
    match f.growth.as_ref() {
        Some(profile) => {
            let r_xi = if l > 0 {
                optimal_radius(&profile.u1, profile.k1, l)?.radius
            } else {
                1.0
            };
            let r_eta = if m > 0 {
                optimal_radius(&profile.u2, profile.k2, m)?.radius
            } else {
                1.0
            };
            ContourSpec::new(r_xi, r_eta, nodes)
        }
        None => ContourSpec::new(1.0, 1.0, nodes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::random_chaos_vector;
    use crate::growth::catalog_lookup;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap as Map;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_fn() -> GrowthFunction {
        catalog_lookup("exp", &Map::new()).unwrap()
    }

    #[test]
    fn constant_function_extracts_cleanly() {
        let f = AnalyticFunction::from_fn(2, |_, _| c(1.0, 0.0));
        let spec = ContourSpec::new(1.0, 1.0, 8).unwrap();
        let k00 = taylor_coeffs(&f, 0, 0, spec).unwrap();
        assert!((k00.orbit(&[], &[]) - c(1.0, 0.0)).norm() < 1e-13);
        for (l, m) in [(1, 0), (0, 1), (2, 1)] {
            let k = taylor_coeffs(&f, l, m, spec).unwrap();
            for (_, v) in k.entries() {
                assert!(v.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn bilinear_monomial() {
        // F = xi_0 eta_0: kappa_{1,1}(e0, e0) = 1, everything else ~ 0.
        let f = AnalyticFunction::from_fn(2, |xi, eta| xi[0] * eta[0]);
        let spec = ContourSpec::new(1.0, 1.0, 8).unwrap();
        let k = taylor_coeffs(&f, 1, 1, spec).unwrap();
        assert!((k.orbit(&[0], &[0]) - c(1.0, 0.0)).norm() < 1e-13);
        assert!(k.orbit(&[1], &[0]).norm() < 1e-13);
        let k20 = taylor_coeffs(&f, 2, 0, spec).unwrap();
        for (_, v) in k20.entries() {
            assert!(v.norm() < 1e-13);
        }
    }

    #[test]
    fn contour_exact_for_monomials_at_any_radius() {
        // Coefficients of a polynomial do not depend on the contour radius.
        let f = AnalyticFunction::from_fn(1, |xi, eta| {
            xi[0] * xi[0] * eta[0] * c(2.0, -1.0) + xi[0] * c(0.5, 0.0) + c(0.0, 3.0)
        });
        for r in [0.1, 0.5, 1.0, 4.0, 10.0] {
            let spec = ContourSpec::new(r, r, 12).unwrap();
            let k21 = taylor_coeffs(&f, 2, 1, spec).unwrap();
            assert!(
                (k21.orbit(&[0, 0], &[0]) - c(2.0, -1.0)).norm() < 1e-10,
                "radius {r}"
            );
            let k10 = taylor_coeffs(&f, 1, 0, spec).unwrap();
            assert!((k10.orbit(&[0], &[]) - c(0.5, 0.0)).norm() < 1e-10);
            let k00 = taylor_coeffs(&f, 0, 0, spec).unwrap();
            assert!((k00.orbit(&[], &[]) - c(0.0, 3.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn grid_table_matches_per_monomial_path() {
        let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
        let phi = random_chaos_vector(&space, 3, 2, 31);
        let f = AnalyticFunction::from_s_transform(&phi);
        let spec = ContourSpec::new(1.0, 1.0, ContourSpec::default_nodes(3)).unwrap();
        let table = taylor_table(&f, 3, 2, spec).unwrap();
        for (l, m) in [(0, 0), (1, 2), (3, 1), (2, 2)] {
            let single = taylor_coeffs(&f, l, m, spec).unwrap();
            let from_table = &table[&(l, m)];
            for (key, v) in single.entries() {
                let w = from_table.orbit(&key.0, &key.1);
                assert!((v - w).norm() < 1e-11, "({l},{m}) {key:?}: {v} vs {w}");
            }
        }
    }

    #[test]
    fn s_transform_round_trip() {
        let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
        for seed in 0..3 {
            let phi = random_chaos_vector(&space, 3, 3, 600 + seed);
            let f = AnalyticFunction::from_s_transform(&phi);
            let back = reconstruct_chaos(&f, &space, 3, 3, RadiusPolicy::Fixed(1.0)).unwrap();
            for (&(l, m), kernel) in phi.kernels() {
                let got = back.kernel(l, m).expect("bidegree recovered");
                for (key, v) in kernel.entries() {
                    let w = got.orbit(&key.0, &key.1);
                    assert!(
                        (v - w).norm() <= 1e-9 * v.norm().max(1e-3),
                        "seed {seed} ({l},{m}): {v} vs {w}"
                    );
                }
            }
        }
    }

    #[test]
    fn block_swap_round_trip() {
        // Swapping the argument blocks twice recovers the original
        // coefficients; swapping once transposes bidegrees.
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let phi = random_chaos_vector(&space, 2, 1, 77);
        let f = AnalyticFunction::from_s_transform(&phi);
        let swapped = f.swap_blocks();
        let twice = swapped.swap_blocks();
        let spec = ContourSpec::new(1.0, 1.0, 12).unwrap();
        let k_orig = taylor_coeffs(&f, 2, 1, spec).unwrap();
        let k_swap = taylor_coeffs(&swapped, 1, 2, spec).unwrap();
        let k_back = taylor_coeffs(&twice, 2, 1, spec).unwrap();
        for (key, v) in k_orig.entries() {
            assert!((k_back.orbit(&key.0, &key.1) - v).norm() < 1e-12);
            assert!((k_swap.orbit(&key.1, &key.0) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn optimal_radius_reproduces_proof_bound() {
        let u = exp_fn();
        // n = 1, K = 1: bound = (1/1!) l(1)^{1/2} = sqrt(e)
        let r1 = optimal_radius(&u, 1.0, 1).unwrap();
        assert_abs_diff_eq!(r1.log_bound, 0.5, epsilon = 1e-9);
        // n = 2, K = 1: bound = (4/2) l(2)^{1/2} = 2 (e^2/4)^{1/2} = e
        let r2 = optimal_radius(&u, 1.0, 2).unwrap();
        assert_abs_diff_eq!(r2.log_bound, 1.0, epsilon = 1e-9);
        // K = 4 multiplies the n = 2 bound by K^{n/2} = 4
        let r2k = optimal_radius(&u, 4.0, 2).unwrap();
        assert_abs_diff_eq!(r2k.log_bound, 1.0 + 4f64.ln(), epsilon = 1e-9);
        // and matches the direct formula with the numeric Legendre value
        let direct = 0.5 * legendre_log(&u, 2.0).unwrap() + 2.0 * 2f64.ln() - log_factorial(2);
        assert!((r2.log_bound - direct).abs() <= 1e-6 * direct.abs().max(1.0));
    }

    #[test]
    fn growth_certificate_basics() {
        let space = SpaceModel::new(vec![2.0, 2.0]).unwrap();
        let u = exp_fn();
        let cloud = SampleCloud::generate(2, 16, 8.0, 5);
        // F = 1 against U0 weights: C_hat = 1 at the origin.
        let one = AnalyticFunction::from_fn(2, |_, _| c(1.0, 0.0));
        let cert = check_growth_condition(&one, &space, &u, &u, 1.0, 1.0, 0.0, 0.0, None, &cloud);
        assert_abs_diff_eq!(cert.c_hat, 1.0, epsilon = 1e-12);
        assert_eq!(cert.argmax_index, 0);
        // claiming C = 1 holds; claiming C = 0.5 is violated at the origin
        let ok =
            check_growth_condition(&one, &space, &u, &u, 1.0, 1.0, 0.0, 0.0, Some(1.0), &cloud);
        assert!(ok.claim_holds());
        let bad =
            check_growth_condition(&one, &space, &u, &u, 1.0, 1.0, 0.0, 0.0, Some(0.5), &cloud);
        assert!(!bad.claim_holds());
    }

    #[test]
    fn exponential_needs_large_enough_k() {
        let space = SpaceModel::new(vec![2.0, 2.0]).unwrap();
        let u = exp_fn();
        // F = exp(2 <xi0, xi>) has |F|^2 = exp(4 Re<xi0, xi>), dominated by
        // exp(|xi|^2) weights at large radius: finite measured constant.
        let xi0 = [c(1.5, 0.0), c(0.0, 0.0)];
        let f = AnalyticFunction::from_fn(2, move |xi, _| {
            (2.0 * (xi0[0] * xi[0] + xi0[1] * xi[1])).exp()
        });
        let cloud = SampleCloud::generate(2, 32, 32.0, 6);
        let cert = check_growth_condition(&f, &space, &u, &u, 1.0, 1.0, 0.0, 0.0, None, &cloud);
        assert!(cert.c_hat.is_finite());
        assert!(cert.c_hat >= 1.0);
        // F = exp(xi_0^2) outgrows any linear-exponent weight along the axis.
        let g = AnalyticFunction::from_fn(2, |xi, _| (xi[0] * xi[0]).exp());
        let cert2 =
            check_growth_condition(&g, &space, &u, &u, 1.0, 1.0, 0.0, 0.0, Some(10.0), &cloud);
        assert!(!cert2.claim_holds(), "c_hat = {}", cert2.c_hat);
    }

    #[test]
    fn kernel_bounds_pipeline() {
        // End-to-end soundness: kernels extracted from an S-transform obey
        // the bound with the growth constant measured from the same F.
        let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
        let u = exp_fn(); // self-dual
        let phi = random_chaos_vector(&space, 3, 3, 444);
        let f = AnalyticFunction::from_s_transform(&phi);
        let cloud = SampleCloud::generate(2, 24, 8.0, 7);
        let cert = check_growth_condition(&f, &space, &u, &u, 1.0, 1.0, 1.0, 1.0, None, &cloud);
        let spec = ContourSpec::new(1.0, 1.0, ContourSpec::default_nodes(3)).unwrap();
        let kernels = taylor_table(&f, 3, 3, spec).unwrap();
        let report = verify_kernel_bounds(
            &kernels,
            &space,
            cert.c_hat,
            1.0,
            1.0,
            1.0,
            1.0,
            3.0,
            3.0,
            &u,
            &u,
            BoundDirection::DualSide,
        )
        .unwrap();
        assert!(report.holds(), "{}", report.detail);

        // An inflated kernel is rejected with the offending bidegree.
        let mut tampered = kernels.clone();
        if let Some(k) = tampered.get_mut(&(2, 1)) {
            *k = k.scale(c(1e6, 0.0));
        }
        let report = verify_kernel_bounds(
            &tampered,
            &space,
            cert.c_hat,
            1.0,
            1.0,
            1.0,
            1.0,
            3.0,
            3.0,
            &u,
            &u,
            BoundDirection::DualSide,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Fails);
        assert_abs_diff_eq!(report.data["worst_l"], 2.0);
        assert_abs_diff_eq!(report.data["worst_m"], 1.0);
    }

    #[test]
    fn kernel_bounds_zero_kernels_hold() {
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let u = exp_fn();
        let mut kernels = BTreeMap::new();
        kernels.insert((0usize, 0usize), KernelTensor::zero(1, 0, 0));
        let report = verify_kernel_bounds(
            &kernels,
            &space,
            1.0,
            1.0,
            1.0,
            1.0,
            1.0,
            3.0,
            3.0,
            &u,
            &u,
            BoundDirection::DualSide,
        )
        .unwrap();
        assert!(report.holds());
        assert_eq!(report.margin, f64::INFINITY);
    }

    #[test]
    fn kernel_bound_preconditions() {
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let u = exp_fn();
        let kernels = BTreeMap::new();
        // wrong ordering
        assert!(verify_kernel_bounds(
            &kernels,
            &space,
            1.0,
            1.0,
            1.0,
            3.0,
            3.0,
            1.0,
            1.0,
            &u,
            &u,
            BoundDirection::DualSide
        )
        .is_err());
        // K e^2 hs >= 1 (level gap too small for this K)
        assert!(verify_kernel_bounds(
            &kernels,
            &space,
            1.0,
            8.0,
            8.0,
            1.0,
            1.0,
            2.0,
            2.0,
            &u,
            &u,
            BoundDirection::DualSide
        )
        .is_err());
    }

    #[test]
    fn test_side_direction_runs() {
        // Same checker, mirrored ordering: growth measured at -p (the big
        // space), kernels bounded at +q with q < p.
        let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
        let u = exp_fn();
        let phi = random_chaos_vector(&space, 2, 2, 321);
        let f = AnalyticFunction::from_s_transform(&phi);
        let cloud = SampleCloud::generate(2, 16, 8.0, 8);
        let cert = check_growth_condition(&f, &space, &u, &u, 1.0, 1.0, -3.0, -3.0, None, &cloud);
        let spec = ContourSpec::new(1.0, 1.0, 12).unwrap();
        let kernels = taylor_table(&f, 2, 2, spec).unwrap();
        let report = verify_kernel_bounds(
            &kernels,
            &space,
            cert.c_hat,
            1.0,
            1.0,
            3.0,
            3.0,
            1.0,
            1.0,
            &u,
            &u,
            BoundDirection::TestSide,
        )
        .unwrap();
        assert!(report.holds(), "{}", report.detail);
    }

    #[test]
    fn reconstruction_divides_out_the_transform_normalization() {
        // F = sqrt2 xi_0 is the transform of the single kernel e0 at
        // bidegree (1, 0); F = 1 reconstructs to the constant vector.
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let sqrt2 = std::f64::consts::SQRT_2;
        let f = AnalyticFunction::from_fn(1, move |xi, _| xi[0] * sqrt2);
        let phi = reconstruct_chaos(&f, &space, 2, 2, RadiusPolicy::Fixed(1.0)).unwrap();
        let k10 = phi.kernel(1, 0).expect("linear kernel present");
        assert!((k10.orbit(&[0], &[]) - c(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(phi.kernels().count(), 1);

        let one = AnalyticFunction::from_fn(1, |_, _| c(1.0, 0.0));
        let phi = reconstruct_chaos(&one, &space, 2, 2, RadiusPolicy::Fixed(1.0)).unwrap();
        assert!((phi.kernel(0, 0).unwrap().orbit(&[], &[]) - c(1.0, 0.0)).norm() < 1e-13);
        assert_eq!(phi.kernels().count(), 1);
    }

    #[test]
    fn polynomial_interchange_form() {
        let json = r#"{"terms": [
            {"idx_l": [0, 0], "idx_m": [], "re": 2.0, "im": 0.0},
            {"idx_l": [], "idx_m": [1], "re": 0.0, "im": -1.0}
        ]}"#;
        let f = AnalyticFunction::from_polynomial_json(2, json).unwrap();
        let xi = [c(3.0, 0.0), c(0.0, 0.0)];
        let eta = [c(0.0, 0.0), c(5.0, 0.0)];
        // 2 xi_0^2 - i eta_1 = 18 - 5i
        assert!((f.eval(&xi, &eta) - c(18.0, -5.0)).norm() < 1e-14);
        assert!(AnalyticFunction::from_polynomial_json(1, json).is_err());
    }

    #[test]
    fn optimal_radius_policy_round_trips() {
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let u = exp_fn();
        let phi = random_chaos_vector(&space, 2, 2, 888);
        let f = AnalyticFunction::from_s_transform(&phi).with_growth_profile(GrowthProfile {
            c: 10.0,
            k1: 1.0,
            k2: 1.0,
            p1: 1.0,
            p2: 1.0,
            u1: u.clone(),
            u2: u,
        });
        let back = reconstruct_chaos(&f, &space, 2, 2, RadiusPolicy::OptimalPerDegree).unwrap();
        for (&(l, m), kernel) in phi.kernels() {
            let got = back.kernel(l, m).expect("bidegree recovered");
            for (key, v) in kernel.entries() {
                let w = got.orbit(&key.0, &key.1);
                assert!((v - w).norm() <= 1e-8 * v.norm().max(1e-3), "({l},{m})");
            }
        }
    }
}
