//! Chaos vectors: finitely supported kernel families `f_{l,m}` over a
//! shared [`SpaceModel`], with the weighted norms, the bilinear pairing,
//! holomorphic evaluation, exponential vectors, and a multi-start estimator
//! for the weighted sup norm.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use super::{ChaosError, KernelTensor, MultiIndex, SpaceModel};
use crate::growth::{GrowthFunction, GrowthProperty};
use crate::numerics::{log_factorial, minimize_expanding};
use crate::transforms::{dual_growth_function, legendre_log, legendre_of_dual_closed_form};

/// A test/generalized function on the complex Gaussian space, represented
/// by finitely many kernels. Immutable by convention after construction:
/// all operations return new vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ChaosVector {
    space: SpaceModel,
    kernels: BTreeMap<(usize, usize), KernelTensor>,
}

impl ChaosVector {
    pub fn new(space: SpaceModel) -> ChaosVector {
        ChaosVector {
            space,
            kernels: BTreeMap::new(),
        }
    }

    /// The constant function `c` (single kernel at bidegree (0, 0)).
    pub fn constant(space: SpaceModel, c: Complex64) -> ChaosVector {
        let mut v = ChaosVector::new(space);
        let d = v.space.dim();
        let mut k = KernelTensor::zero(d, 0, 0);
        k.set_orbit(&[], &[], c).expect("constant kernel");
        v.kernels.insert((0, 0), k);
        v
    }

    pub fn space(&self) -> &SpaceModel {
        &self.space
    }

    pub fn insert_kernel(&mut self, k: KernelTensor) -> Result<(), ChaosError> {
        if k.dim() != self.space.dim() {
            return Err(ChaosError::SpaceMismatch);
        }
        self.kernels.insert(k.bidegree(), k);
        Ok(())
    }

    pub fn kernel(&self, l: usize, m: usize) -> Option<&KernelTensor> {
        self.kernels.get(&(l, m))
    }

    pub fn kernels(&self) -> impl Iterator<Item = (&(usize, usize), &KernelTensor)> {
        self.kernels.iter()
    }

    /// Maximum occupied degrees `(L, M)`.
    pub fn max_degrees(&self) -> (usize, usize) {
        let mut deg = (0, 0);
        for &(l, m) in self.kernels.keys() {
            deg.0 = deg.0.max(l);
            deg.1 = deg.1.max(m);
        }
        deg
    }

    /// `||phi||^2 = sum l! m! |f_{l,m}|_{0,0}^2`, the L2 norm over the
    /// complex Gaussian space.
    pub fn l2_norm(&self) -> f64 {
        self.kernels
            .iter()
            .map(|(&(l, m), k)| {
                (log_factorial(l) + log_factorial(m)).exp() * k.norm_sq_weighted(&self.space, 0.0, 0.0)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Test norm: `sqrt( sum |f_{l,m}|^2_{p1,p2} / (l_{u1}(l) l_{u2}(m)) )`.
    pub fn norm_test(
        &self,
        u1: &GrowthFunction,
        u2: &GrowthFunction,
        p1: f64,
        p2: f64,
    ) -> Result<f64, ChaosError> {
        let mut acc = 0.0;
        for (&(l, m), k) in &self.kernels {
            let w = legendre_log(u1, l as f64)? + legendre_log(u2, m as f64)?;
            acc += k.norm_sq_weighted(&self.space, p1, p2) * (-w).exp();
        }
        Ok(acc.sqrt())
    }

    /// Dual norm: `sqrt( sum |F_{l,m}|^2_{-p1,-p2} / (l_{u1*}(l) l_{u2*}(m)) )`.
    ///
    /// `l_{u*}` uses the closed form `e^{2n} / (l_u(n) n^{2n})` whenever the
    /// function claims (log, x^2)-convexity, and the numeric dual otherwise.
    pub fn norm_dual(
        &self,
        u1: &GrowthFunction,
        u2: &GrowthFunction,
        p1: f64,
        p2: f64,
    ) -> Result<f64, ChaosError> {
        let mut acc = 0.0;
        for (&(l, m), k) in &self.kernels {
            let w = log_legendre_of_dual(u1, l)? + log_legendre_of_dual(u2, m)?;
            acc += k.norm_sq_weighted(&self.space, -p1, -p2) * (-w).exp();
        }
        Ok(acc.sqrt())
    }

    /// Bilinear pairing `<<Phi, phi>> = sum l! m! <F_{l,m}, f_{l,m}>`
    /// (non-conjugating contraction).
    pub fn pairing(&self, other: &ChaosVector) -> Result<Complex64, ChaosError> {
        if self.space != other.space {
            return Err(ChaosError::SpaceMismatch);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(l, m), k) in &self.kernels {
            if let Some(o) = other.kernels.get(&(l, m)) {
                let w = (log_factorial(l) + log_factorial(m)).exp();
                acc += k.bilinear_pair(o) * w;
            }
        }
        Ok(acc)
    }

    /// Holomorphic evaluation `phi(x, y) = sum <f_{l,m}, x^l (x) y^m>` at
    /// independent complex arguments; exact for finitely supported vectors.
    pub fn evaluate(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        self.kernels
            .values()
            .map(|k| k.contract_powers(x, y))
            .sum()
    }

    /// Evaluation at real points (measure-side pairings integrate over
    /// real vectors).
    pub fn evaluate_real(&self, x: &[f64], y: &[f64]) -> Complex64 {
        let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let yc: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.evaluate(&xc, &yc)
    }

    pub fn scale(&self, c: Complex64) -> ChaosVector {
        ChaosVector {
            space: self.space.clone(),
            kernels: self
                .kernels
                .iter()
                .map(|(&k, t)| (k, t.scale(c)))
                .collect(),
        }
    }

    pub fn add(&self, other: &ChaosVector) -> Result<ChaosVector, ChaosError> {
        if self.space != other.space {
            return Err(ChaosError::SpaceMismatch);
        }
        let mut out = self.clone();
        for (&(l, m), k) in &other.kernels {
            match out.kernels.get_mut(&(l, m)) {
                Some(existing) => existing.add_assign(k),
                None => {
                    out.kernels.insert((l, m), k.clone());
                }
            }
        }
        Ok(out)
    }

    /// Coefficient-wise conjugate. At real points,
    /// `conj_coefficients(phi)(x, y) = conj(phi(x, y))`.
    pub fn conj_coefficients(&self) -> ChaosVector {
        ChaosVector {
            space: self.space.clone(),
            kernels: self.kernels.iter().map(|(&k, t)| (k, t.conj())).collect(),
        }
    }

    /// Pointwise product of evaluations, as a chaos vector of summed
    /// bidegrees. `|phi|^2` at real points is `phi.product(&phi.conj_coefficients())`.
    pub fn product(&self, other: &ChaosVector) -> Result<ChaosVector, ChaosError> {
        if self.space != other.space {
            return Err(ChaosError::SpaceMismatch);
        }
        let mut out = ChaosVector::new(self.space.clone());
        for (&(l1, m1), a) in &self.kernels {
            for (&(l2, m2), b) in &other.kernels {
                let prod = a.tensor_product(b);
                match out.kernels.get_mut(&(l1 + l2, m1 + m2)) {
                    Some(existing) => existing.add_assign(&prod),
                    None => {
                        out.kernels.insert((l1 + l2, m1 + m2), prod);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Estimate the weighted sup norm
    /// `sup |phi(x,y)| u1(|x|^2_{-p1})^{-1/2} u2(|y|^2_{-p2})^{-1/2}`
    /// over complex `(x, y)` by multi-start radial maximization plus a
    /// cyclic coordinate polish.
    ///
    /// Every reported value is attained at an evaluated feasible point, so
    /// the estimate is a certified lower bound of the true supremum;
    /// `budget` controls the number of random direction pairs.
    pub fn sup_norm_estimate(
        &self,
        u1: &GrowthFunction,
        u2: &GrowthFunction,
        p1: f64,
        p2: f64,
        budget: usize,
        seed: u64,
    ) -> SupNormEstimate {
        let d = self.space.dim();
        let objective = |x: &[Complex64], y: &[Complex64]| -> f64 {
            let v = self.evaluate(x, y);
            let wx = self.space.weighted_norm_sq(x, -p1);
            let wy = self.space.weighted_norm_sq(y, -p2);
            v.norm().ln() - 0.5 * u1.log_u(wx) - 0.5 * u2.log_u(wy)
        };

        let zero = vec![Complex64::new(0.0, 0.0); d];
        let mut best_g = objective(&zero, &zero);
        let mut best_x = zero.clone();
        let mut best_y = zero.clone();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut directions: Vec<(Vec<Complex64>, Vec<Complex64>)> = Vec::new();
        // Coordinate axes with both component phases, then random pairs.
        for j in 0..d {
            for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let mut ex = zero.clone();
                ex[j] = phase;
                directions.push((ex.clone(), zero.clone()));
                directions.push((zero.clone(), ex.clone()));
                let mut ey = zero.clone();
                ey[j] = phase;
                directions.push((ex, ey));
            }
        }
        for _ in 0..budget {
            let dx = random_unit(&mut rng, d);
            let dy = random_unit(&mut rng, d);
            directions.push((dx.clone(), zero.clone()));
            directions.push((zero.clone(), dy.clone()));
            directions.push((dx, dy));
        }

        for (dx, dy) in &directions {
            // Radial profile in log t; polynomial zeros make it multimodal,
            // so the non-unimodal path (coarse scan + refine) is used.
            let f = |s: f64| {
                let t = s.exp();
                let x: Vec<Complex64> = dx.iter().map(|&v| v * t).collect();
                let y: Vec<Complex64> = dy.iter().map(|&v| v * t).collect();
                -objective(&x, &y)
            };
            if let Ok(m) = minimize_expanding(&f, -30.0, 8.0, 1e-10, false) {
                if -m.value > best_g {
                    let t = m.x.exp();
                    best_g = -m.value;
                    best_x = dx.iter().map(|&v| v * t).collect();
                    best_y = dy.iter().map(|&v| v * t).collect();
                }
            }
        }

        // Cyclic coordinate polish over the 4d real coordinates.
        for _sweep in 0..2 {
            for block in 0..2 {
                for j in 0..d {
                    for part in 0..2 {
                        let f = |v: f64| {
                            let mut x = best_x.clone();
                            let mut y = best_y.clone();
                            let target = if block == 0 { &mut x[j] } else { &mut y[j] };
                            if part == 0 {
                                target.re = v;
                            } else {
                                target.im = v;
                            }
                            -objective(&x, &y)
                        };
                        let cur = if block == 0 { best_x[j] } else { best_y[j] };
                        let c = if part == 0 { cur.re } else { cur.im };
                        let w = c.abs().max(1.0);
                        let m = crate::numerics::golden_section(&f, c - w, c + w, 1e-10);
                        if -m.value > best_g {
                            best_g = -m.value;
                            let target = if block == 0 { &mut best_x[j] } else { &mut best_y[j] };
                            if part == 0 {
                                target.re = m.x;
                            } else {
                                target.im = m.x;
                            }
                        }
                    }
                }
            }
        }

        SupNormEstimate {
            value: best_g.exp(),
            argmax_x: best_x,
            argmax_y: best_y,
        }
    }

    /// Serialize to the interchange JSON format with floats printed to 17
    /// significant digits; see [`ChaosVector::from_json`]. The byte string
    /// is reproduced exactly by a serialize/parse/serialize round trip.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\"d\": ");
        let _ = write!(s, "{}", self.space.dim());
        s.push_str(", \"lambda\": [");
        for (i, l) in self.space.lambda().iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            s.push_str(&fmt_f64(*l));
        }
        s.push_str("], \"kernels\": [");
        let mut first_k = true;
        for (&(l, m), k) in &self.kernels {
            if !first_k {
                s.push_str(", ");
            }
            first_k = false;
            let _ = write!(s, "{{\"l\": {l}, \"m\": {m}, \"entries\": [");
            let mut first_e = true;
            for ((il, im), c) in k.entries() {
                if !first_e {
                    s.push_str(", ");
                }
                first_e = false;
                s.push_str("{\"idx_l\": [");
                push_indices(&mut s, il);
                s.push_str("], \"idx_m\": [");
                push_indices(&mut s, im);
                s.push_str("], \"re\": ");
                s.push_str(&fmt_f64(c.re));
                s.push_str(", \"im\": ");
                s.push_str(&fmt_f64(c.im));
                s.push('}');
            }
            s.push_str("]}");
        }
        s.push_str("]}");
        s
    }

    pub fn from_json(text: &str) -> Result<ChaosVector, ChaosError> {
        let raw: SerdeVector =
            serde_json::from_str(text).map_err(|e| ChaosError::Serialization(e.to_string()))?;
        if raw.lambda.len() != raw.d {
            return Err(ChaosError::Serialization(format!(
                "lambda has {} entries for d = {}",
                raw.lambda.len(),
                raw.d
            )));
        }
        let space = SpaceModel::new(raw.lambda)?;
        let mut v = ChaosVector::new(space);
        for kd in raw.kernels {
            let mut k = KernelTensor::zero(raw.d, kd.l, kd.m);
            for e in kd.entries {
                k.set_orbit(&e.idx_l, &e.idx_m, Complex64::new(e.re, e.im))?;
            }
            v.kernels.insert((kd.l, kd.m), k);
        }
        Ok(v)
    }
}

/// 17 significant digits, enough to reproduce any f64 exactly on parse.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_indices(s: &mut String, idx: &[usize]) {
    for (i, j) in idx.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{j}");
    }
}

#[derive(Deserialize)]
struct SerdeVector {
    d: usize,
    lambda: Vec<f64>,
    kernels: Vec<SerdeKernel>,
}

#[derive(Deserialize)]
struct SerdeKernel {
    l: usize,
    m: usize,
    entries: Vec<SerdeEntry>,
}

#[derive(Deserialize)]
struct SerdeEntry {
    idx_l: Vec<usize>,
    idx_m: Vec<usize>,
    re: f64,
    im: f64,
}

/// Result of [`ChaosVector::sup_norm_estimate`]: the best value found and
/// where it was attained.
#[derive(Debug, Clone)]
pub struct SupNormEstimate {
    pub value: f64,
    pub argmax_x: Vec<Complex64>,
    pub argmax_y: Vec<Complex64>,
}

/// `log l_{u*}(n)`, via the closed form when (log, x^2)-convexity is
/// claimed and via the numeric dual otherwise.
pub(crate) fn log_legendre_of_dual(u: &GrowthFunction, n: usize) -> Result<f64, ChaosError> {
    if u.claims(GrowthProperty::U3) || u.claims(GrowthProperty::LogX2Convex) {
        Ok(legendre_of_dual_closed_form(u, n as f64)?)
    } else {
        Ok(legendre_log(&dual_growth_function(u), n as f64)?)
    }
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d)
        .map(|_| {
            Complex64::new(
                rng.sample::<f64, _>(rand_distr::StandardNormal),
                rng.sample::<f64, _>(rand_distr::StandardNormal),
            )
        })
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in &mut v {
            *c /= norm;
        }
    } else {
        v[0] = Complex64::new(1.0, 0.0);
    }
    v
}

/// Truncated exponential vector: kernels
/// `f_{l,m} = (sqrt 2)^{l+m} / (l! m!) xi^l (x) eta^m` for `l <= cap_l`,
/// `m <= cap_m`. Its holomorphic evaluation converges to
/// `exp(sqrt 2 <x, xi> + sqrt 2 <y, eta>)` as the cutoffs grow.
pub fn exponential_vector(
    space: &SpaceModel,
    xi: &[Complex64],
    eta: &[Complex64],
    cap_l: usize,
    cap_m: usize,
) -> Result<ChaosVector, ChaosError> {
    let d = space.dim();
    if xi.len() != d || eta.len() != d {
        return Err(ChaosError::IndexOutOfRange(format!(
            "parameter vectors must have length {d}"
        )));
    }
    let mut v = ChaosVector::new(space.clone());
    let sqrt2 = std::f64::consts::SQRT_2;
    for l in 0..=cap_l {
        for m in 0..=cap_m {
            let scale = sqrt2.powi((l + m) as i32)
                * (-(log_factorial(l) + log_factorial(m))).exp();
            let mut k = KernelTensor::zero(d, l, m);
            let mut any = false;
            for il in multi_indices(d, l) {
                let px: Complex64 = il.iter().map(|&j| xi[j]).product();
                if px.norm_sqr() == 0.0 && l > 0 {
                    continue;
                }
                for im in multi_indices(d, m) {
                    let py: Complex64 = im.iter().map(|&j| eta[j]).product();
                    if py.norm_sqr() == 0.0 && m > 0 {
                        continue;
                    }
                    k.set_orbit(&il, &im, px * py * scale)?;
                    any = true;
                }
            }
            if any {
                v.insert_kernel(k)?;
            }
        }
    }
    Ok(v)
}

/// All sorted multi-indices of length `n` over `d` basis vectors.
pub fn multi_indices(d: usize, n: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(d: usize, n: usize, start: usize, cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in start..d {
            cur.push(j);
            rec(d, n, j, cur, out);
            cur.pop();
        }
    }
    rec(d, n, 0, &mut cur, &mut out);
    out
}

/// Random chaos vector with every orbit of every bidegree up to the caps
/// populated by i.i.d. complex standard normals scaled by
/// `1/sqrt(l! m! #entries)`, which keeps all norms O(1) across degrees.
pub fn random_chaos_vector(
    space: &SpaceModel,
    cap_l: usize,
    cap_m: usize,
    seed: u64,
) -> ChaosVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = space.dim();
    let mut v = ChaosVector::new(space.clone());
    for l in 0..=cap_l {
        for m in 0..=cap_m {
            let idx_l = multi_indices(d, l);
            let idx_m = multi_indices(d, m);
            let n_entries = (idx_l.len() * idx_m.len()) as f64;
            let scale =
                (-(0.5) * (log_factorial(l) + log_factorial(m) + n_entries.ln())).exp();
            let mut k = KernelTensor::zero(d, l, m);
            for il in &idx_l {
                for im in &idx_m {
                    let re: f64 = rng.sample(rand_distr::StandardNormal);
                    let im_: f64 = rng.sample(rand_distr::StandardNormal);
                    let c = Complex64::new(re, im_) / std::f64::consts::SQRT_2 * scale;
                    k.set_orbit(il, im, c).expect("enumerated indices are valid");
                }
            }
            v.insert_kernel(k).expect("same space");
        }
    }
    v
}

/// Random vector supported on the first block only (a function of `x`
/// alone), used by the positivity and pseudo-positivity probes.
pub fn random_single_block_vector(space: &SpaceModel, cap_l: usize, seed: u64) -> ChaosVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = space.dim();
    let mut v = ChaosVector::new(space.clone());
    for l in 0..=cap_l {
        let idx_l = multi_indices(d, l);
        let n_entries = idx_l.len() as f64;
        let scale = (-(0.5) * (log_factorial(l) + n_entries.ln())).exp();
        let mut k = KernelTensor::zero(d, l, 0);
        for il in &idx_l {
            let re: f64 = rng.sample(rand_distr::StandardNormal);
            let im_: f64 = rng.sample(rand_distr::StandardNormal);
            let c = Complex64::new(re, im_) / std::f64::consts::SQRT_2 * scale;
            k.set_orbit(il, &[], c).expect("enumerated indices are valid");
        }
        v.insert_kernel(k).expect("same space");
    }
    v
}
