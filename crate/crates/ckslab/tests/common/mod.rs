//! Shared independent oracles for the integration tests. Everything here
//! recomputes quantities over dense enumerations, deliberately avoiding the
//! sparse multi-index code paths it is used to check.
//!
//! Each integration target uses its own subset of these helpers.
#![allow(dead_code)]

use ckslab::chaos::{ChaosVector, KernelTensor, SpaceModel};
use ckslab::growth::GrowthFunction;
use num_complex::Complex64;

/// Dense tensor of bidegree `(l, m)` over `C^d`: one value per full index
/// tuple, enumerated lexicographically.
pub struct DenseTensor {
    pub d: usize,
    pub l: usize,
    pub m: usize,
    pub values: Vec<Complex64>,
}

fn tuples(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * d);
        for t in &out {
            for j in 0..d {
                let mut e = t.clone();
                e.push(j);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

impl DenseTensor {
    /// Expand a sparse kernel into the full tuple array.
    pub fn from_kernel(k: &KernelTensor) -> DenseTensor {
        let d = k.dim();
        let (l, m) = k.bidegree();
        let lt = tuples(d, l);
        let mt = tuples(d, m);
        let mut values = Vec::with_capacity(lt.len() * mt.len());
        for a in &lt {
            for b in &mt {
                values.push(k.orbit(a, b));
            }
        }
        DenseTensor { d, l, m, values }
    }

    pub fn norm_sq_weighted(&self, space: &SpaceModel, p1: f64, p2: f64) -> f64 {
        let lt = tuples(self.d, self.l);
        let mt = tuples(self.d, self.m);
        let mut acc = 0.0;
        let mut i = 0;
        for a in &lt {
            for b in &mt {
                let w1: f64 = a.iter().map(|&j| space.lambda()[j].powf(2.0 * p1)).product();
                let w2: f64 = b.iter().map(|&j| space.lambda()[j].powf(2.0 * p2)).product();
                acc += w1 * w2 * self.values[i].norm_sqr();
                i += 1;
            }
        }
        acc
    }

    pub fn contract(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let lt = tuples(self.d, self.l);
        let mt = tuples(self.d, self.m);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut i = 0;
        for a in &lt {
            for b in &mt {
                let mut v = self.values[i];
                for &j in a {
                    v *= x[j];
                }
                for &j in b {
                    v *= y[j];
                }
                acc += v;
                i += 1;
            }
        }
        acc
    }

    pub fn bilinear_pair(&self, other: &DenseTensor) -> Complex64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Check that the stored values are symmetric within each block.
    pub fn is_block_symmetric(&self, tol: f64) -> bool {
        let lt = tuples(self.d, self.l);
        let mt = tuples(self.d, self.m);
        let index = |a: &[usize], b: &[usize]| -> usize {
            let mut ia = 0;
            for &j in a {
                ia = ia * self.d + j;
            }
            let mut ib = 0;
            for &j in b {
                ib = ib * self.d + j;
            }
            ia * mt.len() + ib
        };
        for a in &lt {
            for b in &mt {
                let mut sa = a.clone();
                sa.sort_unstable();
                let mut sb = b.clone();
                sb.sort_unstable();
                let v = self.values[index(a, b)];
                let w = self.values[index(&sa, &sb)];
                if (v - w).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Dense L2 norm of a chaos vector: `sqrt(sum l! m! |f|^2)` over the full
/// tuple arrays.
pub fn dense_l2(phi: &ChaosVector) -> f64 {
    let space = phi.space();
    let mut acc = 0.0;
    for (&(l, m), k) in phi.kernels() {
        let fact: f64 =
            (1..=l).map(|i| i as f64).product::<f64>() * (1..=m).map(|i| i as f64).product::<f64>();
        acc += fact * DenseTensor::from_kernel(k).norm_sq_weighted(space, 0.0, 0.0);
    }
    acc.sqrt()
}

/// Dense bilinear pairing of two chaos vectors.
pub fn dense_pairing(a: &ChaosVector, b: &ChaosVector) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(l, m), ka) in a.kernels() {
        if let Some(kb) = b.kernel(l, m) {
            let fact: f64 = (1..=l).map(|i| i as f64).product::<f64>()
                * (1..=m).map(|i| i as f64).product::<f64>();
            acc += DenseTensor::from_kernel(ka).bilinear_pair(&DenseTensor::from_kernel(kb)) * fact;
        }
    }
    acc
}

/// Dense evaluation of a chaos vector.
pub fn dense_evaluate(phi: &ChaosVector, x: &[Complex64], y: &[Complex64]) -> Complex64 {
    phi.kernels()
        .map(|(_, k)| DenseTensor::from_kernel(k).contract(x, y))
        .sum()
}

/// Independent Legendre oracle: minimize `log u(r) - t log r` over a dense
/// geometric grid of `n` points spanning `[1e-6, 1e6]`.
pub fn dense_grid_legendre(u: &GrowthFunction, t: f64, n: usize) -> f64 {
    let lo = 1e-6f64.ln();
    let hi = 1e6f64.ln();
    let h = (hi - lo) / (n as f64 - 1.0);
    let mut best = f64::INFINITY;
    for i in 0..n {
        let x = lo + h * i as f64;
        let v = u.log_u(x.exp()) - t * x;
        if v < best {
            best = v;
        }
    }
    best
}

/// Relative agreement in the log domain with an absolute floor of 1.
pub fn log_rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
