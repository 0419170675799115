//! Gauss-Hermite quadrature (physicists' weight `exp(-x^2)`) and tensorized
//! expectations against the standard complex Gaussian, used by the integral
//! form of the S-transform and the norm-equivalence constant.

use num_complex::Complex64;

/// Nodes and weights for the rule `int f(x) exp(-x^2) dx ~ sum w_i f(x_i)`.
///
/// Nodes are the roots of the degree-n Hermite polynomial, found by Newton
/// iteration on the three-term recurrence; a rule of order n is exact for
/// polynomials of degree `2n - 1`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> GaussHermite {
        assert!(n >= 1, "quadrature order must be >= 1");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let sqrt_pi = std::f64::consts::PI.sqrt();
        // Roots come in +/- pairs; compute the upper half.
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..m {
            // Standard initial guesses (Numerical Recipes style).
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                // Orthonormal Hermite recurrence.
                let mut p1 = std::f64::consts::PI.powf(-0.25);
                let mut p2 = 0.0;
                for j in 0..n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() < 1e-15 {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        // Nodes ascend for deterministic summation order.
        nodes.reverse();
        weights.reverse();
        let _ = sqrt_pi;
        GaussHermite { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `int f(x) exp(-x^2) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Expectation against N(0, 1/2): the Gauss-Hermite variable itself,
    /// normalized by 1/sqrt(pi).
    pub fn gaussian_half_expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.integrate(f) / std::f64::consts::PI.sqrt()
    }
}

/// Expectation `E[g(z)]` for `z` a standard complex Gaussian vector on C^d
/// (real and imaginary parts independent N(0, 1/2) per coordinate, so
/// `E[z_j conj(z_k)] = delta_jk`), by a full tensor Gauss-Hermite grid over
/// the 2d real dimensions.
pub fn complex_gaussian_expectation(
    d: usize,
    order: usize,
    g: impl Fn(&[Complex64]) -> Complex64,
) -> Complex64 {
    let rule = GaussHermite::new(order);
    let dims = 2 * d;
    let norm = std::f64::consts::PI.powf(-(dims as f64) / 2.0);
    let mut idx = vec![0usize; dims];
    let mut z = vec![Complex64::new(0.0, 0.0); d];
    let mut acc = Complex64::new(0.0, 0.0);
    loop {
        let mut w = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            w *= rule.weights[i];
            let v = rule.nodes[i];
            if k % 2 == 0 {
                z[k / 2].re = v;
            } else {
                z[k / 2].im = v;
            }
        }
        acc += g(&z) * w;
        // Odometer increment over the tensor grid.
        let mut k = 0;
        loop {
            if k == dims {
                return acc * norm;
            }
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Real-valued convenience wrapper over [`complex_gaussian_expectation`].
pub fn complex_gaussian_expectation_re(
    d: usize,
    order: usize,
    g: impl Fn(&[Complex64]) -> f64,
) -> f64 {
    complex_gaussian_expectation(d, order, |z| Complex64::new(g(z), 0.0)).re
}
