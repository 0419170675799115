//! The multiple S-transform in its two forms: the pairing form
//! `sum 2^{(l+m)/2} <F_{l,m}, xi^l (x) eta^m>`, and the integral form
//! `E[phi(x + sqrt2 xi, y + sqrt2 eta)]` over two independent standard
//! complex Gaussians, evaluated by tensorized Gauss-Hermite quadrature.
//!
//! The pairing normalization `2^{(l+m)/2}` is exactly what pairing against
//! the exponential vector's kernels produces, and the two forms agree on
//! polynomials up to quadrature exactness (tested, not assumed).

use num_complex::Complex64;

use super::{ChaosError, ChaosVector};
use crate::quadrature::complex_gaussian_expectation;

/// Pairing form of the multiple S-transform.
pub fn s_transform(phi: &ChaosVector, xi: &[Complex64], eta: &[Complex64]) -> Complex64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    phi.kernels()
        .map(|(&(l, m), k)| k.contract_powers(xi, eta) * sqrt2.powi((l + m) as i32))
        .sum()
}

/// Result of the quadrature form: the value plus whether the requested
/// order is certified exact for the vector's polynomial degree.
#[derive(Debug, Clone, Copy)]
pub struct IntegralSTransform {
    pub value: Complex64,
    /// True when `order >= degree/2 + 1`, so the Gauss-Hermite rule is
    /// exact for every monomial of the vector.
    pub exact: bool,
    pub order: usize,
}

/// Integral form of the multiple S-transform:
/// `int int phi(x + sqrt2 xi, y + sqrt2 eta) mu'(dx) mu'(dy)` with each of
/// `x`, `y` a standard complex Gaussian on `C^d` (2d real Gauss-Hermite
/// dimensions per factor).
pub fn s_transform_integral(
    phi: &ChaosVector,
    xi: &[Complex64],
    eta: &[Complex64],
    order: usize,
) -> Result<IntegralSTransform, ChaosError> {
    let d = phi.space().dim();
    if xi.len() != d || eta.len() != d {
        return Err(ChaosError::IndexOutOfRange(format!(
            "shift vectors must have length {d}"
        )));
    }
    let (deg_l, deg_m) = phi.max_degrees();
    let degree = deg_l.max(deg_m);
    let exact = order > degree / 2;
    let sqrt2 = std::f64::consts::SQRT_2;
    // One tensor grid over both factors: first d complex coordinates are x,
    // the rest are y.
    let value = complex_gaussian_expectation(2 * d, order, |z| {
        let x: Vec<Complex64> = (0..d).map(|j| z[j] + xi[j] * sqrt2).collect();
        let y: Vec<Complex64> = (0..d).map(|j| z[d + j] + eta[j] * sqrt2).collect();
        phi.evaluate(&x, &y)
    });
    Ok(IntegralSTransform {
        value,
        exact,
        order,
    })
}
