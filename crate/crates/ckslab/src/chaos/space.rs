//! The eigenvalue scale behind all weighted norms.

use num_complex::Complex64;

use super::ChaosError;

/// Finite basis dimension `d` with eigenvalues `lambda_j > 1`, nondecreasing.
/// This is the diagonal model of the positive operator generating the space
/// scale: `|x|_p^2 = sum_j lambda_j^{2p} |x_j|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceModel {
    lambda: Vec<f64>,
}

impl SpaceModel {
    pub fn new(lambda: Vec<f64>) -> Result<SpaceModel, ChaosError> {
        if lambda.is_empty() {
            return Err(ChaosError::InvalidSpace("needs at least one eigenvalue".into()));
        }
        for w in lambda.windows(2) {
            if w[1] < w[0] {
                return Err(ChaosError::InvalidSpace("eigenvalues must be nondecreasing".into()));
            }
        }
        if lambda[0] <= 1.0 {
            return Err(ChaosError::InvalidSpace(format!(
                "eigenvalues must exceed 1, got {}",
                lambda[0]
            )));
        }
        Ok(SpaceModel { lambda })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// `rho = max_j lambda_j^{-1} < 1`.
    pub fn rho(&self) -> f64 {
        1.0 / self.lambda[0]
    }

    /// Squared Hilbert-Schmidt norm of the embedding between levels `q > p`:
    /// `sum_j lambda_j^{-2(q-p)}`, finite and decreasing in `q - p`.
    pub fn hs_embedding_sq(&self, q: f64, p: f64) -> f64 {
        debug_assert!(q > p, "embedding norm needs q > p");
        self.lambda.iter().map(|l| l.powf(-2.0 * (q - p))).sum()
    }

    /// `|x|_p^2 = sum_j lambda_j^{2p} |x_j|^2`; `p` may be negative.
    pub fn weighted_norm_sq(&self, x: &[Complex64], p: f64) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(&self.lambda)
            .map(|(xj, l)| l.powf(2.0 * p) * xj.norm_sqr())
            .sum()
    }

    /// Real-vector version of [`Self::weighted_norm_sq`].
    pub fn weighted_norm_sq_real(&self, x: &[f64], p: f64) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(&self.lambda)
            .map(|(xj, l)| l.powf(2.0 * p) * xj * xj)
            .sum()
    }

    /// Complex bilinear form `<x, x>_p = sum_j lambda_j^{2p} x_j^2`
    /// (no conjugation; used by the omega test function).
    pub fn weighted_bilinear(&self, x: &[Complex64], p: f64) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim());
        x.iter()
            .zip(&self.lambda)
            .map(|(xj, l)| xj * xj * l.powf(2.0 * p))
            .sum()
    }

    /// Per-slot weight `lambda_j^{2p}` products over a multi-index.
    pub fn slot_weight(&self, idx: &[usize], p: f64) -> f64 {
        idx.iter().map(|&j| self.lambda[j].powf(2.0 * p)).product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn validation() {
        assert!(SpaceModel::new(vec![]).is_err());
        assert!(SpaceModel::new(vec![1.0]).is_err());
        assert!(SpaceModel::new(vec![2.0, 1.5]).is_err());
        let s = SpaceModel::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_abs_diff_eq!(s.rho(), 0.5);
    }

    #[test]
    fn hs_norm_decreases_in_gap() {
        let s = SpaceModel::new(vec![2.0, 3.0]).unwrap();
        let h1 = s.hs_embedding_sq(2.0, 1.0);
        let h2 = s.hs_embedding_sq(3.0, 1.0);
        assert_abs_diff_eq!(h1, 2f64.powi(-2) + 3f64.powi(-2), epsilon = 1e-14);
        assert!(h2 < h1);
    }

    #[test]
    fn weighted_norms() {
        let s = SpaceModel::new(vec![2.0]).unwrap();
        let x = [Complex64::new(3.0, 4.0)];
        assert_abs_diff_eq!(s.weighted_norm_sq(&x, 1.0), 4.0 * 25.0);
        assert_abs_diff_eq!(s.weighted_norm_sq(&x, -0.5), 25.0 / 2.0);
        let b = s.weighted_bilinear(&x, 0.5);
        // (3+4i)^2 * 2 = (-7 + 24i) * 2
        assert_abs_diff_eq!(b.re, -14.0);
        assert_abs_diff_eq!(b.im, 48.0);
    }
}
