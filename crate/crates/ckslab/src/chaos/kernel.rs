//! Symmetric kernels of bidegree `(l, m)` stored sparsely over sorted
//! multi-indices. Symmetry within each block holds by representation: one
//! coefficient per orbit of slot permutations, with the multinomial
//! multiplicity implied.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{ChaosError, SpaceModel};

/// Sorted tuple of basis indices, one entry per tensor slot.
pub type MultiIndex = Vec<usize>;

/// Number of distinct permutations of a sorted multi-index:
/// `n! / prod_i (count_i)!`.
pub fn multiplicity(idx: &[usize]) -> f64 {
    let n = idx.len();
    if n <= 1 {
        return 1.0;
    }
    // Exact in u128 for every degree this crate handles.
    let mut numer: u128 = 1;
    let mut k = 0u128; // slots consumed so far
    let mut run = 0u128;
    let mut prev = usize::MAX;
    for &j in idx {
        k += 1;
        if j == prev {
            run += 1;
        } else {
            run = 1;
            prev = j;
        }
        // multiply by C(k, run): choose positions of the current run
        numer = numer * k / run;
    }
    let _ = n;
    numer as f64
}

/// Binomial coefficient over small arguments, exact.
fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

fn counts(idx: &[usize]) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for &j in idx {
        *m.entry(j).or_insert(0) += 1;
    }
    m
}

/// A symmetric coefficient tensor of bidegree `(l, m)` over `C^d`.
///
/// `entries` maps `(sorted l-tuple, sorted m-tuple)` to the common value of
/// the dense tensor on that orbit. Entries with zero value may be present;
/// they are dropped on cleanup.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTensor {
    d: usize,
    l: usize,
    m: usize,
    entries: BTreeMap<(MultiIndex, MultiIndex), Complex64>,
}

impl KernelTensor {
    pub fn zero(d: usize, l: usize, m: usize) -> KernelTensor {
        KernelTensor {
            d,
            l,
            m,
            entries: BTreeMap::new(),
        }
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.l, self.m)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(MultiIndex, MultiIndex), &Complex64)> {
        self.entries.iter()
    }

    pub fn n_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|c| c.norm_sqr() == 0.0)
    }

    fn check_index(&self, idx_l: &[usize], idx_m: &[usize]) -> Result<(), ChaosError> {
        if idx_l.len() != self.l || idx_m.len() != self.m {
            return Err(ChaosError::IndexOutOfRange(format!(
                "expected bidegree ({}, {}), got index lengths ({}, {})",
                self.l,
                self.m,
                idx_l.len(),
                idx_m.len()
            )));
        }
        if idx_l.iter().chain(idx_m).any(|&j| j >= self.d) {
            return Err(ChaosError::IndexOutOfRange(format!(
                "basis index exceeds dimension {}",
                self.d
            )));
        }
        Ok(())
    }

    /// Set the orbit value at a (sorted) multi-index pair.
    pub fn set_orbit(
        &mut self,
        idx_l: &[usize],
        idx_m: &[usize],
        value: Complex64,
    ) -> Result<(), ChaosError> {
        self.check_index(idx_l, idx_m)?;
        let mut kl = idx_l.to_vec();
        let mut km = idx_m.to_vec();
        kl.sort_unstable();
        km.sort_unstable();
        self.entries.insert((kl, km), value);
        Ok(())
    }

    pub fn add_orbit(
        &mut self,
        idx_l: &[usize],
        idx_m: &[usize],
        value: Complex64,
    ) -> Result<(), ChaosError> {
        self.check_index(idx_l, idx_m)?;
        let mut kl = idx_l.to_vec();
        let mut km = idx_m.to_vec();
        kl.sort_unstable();
        km.sort_unstable();
        *self.entries.entry((kl, km)).or_insert(Complex64::new(0.0, 0.0)) += value;
        Ok(())
    }

    /// Add `c * sym(e_{j1} x ... x e_{jl}) x sym(e_{k1} x ... x e_{km})`:
    /// the block-symmetrized elementary tensor. The orbit value picks up
    /// `c / (mult_l * mult_m)`.
    pub fn add_sym_term(
        &mut self,
        idx_l: &[usize],
        idx_m: &[usize],
        c: Complex64,
    ) -> Result<(), ChaosError> {
        self.check_index(idx_l, idx_m)?;
        let mut kl = idx_l.to_vec();
        let mut km = idx_m.to_vec();
        kl.sort_unstable();
        km.sort_unstable();
        let w = multiplicity(&kl) * multiplicity(&km);
        *self.entries.entry((kl, km)).or_insert(Complex64::new(0.0, 0.0)) += c / w;
        Ok(())
    }

    pub fn orbit(&self, idx_l: &[usize], idx_m: &[usize]) -> Complex64 {
        let mut kl = idx_l.to_vec();
        let mut km = idx_m.to_vec();
        kl.sort_unstable();
        km.sort_unstable();
        self.entries
            .get(&(kl, km))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Weighted Frobenius norm squared
    /// `|k|_{p1,p2}^2 = sum mult_l mult_m prod lambda^{2p1} prod lambda^{2p2} |c|^2`.
    pub fn norm_sq_weighted(&self, space: &SpaceModel, p1: f64, p2: f64) -> f64 {
        self.entries
            .iter()
            .map(|((il, im), c)| {
                multiplicity(il)
                    * multiplicity(im)
                    * space.slot_weight(il, p1)
                    * space.slot_weight(im, p2)
                    * c.norm_sqr()
            })
            .sum()
    }

    /// Contraction against pure tensor powers: `<k, x^l (x) y^m>`.
    pub fn contract_powers(&self, x: &[Complex64], y: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((il, im), c) in &self.entries {
            let mut term = *c * (multiplicity(il) * multiplicity(im));
            for &j in il {
                term *= x[j];
            }
            for &j in im {
                term *= y[j];
            }
            acc += term;
        }
        acc
    }

    /// Bilinear (non-conjugating) pairing with another kernel of the same
    /// bidegree: the dense contraction `sum_tuples F[t] G[t]`.
    pub fn bilinear_pair(&self, other: &KernelTensor) -> Complex64 {
        debug_assert_eq!(self.bidegree(), other.bidegree());
        let mut acc = Complex64::new(0.0, 0.0);
        for ((il, im), c) in &self.entries {
            if let Some(o) = other.entries.get(&(il.clone(), im.clone())) {
                acc += *c * *o * (multiplicity(il) * multiplicity(im));
            }
        }
        acc
    }

    /// Coefficient-wise complex conjugate.
    pub fn conj(&self) -> KernelTensor {
        KernelTensor {
            d: self.d,
            l: self.l,
            m: self.m,
            entries: self
                .entries
                .iter()
                .map(|(k, c)| (k.clone(), c.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> KernelTensor {
        KernelTensor {
            d: self.d,
            l: self.l,
            m: self.m,
            entries: self.entries.iter().map(|(k, v)| (k.clone(), *v * c)).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &KernelTensor) {
        debug_assert_eq!(self.bidegree(), other.bidegree());
        for (k, v) in &other.entries {
            *self.entries.entry(k.clone()).or_insert(Complex64::new(0.0, 0.0)) += *v;
        }
    }

    /// Symmetrized tensor product: the kernel of the pointwise product of
    /// the two evaluations, of bidegree `(l1+l2, m1+m2)`.
    pub fn tensor_product(&self, other: &KernelTensor) -> KernelTensor {
        let mut out = KernelTensor::zero(self.d, self.l + other.l, self.m + other.m);
        for ((al, am), ca) in &self.entries {
            for ((bl, bm), cb) in &other.entries {
                let ml = merge_sorted(al, bl);
                let mm = merge_sorted(am, bm);
                let w = block_split_weight(&ml, al) * block_split_weight(&mm, am);
                *out.entries.entry((ml, mm)).or_insert(Complex64::new(0.0, 0.0)) +=
                    *ca * *cb * w;
            }
        }
        out
    }

    /// Drop entries whose modulus is below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.entries.retain(|_, c| c.norm() > tol);
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> MultiIndex {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Fraction of slot permutations of `merged` whose first block realizes the
/// sub-multiset `alpha`:
/// `prod_i C(count_i(merged), count_i(alpha)) / C(n, |alpha|)`.
fn block_split_weight(merged: &[usize], alpha: &[usize]) -> f64 {
    if merged.is_empty() {
        return 1.0;
    }
    let cm = counts(merged);
    let ca = counts(alpha);
    let mut w = 1.0;
    for (&j, &c_alpha) in &ca {
        w *= binomial(cm[&j], c_alpha);
    }
    w / binomial(merged.len(), alpha.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn multiplicities() {
        assert_abs_diff_eq!(multiplicity(&[]), 1.0);
        assert_abs_diff_eq!(multiplicity(&[0]), 1.0);
        assert_abs_diff_eq!(multiplicity(&[0, 1]), 2.0);
        assert_abs_diff_eq!(multiplicity(&[0, 0]), 1.0);
        assert_abs_diff_eq!(multiplicity(&[0, 0, 1]), 3.0);
        assert_abs_diff_eq!(multiplicity(&[0, 1, 2]), 6.0);
        assert_abs_diff_eq!(multiplicity(&[0, 0, 1, 1]), 6.0);
    }

    #[test]
    fn sym_term_of_distinct_indices() {
        // sym(e0 x e1) stores 1/2 on orbit (0,1); contraction with x^2
        // recovers x0 x1.
        let mut k = KernelTensor::zero(2, 2, 0);
        k.add_sym_term(&[0, 1], &[], c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(k.orbit(&[0, 1], &[]).re, 0.5);
        let x = [c(3.0, 0.0), c(5.0, 0.0)];
        let v = k.contract_powers(&x, &[]);
        assert_abs_diff_eq!(v.re, 15.0, epsilon = 1e-14);
        // Frobenius norm^2 of sym(e0 x e1) is 1/2.
        let space = SpaceModel::new(vec![2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(k.norm_sq_weighted(&space, 0.0, 0.0), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn weighted_norm_with_eigenvalues() {
        // f_{1,1} = e0 x e0, lambda_0 = 2, p1 = p2 = 1: |f|^2 = 2^2 * 2^2.
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let mut k = KernelTensor::zero(1, 1, 1);
        k.set_orbit(&[0], &[0], c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(k.norm_sq_weighted(&space, 1.0, 1.0), 16.0);
        assert_abs_diff_eq!(k.norm_sq_weighted(&space, -1.0, 0.0), 0.25);
    }

    #[test]
    fn bilinear_pairing_counts_orbits() {
        let mut a = KernelTensor::zero(2, 2, 0);
        a.set_orbit(&[0, 1], &[], c(0.5, 0.0)).unwrap();
        let b = a.clone();
        // dense pairing: 2 tuples x (1/2)^2 = 1/2
        assert_abs_diff_eq!(a.bilinear_pair(&b).re, 0.5);
    }

    #[test]
    fn tensor_product_matches_pointwise_evaluation() {
        let x = [c(0.7, 0.2), c(-1.3, 0.4)];
        let y = [c(0.1, -0.9), c(2.0, 0.3)];
        let mut a = KernelTensor::zero(2, 1, 1);
        a.set_orbit(&[0], &[1], c(1.5, -0.5)).unwrap();
        a.set_orbit(&[1], &[0], c(0.25, 0.0)).unwrap();
        let mut b = KernelTensor::zero(2, 2, 0);
        b.set_orbit(&[0, 1], &[], c(0.5, 0.5)).unwrap();
        b.set_orbit(&[0, 0], &[], c(-1.0, 0.0)).unwrap();
        let prod = a.tensor_product(&b);
        assert_eq!(prod.bidegree(), (3, 1));
        let lhs = prod.contract_powers(&x, &y);
        let rhs = a.contract_powers(&x, &y) * b.contract_powers(&x, &y);
        assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn product_with_repeated_indices() {
        // (e0 . x)(e0 . x) = x0^2 must give orbit value 1 at (0,0).
        let mut a = KernelTensor::zero(1, 1, 0);
        a.set_orbit(&[0], &[], c(1.0, 0.0)).unwrap();
        let p = a.tensor_product(&a);
        assert_abs_diff_eq!(p.orbit(&[0, 0], &[]).re, 1.0);
    }

    #[test]
    fn index_validation() {
        let mut k = KernelTensor::zero(2, 1, 0);
        assert!(k.set_orbit(&[2], &[], c(1.0, 0.0)).is_err());
        assert!(k.set_orbit(&[0, 1], &[], c(1.0, 0.0)).is_err());
    }
}
