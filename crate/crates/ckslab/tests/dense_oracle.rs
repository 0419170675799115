//! Sparse-vs-dense reference checks: everything the multi-index storage
//! computes (norms, contractions, pairings, evaluations) must match a
//! dense full-tuple implementation to 1e-12 relative for `d <= 3`,
//! `l + m <= 4`.

mod common;

use ckslab::chaos::{
    exponential_vector, random_chaos_vector, s_transform, s_transform_integral, ChaosVector,
    KernelTensor, SpaceModel,
};
use common::{dense_evaluate, dense_l2, dense_pairing, DenseTensor};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spaces() -> Vec<SpaceModel> {
    vec![
        SpaceModel::new(vec![2.0]).unwrap(),
        SpaceModel::new(vec![2.0, 3.0]).unwrap(),
        SpaceModel::new(vec![1.5, 2.0, 4.0]).unwrap(),
    ]
}

#[test]
fn weighted_norms_match_dense() {
    for space in spaces() {
        let d = space.dim();
        for (cap_l, cap_m) in [(2, 2), (3, 1), (4, 0)] {
            let phi = random_chaos_vector(&space, cap_l, cap_m, 42 + d as u64);
            for (_, k) in phi.kernels() {
                let dense = DenseTensor::from_kernel(k);
                for (p1, p2) in [(0.0, 0.0), (1.0, 0.5), (-1.0, 2.0)] {
                    let sparse = k.norm_sq_weighted(&space, p1, p2);
                    let full = dense.norm_sq_weighted(&space, p1, p2);
                    assert!(
                        (sparse - full).abs() <= 1e-12 * full.max(1e-300),
                        "d={d} deg={:?} p=({p1},{p2}): {sparse} vs {full}",
                        k.bidegree()
                    );
                }
            }
        }
    }
}

#[test]
fn pairings_and_evaluations_match_dense() {
    for space in spaces() {
        let d = space.dim();
        let a = random_chaos_vector(&space, 2, 2, 7);
        let b = random_chaos_vector(&space, 2, 2, 8);
        let pair_sparse = a.pairing(&b).unwrap();
        let pair_dense = dense_pairing(&a, &b);
        assert!((pair_sparse - pair_dense).norm() <= 1e-12 * pair_dense.norm().max(1.0));

        assert!((a.l2_norm() - dense_l2(&a)).abs() <= 1e-12 * dense_l2(&a));

        let x: Vec<Complex64> = (0..d).map(|j| c(0.3 + 0.1 * j as f64, -0.2)).collect();
        let y: Vec<Complex64> = (0..d).map(|j| c(-0.5, 0.4 - 0.1 * j as f64)).collect();
        let ev_sparse = a.evaluate(&x, &y);
        let ev_dense = dense_evaluate(&a, &x, &y);
        assert!((ev_sparse - ev_dense).norm() <= 1e-12 * ev_dense.norm().max(1.0));
    }
}

#[test]
fn products_match_dense() {
    let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
    let a = random_chaos_vector(&space, 2, 1, 17);
    let b = random_chaos_vector(&space, 1, 2, 18);
    let prod = a.product(&b).unwrap();
    let x = [c(0.6, 0.1), c(-0.4, 0.9)];
    let y = [c(0.2, -0.7), c(1.1, 0.0)];
    let lhs = dense_evaluate(&prod, &x, &y);
    let rhs = dense_evaluate(&a, &x, &y) * dense_evaluate(&b, &x, &y);
    assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
}

#[test]
fn symmetrization_projects_onto_symmetric_tensors() {
    // add_sym_term builds tensors whose dense expansion is symmetric
    // within each block, regardless of input tuple order.
    let mut k = KernelTensor::zero(3, 3, 2);
    k.add_sym_term(&[2, 0, 1], &[1, 0], c(1.0, -2.0)).unwrap();
    k.add_sym_term(&[0, 0, 2], &[1, 1], c(0.5, 0.5)).unwrap();
    let dense = DenseTensor::from_kernel(&k);
    assert!(dense.is_block_symmetric(1e-14));
}

#[test]
fn exponential_vector_kernels_match_dense_formula() {
    // Dense check of f_{l,m} = (sqrt2)^{l+m}/(l! m!) xi^l (x) eta^m.
    let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
    let xi = [c(0.7, -0.1), c(0.3, 0.2)];
    let eta = [c(-0.2, 0.5), c(0.1, 0.0)];
    let ev = exponential_vector(&space, &xi, &eta, 3, 3).unwrap();
    let sqrt2 = std::f64::consts::SQRT_2;
    for (&(l, m), k) in ev.kernels() {
        let dense = DenseTensor::from_kernel(k);
        let fact: f64 = (1..=l).map(|i| i as f64).product::<f64>()
            * (1..=m).map(|i| i as f64).product::<f64>();
        let scale = sqrt2.powi((l + m) as i32) / fact;
        let mut i = 0;
        // enumerate tuples in the same order as DenseTensor
        fn tuples(d: usize, n: usize) -> Vec<Vec<usize>> {
            let mut out = vec![Vec::new()];
            for _ in 0..n {
                let mut next = Vec::new();
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
        for a in tuples(2, l) {
            for b in tuples(2, m) {
                let expect: Complex64 = a.iter().map(|&j| xi[j]).product::<Complex64>()
                    * b.iter().map(|&j| eta[j]).product::<Complex64>()
                    * scale;
                assert!(
                    (dense.values[i] - expect).norm() <= 1e-13 * expect.norm().max(1e-6),
                    "({l},{m}) tuple {a:?}|{b:?}"
                );
                i += 1;
            }
        }
    }
}

#[test]
fn gauss_hermite_exact_on_monomials() {
    // The integral S-transform equals the pairing form exactly on monomial
    // chaos vectors whose per-axis degree is within 2 * order - 1.
    let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
    let xi = [c(0.4, 0.1), c(-0.3, 0.2)];
    let eta = [c(0.1, 0.1), c(0.2, -0.6)];
    let order = 3;
    for (l, m) in [(0usize, 0usize), (1, 0), (2, 1), (4, 4), (3, 4)] {
        for idx_l in ckslab::chaos::multi_indices(2, l) {
            for idx_m in ckslab::chaos::multi_indices(2, m) {
                let mut phi = ChaosVector::new(space.clone());
                let mut k = KernelTensor::zero(2, l, m);
                k.set_orbit(&idx_l, &idx_m, c(1.0, 0.5)).unwrap();
                phi.insert_kernel(k).unwrap();
                let pairing_form = s_transform(&phi, &xi, &eta);
                let integral = s_transform_integral(&phi, &xi, &eta, order).unwrap();
                assert!(integral.exact);
                assert!(
                    (pairing_form - integral.value).norm() <= 1e-12 * pairing_form.norm().max(1.0),
                    "monomial ({idx_l:?}, {idx_m:?})"
                );
            }
        }
    }
}
