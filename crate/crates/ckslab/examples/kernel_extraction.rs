//! Cauchy contour extraction of kernel coefficients and the bound
//! machinery around it: the proof-optimal radius, growth certificates,
//! per-bidegree kernel bounds, and the inverse S-transform round trip.
//!
//! Run with: `cargo run -p ckslab --example kernel_extraction`

use ckslab::analytic::{
    check_growth_condition, optimal_radius, reconstruct_chaos, taylor_coeffs, taylor_table,
    verify_kernel_bounds, AnalyticFunction, BoundDirection, ContourSpec, RadiusPolicy,
    SampleCloud,
};
use ckslab::chaos::{random_chaos_vector, s_transform, SpaceModel};
use ckslab::growth::parse_growth_spec;
use num_complex::Complex64;

fn main() {
    let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
    let u = parse_growth_spec("exp").unwrap();

    // Extract a single monomial coefficient through iterated contours.
    let f = AnalyticFunction::from_fn(2, |xi, eta| xi[0] * xi[0] * eta[1] * Complex64::new(2.5, -1.0));
    let spec = ContourSpec::new(1.0, 1.0, 12).unwrap();
    let k = taylor_coeffs(&f, 2, 1, spec).unwrap();
    println!("coefficient at xi_0^2 eta_1: {:.6}", k.orbit(&[0, 0], &[1]));

    // The radius minimizing the Cauchy bound, with the bound value it
    // certifies.
    for n in [1, 2, 4] {
        let opt = optimal_radius(&u, 1.0, n).unwrap();
        println!(
            "optimal contour radius for degree {n}: r* = {:.6}, log bound = {:.6}",
            opt.radius, opt.log_bound
        );
    }

    // End-to-end pipeline on the transform of a random vector.
    let phi = random_chaos_vector(&space, 3, 3, 21);
    let f = AnalyticFunction::from_s_transform(&phi);
    let cloud = SampleCloud::generate(2, 24, 8.0, 3);
    let cert = check_growth_condition(&f, &space, &u, &u, 1.0, 1.0, 1.0, 1.0, None, &cloud);
    println!(
        "\nmeasured growth constant over {} cloud points: C = {:.4}",
        cert.n_points, cert.c_hat
    );

    let kernels = taylor_table(&f, 3, 3, ContourSpec::new(1.0, 1.0, 16).unwrap()).unwrap();
    let report = verify_kernel_bounds(
        &kernels, &space, cert.c_hat, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, &u, &u,
        BoundDirection::DualSide,
    )
    .unwrap();
    println!("kernel bounds with measured C: {:?} ({})", report.verdict, report.detail);

    // Tampering is caught with the offending bidegree.
    let mut tampered = kernels.clone();
    let bad = tampered.get_mut(&(2, 1)).unwrap();
    *bad = bad.scale(Complex64::new(1e6, 0.0));
    let report = verify_kernel_bounds(
        &tampered, &space, cert.c_hat, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, &u, &u,
        BoundDirection::DualSide,
    )
    .unwrap();
    println!(
        "after inflating one kernel by 1e6: {:?} at bidegree ({}, {})",
        report.verdict, report.data["worst_l"], report.data["worst_m"]
    );

    // Inverse transform: reconstruct and compare at a fresh point.
    let back = reconstruct_chaos(&f, &space, 3, 3, RadiusPolicy::Fixed(1.0)).unwrap();
    let xi = [Complex64::new(0.2, 0.1), Complex64::new(-0.1, 0.3)];
    let eta = [Complex64::new(0.4, 0.0), Complex64::new(0.0, -0.2)];
    let gap = (s_transform(&back, &xi, &eta) - f.eval(&xi, &eta)).norm();
    println!("\nreconstruction gap at a fresh point: {gap:.2e}");
}
