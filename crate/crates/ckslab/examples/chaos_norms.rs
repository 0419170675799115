//! The finite-dimensional chaos model: eigenvalue scale, sparse symmetric
//! kernels, the weighted test/dual norms, the bilinear pairing, and the
//! sup-norm estimator.
//!
//! Run with: `cargo run -p ckslab --example chaos_norms`

use ckslab::chaos::{random_chaos_vector, ChaosVector, KernelTensor, SpaceModel};
use ckslab::growth::parse_growth_spec;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() {
    let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();
    let u = parse_growth_spec("exp").unwrap();
    println!(
        "space: d = {}, lambda = {:?}, rho = {}, hs(3,1) = {:.6}",
        space.dim(),
        space.lambda(),
        space.rho(),
        space.hs_embedding_sq(3.0, 1.0)
    );

    // A two-kernel vector: f_{1,1} = e0 (x) e0 plus a symmetrized pair.
    let mut phi = ChaosVector::new(space.clone());
    let mut k11 = KernelTensor::zero(2, 1, 1);
    k11.set_orbit(&[0], &[0], c(1.0, 0.0)).unwrap();
    phi.insert_kernel(k11).unwrap();
    let mut k20 = KernelTensor::zero(2, 2, 0);
    k20.add_sym_term(&[0, 1], &[], c(0.5, -0.5)).unwrap();
    phi.insert_kernel(k20).unwrap();

    println!("\nnorms of a small two-kernel vector:");
    println!("  L2 norm          = {:.8}", phi.l2_norm());
    for p in [0.0, 0.5, 1.0, 2.0] {
        println!(
            "  test norm  (p={p:3}) = {:.8}",
            phi.norm_test(&u, &u, p, p).unwrap()
        );
    }
    println!(
        "  dual norm  (p=1)   = {:.8}",
        phi.norm_dual(&u, &u, 1.0, 1.0).unwrap()
    );

    // pairing and evaluation
    let psi = random_chaos_vector(&space, 2, 2, 5);
    println!("\npairing with a random vector: {:.6}", phi.pairing(&psi).unwrap());
    let x = [c(0.5, 0.1), c(-0.3, 0.2)];
    let y = [c(0.2, 0.0), c(0.1, -0.4)];
    println!("phi(x, y) = {:.6}", phi.evaluate(&x, &y));

    // the sup-norm estimator is a certified lower bound attained at the
    // reported point
    let est = phi.sup_norm_estimate(&u, &u, 1.0, 1.0, 16, 7);
    println!("\nsup-norm estimate (p = 1): {:.8}", est.value);
    println!("  attained at x = {:?}", est.argmax_x);

    // serialization round trip is byte-exact
    let text = psi.to_json();
    let back = ChaosVector::from_json(&text).unwrap();
    println!("\nJSON round trip byte-identical: {}", back.to_json() == text);
}
