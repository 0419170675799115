//! The multiple S-transform: exponential vectors, the pairing form, and
//! the Gauss-Hermite quadrature form over the complex Gaussian — the two
//! agree to quadrature exactness on polynomials.
//!
//! Run with: `cargo run -p ckslab --example s_transform`

use ckslab::chaos::{
    exponential_vector, random_chaos_vector, s_transform, s_transform_integral, SpaceModel,
};
use ckslab::growth::parse_growth_spec;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() {
    let space = SpaceModel::new(vec![2.0, 3.0]).unwrap();

    // Exponential vectors pair to an exponential of the parameter products.
    let xi0 = [c(0.3, 0.1), c(-0.2, 0.0)];
    let eta0 = [c(0.1, -0.1), c(0.05, 0.2)];
    let ev = exponential_vector(&space, &xi0, &eta0, 16, 16).unwrap();
    let xi = [c(0.2, -0.3), c(0.4, 0.1)];
    let eta = [c(-0.3, 0.2), c(0.1, 0.0)];
    let s_ev = s_transform(&ev, &xi, &eta);
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    };
    let closed = ((dot(&xi0, &xi) + dot(&eta0, &eta)) * 2.0).exp();
    println!("S(exponential vector) = {s_ev:.10}");
    println!("closed form           = {closed:.10}");

    // Pairing form vs quadrature form on a random polynomial vector.
    let phi = random_chaos_vector(&space, 4, 4, 11);
    let pairing_form = s_transform(&phi, &xi, &eta);
    for order in [2, 3, 5] {
        let integral = s_transform_integral(&phi, &xi, &eta, order).unwrap();
        println!(
            "order {order}: quadrature {:.12}  gap {:.2e}  certified exact: {}",
            integral.value,
            (integral.value - pairing_form).norm(),
            integral.exact
        );
    }

    // The weighted norms price the same vector on both sides of the triple.
    let u = parse_growth_spec("exp").unwrap();
    println!(
        "\n||phi||_(1,1) = {:.6}   ||phi||_(-1,-1)* = {:.6}",
        phi.norm_test(&u, &u, 1.0, 1.0).unwrap(),
        phi.norm_dual(&u, &u, 1.0, 1.0).unwrap()
    );
}
