//! The integrability condition for product measures: seeded Monte-Carlo
//! estimates with batch-means confidence intervals, the exact Gaussian
//! oracle, the divergence heuristic, and the boundedness probe for the
//! induced functional.
//!
//! Run with: `cargo run -p ckslab --example integrability`

use ckslab::chaos::SpaceModel;
use ckslab::growth::parse_growth_spec;
use ckslab::measures::{
    boundedness_probe, integrability_estimate, integrability_exact_gaussian, ComponentMeasure,
    MeasureKind, ProductMeasureModel,
};

fn main() {
    let space = SpaceModel::new(vec![2.0]).unwrap();
    let u = parse_growth_spec("exp").unwrap();
    let model = |sigma2: f64| {
        ProductMeasureModel::new(
            ComponentMeasure::new(MeasureKind::Gaussian { sigma: sigma2.sqrt() }, 1).unwrap(),
            ComponentMeasure::new(MeasureKind::Gaussian { sigma: sigma2.sqrt() }, 1).unwrap(),
            space.clone(),
        )
        .unwrap()
    };

    println!("integral of u^(1/2) x u^(1/2) against N(0, s2) x N(0, s2), p = 1/2, lambda = 2:");
    for sigma2 in [0.25, 1.0, 3.0] {
        let est = integrability_estimate(&model(sigma2), &u, &u, 0.5, 0.5, 100_000, 7).unwrap();
        let exact =
            integrability_exact_gaussian(&[sigma2.sqrt()], &[sigma2.sqrt()], 0.5, 0.5, &space);
        println!(
            "  s2 = {sigma2:4}: estimate {:10.4} +/- {:7.4}  exact {exact:8.4}  verdict {:?}",
            est.estimate, est.ci_half_width, est.verdict
        );
    }

    // The induced functional is bounded by the integral times the sup norm.
    let rep = boundedness_probe(&model(1.0), &u, &u, 0.5, 0.5, 10, 3, 50_000, 7).unwrap();
    println!("\nboundedness probe over {} random vectors per degree:", rep.family_size);
    for (deg, k) in &rep.k_hat_by_degree {
        println!("  degree <= {deg}: measured K = {k:.4}");
    }
    println!(
        "  K_hat = {:.4} <= integral + CI = {:.4} + {:.4}: {}",
        rep.k_hat,
        rep.integral_estimate,
        rep.integral_ci,
        rep.within_integral_bound
    );

    // The measure mini-language drives the same machinery from strings.
    let heavy = ComponentMeasure::parse("student_t:nu=3", 1).unwrap();
    let gauss = ComponentMeasure::parse("gaussian:sigma=1.0", 1).unwrap();
    let mixed = ProductMeasureModel::new(heavy, gauss, space.clone()).unwrap();
    let est = integrability_estimate(&mixed, &u, &u, 0.25, 0.25, 50_000, 9).unwrap();
    println!(
        "\nstudent_t(3) x gaussian at p = 1/4: estimate {:.4} ({:?})",
        est.estimate, est.verdict
    );
}
