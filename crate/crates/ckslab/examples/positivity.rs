//! Positivity of generalized functions and pseudo-positivity of operators:
//! the omega test function with its explicit bound, the sound falsifier
//! over squares of test functions, and the rank-one operator a product
//! measure induces.
//!
//! Run with: `cargo run -p ckslab --example positivity`

use ckslab::chaos::{ChaosVector, SpaceModel};
use ckslab::growth::parse_growth_spec;
use ckslab::measures::{
    check_omega_bound, omega_bound_constant, omega_test_function, positivity_probe,
    pseudo_positivity_probe, ComponentMeasure, GeneralizedFunction, ProductMeasureModel,
    PseudoPositiveOperator,
};
use num_complex::Complex64;

fn main() {
    let space = SpaceModel::new(vec![2.0]).unwrap();
    let u = parse_growth_spec("exp").unwrap();

    // omega(x, y) = L_u(<x,x>_{-q}/16) L_u(<y,y>_{-q}/16) stays below the
    // (2e/log 2)-weighted envelope on random complex points.
    let omega = omega_test_function(&u, &u, 1.0, 1.0, &space).unwrap();
    let zero = [Complex64::new(0.0, 0.0)];
    println!("omega(0, 0) = {:.8}", omega.eval(&zero, &zero).unwrap().re);
    println!("bound constant 2e/log 2 = {:.8}", omega_bound_constant());
    let rep = check_omega_bound(&omega, &u, &u, 1000, 3.0, 17).unwrap();
    println!("omega bound over 1000 points: {:?} ({})\n", rep.verdict, rep.detail);

    // A product measure always passes the positivity falsifier.
    let model = ProductMeasureModel::new(
        ComponentMeasure::parse("gaussian:sigma=1.0", 1).unwrap(),
        ComponentMeasure::parse("gaussian:sigma=1.0", 1).unwrap(),
        space.clone(),
    )
    .unwrap();
    let target = GeneralizedFunction::Measure { model: model.clone(), n_mc: 20_000 };
    let rep = positivity_probe(&target, 2, 6, 5).unwrap();
    println!(
        "gaussian product measure: {:?} (min pairing {:.4} over {} test functions)",
        rep.verdict, rep.min_value, rep.family_size
    );

    // A negated constant is caught immediately.
    let bad = GeneralizedFunction::Chaos(ChaosVector::constant(space.clone(), Complex64::new(-1.0, 0.0)));
    let rep = positivity_probe(&bad, 2, 4, 5).unwrap();
    println!("negated constant: {:?} (min pairing {:.4})", rep.verdict, rep.min_value);

    // Signed point masses are exposed by tilted squared exponentials.
    let signed = GeneralizedFunction::SignedPointMasses {
        space: space.clone(),
        terms: vec![(2.0, vec![0.0], vec![0.0]), (-1.0, vec![2.0], vec![2.0])],
    };
    let rep = positivity_probe(&signed, 3, 16, 5).unwrap();
    println!("signed point masses: {:?} (min pairing {:.4})\n", rep.verdict, rep.min_value);

    // Operators: the measure-induced rank-one form is never negative on
    // squares; a negated diagonal channel is found by the pair search.
    let op = PseudoPositiveOperator::from_product_measure(&model, 4, 0, 7).unwrap();
    let rep = pseudo_positivity_probe(&op, 2, 10, 7).unwrap();
    println!(
        "measure-induced operator: {:?} over {} pairs",
        rep.verdict, rep.pairs_tested
    );
    let mut negated = PseudoPositiveOperator::identity(&space, 4);
    negated.negate_diagonal(&[0, 0]).unwrap();
    let rep = pseudo_positivity_probe(&negated, 2, 6, 7).unwrap();
    println!(
        "negated-diagonal operator: {:?} (min value {:.4}, witness {:?})",
        rep.verdict, rep.min_value, rep.witness
    );
}
