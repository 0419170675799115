//! Equivalence of the weighted-sum and weighted-sup norm families on
//! random chaos vectors, with the explicit constants of both directions
//! and the two available sum<=sup routes.
//!
//! Run with: `cargo run -p ckslab --example norm_equivalence`

use ckslab::chaos::{norm_equivalence_experiment, SpaceModel};
use ckslab::growth::parse_growth_spec;

fn main() {
    let space = SpaceModel::new(vec![2.0]).unwrap();
    let u = parse_growth_spec("exp").unwrap();

    for (p, q) in [(1.0, 3.0), (1.0, 4.0)] {
        let rep =
            norm_equivalence_experiment(&space, &u, &u, p, p, q, q, 50, 3, 3, 7, 40).unwrap();
        println!("levels (p, q) = ({p}, {q}):");
        println!("  hs embedding            = {:.6}", rep.hs1);
        println!(
            "  factor-8 precondition   = {} (8 e^2 hs = {:.4})",
            rep.paper_precondition_ok,
            8.0 * std::f64::consts::E.powi(2) * rep.hs1
        );
        println!("  route used              = {}", rep.route);
        println!("  L (Gaussian integral)   = {:.8}", rep.l_constant);
        println!(
            "  sup <= C ||.||: C = {:.4}, worst ratio {:.4} -> {}",
            rep.ae_constant,
            rep.worst_ae_ratio,
            if rep.ae_holds { "holds" } else { "violated" }
        );
        println!(
            "  ||.||^2 <= C' sup^2: C' = {:.4}, worst ratio {:.6} -> {}",
            rep.ea_constant,
            rep.worst_ea_ratio,
            if rep.ea_holds { "holds" } else { "violated" }
        );
        println!();
    }

    // p = q violates the precondition of the sum<=sup direction.
    match norm_equivalence_experiment(&space, &u, &u, 1.0, 1.0, 1.0, 1.0, 4, 2, 2, 7, 16) {
        Err(e) => println!("(p, q) = (1, 1): {e}"),
        Ok(_) => unreachable!("equal levels cannot satisfy the embedding precondition"),
    }
}
