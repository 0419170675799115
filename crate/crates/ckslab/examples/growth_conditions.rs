//! Grid-level membership checks: the U-conditions, the two convexity
//! classes, the theta correspondence, and the equivalence search between
//! growth functions.
//!
//! Run with: `cargo run -p ckslab --example growth_conditions`

use ckslab::growth::{
    check_convexity_class, check_equivalence, check_u_condition, parse_growth_spec, theta_from_u,
    ConvexityClass, Grid, UCondition, CONDITION_TOL,
};
use ckslab::transforms::dual_growth_function;

fn main() {
    let grid = Grid::default_growth();
    println!("U-conditions over the default grid [1e-6, 1e6] x 400:");
    for spec in ["exp", "kondratiev:beta=0.5", "bell", "bell_w"] {
        let u = parse_growth_spec(spec).unwrap();
        print!("{spec:22}");
        for cond in [UCondition::U0, UCondition::U1, UCondition::U2, UCondition::U3] {
            let rep = check_u_condition(&u, cond, &grid, CONDITION_TOL).unwrap();
            print!(" {cond}:{:?}", rep.verdict);
        }
        println!();
    }

    // bell_w is square-convex only beyond a threshold, which the checker
    // reports as r0.
    let w = parse_growth_spec("bell_w").unwrap();
    let rep = check_convexity_class(&w, ConvexityClass::LogXk(2.0), &grid, CONDITION_TOL).unwrap();
    println!(
        "\nbell_w square-convexity: {:?} ({})",
        rep.verdict, rep.detail
    );

    let exp = parse_growth_spec("exp").unwrap();
    let rep = check_convexity_class(&exp, ConvexityClass::LogExp, &grid, CONDITION_TOL).unwrap();
    println!("exp (log, exp)-convexity: {:?}", rep.verdict);

    // theta correspondence: theta(s) = log u(s^2) / 2 = s^2/2 for exp
    let theta = theta_from_u(&exp);
    println!("\ntheta_exp(2) = {} (s^2/2 at s = 2)", theta(2.0));

    // equivalence search: the dual of bell against the bell_w profile
    let bell = parse_growth_spec("bell").unwrap();
    let dual_bell = dual_growth_function(&bell);
    let search_grid = Grid::geometric(1.0, 1e5, 220).unwrap();
    let rep = check_equivalence(&dual_bell, &w, &search_grid).unwrap();
    println!("\nequivalence of dual(bell) and bell_w: {:?}", rep.verdict);
    println!("  constants: {}", rep.detail);

    let rep = check_equivalence(&exp, &bell, &search_grid).unwrap();
    println!("equivalence of exp and bell: {:?} (genuinely different growth)", rep.verdict);
}
