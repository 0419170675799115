//! Weight sequences `alpha_u(n) = (l_u(n) n!)^{-1}`, the L-function power
//! series rebuilt from Legendre values, and the growth inequalities tying
//! `L_u` back to `u`.
//!
//! Run with: `cargo run -p ckslab --example weight_sequences`

use ckslab::growth::parse_growth_spec;
use ckslab::transforms::{
    bound_check_grid, l_function, verify_l_upper_bound, verify_l_lower_bound, verify_l_sqrt_bound,
    weight_sequence,
};

fn main() {
    let u = parse_growth_spec("exp").unwrap();
    let ws = weight_sequence(&u, 10).unwrap();
    println!("weight sequence of the exponential weight:");
    println!("{:>4} {:>14} {:>14}", "n", "alpha(n)", "log l(n)");
    for n in 0..=10 {
        println!("{n:4} {:14.8} {:14.8}", ws.log_alpha[n].exp(), ws.log_legendre[n]);
    }
    println!("root-decay diagnostic (l(n)^(1/n) -> 0): {}", ws.root_decay_diagnostic());

    println!("\nL-function values with certified truncation:");
    for r in [0.0, 0.5, 1.0, 5.0, 20.0] {
        let res = l_function(&u, r, 1e-12).unwrap();
        println!("  log L({r:4.1}) = {:14.8}   ({} terms)", res.log_value, res.degree);
    }

    let grid = bound_check_grid();
    let r1 = verify_l_upper_bound(&u, 2.0, &grid).unwrap();
    let r2 = verify_l_lower_bound(&u, 2.0, &grid).unwrap();
    let r3 = verify_l_sqrt_bound(&u, 2.0, 2.0, &grid).unwrap();
    println!("\ngrowth inequalities on the default check grid:");
    println!("  L(r) <= (ea/log a) u(ar):          {:?}, min log slack {:.4}", r1.verdict, r1.margin);
    println!("  u(r) <= C L(2^k r), measured C:    {:?}, C = {:.6}", r2.verdict, r2.data["c_hat"]);
    println!("  L(r) <= sqrt(l(0) ea/log a) u^1/2: {:?}, min log slack {:.4}", r3.verdict, r3.margin);
}
