//! The growth-function catalog and the Legendre transform
//! `l_u(t) = inf_{r>0} u(r)/r^t`, compared against closed forms.
//!
//! Run with: `cargo run -p ckslab --example legendre_catalog`

use ckslab::growth::parse_growth_spec;
use ckslab::transforms::{legendre, TransformTable};

fn main() {
    for spec in ["exp", "kondratiev:beta=0.5", "bell", "bell_w", "ouerdiane:k=1.5"] {
        let u = parse_growth_spec(spec).unwrap();
        println!(
            "{spec:22} log u(1) = {:+.6}   claims {:?}",
            u.log_u(1.0),
            u.claimed_properties()
        );
    }
    println!();

    let u = parse_growth_spec("exp").unwrap();
    println!("Legendre transform of the exponential weight:");
    println!("{:>6} {:>14} {:>14} {:>12}", "t", "log l(t)", "closed form", "argmin r");
    for t in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0] {
        let res = legendre(&u, t).unwrap();
        let closed = u.closed_form_legendre(t).unwrap();
        println!(
            "{t:6.1} {:14.8} {closed:14.8} {:12.6}",
            res.log_value, res.argmin_r
        );
    }
    println!();

    // A sampled table over a linear grid, as the CLI emits it.
    let ts: Vec<f64> = (0..21).map(|i| 0.5 * i as f64).collect();
    let table = TransformTable::build(&u, &ts).unwrap();
    println!(
        "table over {} points used {} objective evaluations in total",
        table.t_grid.len(),
        table.total_evals
    );
}
