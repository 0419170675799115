//! The dual Legendre transform `u*(r) = sup_s exp(2 sqrt(rs))/u(s)`:
//! self-duality of the exponential weight, the closed-form dual of the
//! Kondratiev family, the involution, and an honest divergence report.
//!
//! Run with: `cargo run -p ckslab --example dual_transforms`

use ckslab::growth::parse_growth_spec;
use ckslab::transforms::{dual_growth_function, dual_legendre, verify_dual_legendre_identity};

fn main() {
    let exp = parse_growth_spec("exp").unwrap();
    println!("self-duality of u(r) = e^r:");
    for r in [0.0, 1.0, 10.0, 100.0] {
        let d = dual_legendre(&exp, r).unwrap();
        println!("  log u*({r:5.1}) = {:12.8}  (maximizer s* = {:.6})", d.log_value, d.argmax_s);
    }

    let kond = parse_growth_spec("kondratiev:beta=0.5").unwrap();
    println!("\nkondratiev beta = 0.5 against its closed-form dual:");
    for r in [0.5, 1.0, 4.0] {
        let d = dual_legendre(&kond, r).unwrap();
        println!(
            "  numeric {:12.8}   closed form {:12.8}",
            d.log_value,
            kond.closed_form_dual(r).unwrap()
        );
    }

    // The double dual returns to the original for the self-dual weight.
    let once = dual_growth_function(&exp);
    let twice = dual_growth_function(&once);
    println!("\ninvolution: log u**(3) = {:.8} (log u(3) = 3)", twice.log_u(3.0));

    // Two independent routes to l_{u*}: the numeric transform of the
    // numeric dual, and the identity through l_u.
    let rep = verify_dual_legendre_identity(&kond, &[0.1, 1.0, 5.0, 20.0]).unwrap();
    println!(
        "\ntwo-path identity for l_u*: verdict {:?}, max rel discrepancy {:.2e}",
        rep.verdict, rep.data["max_rel_discrepancy"]
    );

    // u(r) = exp(sqrt(r)) grows too slowly for the dual to exist at r = 1.
    let slow = parse_growth_spec("ouerdiane:k=1").unwrap();
    match dual_legendre(&slow, 1.0) {
        Err(e) => println!("\nouerdiane k=1 at r=1: {e}"),
        Ok(_) => unreachable!("the supremum genuinely diverges here"),
    }
}
