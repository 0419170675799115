//! Experimental verification that the weighted-sum norms and the weighted
//! sup norms are equivalent on random chaos vectors, with explicit pinned
//! constants in both directions.
//!
//! Direction (sup <= C . sum): from `|phi(x,y)| <= sqrt(L_{u1} L_{u2}) ||phi||_{q1,q2}`
//! (Cauchy-Schwarz over bidegrees) and `L_u(r) <= (e a / log a) u(a r)` with
//! `a_i = min(e, rho^{-2(q_i - p_i)})`, giving
//! `C = prod_i sqrt(e a_i / log a_i)`.
//!
//! Direction (sum <= C' . sup): through the S-transform growth bound and
//! the kernel-coefficient bound. Two constants are available:
//!
//! * the *paper constant* `L^2 prod (1 - 8 e^2 hs_i)^{-1}`, whose
//!   precondition is `8 e^2 hs_i < 1`;
//! * the *exact-shift constant* `L^2 prod (1 - e^2 hs_i)^{-1}`: at this
//!   finite scale the S-transform is exactly the shift evaluation
//!   `F(xi, eta) = phi(sqrt2 xi, sqrt2 eta)`, so the growth bound holds
//!   with `K = 2` and no integral factor, requiring only `2 e^2 hs_i < 1`.
//!
//! The experiment checks the paper constant whenever its precondition is
//! satisfiable and falls back to the exact-shift constant otherwise; the
//! report says which route ran. `L` is the Gaussian integral
//! `E[u1(4|x|^2_{-q1})^{1/2}] E[u2(4|y|^2_{-q2})^{1/2}]`, evaluated by
//! Gauss-Hermite quadrature.

use serde::Serialize;

use super::vector::random_chaos_vector;
use super::{ChaosError, SpaceModel};
use crate::growth::{GrowthFunction, GrowthProperty};
use crate::quadrature::complex_gaussian_expectation_re;

const E2: f64 = std::f64::consts::E * std::f64::consts::E;

#[derive(Debug, Clone, Serialize)]
pub struct NormEquivalenceReport {
    pub n_samples: usize,
    pub cap_l: usize,
    pub cap_m: usize,
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
    pub hs1: f64,
    pub hs2: f64,
    /// `8 e^2 hs_i < 1` for both factors (the paper constant applies).
    pub paper_precondition_ok: bool,
    /// `2 e^2 hs_i < 1` for both factors (the exact-shift constant applies).
    pub shift_precondition_ok: bool,
    /// Which sum<=sup constant was asserted: "paper" or "exact-shift".
    pub route: String,
    /// Gaussian integral L (quadrature value).
    pub l_constant: f64,
    pub ae_constant: f64,
    pub ae_scales: (f64, f64),
    pub ea_constant: f64,
    /// max over samples of sup_est / (C_AE ||phi||_q); holds iff <= 1.
    pub worst_ae_ratio: f64,
    /// max over samples of ||phi||_p^2 / (C_EA sup_est^2); holds iff <= 1.
    pub worst_ea_ratio: f64,
    pub ae_holds: bool,
    pub ea_holds: bool,
}

impl NormEquivalenceReport {
    pub fn both_hold(&self) -> bool {
        self.ae_holds && self.ea_holds
    }
}

/// Run the two-sided norm comparison on `n_samples` random chaos vectors
/// with degrees up to `(cap_l, cap_m)`.
#[allow(clippy::too_many_arguments)]
pub fn norm_equivalence_experiment(
    space: &SpaceModel,
    u1: &GrowthFunction,
    u2: &GrowthFunction,
    p1: f64,
    p2: f64,
    q1: f64,
    q2: f64,
    n_samples: usize,
    cap_l: usize,
    cap_m: usize,
    seed: u64,
    gh_order: usize,
) -> Result<NormEquivalenceReport, ChaosError> {
    if !(q1 > p1 && q2 > p2) {
        return Err(ChaosError::Precondition(format!(
            "needs q_i > p_i, got p = ({p1}, {p2}), q = ({q1}, {q2})"
        )));
    }
    for u in [u1, u2] {
        if !(u.claims(GrowthProperty::LogExpConvex) && u.claims(GrowthProperty::U1)) {
            return Err(ChaosError::Precondition(format!(
                "{} must claim U1 and (log, exp)-convexity for the sup<=sum constant",
                u.name()
            )));
        }
    }
    let hs1 = space.hs_embedding_sq(q1, p1);
    let hs2 = space.hs_embedding_sq(q2, p2);
    let paper_ok = 8.0 * E2 * hs1 < 1.0 && 8.0 * E2 * hs2 < 1.0;
    let shift_ok = 2.0 * E2 * hs1 < 1.0 && 2.0 * E2 * hs2 < 1.0;
    if !shift_ok {
        return Err(ChaosError::Precondition(format!(
            "2 e^2 hs = ({:.4}, {:.4}) must be < 1 for the sum<=sup direction",
            2.0 * E2 * hs1,
            2.0 * E2 * hs2
        )));
    }

    // L = E[u1(4|x|^2_{-q1})^{1/2}] E[u2(4|y|^2_{-q2})^{1/2}]
    let d = space.dim();
    let factor = |u: &GrowthFunction, q: f64| -> f64 {
        complex_gaussian_expectation_re(d, gh_order, |z| {
            (0.5 * u.log_u(4.0 * space.weighted_norm_sq(z, -q))).exp()
        })
    };
    let l_constant = factor(u1, q1) * factor(u2, q2);

    let a1 = std::f64::consts::E.min(space.rho().powf(-2.0 * (q1 - p1)));
    let a2 = std::f64::consts::E.min(space.rho().powf(-2.0 * (q2 - p2)));
    let ae_constant = ((std::f64::consts::E * a1 / a1.ln()).sqrt())
        * ((std::f64::consts::E * a2 / a2.ln()).sqrt());

    let (route, ea_constant) = if paper_ok {
        (
            "paper".to_string(),
            l_constant * l_constant / ((1.0 - 8.0 * E2 * hs1) * (1.0 - 8.0 * E2 * hs2)),
        )
    } else {
        (
            "exact-shift".to_string(),
            l_constant * l_constant / ((1.0 - E2 * hs1) * (1.0 - E2 * hs2)),
        )
    };

    let mut worst_ae = 0.0f64;
    let mut worst_ea = 0.0f64;
    for i in 0..n_samples {
        let phi = random_chaos_vector(space, cap_l, cap_m, seed.wrapping_add(i as u64));
        let norm_q = phi.norm_test(u1, u2, q1, q2)?;
        let norm_p = phi.norm_test(u1, u2, p1, p2)?;
        // sup <= C sum compares the sup at the lower levels against the
        // sum norm at the higher ones; sum <= C' sup runs the other way.
        let sup_p = phi
            .sup_norm_estimate(u1, u2, p1, p2, 12, seed.wrapping_add(10_000 + i as u64))
            .value;
        let sup_q = phi
            .sup_norm_estimate(u1, u2, q1, q2, 12, seed.wrapping_add(20_000 + i as u64))
            .value;
        worst_ae = worst_ae.max(sup_p / (ae_constant * norm_q));
        worst_ea = worst_ea.max(norm_p * norm_p / (ea_constant * sup_q * sup_q));
    }

    Ok(NormEquivalenceReport {
        n_samples,
        cap_l,
        cap_m,
        p1,
        p2,
        q1,
        q2,
        hs1,
        hs2,
        paper_precondition_ok: paper_ok,
        shift_precondition_ok: shift_ok,
        route,
        l_constant,
        ae_constant,
        ae_scales: (a1, a2),
        ea_constant,
        worst_ae_ratio: worst_ae,
        worst_ea_ratio: worst_ea,
        ae_holds: worst_ae <= 1.0,
        ea_holds: worst_ea <= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::ChaosVector;
    use crate::growth::catalog_lookup;
    use num_complex::Complex64;
    use std::collections::BTreeMap;

    fn exp_fn() -> GrowthFunction {
        catalog_lookup("exp", &BTreeMap::new()).unwrap()
    }

    #[test]
    fn constant_vector_satisfies_both_directions() {
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let u = exp_fn();
        let phi = ChaosVector::constant(space.clone(), Complex64::new(1.0, 0.0));
        // For the constant, all three norms are 1, so the constants are
        // trivially respected as long as they exceed 1.
        let nq = phi.norm_test(&u, &u, 3.0, 3.0).unwrap();
        let np = phi.norm_test(&u, &u, 1.0, 1.0).unwrap();
        let sup = phi.sup_norm_estimate(&u, &u, 3.0, 3.0, 4, 3).value;
        assert!((nq - 1.0).abs() < 1e-10 && (np - 1.0).abs() < 1e-10);
        assert!((sup - 1.0).abs() < 1e-8);
    }

    #[test]
    fn experiment_runs_on_small_population() {
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let u = exp_fn();
        let rep = norm_equivalence_experiment(
            &space, &u, &u, 1.0, 1.0, 3.0, 3.0, 10, 3, 3, 77, 32,
        )
        .unwrap();
        // lambda = 2, q - p = 2: hs = 2^-4; the paper constant's
        // precondition 8 e^2 / 16 < 1 fails, the exact-shift one holds.
        assert!(!rep.paper_precondition_ok);
        assert!(rep.shift_precondition_ok);
        assert_eq!(rep.route, "exact-shift");
        assert!(rep.both_hold(), "ae {} ea {}", rep.worst_ae_ratio, rep.worst_ea_ratio);
        // L has the closed form prod (1 - 2 lambda^{-2q})^{-1} per factor
        // for the exponential weight.
        let l_cf = (1.0 / (1.0 - 2.0 * 2f64.powf(-6.0))).powi(2);
        assert!((rep.l_constant - l_cf).abs() < 1e-9 * l_cf, "{} vs {l_cf}", rep.l_constant);
    }

    #[test]
    fn paper_route_engages_when_gap_is_wide() {
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let u = exp_fn();
        let rep = norm_equivalence_experiment(
            &space, &u, &u, 1.0, 1.0, 4.0, 4.0, 8, 3, 3, 78, 32,
        )
        .unwrap();
        // q - p = 3: 8 e^2 2^-6 = 0.9236 < 1.
        assert!(rep.paper_precondition_ok);
        assert_eq!(rep.route, "paper");
        assert!(rep.both_hold());
    }

    #[test]
    fn equal_levels_violate_the_precondition() {
        let space = SpaceModel::new(vec![2.0]).unwrap();
        let u = exp_fn();
        let err = norm_equivalence_experiment(
            &space, &u, &u, 1.0, 1.0, 1.0, 1.0, 4, 2, 2, 79, 16,
        )
        .unwrap_err();
        assert!(matches!(err, ChaosError::Precondition(_)));
    }
}
