//! Growth-function calculus and desk-scale checks for CKS spaces over the
//! complex Gaussian space.
//!
//! The crate has four layers:
//!
//! * [`growth`] — growth functions `u` on `[0, inf)` kept in log domain,
//!   a catalog of the standard examples, and grid-level checkers for the
//!   U-conditions and convexity classes.
//! * [`transforms`] — the Legendre transform `l_u(t) = inf u(r)/r^t`, the
//!   dual transform `u*(r) = sup exp(2 sqrt(rs))/u(s)`, the L-function
//!   series, weight sequences, and verification of the growth inequalities
//!   relating them.
//! * [`chaos`] and [`analytic`] — a finite-dimensional model of the complex
//!   Gaussian space: symmetric kernels, chaos vectors, the test/dual/sup
//!   norms, the multiple S-transform with its quadrature form, Cauchy
//!   contour extraction of kernel coefficients, and growth/kernel bound
//!   certificates.
//! * [`measures`] — Monte-Carlo integrability estimates for product
//!   measures, the induced functional, the omega test function, and
//!   positivity / pseudo-positivity probes.
//!
//! Every operation is deterministic given its seed; see the `examples/`
//! directory for one runnable walkthrough per capability and [`cli`] for
//! the command-line front end.

pub mod analytic;
pub mod chaos;
pub mod cli;
pub mod growth;
pub mod measures;
pub mod numerics;
pub mod quadrature;
pub mod transforms;

pub use growth::{
    catalog_lookup, check_convexity_class, check_equivalence, check_u_condition,
    parse_growth_spec, ConditionReport, ConvexityClass, Grid, GrowthFunction, GrowthProperty,
    UCondition, Verdict,
};
pub use transforms::{
    dual_growth_function, dual_legendre, l_function, legendre, legendre_log, weight_sequence,
    TransformError,
};
