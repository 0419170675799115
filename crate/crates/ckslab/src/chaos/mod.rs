//! Finite-dimensional model of the complex Gaussian space: the eigenvalue
//! scale, symmetric kernels stored over sorted multi-indices, chaos vectors
//! with the test/dual/sup norms and bilinear pairing, exponential vectors,
//! and the multiple S-transform in both its pairing and quadrature forms.
//!
//! Conventions, fixed once here and used everywhere:
//!
//! * The weighted vector norm is `|x|_p^2 = sum_j lambda_j^{2p} |x_j|^2`,
//!   so `p` may be negative for the dual scale.
//! * The Hilbert-Schmidt embedding norm is
//!   `hs(q, p) = sum_j lambda_j^{-2(q-p)}` for `q > p`, consistent with the
//!   norm convention above.
//! * A chaos vector evaluates as the holomorphic polynomial
//!   `phi(x, y) = sum <f_{l,m}, x^l (x) y^m>` in two independent complex
//!   arguments; each argument carries a standard complex Gaussian (real and
//!   imaginary parts independent with variance 1/2), under which monomials
//!   of distinct bidegree are orthogonal and
//!   `||phi||^2 = sum l! m! |f_{l,m}|^2`.

mod equivalence;
mod kernel;
mod space;
mod stransform;
mod vector;

pub use equivalence::{norm_equivalence_experiment, NormEquivalenceReport};
pub use kernel::{multiplicity, KernelTensor, MultiIndex};
pub use space::SpaceModel;
pub use stransform::{s_transform, s_transform_integral, IntegralSTransform};
pub use vector::{
    exponential_vector, multi_indices, random_chaos_vector, random_single_block_vector,
    ChaosVector, SupNormEstimate,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChaosError {
    #[error("invalid space model: {0}")]
    InvalidSpace(String),
    #[error("operands live on different space models")]
    SpaceMismatch,
    #[error("kernel index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("serialization: {0}")]
    Serialization(String),
    #[error(transparent)]
    Transform(#[from] crate::transforms::TransformError),
}
