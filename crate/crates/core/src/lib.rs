//! Energy-minimal radial harmonic diffeomorphisms between circular annuli.
//!
//! For a radial metric `rho(|w|)` on a target annulus `A(q, Q)` and a domain
//! annulus `A(r, 1)`, the minimizers of the rho-weighted Dirichlet energy are
//! `w(s e^{it}) = p(s) e^{it}`, where the profile solves
//! `p'(s) = sqrt(p^2 + c / rho(p)) / s` with `p(1) = Q`, and the constant `c`
//! is fixed by the modulus condition `p(r) = q`.
//!
//! The crate is organised as:
//!
//! - [`metric`]: radial densities and their admissibility diagnostics,
//! - [`numerics`]: quadrature, root finding, minimization, ODE integration and
//!   interpolation,
//! - [`solver`]: the variational constant, the profile and the critical
//!   (Nitsche) configuration,
//! - [`field`]: pointwise derivatives, Hopf quantity, energy and distortion
//!   constants,
//! - [`verify`]: finite-difference residuals and the verification suite.

// `!(a < b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod metric;
pub mod numerics;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FieldSample, PolarGrid};
pub use metric::{MetricDiagnostics, RadialMetric};
pub use solver::{Classification, MinimizerProfile, ProblemSpec, SolverConfig};
pub use verify::{CheckRecord, VerificationReport};
